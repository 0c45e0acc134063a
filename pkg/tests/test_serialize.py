from __future__ import annotations

import json

import pytest

from ekrkit.constructions import make_M_i
from ekrkit.family import SetFamily
from ekrkit.serialize import (
    FormatError,
    atomic_write,
    dumps,
    family_from_dict,
    family_from_text,
    family_to_dict,
    family_to_text,
    read_family,
    write_family,
)


def test_text_round_trip():
    F = make_M_i(7, 3, 3)
    text = family_to_text(F)
    assert text.splitlines()[0] == f"7 3 {len(F)}"
    assert family_from_text(text) == F


def test_text_mixed_family_uses_zero():
    F = SetFamily.of(4, [[1], [1, 2]])
    assert family_to_text(F).startswith("4 0 2")
    assert family_from_text(family_to_text(F)) == F


def test_text_comments_are_ignored():
    assert family_from_text("# a note\n3 2 1\n1 2\n") == SetFamily.of(3, [[1, 2]])


@pytest.mark.parametrize("text", ["", "3 2 2\n1 2\n", "3 2 1\n1 x\n", "3 3 1\n1 2\n", "3 2 2\n1 2\n2 1\n"])
def test_text_errors(text):
    with pytest.raises(FormatError):
        family_from_text(text)


def test_json_round_trip():
    F = make_M_i(7, 3, 4)
    assert family_from_dict(json.loads(json.dumps(family_to_dict(F)))) == F
    with pytest.raises(FormatError):
        family_from_dict({"blocks": []})


def test_files(tmp_path):
    F = make_M_i(7, 3, 3)
    for name in ("fam.json", "fam.txt"):
        write_family(tmp_path / name, F)
        assert read_family(tmp_path / name) == F
    (tmp_path / "broken.json").write_text("{not json")
    with pytest.raises(FormatError):
        read_family(tmp_path / "broken.json")


def test_atomic_write_leaves_no_temp_files(tmp_path):
    target = tmp_path / "out.json"
    atomic_write(target, "one")
    atomic_write(target, "two")
    assert target.read_text() == "two"
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]


def test_dumps_keeps_integer_lists_flat():
    obj = {"blocks": [[1, 2], [3]], "names": ["a"], "nested": {"x": [-1, 0]}}
    text = dumps(obj)
    assert "[1, 2]" in text and "[-1, 0]" in text
    assert json.loads(text) == obj

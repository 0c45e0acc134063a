"""Text and JSON formats for families, plus atomic file output."""

from __future__ import annotations

import json
import os
import re
import tempfile
from pathlib import Path
from typing import Any

from .family import FamilyError, SetFamily


class FormatError(FamilyError):
    pass


def family_to_text(F: SetFamily) -> str:
    k = F.uniformity() or 0
    lines = [f"{F.n} {k} {len(F)}"]
    lines += [" ".join(map(str, s)) for s in F.sets()]
    return "\n".join(lines) + "\n"


def family_from_text(text: str) -> SetFamily:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty family file")
    try:
        n, k, m = (int(tok) for tok in lines[0].split())
        blocks = [[int(tok) for tok in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise FormatError(f"malformed family text: {exc}") from None
    if len(blocks) != m:
        raise FormatError(f"header announces {m} blocks, found {len(blocks)}")
    F = _build(n, blocks)
    if k and blocks and F.uniformity() != k:
        raise FormatError(f"header says {k}-uniform but blocks disagree")
    return F


def family_to_dict(F: SetFamily) -> dict[str, Any]:
    return {"n": F.n, "blocks": F.sets()}


def family_from_dict(data: Any) -> SetFamily:
    if not isinstance(data, dict) or "n" not in data or "blocks" not in data:
        raise FormatError('family JSON needs keys "n" and "blocks"')
    try:
        return _build(int(data["n"]), [[int(e) for e in b] for b in data["blocks"]])
    except FormatError:
        raise
    except (TypeError, ValueError) as exc:
        raise FormatError(f"malformed family JSON: {exc}") from None


def _build(n: int, blocks: list[list[int]]) -> SetFamily:
    for b in blocks:
        if len(set(b)) != len(b) or any(not 1 <= e <= n for e in b):
            raise FormatError(f"block {b} is not a set of elements of [{n}]")
    try:
        return SetFamily.of(n, blocks)
    except FamilyError as exc:
        raise FormatError(str(exc)) from None


_FLAT_LIST = re.compile(r"\[\s*(-?\d+(?:,\s*-?\d+)*)\s*\]")


def dumps(obj: Any) -> str:
    """Indented JSON with lists of plain integers kept on one line."""
    text = json.dumps(obj, indent=2)
    return _FLAT_LIST.sub(lambda m: "[" + ", ".join(m.group(1).replace(",", " ").split()) + "]", text) + "\n"


def read_family(path: str | Path) -> SetFamily:
    """Load a family, choosing JSON or text by content."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        try:
            return family_from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON in {path}: {exc}") from None
    return family_from_text(text)


def write_family(path: str | Path, F: SetFamily) -> None:
    path = Path(path)
    if path.suffix == ".json":
        atomic_write(path, dumps(family_to_dict(F)))
    else:
        atomic_write(path, family_to_text(F))


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise

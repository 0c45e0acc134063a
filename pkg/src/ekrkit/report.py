"""Machine-readable verification reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .family import SetFamily, elements_of

CLAIM_IDS = (
    "claim31",
    "claim32",
    "claim33",
    "claim34",
    "claim35",
    "claim36",
    "claim41",
    "thm1",
    "thm2",
    "thm3",
    "thm4",
    "thm5-property",
    "frankl",
    "lemma22",
    "nocommon",
)


def family_json(F: SetFamily) -> dict[str, Any]:
    return {"n": F.n, "blocks": F.sets()}


def set_json(mask: int) -> list[int]:
    return elements_of(mask)


@dataclass
class VerificationReport:
    """Outcome of one claim check: verdict, named counts and supporting witnesses."""

    claim_id: str
    passed: bool
    numbers: dict[str, Any] = field(default_factory=dict)
    witnesses: list[Any] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.claim_id not in CLAIM_IDS:
            raise ValueError(f"unknown claim id {self.claim_id!r}")
        if not self.passed and not self.witnesses:
            raise ValueError(f"failed {self.claim_id} report must carry a witness")

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict[str, Any]:
        return {
            "claim_id": self.claim_id,
            "passed": self.passed,
            "numbers": self.numbers,
            "witnesses": self.witnesses,
            "notes": self.notes,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> VerificationReport:
        return cls(
            claim_id=data["claim_id"],
            passed=data["passed"],
            numbers=dict(data.get("numbers", {})),
            witnesses=list(data.get("witnesses", [])),
            notes=list(data.get("notes", [])),
        )

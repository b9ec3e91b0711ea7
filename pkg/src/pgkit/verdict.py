from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

KINDS = ("minor-found", "bound-holds", "witness", "refuted")


@dataclass(frozen=True)
class AnalysisVerdict:
    """Outcome of an analysis; positive kinds carry a replayable witness."""

    kind: str
    witness: dict[str, Any] | None = field(default=None)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown verdict kind {self.kind!r}")

    @property
    def positive(self) -> bool:
        return self.kind != "refuted"

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": self.witness}

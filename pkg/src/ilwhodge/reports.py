"""Verification report value type shared by the hierarchy and series checks."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["VerificationReport"]


@dataclass
class VerificationReport:
    """Outcome of one identity check.

    `status` is "ok" or "mismatch"; a mismatch carries the first differing
    locus in canonical scan order together with both values, so a fault is
    always localized.
    """

    name: str
    status: str
    order_checked: int
    first_mismatch: dict | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json_dict(self) -> dict:
        out = {
            "name": self.name,
            "status": self.status,
            "order_checked": self.order_checked,
        }
        if self.first_mismatch is not None:
            out["first_mismatch"] = self.first_mismatch
        return out

"""Tri-state verdict records returned by every decision procedure."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Any


class Value(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value.capitalize()


@dataclass(frozen=True)
class Verdict:
    """A decision together with the rule that produced it.

    ``reason`` is a short machine-readable code, ``rule`` names the criterion
    that was applied.  ``certificate`` is JSON-serializable (witness monomial,
    residue class, representative list or an obstruction record).
    ``assumptions`` lists the user-asserted flags the verdict relies on.
    """

    value: Value
    reason: str
    rule: str
    certificate: Any = None
    assumptions: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.reason:
            raise ValueError("a verdict must carry a reason")
        object.__setattr__(self, "value", Value(self.value))
        object.__setattr__(self, "assumptions", tuple(self.assumptions))
        object.__setattr__(self, "notes", tuple(self.notes))

    @classmethod
    def yes(cls, reason, rule, certificate=None, **kw) -> Verdict:
        return cls(Value.YES, reason, rule, certificate, **kw)

    @classmethod
    def no(cls, reason, rule, certificate=None, **kw) -> Verdict:
        return cls(Value.NO, reason, rule, certificate, **kw)

    @classmethod
    def unknown(cls, reason, rule, certificate=None, **kw) -> Verdict:
        return cls(Value.UNKNOWN, reason, rule, certificate, **kw)

    @property
    def is_yes(self) -> bool:
        return self.value is Value.YES

    @property
    def is_no(self) -> bool:
        return self.value is Value.NO

    def with_assumptions(self, *flags: str) -> Verdict:
        merged = tuple(dict.fromkeys(self.assumptions + tuple(flags)))
        return replace(self, assumptions=merged)

    def to_json(self) -> dict:
        return {
            "value": self.value.value,
            "reason": self.reason,
            "rule": self.rule,
            "certificate": self.certificate,
            "assumptions": list(self.assumptions),
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, data: dict) -> Verdict:
        return cls(
            Value(data["value"]),
            data["reason"],
            data["rule"],
            data.get("certificate"),
            tuple(data.get("assumptions", ())),
            tuple(data.get("notes", ())),
        )


@dataclass(frozen=True)
class Decision:
    """The F-split / F-regular (and optionally diagonal) verdicts for one instance."""

    fsplit: Verdict
    fregular: Verdict
    diagonal: Verdict | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def __getitem__(self, key: str) -> Verdict:
        v = getattr(self, key)
        if v is None:
            raise KeyError(key)
        return v

"""Flip-probability schedules and the FP0-FP7 property checks.

All values are exact rationals; decimal strings such as ``"0.324"`` are
parsed as ``324/1000`` so that the equalities among the FP inequalities are
decided exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("pass schedule values as strings or Fractions, not floats")
    return Fraction(str(value))


@dataclass(frozen=True)
class FlipSchedule:
    """Flip probabilities P_1, P_2, ... (zero past the end) and metric weight eta."""

    p: tuple[Fraction, ...]
    eta: Fraction = Fraction(0)
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(as_fraction(v) for v in self.p))
        object.__setattr__(self, "eta", as_fraction(self.eta))
        for i, v in enumerate(self.p, start=1):
            if not (0 <= v <= 1):
                raise ValueError(f"P_{i} = {v} is outside [0, 1]")

    def __getitem__(self, size: int) -> Fraction:
        """P_size, with P_0 = 0 (the empty cluster never flips)."""
        if size <= 0 or size > len(self.p):
            return Fraction(0)
        return self.p[size - 1]

    @property
    def support(self) -> int:
        """Largest j with P_j > 0."""
        return max((i for i, v in enumerate(self.p, start=1) if v), default=0)

    def replace(self, index: int | None = None, value=None, eta=None, name=None) -> FlipSchedule:
        p = list(self.p)
        if index is not None:
            while len(p) < index:
                p.append(Fraction(0))
            p[index - 1] = as_fraction(value)
        return FlipSchedule(tuple(p), self.eta if eta is None else eta, name or self.name)

    def to_json(self) -> str:
        return json.dumps({"P": [_dec(v) for v in self.p], "eta": _dec(self.eta)})


def _dec(v: Fraction) -> str:
    # exact decimal if the denominator allows it, else num/den
    d = v.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return f"{v.numerator}/{v.denominator}"
    digits = 0
    while (v * 10**digits).denominator != 1:
        digits += 1
    return f"{float(v):.{digits}f}" if digits < 15 else str(v)


SETTING_1_1 = FlipSchedule(
    ("1", "0.324", "0.154", "0.088", "0.044", "0.011"), "0.0469", "setting-1.1"
)
SETTING_1_1_PROOF = SETTING_1_1.replace(3, "0.1539", name="setting-1.1-p3-0.1539")
GLAUBER = FlipSchedule(("1",), "0", "glauber")
VIGODA = FlipSchedule(("1", "13/42", "1/6", "2/21", "1/21", "1/84"), "0", "vigoda")

PRESETS = {s.name: s for s in (SETTING_1_1, SETTING_1_1_PROOF, GLAUBER, VIGODA)}


def parse_schedule(text: str, name: str = "custom") -> FlipSchedule:
    data = json.loads(text)
    return FlipSchedule(tuple(data["P"]), data.get("eta", "0"), name)


def load_schedule(spec: str | Path) -> FlipSchedule:
    """Preset name or path to a JSON schedule file."""
    if str(spec) in PRESETS:
        return PRESETS[str(spec)]
    path = Path(spec)
    return parse_schedule(path.read_text(), name=path.stem)


@dataclass(frozen=True)
class Check:
    prop: str
    passed: bool
    detail: str
    tight: bool = False


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def by_property(self) -> dict[str, bool]:
        out: dict[str, bool] = {}
        for c in self.checks:
            out[c.prop] = out.get(c.prop, True) and c.passed
        return out

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def equalities(self) -> list[Check]:
        return [c for c in self.checks if c.passed and c.tight]


def _leq(prop: str, lhs_txt: str, lhs: Fraction, rhs_txt: str, rhs: Fraction) -> Check:
    rel = "==" if lhs == rhs else ("<" if lhs < rhs else ">")
    return Check(prop, lhs <= rhs, f"{lhs_txt} = {lhs} {rel} {rhs} = {rhs_txt}", lhs == rhs)


def _eq(prop: str, lhs_txt: str, lhs: Fraction, rhs: Fraction) -> Check:
    return Check(prop, lhs == rhs, f"{lhs_txt} = {lhs} (required {rhs})", lhs == rhs)


def validate_schedule(s: FlipSchedule) -> ValidationReport:
    """Check FP0-FP7 exactly; failures are report entries, never exceptions."""
    P = s.__getitem__
    top = max(len(s.p), 7) + 1
    checks = [
        _eq("FP0", "P_1", P(1), Fraction(1)),
        _leq("FP0", "P_2", P(2), "1/3", Fraction(1, 3)),
        _eq("FP0", "P_7", P(7), Fraction(0)),
    ]
    # FP0 also implies the tail beyond 7 vanishes under monotonicity
    for j in range(8, len(s.p) + 1):
        checks.append(_eq("FP0", f"P_{j}", P(j), Fraction(0)))
    for j in range(2, top):
        checks.append(_leq("monotone", f"P_{j}", P(j), f"P_{j - 1}", P(j - 1)))
    for j in range(3, top):
        checks.append(_leq("FP1", f"P_{j}", P(j), f"(2/3)P_{j - 1}", Fraction(2, 3) * P(j - 1)))
    checks.append(_leq("FP2", "P_2-P_3", P(2) - P(3), "1-P_2", 1 - P(2)))
    checks.append(_leq("FP2", "2(P_3-P_4)", 2 * (P(3) - P(4)), "P_2-P_3", P(2) - P(3)))
    for j in range(4, max(s.support, 3) + 2):
        checks.append(
            _leq("FP3", f"{j - 1}(P_{j}-P_{j + 1})", (j - 1) * (P(j) - P(j + 1)),
                 "2(P_3-P_4)", 2 * (P(3) - P(4)))
        )
    checks.append(_leq("FP4", "P_5-P_6", P(5) - P(6), "P_4-P_5", P(4) - P(5)))
    checks.append(_leq("FP4", "P_6-P_7", P(6) - P(7), "P_5-P_6", P(5) - P(6)))
    checks.append(_leq("FP5", "2P_2", 2 * P(2), "1-4P_4", 1 - 4 * P(4)))
    checks.append(_leq("FP6", "2P_3", 2 * P(3), "4P_4-P_5", 4 * P(4) - P(5)))
    checks.append(_leq("FP7", "eta", s.eta, "(6/19)P_2", Fraction(6, 19) * P(2)))
    return ValidationReport(tuple(checks))

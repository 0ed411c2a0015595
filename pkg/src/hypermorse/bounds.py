"""Closed-form bound evaluators and the constants they share."""
from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path


@dataclass(frozen=True)
class MorseConstants:
    """Named constants with their default values.

    ``a2_exponent_denominator`` selects between the two published forms of
    the exponential in ``A2`` (38 or 28). ``A3``/``A4`` are unspecified in the
    source and default to 1; ``r0``..``r4`` are geodesic-richness constants.
    """

    A1: Fraction = Fraction(312)
    a2_exponent_denominator: int = 38
    A3: float = 1.0
    A4: float = 1.0
    r0: float = 0.0
    r1: float = 0.0
    r2: float = 0.0
    r3: float = 0.0
    r4: float = 0.0

    def __post_init__(self):
        if self.a2_exponent_denominator not in (28, 38):
            raise ValueError("a2_exponent_denominator must be 28 or 38")
        if self.A1 != 4 * 78:
            raise ValueError("A1 is fixed at 4 * 78")

    @property
    def K(self) -> float:
        return math.log(2) / 19

    @property
    def A2(self) -> float:
        den = self.a2_exponent_denominator
        return 4 * (78 + 133 / math.log(2) * math.exp(157 * math.log(2) / den))

    def C0(self, delta: float) -> float:
        return delta / 4 * math.exp(-157 * self.K / 2)

    def replace(self, **changes) -> "MorseConstants":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["A1"] = int(self.A1)
        return out


_FIELDS = {f.name: f for f in dataclasses.fields(MorseConstants)}


def _parse_number(text: str):
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        return float(text)


def load_constants(path: str | Path, base: MorseConstants | None = None) -> MorseConstants:
    """Read overrides from JSON or from ``name = value`` lines."""
    base = base or MorseConstants()
    raw = Path(path).read_text()
    if raw.lstrip().startswith("{"):
        items = {k: (_parse_number(v) if isinstance(v, str) else v)
                 for k, v in json.loads(raw).items()}
    else:
        items = {}
        for lineno, line in enumerate(raw.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'name = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            items[key] = _parse_number(value)
    changes = {}
    for key, value in items.items():
        if key not in _FIELDS:
            raise ValueError(f"unknown constant {key!r}")
        if key == "a2_exponent_denominator":
            changes[key] = int(value)
        elif key == "A1":
            changes[key] = Fraction(value)
        else:
            changes[key] = float(value)
    return base.replace(**changes)


def morse_bound(lam, c, delta, consts: MorseConstants = MorseConstants()) -> float:
    """``4 lam^2 (78 c + (78 + 133/ln2 * e^(157 ln2 / den)) delta)``.

    With ``delta == 0`` the value is the exact rational ``312 lam^2 c``.
    """
    if lam < 1 or c < 0 or delta < 0:
        raise ValueError("need lambda >= 1, c >= 0, delta >= 0")
    exact = consts.A1 * Fraction(lam) ** 2 * Fraction(c) if _exact(lam, c) else None
    if delta == 0:
        return exact if exact is not None else float(consts.A1) * lam * lam * c
    return 4 * float(lam) ** 2 * (78 * float(c) + (consts.A2 / 4) * float(delta))


def _exact(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


def anti_morse_bound(lam, c, delta, consts: MorseConstants = MorseConstants()) -> float:
    """``A3 (c + delta) ln(lam)``."""
    if lam <= 1:
        raise ValueError("anti-Morse bound needs lambda > 1")
    return consts.A3 * (float(c) + float(delta)) * math.log(lam)


def contraction_bound(Delta, delta, R, L_Delta, consts: MorseConstants = MorseConstants()) -> float:
    """Projection-length bound for a curve kept at distance ``R`` from a geodesic.

    ``r = floor((R - Delta - 58 delta) / (19 delta)) * 19 delta`` and the
    result is ``max(4 delta / Delta * e^(-K r / delta) * (L_Delta + Delta), 8 delta)``.
    A tree (``delta == 0``) gives 0.
    """
    if Delta <= 0:
        raise ValueError("Delta must be positive")
    if delta == 0:
        return 0.0
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if R < Delta + 58 * delta:
        raise ValueError(f"R={R} is below the threshold Delta + 58 delta = {Delta + 58 * delta}")
    steps = math.floor((R - Delta - 58 * delta) / (19 * delta))
    r = steps * 19 * delta
    first = 4 * delta / Delta * math.exp(-consts.K * r / delta) * (L_Delta + Delta)
    return max(first, 8 * float(delta))


def prop1_bound(lam, c, R, consts: MorseConstants = MorseConstants()):
    """Tree-ball center displacement bound ``min{R, H + c + lam (c + 1)}``."""
    if R < 1:
        raise ValueError("R must be >= 1")
    H = morse_bound(lam, c, 0, consts)
    return min(R, H + c + lam * (c + 1))


def thm3_bound(lam, c, delta, consts: MorseConstants = MorseConstants()) -> float:
    """``max(r0, lam (r3 + c + (c + delta) ln lam)) + r1 + r2 + r4``."""
    if lam <= 1:
        raise ValueError("needs lambda > 1")
    c1 = float(c) + float(delta)
    lam = float(lam)
    inner = lam * (consts.r3 + float(c) + c1 * math.log(lam))
    return max(consts.r0, inner) + consts.r1 + consts.r2 + consts.r4


def remark4_bound(lam, c, delta, consts: MorseConstants = MorseConstants()):
    """Morse bound widened by the richness constant ``r2``."""
    return morse_bound(lam, c, delta, consts) + consts.r2

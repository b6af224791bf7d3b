"""Short symbolic forms ``q * sqrt(r) * pi^k * tail`` for the closed-form quantities.

Used only for annotating CLI output; every form also evaluates to a float
(in log space) so it can be checked against the LogReal computation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .mathkernel import BodyDims

_SUP = str.maketrans("0123456789-", "⁰¹²³⁴⁵⁶⁷⁸⁹⁻")


def _squarefree(n: int) -> tuple:
    """n = outside^2 * inside with inside squarefree."""
    outside, inside, p = 1, 1, 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        outside *= p ** (e // 2)
        inside *= p ** (e % 2)
        p += 1
    return outside, inside * n


@dataclass(frozen=True)
class ExactForm:
    coeff: Fraction
    radicand: int = 1
    pi_power: int = 0
    tail: str = ""
    tail_value: float = 1.0

    @classmethod
    def make(cls, coeff, radicand: int = 1, pi_power: int = 0, tail: str = "",
             tail_value: float = 1.0) -> "ExactForm":
        out, inside = _squarefree(int(radicand))
        return cls(Fraction(coeff) * out, inside, pi_power, tail, tail_value)

    def log(self) -> float:
        return (math.log(self.coeff.numerator) - math.log(self.coeff.denominator)
                + 0.5 * math.log(self.radicand) + self.pi_power * math.log(math.pi)
                + math.log(self.tail_value))

    def __float__(self) -> float:
        return math.exp(self.log())

    def __str__(self) -> str:
        num, den = self.coeff.numerator, self.coeff.denominator
        parts = []
        if num != 1 or (self.radicand == 1 and self.pi_power == 0 and not self.tail):
            parts.append(str(num))
        if self.radicand != 1:
            parts.append(f"√{self.radicand}")
        if self.pi_power:
            parts.append("π" + (str(self.pi_power).translate(_SUP) if self.pi_power != 1 else ""))
        if self.tail:
            parts.append(self.tail)
        s = "·".join(parts)
        return s if den == 1 else f"{s}/{den}"


def _fact(n: int) -> int:
    return math.factorial(n)


def _superfact(d: int) -> int:
    """prod_{k=0}^{d-1} k! = Gamma(1) ... Gamma(d)."""
    out = 1
    for k in range(d):
        out *= _fact(k)
    return out


def statespace_forms(d: int) -> dict:
    """Exact forms for vol, surface, p''(0), p'''(0) and the derived coefficients of S_d."""
    BodyDims(d)
    m = d * (d - 1) // 2
    base = Fraction(2 ** m * _superfact(d))
    vol = ExactForm.make(base / _fact(d * d - 1), d, m)
    surf = ExactForm.make(2 ** m * Fraction(_superfact(d + 1), _fact(d - 1) * _fact(d * d - 2)),
                          d - 1, m)
    p2 = ExactForm.make((d - 1) * d * base / _fact(d * d - 3), d, m)
    p3 = ExactForm.make(d * (d - 1) * 2 ** m * Fraction(_superfact(d + 1), _fact(d - 1) * _fact(d * d - 4)),
                        d - 1, m)
    return {
        "volume": vol,
        "surface": surf,
        "p2": p2,
        "p3": p3,
        "a2": ExactForm.make(p2.coeff / 2, p2.radicand, m),
        "a3": ExactForm.make(p3.coeff / 6, p3.radicand, m),
        "V_D-1": ExactForm.make(surf.coeff / 2, surf.radicand, m),
        "V_D-2": ExactForm.make(p2.coeff / 2, p2.radicand, m - 1),
        "V_D-3": ExactForm.make(p3.coeff / 8, p3.radicand, m - 1),
    }


def polytope_forms(d: int) -> dict:
    """Exact forms for vol, surface and Vtilde_{D-2} of P_d (Vtilde_{D-3} only at d = 2)."""
    BodyDims(d)
    D = d * d - 1
    # sqrt(d)^k = d^(k//2) * sqrt(d)^(k%2)
    vol = ExactForm.make(Fraction(d ** ((d + 1) // 2), _fact(D)), d ** ((d + 1) % 2))
    surf = ExactForm.make(Fraction(d ** ((d + 2) // 2), _fact(D - 1)), (d * d - 1) * d ** (d % 2))
    cos_alpha = 1 - Fraction(d, d * d - 1)
    alpha = math.acos(float(cos_alpha))
    v2 = ExactForm.make(Fraction((d * d - 1) * d ** ((d + 2) // 2), 4 * _fact(D - 2)),
                        (2 * d * d - d - 2) * d ** (d % 2), 0, f"arccos({cos_alpha})", alpha)
    out = {"volume": vol, "surface": surf, "Vtilde_D-2": v2}
    if d == 2:
        out["Vtilde_D-3"] = ExactForm.make(Fraction(4, 3), 1, 1)
    return out


def angle_forms(d: int) -> dict:
    BodyDims(d)
    return {"alpha": f"arccos({1 - Fraction(d, d * d - 1)})",
            "beta": f"arccos({1 - Fraction(2 * d, d * d - 1)})"}


def lookup(forms: dict, key: str) -> Optional[str]:
    f = forms.get(key)
    return None if f is None else str(f)

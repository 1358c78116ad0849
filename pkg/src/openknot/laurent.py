"""Laurent polynomials with quarter-integer exponents.

Exponents are stored exactly as integer multiples of 1/4, which covers both
the bracket variable A (integer exponents, quarter-units divisible by 4) and
the Jones variable t = A^(-4) (half-integer exponents after substitution).
Coefficients are floats, since projection averages produce real coefficients.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from typing import Iterable, Mapping

# Coefficients smaller than this are dropped during normalization, so that
# cancellation noise does not accumulate as spurious terms.
COEFF_EPS = 1e-15

DEFAULT_TOL = 1e-12


class LaurentPoly:
    """Sparse Laurent polynomial; keys are exponents in quarter-units.

    Instances are immutable: every operation returns a new polynomial.
    A term ``c * x^(k/4)`` is stored as ``terms[k] = c``.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[int, float] | Iterable[tuple[int, float]] = ()):
        d: dict[int, float] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for k, c in items:
            kk = int(k)
            if kk != k:
                raise ValueError(f"exponent must be an integer number of quarter-units, got {k!r}")
            d[kk] = d.get(kk, 0.0) + float(c)
        self._terms = {k: c for k, c in d.items() if abs(c) > COEFF_EPS}

    # -- construction ------------------------------------------------------

    @staticmethod
    def zero() -> "LaurentPoly":
        return LaurentPoly()

    @staticmethod
    def one() -> "LaurentPoly":
        return LaurentPoly({0: 1.0})

    # -- accessors ---------------------------------------------------------

    @property
    def terms(self) -> dict[int, float]:
        """Copy of the underlying {quarter-exponent: coefficient} map."""
        return dict(self._terms)

    def coeff(self, quarter_exp: int) -> float:
        return self._terms.get(int(quarter_exp), 0.0)

    def support(self) -> list[int]:
        """Quarter-exponents with nonzero coefficient, descending."""
        return sorted(self._terms, reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0.0) + c
        return LaurentPoly(out)

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0.0) - c
        return LaurentPoly(out)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -c for k, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            out: dict[int, float] = {}
            for ka, ca in self._terms.items():
                for kb, cb in other._terms.items():
                    k = ka + kb
                    out[k] = out.get(k, 0.0) + ca * cb
            return LaurentPoly(out)
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        return NotImplemented

    __rmul__ = __mul__

    def scale(self, factor: float) -> "LaurentPoly":
        return LaurentPoly({k: c * factor for k, c in self._terms.items()})

    # -- comparisons -------------------------------------------------------

    def approx_eq(self, other: "LaurentPoly", tol: float = DEFAULT_TOL) -> bool:
        """Exponent-wise coefficient equality within ``tol``."""
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coeff(k) - other.coeff(k)) <= tol for k in keys)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.approx_eq(other, DEFAULT_TOL)

    __hash__ = None  # tolerance-based equality is incompatible with hashing

    # -- substitutions and evaluation ---------------------------------------

    def substitute_t(self) -> "LaurentPoly":
        """Rewrite an A-polynomial in t via A = t^(-1/4).

        Each integer A-exponent m becomes the t-exponent -m/4.  Requires all
        stored quarter-exponents to be divisible by 4 (true A-polynomials).
        """
        out: dict[int, float] = {}
        for k, c in self._terms.items():
            if k % 4 != 0:
                raise ValueError(
                    f"substitute_t needs integer A-exponents; found quarter-exponent {k}"
                )
            out[-k // 4] = c
        return LaurentPoly(out)

    def evaluate(self, x: float) -> float:
        """Numeric value at variable = x.  Needs x > 0 (fractional exponents)."""
        if not x > 0:
            raise ValueError(f"evaluation point must be positive, got {x}")
        return sum(c * x ** (k / 4.0) for k, c in self._terms.items())

    def distance(self, other: "LaurentPoly") -> float:
        """Euclidean norm of coefficient differences over the exponent union."""
        keys = set(self._terms) | set(other._terms)
        return math.sqrt(sum((self.coeff(k) - other.coeff(k)) ** 2 for k in keys))

    # -- rendering -----------------------------------------------------------

    def format(self, var: str = "A") -> str:
        """Human-readable form, terms by descending exponent, exact fractions."""
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms, reverse=True):
            c = self._terms[k]
            exp = Fraction(k, 4)
            if exp == 0:
                body = ""
            elif exp == 1:
                body = var
            elif exp.denominator == 1 and exp > 0:
                body = f"{var}^{exp.numerator}"
            else:
                body = f"{var}^({exp})"
            mag = f"{abs(c):.12g}"
            if body and mag == "1":
                term = body
            elif body:
                term = f"{mag}*{body}"
            else:
                term = mag
            if not parts:
                parts.append(term if c >= 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c >= 0 else f"- {term}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.format()})"

    # -- machine format ------------------------------------------------------

    def to_pairs(self) -> list[list[float]]:
        """[[quarter_exponent, coefficient], ...] sorted by descending exponent."""
        return [[k, self._terms[k]] for k in sorted(self._terms, reverse=True)]

    def to_json(self) -> str:
        return json.dumps(self.to_pairs())

    @staticmethod
    def from_pairs(pairs) -> "LaurentPoly":
        return LaurentPoly((int(k), float(c)) for k, c in pairs)

    @staticmethod
    def from_json(text: str) -> "LaurentPoly":
        return LaurentPoly.from_pairs(json.loads(text))


def mono(coeff: float, quarter_exp: int) -> LaurentPoly:
    """Single term coeff * x^(quarter_exp/4); a zero coeff gives the zero poly."""
    return LaurentPoly({int(quarter_exp): float(coeff)})


ZERO = LaurentPoly.zero()
ONE = LaurentPoly.one()

#: Loop value d = -A^2 - A^(-2) from the bracket state sum.
LOOP_D = LaurentPoly({8: -1.0, -8: -1.0})


def neg_a3_power(k: int) -> LaurentPoly:
    """(-A^3)^k as a monomial, for integer k (negative allowed)."""
    return mono((-1.0) ** (k % 2), 12 * k)

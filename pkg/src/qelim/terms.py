"""Exact affine terms over the rationals.

Everything is built on :class:`fractions.Fraction`; there is no floating
point anywhere in the package core.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

Rational = Fraction

Var = str

Coeff = Union[int, Fraction]


def _frac(x: Coeff) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True, slots=True)
class LinearTerm:
    """Affine expression ``constant + sum(coeff * var)``.

    Stored sparsely: zero coefficients are never kept and variables are
    ordered by name, so structural equality coincides with mathematical
    equality of the terms.
    """

    constant: Fraction
    coeffs: tuple[tuple[Var, Fraction], ...]

    @staticmethod
    def make(constant: Coeff = 0, coeffs: Mapping[Var, Coeff] | None = None) -> LinearTerm:
        items = []
        if coeffs:
            for v in sorted(coeffs):
                c = _frac(coeffs[v])
                if c != 0:
                    items.append((v, c))
        return LinearTerm(_frac(constant), tuple(items))

    @staticmethod
    def const(c: Coeff) -> LinearTerm:
        return LinearTerm(_frac(c), ())

    @staticmethod
    def variable(v: Var) -> LinearTerm:
        return LinearTerm(Fraction(0), ((v, Fraction(1)),))

    def coeff(self, v: Var) -> Fraction:
        for name, c in self.coeffs:
            if name == v:
                return c
        return Fraction(0)

    def variables(self) -> tuple[Var, ...]:
        return tuple(v for v, _ in self.coeffs)

    def is_ground(self) -> bool:
        return not self.coeffs

    def __add__(self, other: LinearTerm) -> LinearTerm:
        acc = dict(self.coeffs)
        for v, c in other.coeffs:
            acc[v] = acc.get(v, Fraction(0)) + c
        return LinearTerm.make(self.constant + other.constant, acc)

    def __sub__(self, other: LinearTerm) -> LinearTerm:
        return self + (-other)

    def __neg__(self) -> LinearTerm:
        return LinearTerm(-self.constant, tuple((v, -c) for v, c in self.coeffs))

    def scale(self, k: Coeff) -> LinearTerm:
        k = _frac(k)
        if k == 0:
            return LinearTerm.const(0)
        return LinearTerm(self.constant * k, tuple((v, c * k) for v, c in self.coeffs))

    def drop(self, v: Var) -> LinearTerm:
        """The term with the monomial of ``v`` removed."""
        return LinearTerm(self.constant, tuple((n, c) for n, c in self.coeffs if n != v))

    def substitute(self, v: Var, replacement: LinearTerm) -> LinearTerm:
        c = self.coeff(v)
        if c == 0:
            return self
        return self.drop(v) + replacement.scale(c)

    def evaluate(self, assignment: Mapping[Var, Fraction]) -> Fraction:
        total = self.constant
        for v, c in self.coeffs:
            try:
                total += c * assignment[v]
            except KeyError:
                raise KeyError(f"unbound variable {v!r}") from None
        return total

    def __str__(self) -> str:
        parts = []
        for v, c in self.coeffs:
            parts.append(v if c == 1 else f"{c}*{v}")
        if self.constant != 0 or not parts:
            parts.append(str(self.constant))
        return " + ".join(parts)

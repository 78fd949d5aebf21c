"""Deterministic random instance generation.

The stream comes from a fixed splitmix64 generator, so the same parameters
and seed yield bit-identical formulas on every platform.  Leaves are weak
inequalities with integer coefficients; inner levels pick a connective that
differs from the parent's (so flattening cannot collapse levels) or, with
the configured probability, a quantifier over one pool variable.  The
resulting tree has exactly the requested depth.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .formula import And, Exists, Forall, Formula, Not, Or, Relation, atom, conj, disj, neg
from .terms import LinearTerm

_MASK = (1 << 64) - 1


class SplitMix64:
    """The standard splitmix64 stream (documented constants, 64-bit wrap)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def below(self, n: int) -> int:
        return self.next_u64() % n

    def int_in(self, low: int, high: int) -> int:
        return low + self.below(high - low + 1)

    def chance(self, probability: Fraction) -> bool:
        if probability <= 0:
            return False
        if probability >= 1:
            return True
        return self.below(probability.denominator) < probability.numerator


@dataclass(frozen=True)
class GenParams:
    num_vars: int
    depth: int
    coeff_min: int
    coeff_max: int
    quantifier_prob: Fraction
    seed: int

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise ValueError("num_vars must be at least 1")
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if self.coeff_min > self.coeff_max:
            raise ValueError("coeff_min must not exceed coeff_max")
        if not 0 <= self.quantifier_prob <= 1:
            raise ValueError("quantifier_prob must lie in [0, 1]")
        if not 0 <= self.seed < (1 << 64):
            raise ValueError("seed must fit in 64 bits")


def gen_random(params: GenParams) -> Formula:
    """A pseudo-random formula of exactly ``params.depth`` tree depth."""
    rng = SplitMix64(params.seed)
    names = [f"x{i}" for i in range(params.num_vars)]

    def gen_atom() -> Formula:
        while True:
            coeffs = {v: rng.int_in(params.coeff_min, params.coeff_max) for v in names}
            if any(c != 0 for c in coeffs.values()):
                break
        constant = rng.int_in(params.coeff_min, params.coeff_max)
        return atom(LinearTerm.make(constant, coeffs), Relation.GE)

    def gen(depth: int, parent: str) -> Formula:
        if depth <= 1:
            return gen_atom()
        if rng.chance(params.quantifier_prob):
            universal = rng.below(2) == 0
            var = names[rng.below(len(names))]
            child = gen(depth - 1, "quantifier")
            return Forall((var,), child) if universal else Exists((var,), child)
        ops = [op for op in ("and", "or", "not") if op != parent]
        op = ops[rng.below(len(ops))]
        if op == "not":
            return neg(gen(depth - 1, "not"))
        first = gen(depth - 1, op)
        second = gen(depth - 1, op)
        while second == first:
            second = gen(depth - 1, op)
        return conj([first, second]) if op == "and" else disj([first, second])

    return gen(params.depth, "")

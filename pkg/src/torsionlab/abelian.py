"""Finitely generated abelian groups and the subadditivity lemma for logtor.

A short exact sequence 0 -> A -> B -> C -> 0 is realized concretely by a
presentation matrix for B together with a matrix of generators for the image
of A inside B; all three groups are then recovered by Smith normal form.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .intmat import (
    SparseIntMatrix,
    divisibility_chain,
    kernel_basis,
    smith_normal_form,
)

__all__ = [
    "FgAbelianGroup",
    "cokernel",
    "logtor",
    "exponent",
    "ShortExactSequence",
    "TorsionLemmaReport",
    "check_torsion_lemma",
    "random_ses",
    "planted_double_identity_ses",
]

HOLDS = "holds"
FAILS = "fails"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class FgAbelianGroup:
    """rank and the divisibility chain of torsion factors (each >= 2)."""

    rank: int
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        prev = None
        for d in self.torsion:
            if d < 2:
                raise ValueError("torsion factors must be >= 2")
            if prev is not None and d % prev:
                raise ValueError("torsion factors must form a divisibility chain")
            prev = d

    @property
    def torsion_order(self):
        n = 1
        for d in self.torsion:
            n *= d
        return n

    @property
    def exponent(self):
        return self.torsion[-1] if self.torsion else 1

    @property
    def logtor(self):
        return math.log(self.torsion_order)

    def is_trivial(self):
        return self.rank == 0 and not self.torsion

    def is_finite(self):
        return self.rank == 0

    def is_free(self):
        return not self.torsion

    def direct_sum(self, other):
        merged = divisibility_chain(self.torsion + other.torsion)
        return FgAbelianGroup(self.rank + other.rank, merged)

    __add__ = direct_sum

    def __str__(self):
        parts = []
        if self.rank:
            parts.append(f"Z^{self.rank}" if self.rank > 1 else "Z")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def cokernel(matrix):
    """Z^rows / (column span of the matrix), as an FgAbelianGroup."""
    snf = smith_normal_form(matrix)
    return FgAbelianGroup(matrix.rows - snf.rank, snf.nontrivial_factors)


def logtor(group):
    """Natural log of the order of the torsion subgroup."""
    return group.logtor


def exponent(group):
    """Largest torsion factor; 1 for torsion-free groups."""
    return group.exponent


# ---------------------------------------------------------------------------
# Short exact sequences
# ---------------------------------------------------------------------------


class ShortExactSequence:
    """0 -> A -> B -> C -> 0 realized by integer matrices.

    relations: n x m presentation of B = Z^n / im(relations)
    subgroup_gens: n x k generators (in the coordinates of Z^n) of the image
    of A in B.  C is then B / im(A); A is recovered as the abstract group
    Z^k modulo the vectors that land in im(relations).
    """

    def __init__(self, relations, subgroup_gens):
        if relations.rows != subgroup_gens.rows:
            raise ValueError("relations and subgroup generators must share the ambient rank")
        self.relations = relations
        self.subgroup_gens = subgroup_gens
        self.B = cokernel(relations)
        stacked = SparseIntMatrix.block([[relations, subgroup_gens]])
        self.C = cokernel(stacked)
        self.A = self._subgroup_type()

    def _subgroup_type(self):
        n = self.relations.rows
        k = self.subgroup_gens.cols
        m = self.relations.cols
        if k == 0:
            return FgAbelianGroup(0)
        combined = SparseIntMatrix.block([[self.subgroup_gens, self.relations]]) if m else self.subgroup_gens
        null = kernel_basis(combined)
        proj = {}
        for j, vec in enumerate(null):
            for i in range(k):
                if vec[i]:
                    proj[(i, j)] = vec[i]
        return cokernel(SparseIntMatrix(k, len(null), proj))

    def __repr__(self):
        return f"ShortExactSequence(A={self.A}, B={self.B}, C={self.C})"


@dataclass(frozen=True)
class TorsionLemmaReport:
    """Outcome of the four torsion inequalities on one short exact sequence."""

    subadditivity: str
    finite_sub_equality: str
    free_quotient_bound: str
    lower_bound: str

    def all_ok(self):
        return FAILS not in (
            self.subadditivity,
            self.finite_sub_equality,
            self.free_quotient_bound,
            self.lower_bound,
        )


def check_torsion_lemma(ses):
    """Evaluate the four torsion inequalities exactly (integer arithmetic).

    (i)   |tor B| <= |tor A| * |tor C|
    (ii)  equality in (i) when A is finite
    (iii) |tor C| <= e(C)^rank(A) when A and B are free
    (iv)  |tor B| * e(C)^rank(A) >= |tor A| * |tor C|

    Items whose hypotheses fail report "not-applicable".
    """
    A, B, C = ses.A, ses.B, ses.C
    ta, tb, tc = A.torsion_order, B.torsion_order, C.torsion_order
    e_c = C.exponent

    sub = HOLDS if tb <= ta * tc else FAILS
    if A.is_finite():
        fin = HOLDS if tb == ta * tc else FAILS
    else:
        fin = NOT_APPLICABLE
    if A.is_free() and B.is_free():
        free = HOLDS if tc <= e_c**A.rank else FAILS
    else:
        free = NOT_APPLICABLE
    low = HOLDS if tb * e_c**A.rank >= ta * tc else FAILS
    return TorsionLemmaReport(sub, fin, free, low)


# ---------------------------------------------------------------------------
# Randomized instances
# ---------------------------------------------------------------------------

_SES_MODES = ("general", "free", "finite_sub", "diagonal")


def random_ses(seed, size_bound, mode=None):
    """A deterministic pseudo-random short exact sequence.

    mode selects a construction sub-case:
      - "free":       B free, generators arbitrary (so A is free too)
      - "finite_sub": image of A contained in the torsion of B
      - "diagonal":   B free and the inclusion a diagonal matrix
      - "general":    unconstrained small random matrices
    """
    if size_bound < 1:
        raise ValueError("size_bound must be >= 1")
    rng = random.Random(seed)
    if mode is None:
        mode = rng.choice(_SES_MODES)
    if mode not in _SES_MODES:
        raise ValueError(f"unknown mode {mode!r}")

    n = rng.randint(1, size_bound)
    k = rng.randint(0, size_bound)

    def rand_matrix(rows, cols, lo=-4, hi=4, density=0.7):
        entries = {}
        for r in range(rows):
            for c in range(cols):
                if rng.random() < density:
                    v = rng.randint(lo, hi)
                    if v:
                        entries[(r, c)] = v
        return SparseIntMatrix(rows, cols, entries)

    if mode == "free":
        relations = SparseIntMatrix(n, 0)
        gens = rand_matrix(n, k)
    elif mode == "diagonal":
        relations = SparseIntMatrix(n, 0)
        k = min(k, n)
        d = rng.randint(1, 5)
        gens = SparseIntMatrix(n, k, {(i, i): d for i in range(k)})
    elif mode == "finite_sub":
        torsion_rows = rng.randint(1, n)
        rel_entries = {}
        for i in range(torsion_rows):
            rel_entries[(i, i)] = rng.randint(2, 9)
        relations = SparseIntMatrix(n, torsion_rows, rel_entries)
        gens_entries = {}
        for c in range(k):
            for r in range(torsion_rows):
                if rng.random() < 0.7:
                    v = rng.randint(-4, 4)
                    if v:
                        gens_entries[(r, c)] = v
        gens = SparseIntMatrix(n, k, gens_entries)
    else:
        m = rng.randint(0, size_bound)
        relations = rand_matrix(n, m)
        gens = rand_matrix(n, k)
    return ShortExactSequence(relations, gens)


def planted_double_identity_ses():
    """The 2*Id : Z^2 -> Z^2 inclusion; C = (Z/2)^2 attains equality in (iii)."""
    relations = SparseIntMatrix(2, 0)
    gens = SparseIntMatrix(2, 2, {(0, 0): 2, (1, 1): 2})
    return ShortExactSequence(relations, gens)

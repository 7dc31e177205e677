"""Graded free Z-modules with sparse differentials, and maps between them.

The complexes are bounded, indexed by arbitrary integer degrees (reduced
simplicial complexes use degree -1).  Every constructor verifies d*d == 0
exactly; chain maps and homotopies are likewise verified by exact matrix
identities, never numerically.
"""

from __future__ import annotations

from .abelian import FgAbelianGroup
from .intmat import SparseIntMatrix, operator_norm, rank_mod_p, smith_normal_form

__all__ = ["IntegerChainComplex", "ChainMap", "homology", "betti_numbers_mod_p"]


class IntegerChainComplex:
    """Free modules C_d with differentials C_d -> C_{d-1} squaring to zero."""

    __slots__ = ("dims", "diffs")

    def __init__(self, dims, diffs=None, check=True):
        self.dims = {int(d): int(n) for d, n in dims.items() if n}
        for d, n in self.dims.items():
            if n < 0:
                raise ValueError("negative rank")
        self.diffs = {}
        if diffs:
            for d, mat in diffs.items():
                d = int(d)
                expected = (self.dim(d - 1), self.dim(d))
                if (mat.rows, mat.cols) != expected:
                    raise ValueError(
                        f"differential in degree {d} has shape {mat.rows}x{mat.cols},"
                        f" expected {expected[0]}x{expected[1]}"
                    )
                if mat.entries:
                    self.diffs[d] = mat
        if check:
            for d in list(self.diffs):
                up = self.diffs.get(d + 1)
                if up is not None and not (self.diffs[d] @ up).is_zero():
                    raise ValueError(f"differential does not square to zero at degree {d + 1}")

    def dim(self, d):
        return self.dims.get(d, 0)

    def boundary(self, d):
        mat = self.diffs.get(d)
        if mat is None:
            return SparseIntMatrix(self.dim(d - 1), self.dim(d))
        return mat

    def degrees(self):
        if not self.dims:
            return range(0, 0)
        lo = min(self.dims)
        hi = max(self.dims)
        return range(lo, hi + 1)

    @property
    def total_rank(self):
        return sum(self.dims.values())

    def euler_characteristic(self):
        return sum((-1) ** d * n for d, n in self.dims.items())

    def differential_norm(self, tol=1e-9):
        if not self.diffs:
            return 0.0
        return max(operator_norm(m, tol) for m in self.diffs.values())

    def direct_sum(self, other):
        dims = dict(self.dims)
        for d, n in other.dims.items():
            dims[d] = dims.get(d, 0) + n
        diffs = {}
        degrees = set(self.diffs) | set(other.diffs)
        for d in degrees:
            a = self.boundary(d)
            b = other.boundary(d)
            entries = {}
            for (r, c), v in a.entries.items():
                entries[(r, c)] = v
            ro, co = a.rows, a.cols
            for (r, c), v in b.entries.items():
                entries[(ro + r, co + c)] = v
            diffs[d] = SparseIntMatrix(a.rows + b.rows, a.cols + b.cols, entries)
        return IntegerChainComplex(dims, diffs, check=False)

    def __eq__(self, other):
        if not isinstance(other, IntegerChainComplex):
            return NotImplemented
        if self.dims != other.dims:
            return False
        degrees = set(self.diffs) | set(other.diffs)
        return all(self.boundary(d) == other.boundary(d) for d in degrees)

    __hash__ = None

    def __repr__(self):
        shape = ", ".join(f"{d}:{n}" for d, n in sorted(self.dims.items()))
        return f"IntegerChainComplex({{{shape}}})"


class ChainMap:
    """A graded map of complexes; degree 0 for maps, +1 for homotopies."""

    __slots__ = ("source", "target", "degree", "parts")

    def __init__(self, source, target, parts=None, degree=0):
        self.source = source
        self.target = target
        self.degree = int(degree)
        self.parts = {}
        if parts:
            for d, mat in parts.items():
                d = int(d)
                expected = (target.dim(d + self.degree), source.dim(d))
                if (mat.rows, mat.cols) != expected:
                    raise ValueError(
                        f"part in degree {d} has shape {mat.rows}x{mat.cols},"
                        f" expected {expected[0]}x{expected[1]}"
                    )
                if mat.entries:
                    self.parts[d] = mat

    @classmethod
    def identity(cls, cx):
        return cls(cx, cx, {d: SparseIntMatrix.identity(cx.dim(d)) for d in cx.dims})

    @classmethod
    def zero(cls, source, target, degree=0):
        return cls(source, target, {}, degree)

    def part(self, d):
        mat = self.parts.get(d)
        if mat is None:
            return SparseIntMatrix(self.target.dim(d + self.degree), self.source.dim(d))
        return mat

    def is_zero(self):
        return not self.parts

    def is_chain_map(self):
        """Exact check of commutation with the differentials (degree 0 only)."""
        if self.degree != 0:
            return False
        for d in self.source.degrees():
            lhs = self.target.boundary(d) @ self.part(d)
            rhs = self.part(d - 1) @ self.source.boundary(d)
            if lhs != rhs:
                return False
        return True

    def __matmul__(self, other):
        if other.target is not self.source and other.target != self.source:
            raise ValueError("chain map composition mismatch")
        parts = {}
        for d in other.source.degrees():
            mat = self.part(d + other.degree) @ other.part(d)
            if mat.entries:
                parts[d] = mat
        return ChainMap(other.source, self.target, parts, self.degree + other.degree)

    def _binop_check(self, other):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        if self.source != other.source or self.target != other.target:
            raise ValueError("source/target mismatch")

    def __add__(self, other):
        self._binop_check(other)
        parts = {}
        for d in set(self.parts) | set(other.parts):
            mat = self.part(d) + other.part(d)
            if mat.entries:
                parts[d] = mat
        return ChainMap(self.source, self.target, parts, self.degree)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return ChainMap(
            self.source, self.target, {d: -m for d, m in self.parts.items()}, self.degree
        )

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        if self.degree != other.degree:
            return False
        degrees = set(self.parts) | set(other.parts)
        return all(self.part(d) == other.part(d) for d in degrees)

    __hash__ = None

    def norm(self, tol=1e-9):
        """Operator norm: the max over degrees (the blocks are orthogonal)."""
        if not self.parts:
            return 0.0
        return max(operator_norm(m, tol) for m in self.parts.values())

    def is_homotopy_between(self, first, second):
        """Exact check of d*s + s*d == first - second for this degree +1 map."""
        if self.degree != 1:
            raise ValueError("homotopies must have degree +1")
        diff = first - second
        for d in self.source.degrees():
            lhs = self.target.boundary(d + 1) @ self.part(d)
            lhs = lhs + self.part(d - 1) @ self.source.boundary(d)
            if lhs != diff.part(d):
                return False
        return True

    def __repr__(self):
        return f"ChainMap(degree={self.degree}, parts={sorted(self.parts)})"


def homology(cx, degree=None):
    """Integral homology via Smith normal form.

    With degree=None returns a dict over all degrees of the complex.
    """
    if degree is None:
        return {d: homology(cx, d) for d in cx.degrees()}
    n = cx.dim(degree)
    out_rank = smith_normal_form(cx.boundary(degree)).rank if n else 0
    snf_in = smith_normal_form(cx.boundary(degree + 1))
    return FgAbelianGroup(n - out_rank - snf_in.rank, snf_in.nontrivial_factors)


def betti_numbers_mod_p(cx, p, degree=None):
    """F_p Betti numbers via exact mod-p ranks."""
    if degree is None:
        return {d: betti_numbers_mod_p(cx, p, d) for d in cx.degrees()}
    n = cx.dim(degree)
    if n == 0:
        return 0
    return n - rank_mod_p(cx.boundary(degree), p) - rank_mod_p(cx.boundary(degree + 1), p)

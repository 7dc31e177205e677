"""Sparse exact integer matrices: Smith normal form, ranks and operator norms.

Everything here is exact (arbitrary-precision integers) except operator_norm,
which is the one deliberately floating-point operation in the package.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SparseIntMatrix",
    "SnfResult",
    "smith_normal_form",
    "rank",
    "rank_mod_p",
    "operator_norm",
    "kernel_basis",
    "divisibility_chain",
    "is_prime",
]


class SparseIntMatrix:
    """An immutable rows x cols integer matrix storing only nonzero entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows, cols, entries=None):
        if rows < 0 or cols < 0:
            raise ValueError("negative matrix dimensions")
        self.rows = rows
        self.cols = cols
        clean = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ValueError(f"entry ({r},{c}) out of bounds for {rows}x{cols}")
                v = int(v)
                if v:
                    clean[(r, c)] = v
        self.entries = clean

    @classmethod
    def from_rows(cls, rowlist, cols=None):
        rowlist = [list(row) for row in rowlist]
        rows = len(rowlist)
        if cols is None:
            cols = len(rowlist[0]) if rowlist else 0
        entries = {}
        for r, row in enumerate(rowlist):
            if len(row) != cols:
                raise ValueError("ragged row list")
            for c, v in enumerate(row):
                if v:
                    entries[(r, c)] = int(v)
        return cls(rows, cols, entries)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols)

    def entry(self, r, c):
        return self.entries.get((r, c), 0)

    def to_rows(self):
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    @property
    def nnz(self):
        return len(self.entries)

    def is_zero(self):
        return not self.entries

    def transpose(self):
        return SparseIntMatrix(
            self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def scale(self, k):
        k = int(k)
        if k == 0:
            return SparseIntMatrix(self.rows, self.cols)
        return SparseIntMatrix(
            self.rows, self.cols, {rc: k * v for rc, v in self.entries.items()}
        )

    def __neg__(self):
        return self.scale(-1)

    def _check_same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError(
                f"shape mismatch: {self.rows}x{self.cols} vs {other.rows}x{other.cols}"
            )

    def __add__(self, other):
        self._check_same_shape(other)
        acc = dict(self.entries)
        for rc, v in other.entries.items():
            nv = acc.get(rc, 0) + v
            if nv:
                acc[rc] = nv
            else:
                acc.pop(rc, None)
        return SparseIntMatrix(self.rows, self.cols, acc)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(
                f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}"
            )
        other_rows = {}
        for (r, c), v in other.entries.items():
            other_rows.setdefault(r, []).append((c, v))
        acc = {}
        for (r, c), v in self.entries.items():
            for c2, w in other_rows.get(c, ()):
                key = (r, c2)
                nv = acc.get(key, 0) + v * w
                if nv:
                    acc[key] = nv
                else:
                    del acc[key]
        return SparseIntMatrix(self.rows, other.cols, acc)

    def __eq__(self, other):
        if not isinstance(other, SparseIntMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    __hash__ = None

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz})"

    def mod(self, p):
        """Entrywise reduction into 0..p-1, dropping entries that vanish."""
        acc = {}
        for rc, v in self.entries.items():
            m = v % p
            if m:
                acc[rc] = m
        return SparseIntMatrix(self.rows, self.cols, acc)

    @classmethod
    def block(cls, layout):
        """Assemble from a grid of blocks; None means a zero block.

        Each grid row must contain at least one matrix so the block heights
        and widths are determined.
        """
        if not layout:
            return cls(0, 0)
        ncols_blocks = len(layout[0])
        heights = []
        widths = [None] * ncols_blocks
        for bi, brow in enumerate(layout):
            if len(brow) != ncols_blocks:
                raise ValueError("ragged block layout")
            h = None
            for bj, blk in enumerate(brow):
                if blk is None:
                    continue
                if h is None:
                    h = blk.rows
                elif h != blk.rows:
                    raise ValueError("inconsistent block heights")
                if widths[bj] is None:
                    widths[bj] = blk.cols
                elif widths[bj] != blk.cols:
                    raise ValueError("inconsistent block widths")
            if h is None:
                raise ValueError(f"block row {bi} has no matrix to fix its height")
            heights.append(h)
        if any(w is None for w in widths):
            raise ValueError("some block column has no matrix to fix its width")
        row_off = [0]
        for h in heights:
            row_off.append(row_off[-1] + h)
        col_off = [0]
        for w in widths:
            col_off.append(col_off[-1] + w)
        entries = {}
        for bi, brow in enumerate(layout):
            for bj, blk in enumerate(brow):
                if blk is None:
                    continue
                ro, co = row_off[bi], col_off[bj]
                for (r, c), v in blk.entries.items():
                    entries[(ro + r, co + c)] = v
        return cls(row_off[-1], col_off[-1], entries)


@dataclass(frozen=True)
class SnfResult:
    """Invariant factors d_1 | d_2 | ... | d_k of an integer matrix; rank == k.

    Unit factors are retained so that rank accounting stays explicit.
    """

    invariant_factors: tuple
    rank: int

    def __post_init__(self):
        if len(self.invariant_factors) != self.rank:
            raise ValueError("rank must equal the number of invariant factors")
        prev = None
        for d in self.invariant_factors:
            if d <= 0:
                raise ValueError("invariant factors must be positive")
            if prev is not None and d % prev:
                raise ValueError("invariant factors must form a divisibility chain")
            prev = d

    @property
    def nontrivial_factors(self):
        return tuple(d for d in self.invariant_factors if d > 1)


def divisibility_chain(values):
    """Normalize a multiset of nonzero integers into a divisibility chain.

    diag(a, b) and diag(gcd(a,b), lcm(a,b)) present the same group, so
    repeated pairwise replacement converges to the invariant factors.
    """
    d = sorted(abs(v) for v in values if v)
    if any(v == 0 for v in values):
        raise ValueError("zero is not allowed in a torsion diagonal")
    n = len(d)
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(i + 1, n):
                if d[j] % d[i]:
                    g = math.gcd(d[i], d[j])
                    d[i], d[j] = g, d[i] * d[j] // g
                    changed = True
        if changed:
            d.sort()
    return tuple(d)


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

_DENSE_CELL_LIMIT = 40_000


def _dense_diagonalize(rowlist):
    """Diagonalize a small dense integer matrix by unimodular row/col ops.

    Returns the list of nonzero diagonal values (divisibility not enforced;
    callers run divisibility_chain afterwards).
    """
    D = [row[:] for row in rowlist]
    m = len(D)
    n = len(D[0]) if D else 0
    diag = []
    top = 0
    while True:
        best = None
        for i in range(top, m):
            row = D[i]
            for j in range(top, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, pi, pj = best
        D[top], D[pi] = D[pi], D[top]
        if pj != top:
            for row in D:
                row[top], row[pj] = row[pj], row[top]
        while True:
            p = D[top][top]
            dirty = False
            for i in range(top + 1, m):
                v = D[i][top]
                if v:
                    q = v // p
                    if q:
                        ri, rt = D[i], D[top]
                        for j in range(top, n):
                            ri[j] -= q * rt[j]
                    if D[i][top]:
                        D[top], D[i] = D[i], D[top]
                        dirty = True
            if dirty:
                continue
            p = D[top][top]
            col_dirty = False
            for j in range(top + 1, n):
                v = D[top][j]
                if v:
                    q = v // p
                    if q:
                        for row in D:
                            row[j] -= q * row[top]
                    if D[top][j]:
                        for row in D:
                            row[top], row[j] = row[j], row[top]
                        col_dirty = True
            if not col_dirty and all(D[i][top] == 0 for i in range(top + 1, m)):
                break
        diag.append(D[top][top])
        top += 1
        if top >= m or top >= n:
            break
    return diag


class _SparseWorkspace:
    """Row-major mutable view of a sparse matrix during elimination."""

    __slots__ = ("row_data", "col_rows")

    def __init__(self, matrix):
        self.row_data = {}
        self.col_rows = {}
        for (r, c), v in matrix.entries.items():
            self.row_data.setdefault(r, {})[c] = v
            self.col_rows.setdefault(c, set()).add(r)

    @property
    def nnz(self):
        return sum(len(row) for row in self.row_data.values())

    def set_entry(self, r, c, v):
        row = self.row_data.setdefault(r, {})
        if v:
            row[c] = v
            self.col_rows.setdefault(c, set()).add(r)
        else:
            if c in row:
                del row[c]
                self.col_rows[c].discard(r)
                if not self.col_rows[c]:
                    del self.col_rows[c]
            if not row:
                del self.row_data[r]

    def add_to_entry(self, r, c, delta):
        cur = self.row_data.get(r, {}).get(c, 0)
        self.set_entry(r, c, cur + delta)

    def remove_pivot(self, r, c):
        """Drop row r and column c after the column has been cleared.

        The trailing entries of row r would be cleared by column operations
        touching no other row, so dropping them is a valid unimodular step
        whenever the pivot divides the rest of its row.
        """
        row = self.row_data.pop(r, {})
        for c2 in row:
            rows = self.col_rows.get(c2)
            if rows is not None:
                rows.discard(r)
                if not rows:
                    del self.col_rows[c2]
        self.col_rows.pop(c, None)

    def eliminate_column(self, r, c):
        """Clear column c against pivot row r; pivot must be +-1.

        Returns the positions whose value became +-1 during the update so
        the caller can queue them as pivot candidates.
        """
        pivot_row = self.row_data[r]
        v = pivot_row[c]
        items = list(pivot_row.items())
        fresh_units = []
        for r2 in list(self.col_rows.get(c, ())):
            if r2 == r:
                continue
            w = self.row_data[r2][c]
            mult = -w * v  # v in {1,-1} so v**-1 == v
            for c2, pv in items:
                cur = self.row_data.get(r2, {}).get(c2, 0)
                nv = cur + mult * pv
                self.set_entry(r2, c2, nv)
                if nv == 1 or nv == -1:
                    fresh_units.append((r2, c2))
        return fresh_units

    def markowitz_cost(self, r, c):
        return (len(self.row_data[r]) - 1) * (len(self.col_rows[c]) - 1)


def _sparse_diagonalize(matrix):
    """Diagonal values of `matrix` under unimodular row/column operations."""
    ws = _SparseWorkspace(matrix)
    diag = []

    heap = []
    for r, row in ws.row_data.items():
        for c, v in row.items():
            if v == 1 or v == -1:
                heap.append((ws.markowitz_cost(r, c), r, c))
    heapq.heapify(heap)

    def unit_pass():
        while heap:
            cost, r, c = heapq.heappop(heap)
            row = ws.row_data.get(r)
            if row is None:
                continue
            v = row.get(c, 0)
            if v != 1 and v != -1:
                continue
            cur = ws.markowitz_cost(r, c)
            if cur > cost:
                heapq.heappush(heap, (cur, r, c))
                continue
            fresh = ws.eliminate_column(r, c)
            ws.remove_pivot(r, c)
            diag.append(1)
            for r2, c2 in fresh:
                if r2 in ws.row_data and c2 in ws.row_data[r2]:
                    heapq.heappush(heap, (ws.markowitz_cost(r2, c2), r2, c2))
            return True
        return False

    while True:
        progressed = unit_pass()
        if progressed:
            continue
        # the heap may have gone stale; rescan once for unit entries
        refreshed = False
        for r, row in ws.row_data.items():
            for c, v in row.items():
                if v == 1 or v == -1:
                    heapq.heappush(heap, (ws.markowitz_cost(r, c), r, c))
                    refreshed = True
        if refreshed:
            continue
        if not ws.row_data:
            break
        live_rows = sorted(ws.row_data)
        live_cols = sorted(ws.col_rows)
        if len(live_rows) * len(live_cols) <= _DENSE_CELL_LIMIT:
            col_index = {c: j for j, c in enumerate(live_cols)}
            dense = [[0] * len(live_cols) for _ in live_rows]
            for i, r in enumerate(live_rows):
                for c, v in ws.row_data[r].items():
                    dense[i][col_index[c]] = v
            diag.extend(_dense_diagonalize(dense))
            break
        _general_pivot_step(ws, diag)
    return diag


def _general_pivot_step(ws, diag):
    """One full pivot on the entry of least absolute value (all |v| >= 2)."""
    best = None
    for r, row in ws.row_data.items():
        for c, v in row.items():
            key = (abs(v), r, c)
            if best is None or key < best:
                best = key
    _, r, c = best
    while True:
        # row reduction: remainders against the pivot, swapping when smaller
        pivot = ws.row_data[r][c]
        for r2 in list(ws.col_rows.get(c, ())):
            if r2 == r:
                continue
            w = ws.row_data[r2][c]
            q = w // pivot
            if q:
                for c2, pv in list(ws.row_data[r].items()):
                    ws.add_to_entry(r2, c2, -q * pv)
            rem = ws.row_data.get(r2, {}).get(c, 0)
            if rem:
                r = r2
                pivot = rem
        if len(ws.col_rows.get(c, ())) > 1:
            continue
        # column reduction through remainders, mirroring the row stage
        pivot = ws.row_data[r][c]
        moved = False
        for c2 in list(ws.row_data[r].keys()):
            if c2 == c:
                continue
            w = ws.row_data[r][c2]
            q = w // pivot
            if q:
                for r2 in list(ws.col_rows.get(c, ())):
                    ws.add_to_entry(r2, c2, -q * ws.row_data[r2][c])
            rem = ws.row_data.get(r, {}).get(c2, 0)
            if rem:
                c = c2
                pivot = rem
                moved = True
        if moved or len(ws.col_rows.get(c, ())) > 1:
            continue
        if all(c2 == c for c2 in ws.row_data[r]):
            break
    diag.append(ws.row_data[r][c])
    ws.remove_pivot(r, c)


def smith_normal_form(matrix):
    """Smith normal form of an integer matrix.

    The zero matrix yields an empty factor list; rank equals the rank of the
    matrix over the rationals.
    """
    diag = _sparse_diagonalize(matrix)
    factors = divisibility_chain(diag)
    return SnfResult(factors, len(factors))


def rank(matrix):
    """Rank over the rationals."""
    return smith_normal_form(matrix).rank


# ---------------------------------------------------------------------------
# Rank over prime fields
# ---------------------------------------------------------------------------


def is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _rank_mod_2(matrix):
    row_bits = {}
    for (r, c), v in matrix.entries.items():
        if v & 1:
            row_bits[r] = row_bits.get(r, 0) ^ (1 << c)
    basis = {}
    rk = 0
    for x in row_bits.values():
        while x:
            low = (x & -x).bit_length() - 1
            if low in basis:
                x ^= basis[low]
            else:
                basis[low] = x
                rk += 1
                break
    return rk


def rank_mod_p(matrix, p):
    """Rank of the matrix with entries reduced modulo the prime p."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return _rank_mod_2(matrix)
    ws = _SparseWorkspace(matrix.mod(p))
    rk = 0
    while ws.row_data:
        best = None
        for r, row in ws.row_data.items():
            for c in row:
                cost = (len(row) - 1) * (len(ws.col_rows[c]) - 1)
                key = (cost, r, c)
                if best is None or key < best:
                    best = key
        _, r, c = best
        pivot_row = ws.row_data[r]
        inv = pow(pivot_row[c], p - 2, p)
        items = list(pivot_row.items())
        for r2 in list(ws.col_rows.get(c, ())):
            if r2 == r:
                continue
            mult = (-ws.row_data[r2][c] * inv) % p
            for c2, pv in items:
                cur = ws.row_data.get(r2, {}).get(c2, 0)
                ws.set_entry(r2, c2, (cur + mult * pv) % p)
        ws.remove_pivot(r, c)
        rk += 1
    return rk


# ---------------------------------------------------------------------------
# Operator norm
# ---------------------------------------------------------------------------

_SVD_DIM_LIMIT = 8
_POWER_ITER_CAP = 10_000


def _power_iteration(matrix, tol, start):
    rowidx = np.fromiter((r for (r, _c) in matrix.entries), dtype=np.intp)
    colidx = np.fromiter((c for (_r, c) in matrix.entries), dtype=np.intp)
    vals = np.fromiter((float(v) for v in matrix.entries.values()), dtype=np.float64)

    def gram_apply(v):
        y = np.zeros(matrix.rows)
        np.add.at(y, rowidx, vals * v[colidx])
        z = np.zeros(matrix.cols)
        np.add.at(z, colidx, vals * y[rowidx])
        return z

    v = start / np.linalg.norm(start)
    est = 0.0
    for _ in range(_POWER_ITER_CAP):
        w = gram_apply(v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        new_est = nw
        v = w / nw
        if abs(new_est - est) <= tol * new_est:
            return math.sqrt(new_est)
        est = new_est
    return math.sqrt(est)


def operator_norm(matrix, tol=1e-9):
    """Largest singular value, within relative error tol.

    Deterministic: dense SVD for matrices up to 8x8, otherwise power
    iteration on the Gram matrix from fixed start vectors (all-ones, then an
    index ramp in case the first start is orthogonal to the top singular
    space).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if matrix.is_zero():
        return 0.0
    if max(matrix.rows, matrix.cols) <= _SVD_DIM_LIMIT:
        dense = np.array(matrix.to_rows(), dtype=np.float64)
        return float(np.linalg.svd(dense, compute_uv=False)[0])
    ones = np.ones(matrix.cols)
    ramp = np.arange(1.0, matrix.cols + 1.0)
    return max(_power_iteration(matrix, tol, ones), _power_iteration(matrix, tol, ramp))


# ---------------------------------------------------------------------------
# Integer kernels (dense, with column transform tracking)
# ---------------------------------------------------------------------------


def kernel_basis(matrix):
    """A basis of the integer kernel, as a list of length-`cols` tuples.

    Tracks column operations through a diagonalization; intended for the
    small presentations used in short-exact-sequence bookkeeping.
    """
    m, n = matrix.rows, matrix.cols
    D = matrix.to_rows()
    T = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def col_op(j1, j2, q):
        # col_j2 -= q * col_j1
        for row in D:
            row[j2] -= q * row[j1]
        for row in T:
            row[j2] -= q * row[j1]

    def col_swap(j1, j2):
        for row in D:
            row[j1], row[j2] = row[j2], row[j1]
        for row in T:
            row[j1], row[j2] = row[j2], row[j1]

    # column echelon reduction: process rows, clearing to the right
    top = 0
    col = 0
    while top < m and col < n:
        piv = None
        for j in range(col, n):
            if D[top][j]:
                if piv is None or abs(D[top][j]) < abs(D[top][piv]):
                    piv = j
        if piv is None:
            top += 1
            continue
        if piv != col:
            col_swap(col, piv)
        while True:
            done = True
            for j in range(col + 1, n):
                if D[top][j]:
                    q = D[top][j] // D[top][col]
                    if q:
                        col_op(col, j, q)
                    if D[top][j]:
                        col_swap(col, j)
                        done = False
            if done:
                break
        top += 1
        col += 1
    kernel = []
    for j in range(n):
        if all(D[i][j] == 0 for i in range(m)):
            kernel.append(tuple(T[i][j] for i in range(n)))
    return kernel

"""Lattice polytopes up to translation, Minkowski/Grothendieck arithmetic,
and the torsion-polytope output formulas for RAAGs.

All geometry is exact: vertex sets are integer points, redundancy is decided
by a small rational-arithmetic LP, and polytope equality is equality of
translation-normalized vertex sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .intmat import rank
from .simplicial import chain_complex, link, reduced_euler_characteristic
from .chains import homology as chain_homology

__all__ = [
    "LatticePolytope",
    "FormalPolytopeDifference",
    "LaurentPolynomial",
    "minkowski_sum",
    "support_polytope",
    "thickness",
    "raag_torsion_polytope",
    "kernel_euler_char",
    "TorsionWord",
    "universal_torsion_symbol",
    "graph_product_torsion_symbol",
    "polytope_of_symbol",
    "is_rationally_acyclic",
]


def _point_in_hull(point, others):
    """Exact membership of an integer point in the convex hull of others.

    Phase-one simplex with Fraction arithmetic and Bland's rule on the
    feasibility system  sum l_i q_i = p, sum l_i = 1, l >= 0.
    """
    if not others:
        return False
    d = len(point)
    n = len(others)
    # constraint rows: one per coordinate plus the affine row
    rows = []
    for k in range(d):
        rows.append([Fraction(q[k]) for q in others] + [Fraction(point[k])])
    rows.append([Fraction(1)] * n + [Fraction(1)])
    m = d + 1
    # flip rows to make the right-hand sides nonnegative
    for row in rows:
        if row[-1] < 0:
            for j in range(len(row)):
                row[j] = -row[j]
    # artificial basis: variable n + k in row k; objective = sum of artificials
    total_vars = n + m
    tableau = []
    for k, row in enumerate(rows):
        t = row[:-1] + [Fraction(0)] * m + [row[-1]]
        t[n + k] = Fraction(1)
        tableau.append(t)
    basis = [n + k for k in range(m)]
    cost = [Fraction(0)] * (total_vars + 1)
    for k in range(m):
        for j in range(total_vars + 1):
            cost[j] += tableau[k][j]

    while True:
        enter = -1
        for j in range(total_vars):
            if cost[j] > 0 and not (n <= j < n + m and False):
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = None
        for k in range(m):
            a = tableau[k][enter]
            if a > 0:
                ratio = tableau[k][-1] / a
                if best is None or ratio < best or (ratio == best and basis[k] < basis[leave]):
                    best = ratio
                    leave = k
        if leave < 0:
            break  # unbounded cannot happen for this system; bail out safely
        piv = tableau[leave][enter]
        row = tableau[leave]
        for j in range(total_vars + 1):
            row[j] /= piv
        for k in range(m):
            if k != leave and tableau[k][enter]:
                f = tableau[k][enter]
                tk = tableau[k]
                for j in range(total_vars + 1):
                    tk[j] -= f * row[j]
        if cost[enter]:
            f = cost[enter]
            for j in range(total_vars + 1):
                cost[j] -= f * row[j]
        basis[leave] = enter
    return cost[-1] == 0


def _extreme_points(points):
    pts = sorted(set(points))
    if len(pts) <= 1:
        return pts
    out = []
    for i, p in enumerate(pts):
        others = pts[:i] + pts[i + 1 :]
        if not _point_in_hull(p, others):
            out.append(p)
    return out


class LatticePolytope:
    """Translation-normalized convex hull of finitely many integer points."""

    __slots__ = ("ambient", "vertices")

    def __init__(self, ambient, points):
        self.ambient = tuple(str(s) for s in ambient)
        pts = [tuple(int(x) for x in p) for p in points]
        if not pts:
            raise ValueError("a polytope needs at least one point")
        d = len(self.ambient)
        for p in pts:
            if len(p) != d:
                raise ValueError("point dimension does not match the ambient coordinates")
        mins = [min(p[k] for p in pts) for k in range(d)]
        shifted = [tuple(p[k] - mins[k] for k in range(d)) for p in pts]
        self.vertices = tuple(_extreme_points(shifted))

    @classmethod
    def point(cls, ambient):
        return cls(ambient, [tuple(0 for _ in ambient)])

    @classmethod
    def segment(cls, ambient, direction, length=1):
        """The interval from 0 to length*e_direction."""
        ambient = tuple(str(s) for s in ambient)
        idx = ambient.index(str(direction))
        zero = tuple(0 for _ in ambient)
        end = tuple(length if k == idx else 0 for k in range(len(ambient)))
        return cls(ambient, [zero, end])

    @classmethod
    def box(cls, ambient, side_lengths):
        """Axis box with the given (coordinate -> length) sides, others 0."""
        ambient = tuple(str(s) for s in ambient)
        sides = [int(side_lengths.get(s, 0)) for s in ambient]
        if any(v < 0 for v in sides):
            raise ValueError("box side lengths must be nonnegative")
        support = [k for k, v in enumerate(sides) if v]
        corners = []
        for choose in itertools.product((0, 1), repeat=len(support)):
            p = [0] * len(ambient)
            for bit, k in zip(choose, support):
                p[k] = bit * sides[k]
            corners.append(tuple(p))
        return cls(ambient, corners)

    def translate_of(self, other):
        return self == other  # normalization makes translation classes canonical

    def __eq__(self, other):
        if not isinstance(other, LatticePolytope):
            return NotImplemented
        return self.ambient == other.ambient and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.ambient, self.vertices))

    def __repr__(self):
        return f"LatticePolytope({self.ambient}, {list(self.vertices)})"


def minkowski_sum(P, Q):
    """Hull of pairwise sums, renormalized."""
    if P.ambient != Q.ambient:
        raise ValueError("Minkowski sum needs matching ambient coordinates")
    sums = [tuple(a + b for a, b in zip(p, q)) for p in P.vertices for q in Q.vertices]
    return LatticePolytope(P.ambient, sums)


@dataclass(frozen=True)
class FormalPolytopeDifference:
    """Element positive - negative of the polytope Grothendieck group."""

    positive: LatticePolytope
    negative: LatticePolytope

    def __post_init__(self):
        if self.positive.ambient != self.negative.ambient:
            raise ValueError("both parts must share the ambient coordinates")

    def __eq__(self, other):
        if not isinstance(other, FormalPolytopeDifference):
            return NotImplemented
        left = minkowski_sum(self.positive, other.negative)
        right = minkowski_sum(other.positive, self.negative)
        return left == right

    def __neg__(self):
        return FormalPolytopeDifference(self.negative, self.positive)

    def __repr__(self):
        return f"({self.positive!r}) - ({self.negative!r})"


class LaurentPolynomial:
    """Integer combination of monomials in Z^S, S a labelled coordinate set."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient, terms):
        self.ambient = tuple(str(s) for s in ambient)
        clean = {}
        for mono, coeff in terms.items():
            mono = tuple(int(x) for x in mono)
            if len(mono) != len(self.ambient):
                raise ValueError("monomial exponent length mismatch")
            coeff = int(coeff)
            if coeff:
                clean[mono] = clean.get(mono, 0) + coeff
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def generator(cls, ambient, name):
        ambient = tuple(str(s) for s in ambient)
        idx = ambient.index(str(name))
        mono = tuple(1 if k == idx else 0 for k in range(len(ambient)))
        return cls(ambient, {mono: 1})

    @classmethod
    def one(cls, ambient):
        return cls(ambient, {tuple(0 for _ in ambient): 1})

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) + c
        return LaurentPolynomial(self.ambient, acc)

    def __sub__(self, other):
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = acc.get(m, 0) - c
        return LaurentPolynomial(self.ambient, acc)

    def __mul__(self, other):
        acc = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return LaurentPolynomial(self.ambient, acc)

    def __eq__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        return self.ambient == other.ambient and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        return f"LaurentPolynomial({self.ambient}, {self.terms})"


def support_polytope(f):
    """Convex hull of the exponent vectors of the nonzero terms."""
    if f.is_zero():
        raise ValueError("the zero element has no support polytope")
    return LatticePolytope(f.ambient, list(f.terms))


def thickness(D, phi):
    """Diameter of the image under phi, extended to formal differences.

    Accepts a single polytope or a FormalPolytopeDifference; phi maps
    coordinate labels to integers (missing labels count as 0).
    """
    if isinstance(D, FormalPolytopeDifference):
        return thickness(D.positive, phi) - thickness(D.negative, phi)
    weights = [int(phi.get(s, 0)) for s in D.ambient]
    values = [sum(w * x for w, x in zip(weights, v)) for v in D.vertices]
    return max(values) - min(values)


# ---------------------------------------------------------------------------
# RAAG formulas
# ---------------------------------------------------------------------------


def is_rationally_acyclic(L):
    """All reduced rational Betti numbers vanish (torsion is allowed)."""
    cx = chain_complex(L, reduced=True)
    for d in cx.degrees():
        n = cx.dim(d)
        if n == 0:
            continue
        if n - rank(cx.boundary(d)) - rank(cx.boundary(d + 1)):
            return False
    return True


def _require_acyclic_flag(L):
    if not L.is_flag():
        raise ValueError("input complex must be flag")
    if not is_rationally_acyclic(L):
        raise ValueError("input complex must be rationally acyclic")


def _link_chi(L):
    return {v: reduced_euler_characteristic(link(L, (v,))) for v in L.vertices}


def raag_torsion_polytope(L):
    """The torsion polytope as a formal difference of two axis boxes.

    The positive cube has side chi~(Lk(s)) in direction s over the vertices
    with positive reduced link Euler characteristic; the negative cube uses
    the vertices with negative values.  This orientation is the one for
    which -thickness reproduces the kernel Euler characteristic formula.
    """
    _require_acyclic_flag(L)
    chi = _link_chi(L)
    ambient = L.vertices
    pos = LatticePolytope.box(ambient, {s: c for s, c in chi.items() if c > 0})
    neg = LatticePolytope.box(ambient, {s: -c for s, c in chi.items() if c < 0})
    return FormalPolytopeDifference(pos, neg)


def kernel_euler_char(L, phi):
    """Euler characteristic of the kernel of the character phi.

    phi must be nonzero on every generator.  The formula value
    -sum_s |phi(s)| chi~(Lk(s)) is cross-checked against the thickness of
    the torsion polytope before being returned.
    """
    _require_acyclic_flag(L)
    phi = {str(k): int(v) for k, v in phi.items()}
    for s in L.vertices:
        if phi.get(s, 0) == 0:
            raise ValueError(
                f"character vanishes on generator {s!r}; such kernels are rejected"
            )
    chi = _link_chi(L)
    value = -sum(abs(phi[s]) * chi[s] for s in L.vertices)
    cross = -thickness(raag_torsion_polytope(L), phi)
    if value != cross:
        raise AssertionError(
            f"kernel Euler characteristic {value} disagrees with -thickness {cross}"
        )
    return value


@dataclass(frozen=True)
class TorsionWord:
    """A rational torsion factor times a product of powers of (s - 1)."""

    factor: Fraction
    exponents: tuple  # ((symbol, exponent), ...) sorted

    def __init__(self, factor, exponents):
        object.__setattr__(self, "factor", Fraction(factor))
        if hasattr(exponents, "items"):
            items = tuple(sorted((str(k), int(v)) for k, v in exponents.items()))
        else:
            items = tuple(sorted((str(k), int(v)) for k, v in exponents))
        object.__setattr__(self, "exponents", items)

    def exponent_of(self, symbol):
        for k, v in self.exponents:
            if k == str(symbol):
                return v
        return 0

    def render(self):
        if self.factor.denominator == 1:
            parts = [str(self.factor.numerator)]
        else:
            parts = [f"{self.factor.numerator}/{self.factor.denominator}"]
        for sym, e in self.exponents:
            if e:
                parts.append(f"({sym}-1)^{e}")
        return " * ".join(parts)

    def __str__(self):
        return self.render()


def _homology_torsion_factor(L):
    """prod_{n>=2} |H_{n-1}(L)_tor|^(-1)^n as an exact rational."""
    groups = chain_homology(chain_complex(L, reduced=True))
    out = Fraction(1)
    for d, g in groups.items():
        n = d + 1
        if n >= 2:
            if n % 2 == 0:
                out *= g.torsion_order
            else:
                out /= g.torsion_order
    return out


def universal_torsion_symbol(L):
    """Universal torsion of the RAAG on L, as torsion factor and exponents.

    The exponent of (s-1) is -chi~(Lk(s)); zero exponents are kept so the
    full generator set stays visible.
    """
    _require_acyclic_flag(L)
    chi = _link_chi(L)
    return TorsionWord(_homology_torsion_factor(L), {s: -c for s, c in chi.items()})


def graph_product_torsion_symbol(L, vertex_data):
    """Torsion word of a graph product, over the supplied vertex symbols.

    vertex_data maps each vertex to an opaque symbol for the vertex group's
    own torsion; symbols with zero exponent are dropped, repeated symbols
    accumulate their exponents.
    """
    _require_acyclic_flag(L)
    vertex_data = {str(k): str(v) for k, v in vertex_data.items()}
    missing = [v for v in L.vertices if v not in vertex_data]
    if missing:
        raise ValueError(f"missing torsion symbols for vertices {missing}")
    chi = _link_chi(L)
    exps = {}
    for v in L.vertices:
        e = -chi[v]
        if e:
            sym = vertex_data[v]
            exps[sym] = exps.get(sym, 0) + e
    exps = {s: e for s, e in exps.items() if e}
    return TorsionWord(_homology_torsion_factor(L), exps)


def polytope_of_symbol(word, ambient=None):
    """Support-polytope difference of a torsion word, ignoring the factor.

    Exponent e on (s-1) contributes e copies of the unit interval in the
    s direction; the result is the formal difference of the two boxes.
    """
    if ambient is None:
        ambient = tuple(sym for sym, _ in word.exponents)
    pos = LatticePolytope.box(ambient, {s: e for s, e in word.exponents if e > 0})
    neg = LatticePolytope.box(ambient, {s: -e for s, e in word.exponents if e < 0})
    return FormalPolytopeDifference(pos, neg)

"""Finite abstract simplicial complexes and their integral chain complexes.

Vertices are totally ordered string labels; a simplex is the sorted tuple of
its vertices, and boundary signs come from that sorted order, so homology is
reproducible across runs and platforms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .chains import IntegerChainComplex, betti_numbers_mod_p
from .chains import homology as chain_homology
from .intmat import SparseIntMatrix

__all__ = [
    "Graph",
    "SimplicialComplex",
    "flag_complex",
    "link",
    "barycentric_subdivision",
    "cone",
    "davis_chamber",
    "chain_complex",
    "homology",
    "reduced_euler_characteristic",
    "BARYCENTER_SEPARATOR",
]

BARYCENTER_SEPARATOR = "."
_CONE_APEX = "*"


@dataclass(frozen=True)
class Graph:
    """A finite simple undirected graph on string-labelled vertices."""

    vertices: tuple
    edges: frozenset

    def __init__(self, vertices, edges):
        verts = tuple(sorted({str(v) for v in vertices}))
        if len(verts) != len(set(vertices)):
            raise ValueError("duplicate vertices")
        vert_set = set(verts)
        norm = set()
        for e in edges:
            a, b = (str(x) for x in e)
            if a == b:
                raise ValueError(f"loop edge at {a!r}")
            if a not in vert_set or b not in vert_set:
                raise ValueError(f"edge ({a},{b}) references undeclared vertices")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", frozenset(norm))

    def neighbors(self, v):
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    @classmethod
    def path(cls, labels):
        labels = [str(x) for x in labels]
        return cls(labels, {(labels[i], labels[i + 1]) for i in range(len(labels) - 1)})

    @classmethod
    def cycle(cls, labels):
        labels = [str(x) for x in labels]
        n = len(labels)
        return cls(labels, {(labels[i], labels[(i + 1) % n]) for i in range(n)})

    @classmethod
    def star(cls, center, leaves):
        center = str(center)
        leaves = [str(x) for x in leaves]
        return cls([center] + leaves, {(center, leaf) for leaf in leaves})


class SimplicialComplex:
    """Face-closed collection of sorted vertex tuples (the empty simplex is
    not stored; reduced chain complexes add it at degree -1)."""

    __slots__ = ("vertices", "simplices", "_by_dim")

    def __init__(self, vertices, simplices):
        verts = tuple(sorted({str(v) for v in vertices}))
        vert_set = set(verts)
        closed = set()
        for s in simplices:
            s = tuple(sorted(str(v) for v in s))
            if not s:
                continue
            if len(set(s)) != len(s):
                raise ValueError(f"repeated vertex in simplex {s}")
            for v in s:
                if v not in vert_set:
                    raise ValueError(f"simplex {s} references unknown vertex {v!r}")
            for k in range(1, len(s) + 1):
                closed.update(itertools.combinations(s, k))
        self.vertices = verts
        self.simplices = frozenset(closed)
        by_dim = {}
        for s in closed:
            by_dim.setdefault(len(s) - 1, []).append(s)
        self._by_dim = {d: sorted(ss) for d, ss in by_dim.items()}

    @classmethod
    def from_simplices(cls, simplices, extra_vertices=()):
        verts = set(str(v) for v in extra_vertices)
        for s in simplices:
            verts.update(str(v) for v in s)
        return cls(verts, simplices)

    @property
    def dim(self):
        return max(self._by_dim) if self._by_dim else -1

    def is_empty(self):
        return not self.vertices and not self.simplices

    def simplices_of_dim(self, d):
        return self._by_dim.get(d, [])

    def f_vector(self):
        return tuple(len(self.simplices_of_dim(d)) for d in range(self.dim + 1))

    def contains(self, simplex):
        return tuple(sorted(str(v) for v in simplex)) in self.simplices

    def euler_characteristic(self):
        return sum((-1) ** d * len(ss) for d, ss in self._by_dim.items())

    def one_skeleton(self):
        return Graph(self.vertices, self.simplices_of_dim(1))

    def is_flag(self):
        """True when every clique of the 1-skeleton spans a simplex."""
        g = self.one_skeleton()
        adj = {v: g.neighbors(v) for v in g.vertices}
        for clique in _cliques(adj):
            if len(clique) >= 3 and clique not in self.simplices:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.vertices == other.vertices and self.simplices == other.simplices

    __hash__ = None

    def __repr__(self):
        return f"SimplicialComplex(vertices={len(self.vertices)}, f={self.f_vector()})"


def _cliques(adj):
    """All nonempty cliques, as sorted tuples, by sorted-candidate growth."""
    order = sorted(adj)
    out = []

    def grow(prefix, candidates):
        for i, v in enumerate(candidates):
            cur = prefix + (v,)
            out.append(cur)
            grow(cur, [w for w in candidates[i + 1 :] if w in adj[v]])

    grow((), order)
    return out


def flag_complex(g):
    """The simplicial complex whose simplices are the cliques of the graph."""
    adj = {v: g.neighbors(v) for v in g.vertices}
    return SimplicialComplex(g.vertices, _cliques(adj))


def link(K, simplex):
    """Faces disjoint from the simplex whose union with it stays in K."""
    s = tuple(sorted(str(v) for v in simplex))
    if s not in K.simplices:
        raise ValueError(f"simplex {s} is not in the complex")
    s_set = set(s)
    faces = []
    verts = set()
    for t in K.simplices:
        if s_set.isdisjoint(t) and tuple(sorted(s + t)) in K.simplices:
            faces.append(t)
            verts.update(t)
    return SimplicialComplex(verts, faces)


def _bary_label(simplex):
    for v in simplex:
        if BARYCENTER_SEPARATOR in v:
            raise ValueError(
                f"vertex label {v!r} contains {BARYCENTER_SEPARATOR!r};"
                " cannot form subdivision labels"
            )
    return BARYCENTER_SEPARATOR.join(simplex)


def barycentric_subdivision(K):
    """Vertices are the nonempty faces of K; simplices are inclusion chains."""
    labels = {s: _bary_label(s) for s in K.simplices}
    chains = []

    faces_of = {}
    for s in K.simplices:
        faces_of[s] = [
            t
            for k in range(1, len(s))
            for t in itertools.combinations(s, k)
        ]

    def grow(chain, top):
        chains.append(chain)
        for f in faces_of[top]:
            grow(chain + (labels[f],), f)

    for s in K.simplices:
        grow((labels[s],), s)
    return SimplicialComplex(labels.values(), chains)


def cone(K, apex=_CONE_APEX):
    """The cone: every face of K joined to a fresh apex vertex."""
    apex = str(apex)
    if apex in K.vertices:
        raise ValueError(f"apex label {apex!r} already used")
    simplices = [(apex,)]
    for s in K.simplices:
        simplices.append(s)
        simplices.append(tuple(sorted(s + (apex,))))
    return SimplicialComplex(set(K.vertices) | {apex}, simplices)


def davis_chamber(L):
    """(K, dK): the cone on the barycentric subdivision, and the subdivision.

    The apex plays the role of the empty face of L, so for empty L the
    chamber degenerates to a single point with empty boundary.
    """
    boundary = barycentric_subdivision(L)
    return cone(boundary, _CONE_APEX), boundary


def chain_complex(K, reduced=False):
    """Simplicial chains with alternating-sign boundaries in sorted order.

    The reduced variant adds a degree -1 generator hit by the augmentation.
    """
    dims = {}
    diffs = {}
    index_of = {}
    for d in range(K.dim + 1):
        ss = K.simplices_of_dim(d)
        dims[d] = len(ss)
        index_of[d] = {s: i for i, s in enumerate(ss)}
    for d in range(1, K.dim + 1):
        entries = {}
        for j, s in enumerate(K.simplices_of_dim(d)):
            for drop in range(len(s)):
                face = s[:drop] + s[drop + 1 :]
                entries[(index_of[d - 1][face], j)] = (-1) ** drop
        diffs[d] = SparseIntMatrix(dims[d - 1], dims[d], entries)
    if reduced:
        dims[-1] = 1
        n0 = dims.get(0, 0)
        if n0:
            diffs[0] = SparseIntMatrix(1, n0, {(0, j): 1 for j in range(n0)})
    return IntegerChainComplex(dims, diffs)


def homology(K, coeff="Z", reduced=False):
    """Per-degree integral homology, or F_p Betti numbers for prime coeff."""
    cx = chain_complex(K, reduced=reduced)
    if coeff == "Z":
        return chain_homology(cx)
    return betti_numbers_mod_p(cx, int(coeff))


def reduced_euler_characteristic(K):
    """chi - 1; the empty complex contributes only the -1 term."""
    return K.euler_characteristic() - 1

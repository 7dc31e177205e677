"""Salvetti cube complexes of right-angled Artin groups and finite covers.

Cells of the Salvetti complex are the cliques of the defining flag complex
(one vertex for the empty clique); the boundary of a cube is recorded
symbolically as group-ring entries (-1)^j (1 - v_j), which specialize to
honest integer matrices over any finite abelian quotient of the group.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

from .chains import IntegerChainComplex, betti_numbers_mod_p
from .chains import homology as chain_homology
from .intmat import SparseIntMatrix

__all__ = [
    "CoverSizeError",
    "SalvettiComplex",
    "salvetti",
    "CoverSpec",
    "finite_cover_complex",
    "cover_homology",
    "residual_chain",
    "COVER_CAP_ENV",
    "DEFAULT_COVER_CAP",
]

COVER_CAP_ENV = "TORSIONLAB_COVER_CAP"
DEFAULT_COVER_CAP = 500_000


class CoverSizeError(ValueError):
    """Raised when a requested cover would exceed the generator cap."""


class SalvettiComplex:
    """Cube complex with one cell per clique of a flag complex."""

    __slots__ = ("base", "generators", "cells", "boundary_symbols")

    def __init__(self, base, generators, cells, boundary_symbols):
        self.base = base
        self.generators = generators
        self.cells = cells
        self.boundary_symbols = boundary_symbols

    @property
    def dim(self):
        return max(self.cells)

    def cell_counts(self):
        return {d: len(cs) for d, cs in self.cells.items()}

    def euler_characteristic(self):
        return sum((-1) ** d * len(cs) for d, cs in self.cells.items())

    def __repr__(self):
        return f"SalvettiComplex(generators={len(self.generators)}, cells={self.cell_counts()})"


def _symbolic_square_is_zero(boundary_symbols, cell):
    """Check d(d(cell)) == 0 in the group ring of the free abelian group."""
    acc = {}

    def add_term(face, monomial, coeff):
        key = (face, monomial)
        nv = acc.get(key, 0) + coeff
        if nv:
            acc[key] = nv
        else:
            del acc[key]

    for face, v, sign in boundary_symbols[cell]:
        # sign * (1 - v) applied to the second differential
        for face2, w, sign2 in boundary_symbols[face]:
            s = sign * sign2
            # (1 - v)(1 - w) = 1 - v - w + vw
            add_term(face2, (), s)
            add_term(face2, (v,), -s)
            add_term(face2, (w,), -s)
            add_term(face2, tuple(sorted((v, w))), s)
    return not acc


def salvetti(L):
    """The Salvetti complex of the RAAG on the flag complex L."""
    if not L.is_flag():
        raise ValueError("defining complex is not flag")
    generators = L.vertices
    cells = {0: [()]}
    for d in range(L.dim + 1):
        cells[d + 1] = list(L.simplices_of_dim(d))
    boundary_symbols = {(): []}
    for k in range(1, max(cells) + 1):
        for cell in cells[k]:
            terms = []
            for j, v in enumerate(cell, start=1):
                face = tuple(x for x in cell if x != v)
                terms.append((face, v, (-1) ** j))
            boundary_symbols[cell] = terms
    for k in range(2, max(cells) + 1):
        for cell in cells[k]:
            if not _symbolic_square_is_zero(boundary_symbols, cell):
                raise AssertionError(f"symbolic boundary fails d*d = 0 on {cell}")
    return SalvettiComplex(L, generators, cells, boundary_symbols)


@dataclass(frozen=True)
class CoverSpec:
    """Finite abelian quotient data: one modulus per generator."""

    moduli: tuple  # ((generator, modulus), ...) sorted by generator

    def __init__(self, moduli):
        if hasattr(moduli, "items"):
            items = tuple(sorted((str(k), int(v)) for k, v in moduli.items()))
        else:
            items = tuple(sorted((str(k), int(v)) for k, v in moduli))
        for _g, m in items:
            if m < 1:
                raise ValueError("moduli must be positive")
        object.__setattr__(self, "moduli", items)

    @classmethod
    def uniform(cls, generators, m):
        return cls({g: m for g in generators})

    def modulus(self, g):
        for k, v in self.moduli:
            if k == g:
                return v
        raise KeyError(g)

    @property
    def index(self):
        n = 1
        for _g, m in self.moduli:
            n *= m
        return n


def _cover_cap(cap):
    if cap is not None:
        return int(cap)
    return int(os.environ.get(COVER_CAP_ENV, DEFAULT_COVER_CAP))


def finite_cover_complex(S, spec, cap=None):
    """Chain complex of the cover attached to the abelian quotient `spec`.

    Generators in degree d are (cell, deck element) pairs; each symbolic
    entry sign*(1 - v) becomes sign*(identity - translation by v) on the
    group algebra of the deck group.
    """
    gens = S.generators
    if tuple(g for g, _m in spec.moduli) != gens:
        raise ValueError("cover spec must give a modulus for every generator")
    moduli = [m for _g, m in spec.moduli]
    index = spec.index
    cap = _cover_cap(cap)
    max_cells = max(len(cs) for cs in S.cells.values())
    if max_cells * index > cap:
        raise CoverSizeError(
            f"cover needs {max_cells * index} generators in some degree, over the cap {cap}"
        )

    # row-major strides: the last generator varies fastest
    strides = [0] * len(gens)
    acc = 1
    for i in range(len(gens) - 1, -1, -1):
        strides[i] = acc
        acc *= moduli[i]
    gen_pos = {g: i for i, g in enumerate(gens)}

    # translation tables: position of (deck + e_v) for every deck position
    translate = {}
    for g in gens:
        i = gen_pos[g]
        m = moduli[i]
        stride = strides[i]
        table = [0] * index
        for pos in range(index):
            digit = (pos // stride) % m
            if digit == m - 1:
                table[pos] = pos - (m - 1) * stride
            else:
                table[pos] = pos + stride
        translate[g] = table

    cell_pos = {d: {c: i for i, c in enumerate(cs)} for d, cs in S.cells.items()}
    dims = {d: len(cs) * index for d, cs in S.cells.items()}
    diffs = {}
    for d in range(1, S.dim + 1):
        entries = {}
        rows = dims.get(d - 1, 0)
        cols = dims[d]
        below = cell_pos[d - 1]
        for ci, cell in enumerate(S.cells[d]):
            col_base = ci * index
            for face, v, sign in S.boundary_symbols[cell]:
                row_base = below[face] * index
                tab = translate[v]
                for g in range(index):
                    col = col_base + g
                    key = (row_base + g, col)
                    nv = entries.get(key, 0) + sign
                    if nv:
                        entries[key] = nv
                    else:
                        del entries[key]
                    key = (row_base + tab[g], col)
                    nv = entries.get(key, 0) - sign
                    if nv:
                        entries[key] = nv
                    else:
                        del entries[key]
        diffs[d] = SparseIntMatrix(rows, cols, entries)
    return IntegerChainComplex(dims, diffs)


def cover_homology(S, spec, degree, coeff="Z", cap=None):
    """Homology of the finite cover in one degree (integral or mod p)."""
    cx = finite_cover_complex(S, spec, cap=cap)
    if coeff == "Z":
        return chain_homology(cx, degree)
    return betti_numbers_mod_p(cx, int(coeff), degree)


def residual_chain(L, base, steps):
    """Cover specs with moduli base^k for k = 1..steps (strictly nested kernels)."""
    if base < 2:
        raise ValueError("base must be >= 2")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    return [CoverSpec.uniform(L.vertices, base**k) for k in range(1, steps + 1)]

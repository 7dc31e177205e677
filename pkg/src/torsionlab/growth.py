"""Both sides of the torsion-growth and mod-p growth formulas, at desk scale.

The right-hand sides are exact: (reduced) homology of the Davis chamber
boundary, which for a RAAG on L is the barycentric subdivision of L.  The
left-hand sides are finite-cover experiments; no convergence is asserted,
only trend checks against the exact values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .chains import betti_numbers_mod_p, homology as chain_homology
from .covers import CoverSizeError, finite_cover_complex, salvetti
from .intmat import smith_normal_form
from .simplicial import barycentric_subdivision, chain_complex

__all__ = [
    "GrowthRow",
    "GrowthTable",
    "fp_betti_rhs",
    "torsion_growth_rhs",
    "growth_experiment",
    "l2_torsion_value",
    "l2_torsion_fraction",
    "LuckReport",
    "luck_approximation_identity",
    "chamber_boundary_homology",
]


def _require_flag(L):
    if not L.is_flag():
        raise ValueError("input complex must be flag")


def chamber_boundary_homology(L):
    """Reduced integral homology of the Davis chamber boundary of L."""
    _require_flag(L)
    dQ = barycentric_subdivision(L)
    return chain_homology(chain_complex(dQ, reduced=True))


def fp_betti_rhs(L, p, i):
    """Reduced F_p Betti number of the chamber boundary in degree i-1."""
    _require_flag(L)
    dQ = barycentric_subdivision(L)
    cx = chain_complex(dQ, reduced=True)
    return betti_numbers_mod_p(cx, p, i - 1)


def torsion_growth_rhs(L, i):
    """log of the torsion order of H_{i-1} of the chamber boundary."""
    _require_flag(L)
    dQ = barycentric_subdivision(L)
    cx = chain_complex(dQ, reduced=True)
    return chain_homology(cx, i - 1).logtor


@dataclass(frozen=True)
class GrowthRow:
    index: int
    degree: int
    raw: object  # int (Betti), float (logtor), or None when skipped
    normalized: object
    note: str = ""


@dataclass
class GrowthTable:
    rows: list
    rhs_value: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        indices = [r.index for r in self.rows]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError("cover indices must strictly increase")
        for r in self.rows:
            if r.raw is not None and r.raw < 0:
                raise ValueError("raw values must be nonnegative")

    CSV_HEADER = "index,degree,raw,normalized,rhs"

    def to_csv(self):
        lines = [self.CSV_HEADER]
        for r in self.rows:
            raw = "" if r.raw is None else repr(r.raw)
            norm = "" if r.normalized is None else repr(r.normalized)
            lines.append(f"{r.index},{r.degree},{raw},{norm},{self.rhs_value!r}")
        return "\n".join(lines) + "\n"


def growth_experiment(L, chain, i, coeff="Z", cap=None):
    """Evaluate normalized cover invariants along a chain of cover specs.

    coeff "Z": raw value is logtor H_i of the cover; prime p: raw value is
    the mod-p Betti number.  Stages over the size cap are kept as rows with
    empty values and an explanatory note.
    """
    if not chain:
        raise ValueError("chain of cover specs must be nonempty")
    _require_flag(L)
    S = salvetti(L)
    if coeff == "Z":
        rhs = torsion_growth_rhs(L, i)
    else:
        rhs = float(fp_betti_rhs(L, int(coeff), i))
    rows = []
    for spec in chain:
        index = spec.index
        try:
            cx = finite_cover_complex(S, spec, cap=cap)
        except CoverSizeError as exc:
            rows.append(GrowthRow(index, i, None, None, note=str(exc)))
            continue
        if coeff == "Z":
            snf = smith_normal_form(cx.boundary(i + 1))
            order = 1
            for d in snf.nontrivial_factors:
                order *= d
            raw = math.log(order)
        else:
            raw = betti_numbers_mod_p(cx, int(coeff), i)
        rows.append(GrowthRow(index, i, raw, raw / index))
    return GrowthTable(rows, rhs, metadata={"coeff": str(coeff), "degree": i})


def _torsion_orders(groups):
    return {d: g.torsion_order for d, g in groups.items()}


def l2_torsion_fraction(data):
    """The product prod_{n>=1} |tor H_n(dQ)|^{-(-1)^n} as an exact rational."""
    if hasattr(data, "simplices"):
        groups = chamber_boundary_homology(data)
    else:
        groups = dict(data)
    out = Fraction(1)
    for n, g in groups.items():
        if n >= 1:
            order = g.torsion_order
            if n % 2:
                out *= order
            else:
                out /= order
    return out


def l2_torsion_value(data):
    """-sum_{n>=1} (-1)^n logtor H_n(dQ): the L2-torsion output formula.

    Accepts a flag complex (the chamber boundary is built from it) or a
    precomputed degree -> group mapping for the boundary.
    """
    frac = l2_torsion_fraction(data)
    return math.log(frac.numerator) - math.log(frac.denominator)


@dataclass(frozen=True)
class LuckReport:
    holds: bool
    lhs_value: float
    rhs_value: float
    lhs_fraction: Fraction
    rhs_fraction: Fraction


def luck_approximation_identity(L):
    """Check sum_i (-1)^i t_i == rho exactly (it is a reindexing of the same
    torsion orders, so the two exact rationals must coincide)."""
    groups = chamber_boundary_homology(L)
    lhs = Fraction(1)
    for d, g in groups.items():
        i = d + 1  # t_i reads H_{i-1}
        order = g.torsion_order
        if i % 2 == 0:
            lhs *= order
        else:
            lhs /= order
    rhs = l2_torsion_fraction(groups)
    lhs_value = math.log(lhs.numerator) - math.log(lhs.denominator)
    rhs_value = math.log(rhs.numerator) - math.log(rhs.denominator)
    return LuckReport(lhs == rhs, lhs_value, rhs_value, lhs, rhs)

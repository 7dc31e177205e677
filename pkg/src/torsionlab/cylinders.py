"""Chain-level mapping cylinders, rebuilt maps and cylindrical filtrations.

Everything is done on chain complexes: gluing a pair (F, E) to a complex X
along f: E -> X produces the complex F_d + E_{d-1} + X_d with the block
differential

        [ dF   i    0  ]
        [ 0   -dE   0  ]
        [ 0   -f   dX  ]

Homotopies run in the fixed global direction  d*s + s*d = id - (back o fwd),
which is the unique convention making the rebuilt block matrices exact chain
maps; all identities are asserted over the integers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .chains import ChainMap, IntegerChainComplex
from .intmat import SparseIntMatrix

__all__ = [
    "ChainPair",
    "PairMap",
    "PairHomotopy",
    "AlgebraicCylinder",
    "assemble_cylinder",
    "differential_norm_bound",
    "RebuildData",
    "RebuildResult",
    "rebuilt_maps",
    "RebuildNormReport",
    "rebuild_norm_report",
    "ComplexRebuild",
    "PairRebuild",
    "CylindricalFiltration",
    "cylindrify",
    "skeletal_filtration",
    "rebuild_filtration",
    "boundary_map",
    "homotopy_deformation",
]


def boundary_map(cx):
    """The differential packaged as a degree -1 chain self-map."""
    return ChainMap(cx, cx, dict(cx.diffs), degree=-1)


def homotopy_deformation(s):
    """id - (d s + s d): the chain map obtained by deforming the identity
    along the degree +1 map s.  Always a chain map, homotopic to id via s."""
    cx = s.source
    if s.target != cx or s.degree != 1:
        raise ValueError("expected a degree +1 self-map")
    bd = boundary_map(cx)
    return ChainMap.identity(cx) - (bd @ s) - (s @ bd)


class ChainPair:
    """A pair (F, E) at chain level: complexes plus a chain map E -> F."""

    __slots__ = ("total", "sub", "incl")

    def __init__(self, total, sub, incl):
        if incl.source != sub or incl.target != total or incl.degree != 0:
            raise ValueError("inclusion must be a degree-0 map from sub to total")
        if not incl.is_chain_map():
            raise ValueError("inclusion is not a chain map")
        self.total = total
        self.sub = sub
        self.incl = incl

    @classmethod
    def split(cls, total, sub):
        """The pair whose inclusion is 'sub sits in the leading coordinates'."""
        parts = {}
        for d in sub.dims:
            n = sub.dim(d)
            if total.dim(d) < n:
                raise ValueError("sub does not fit inside total")
            parts[d] = SparseIntMatrix(total.dim(d), n, {(i, i): 1 for i in range(n)})
        return cls(total, sub, ChainMap(sub, total, parts))

    def has_split_inclusion(self):
        for d in self.sub.dims:
            n = self.sub.dim(d)
            expected = SparseIntMatrix(self.total.dim(d), n, {(i, i): 1 for i in range(n)})
            if self.incl.part(d) != expected:
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, ChainPair):
            return NotImplemented
        return self.total == other.total and self.sub == other.sub and self.incl == other.incl

    __hash__ = None


class PairMap:
    """A map of pairs: components on total and sub commuting with inclusions."""

    __slots__ = ("source", "target", "on_total", "on_sub")

    def __init__(self, source, target, on_total, on_sub):
        if on_total.source != source.total or on_total.target != target.total:
            raise ValueError("total component endpoints wrong")
        if on_sub.source != source.sub or on_sub.target != target.sub:
            raise ValueError("sub component endpoints wrong")
        if on_total.degree or on_sub.degree:
            raise ValueError("pair maps have degree 0")
        if not (on_total.is_chain_map() and on_sub.is_chain_map()):
            raise ValueError("pair map components must be chain maps")
        if on_total @ source.incl != target.incl @ on_sub:
            raise ValueError("pair map does not commute with the inclusions")
        self.source = source
        self.target = target
        self.on_total = on_total
        self.on_sub = on_sub

    @classmethod
    def identity(cls, pair):
        return cls(pair, pair, ChainMap.identity(pair.total), ChainMap.identity(pair.sub))

    def compose(self, other):
        return PairMap(
            other.source, self.target, self.on_total @ other.on_total, self.on_sub @ other.on_sub
        )

    def norm(self, tol=1e-9):
        return max(self.on_total.norm(tol), self.on_sub.norm(tol))


class PairHomotopy:
    """A degree +1 self-map of a pair: components compatible with inclusion."""

    __slots__ = ("pair", "on_total", "on_sub")

    def __init__(self, pair, on_total, on_sub):
        if on_total.source != pair.total or on_total.target != pair.total:
            raise ValueError("total component must be a self-map of the total complex")
        if on_sub.source != pair.sub or on_sub.target != pair.sub:
            raise ValueError("sub component must be a self-map of the sub complex")
        if on_total.degree != 1 or on_sub.degree != 1:
            raise ValueError("homotopies have degree +1")
        if on_total @ pair.incl != pair.incl @ on_sub:
            raise ValueError("homotopy does not commute with the inclusion")
        self.pair = pair
        self.on_total = on_total
        self.on_sub = on_sub

    @classmethod
    def zero(cls, pair):
        return cls(
            pair,
            ChainMap.zero(pair.total, pair.total, degree=1),
            ChainMap.zero(pair.sub, pair.sub, degree=1),
        )

    def deformation(self):
        """The pair map id - (d s + s d) induced on both levels."""
        return PairMap(
            self.pair,
            self.pair,
            homotopy_deformation(self.on_total),
            homotopy_deformation(self.on_sub),
        )

    def norm(self, tol=1e-9):
        return max(self.on_total.norm(tol), self.on_sub.norm(tol))


class AlgebraicCylinder:
    """The glued complex on F_d + E_{d-1} + X_d with the block differential."""

    __slots__ = ("pair", "base", "attach", "assembled", "include_base")

    def __init__(self, pair, base, attach, assembled, include_base):
        self.pair = pair
        self.base = base
        self.attach = attach
        self.assembled = assembled
        self.include_base = include_base

    def block_offsets(self, d):
        """(start of F, start of E, start of X, total) in assembled degree d."""
        nf = self.pair.total.dim(d)
        ne = self.pair.sub.dim(d - 1)
        nx = self.base.dim(d)
        return 0, nf, nf + ne, nf + ne + nx


def _place(entries, block, row_off, col_off):
    for (r, c), v in block.entries.items():
        key = (row_off + r, col_off + c)
        nv = entries.get(key, 0) + v
        if nv:
            entries[key] = nv
        else:
            del entries[key]


def assemble_cylinder(pair, base, attach):
    """Glue (F, E) to X along the chain map attach: E -> X."""
    if attach.source != pair.sub or attach.target != base or attach.degree != 0:
        raise ValueError("attaching map must be a degree-0 map from the sub complex to the base")
    if not attach.is_chain_map():
        raise ValueError("attaching map is not a chain map")
    F, E, X = pair.total, pair.sub, base
    dims = {}
    degrees = set(F.dims) | {d + 1 for d in E.dims} | set(X.dims)
    for d in degrees:
        dims[d] = F.dim(d) + E.dim(d - 1) + X.dim(d)
    diffs = {}
    for d in sorted(degrees | {d + 1 for d in degrees}):
        nf, ne, nx = F.dim(d), E.dim(d - 1), X.dim(d)
        rf, re, rx = F.dim(d - 1), E.dim(d - 2), X.dim(d - 1)
        rows = rf + re + rx
        cols = nf + ne + nx
        if rows == 0 or cols == 0:
            continue
        entries = {}
        _place(entries, F.boundary(d), 0, 0)
        _place(entries, pair.incl.part(d - 1), 0, nf)
        _place(entries, -E.boundary(d - 1), rf, nf)
        _place(entries, -attach.part(d - 1), rf + re, nf)
        _place(entries, X.boundary(d), rf + re, nf + ne)
        if entries:
            diffs[d] = SparseIntMatrix(rows, cols, entries)
    assembled = IntegerChainComplex(dims, diffs)
    include_parts = {}
    for d in X.dims:
        nf, ne = F.dim(d), E.dim(d - 1)
        nx = X.dim(d)
        include_parts[d] = SparseIntMatrix(
            dims.get(d, 0), nx, {(nf + ne + i, i): 1 for i in range(nx)}
        )
    include_base = ChainMap(X, assembled, include_parts)
    cyl = AlgebraicCylinder(pair, base, attach, assembled, include_base)
    if not include_base.is_chain_map():
        raise AssertionError("base inclusion failed to be a chain map")
    return cyl


def differential_norm_bound(cyl, tol=1e-9):
    """(actual, bound) for the assembled differential norm:
    bound = 1 + |f| + |dF| + |dE| + |dX|."""
    actual = cyl.assembled.differential_norm(tol)
    bound = (
        1.0
        + cyl.attach.norm(tol)
        + cyl.pair.total.differential_norm(tol)
        + cyl.pair.sub.differential_norm(tol)
        + cyl.base.differential_norm(tol)
    )
    return actual, bound


# ---------------------------------------------------------------------------
# Rebuilding
# ---------------------------------------------------------------------------


class RebuildData:
    """Homotopy-equivalence data replacing (F, E) and X in a cylinder.

    forward/backward maps at pair level (g, g') and base level (h, h'), with
    homotopies gamma (pair) and sigma (base) satisfying, exactly,
    d*gamma + gamma*d = id - g'g  and  d*sigma + sigma*d = id - h'h.
    """

    __slots__ = ("new_pair", "new_base", "g", "g_back", "h", "h_back", "gamma", "sigma")

    def __init__(self, new_pair, new_base, g, g_back, h, h_back, gamma, sigma):
        self.new_pair = new_pair
        self.new_base = new_base
        self.g = g
        self.g_back = g_back
        self.h = h
        self.h_back = h_back
        self.gamma = gamma
        self.sigma = sigma

    @classmethod
    def identity(cls, cyl):
        pair, base = cyl.pair, cyl.base
        return cls(
            pair,
            base,
            PairMap.identity(pair),
            PairMap.identity(pair),
            ChainMap.identity(base),
            ChainMap.identity(base),
            PairHomotopy.zero(pair),
            ChainMap.zero(base, base, degree=1),
        )

    def validate(self, cyl):
        pair, base = cyl.pair, cyl.base
        if self.g.source != pair or self.g.target != self.new_pair:
            raise ValueError("g must map the cylinder pair to the new pair")
        if self.g_back.source != self.new_pair or self.g_back.target != pair:
            raise ValueError("g' must map the new pair back")
        if self.h.source != base or self.h.target != self.new_base:
            raise ValueError("h must map the base to the new base")
        if self.h_back.source != self.new_base or self.h_back.target != base:
            raise ValueError("h' must map the new base back")
        if not self.h.is_chain_map() or not self.h_back.is_chain_map():
            raise ValueError("base replacement maps must be chain maps")
        if self.gamma.pair != pair:
            raise ValueError("gamma must be a homotopy on the cylinder pair")
        round_total = self.g_back.on_total @ self.g.on_total
        round_sub = self.g_back.on_sub @ self.g.on_sub
        id_total = ChainMap.identity(pair.total)
        id_sub = ChainMap.identity(pair.sub)
        if not self.gamma.on_total.is_homotopy_between(id_total, round_total):
            raise ValueError("gamma fails d*s + s*d = id - g'g on the total complex")
        if not self.gamma.on_sub.is_homotopy_between(id_sub, round_sub):
            raise ValueError("gamma fails d*s + s*d = id - g'g on the sub complex")
        if self.sigma.source != base or self.sigma.target != base or self.sigma.degree != 1:
            raise ValueError("sigma must be a degree +1 self-map of the base")
        if not self.sigma.is_homotopy_between(
            ChainMap.identity(base), self.h_back @ self.h
        ):
            raise ValueError("sigma fails d*s + s*d = id - h'h on the base")


@dataclass
class RebuildResult:
    new_attach: ChainMap
    forward: ChainMap
    backward: ChainMap
    homotopy: ChainMap
    target: AlgebraicCylinder


def _cylinder_block_map(src_cyl, dst_cyl, degree, ff, ee, xe, xx):
    """Assemble a map between cylinders from the four possibly-nonzero blocks.

    ff: F -> F', ee: E -> E', xe: E -> X' (one degree up from ee when
    degree == 1), xx: X -> X'.  The E blocks live one assembled degree up.
    """
    parts = {}
    for d in src_cyl.assembled.degrees():
        sf, se_, sx, scols = src_cyl.block_offsets(d)
        td = d + degree
        tf, te, tx, trows = dst_cyl.block_offsets(td)
        entries = {}
        _place(entries, ff.part(d), 0, 0)
        _place(entries, ee.part(d - 1), te, se_)
        _place(entries, xe.part(d - 1), tx, se_)
        _place(entries, xx.part(d), tx, sx)
        if trows and scols:
            parts[d] = SparseIntMatrix(trows, scols, entries)
    return ChainMap(src_cyl.assembled, dst_cyl.assembled, parts, degree)


def rebuilt_maps(cyl, data, check=True):
    """Rebuild a cylinder along replacement data.

    Returns the new attaching map f' = h f g'_E, the induced homotopy
    equivalences between the assembled complexes, the homotopy between their
    round trip and the identity, and the rebuilt cylinder.  All chain-map and
    homotopy identities are verified exactly unless check=False.
    """
    if check:
        data.validate(cyl)
    f = cyl.attach
    new_attach = data.h @ f @ data.g_back.on_sub
    target = assemble_cylinder(data.new_pair, data.new_base, new_attach)

    forward = _cylinder_block_map(
        cyl,
        target,
        0,
        data.g.on_total,
        data.g.on_sub,
        -(data.h @ f @ data.gamma.on_sub),
        data.h,
    )
    backward = _cylinder_block_map(
        target,
        cyl,
        0,
        data.g_back.on_total,
        data.g_back.on_sub,
        data.sigma @ f @ data.g_back.on_sub,
        data.h_back,
    )
    homotopy = _cylinder_block_map(
        cyl,
        cyl,
        1,
        data.gamma.on_total,
        -data.gamma.on_sub,
        -(data.sigma @ f @ data.gamma.on_sub),
        data.sigma,
    )
    if check:
        if not forward.is_chain_map():
            raise AssertionError("rebuilt forward map is not a chain map")
        if not backward.is_chain_map():
            raise AssertionError("rebuilt backward map is not a chain map")
        identity = ChainMap.identity(cyl.assembled)
        if not homotopy.is_homotopy_between(identity, backward @ forward):
            raise AssertionError("rebuilt homotopy identity failed")
    return RebuildResult(new_attach, forward, backward, homotopy, target)


@dataclass
class RebuildNormReport:
    """Actual norms against the composed upper bounds for one rebuild."""

    norm_forward: float
    bound_forward: float
    norm_backward: float
    bound_backward: float
    norm_homotopy: float
    bound_homotopy: float
    norm_attach: float
    bound_attach: float
    norm_differential: float
    bound_differential: float

    def pairs(self):
        return (
            ("forward", self.norm_forward, self.bound_forward),
            ("backward", self.norm_backward, self.bound_backward),
            ("homotopy", self.norm_homotopy, self.bound_homotopy),
            ("attach", self.norm_attach, self.bound_attach),
            ("differential", self.norm_differential, self.bound_differential),
        )

    def all_within(self, rel_slack=1e-6):
        return all(a <= b * (1.0 + rel_slack) + 1e-9 for _, a, b in self.pairs())


def rebuild_norm_report(cyl, data, result, tol=1e-9, h_bound=None, h_back_bound=None, sigma_bound=None):
    """Norms of the rebuilt maps against the composed bounds.

    When rebuilding inductively the base-level maps are themselves rebuilt
    maps; their previously derived bounds can be passed in so the report
    composes bounds recursively instead of using actual norms.
    """
    f_norm = cyl.attach.norm(tol)
    g_norm = data.g.on_total.norm(tol)
    g_sub_norm = data.g.on_sub.norm(tol)
    gb_norm = data.g_back.on_total.norm(tol)
    gb_sub_norm = data.g_back.on_sub.norm(tol)
    gam_norm = data.gamma.norm(tol)
    gam_sub_norm = data.gamma.on_sub.norm(tol)
    h_norm = data.h.norm(tol) if h_bound is None else h_bound
    hb_norm = data.h_back.norm(tol) if h_back_bound is None else h_back_bound
    sig_norm = data.sigma.norm(tol) if sigma_bound is None else sigma_bound

    bound_forward = g_norm + g_sub_norm + h_norm + h_norm * f_norm * gam_norm
    bound_backward = gb_norm + gb_sub_norm + hb_norm + sig_norm * f_norm * gb_sub_norm
    bound_homotopy = gam_norm + sig_norm + gam_sub_norm + sig_norm * f_norm * gam_norm
    bound_attach = h_norm * f_norm * max(gb_norm, gb_sub_norm)
    new_pair = data.new_pair
    bound_diff = (
        1.0
        + bound_attach
        + new_pair.total.differential_norm(tol)
        + new_pair.sub.differential_norm(tol)
        + data.new_base.differential_norm(tol)
    )
    return RebuildNormReport(
        result.forward.norm(tol),
        bound_forward,
        result.backward.norm(tol),
        bound_backward,
        result.homotopy.norm(tol),
        bound_homotopy,
        result.new_attach.norm(tol),
        bound_attach,
        result.target.assembled.differential_norm(tol),
        bound_diff,
    )


# ---------------------------------------------------------------------------
# Filtrations
# ---------------------------------------------------------------------------


class CylindricalFiltration:
    """Stage-by-stage cylinder assembly: X_0 = F_0, X_i = cyl(F_i, E_i -> X_{i-1})."""

    __slots__ = ("base", "stages", "cylinders", "complexes")

    def __init__(self, base, stages, cylinders, complexes):
        self.base = base
        self.stages = tuple(stages)
        self.cylinders = tuple(cylinders)
        self.complexes = tuple(complexes)

    @property
    def final(self):
        return self.complexes[-1]

    def __len__(self):
        return len(self.complexes)


def cylindrify(base, stages=()):
    """Assemble a cylindrical filtration from (pair, attaching map) stages.

    Each attaching map must be a chain map into the previous assembled
    complex; the resulting complexes contain each previous stage as the
    trailing block sub-complex.
    """
    complexes = [base]
    cylinders = []
    kept = []
    current = base
    for pair, attach in stages:
        if attach.target != current:
            raise ValueError("attaching map must land in the previous assembled complex")
        cyl = assemble_cylinder(pair, current, attach)
        cylinders.append(cyl)
        kept.append((pair, attach))
        current = cyl.assembled
        complexes.append(current)
    return CylindricalFiltration(base, kept, cylinders, complexes)


def _simplex_chain_complex(vertex_count, with_top):
    """Chain complex of the full simplex on vertex_count labelled vertices,
    or of its boundary when with_top is False.  Faces are sorted index tuples."""
    import itertools as _it

    n = vertex_count
    top_dim = n - 1
    dims = {}
    diffs = {}
    faces = {}
    for d in range(top_dim + 1):
        if d == top_dim and not with_top:
            continue
        faces[d] = sorted(_it.combinations(range(n), d + 1))
        dims[d] = len(faces[d])
    for d in sorted(faces):
        if d == 0 or d - 1 not in faces:
            continue
        idx = {s: i for i, s in enumerate(faces[d - 1])}
        entries = {}
        for j, s in enumerate(faces[d]):
            for drop in range(len(s)):
                face = s[:drop] + s[drop + 1 :]
                entries[(idx[face], j)] = (-1) ** drop
        diffs[d] = SparseIntMatrix(dims[d - 1], dims[d], entries)
    return IntegerChainComplex(dims, diffs), faces


def skeletal_filtration(K):
    """The cylindrical filtration induced by the skeleta of a complex.

    Stage i glues one full-simplex pair per i-simplex onto the previous
    assembled stage; the attaching maps are transported along the canonical
    comparison map from the skeleton chains, so the final complex has the
    homology of K.
    """
    from .simplicial import SimplicialComplex, chain_complex

    if K.dim < 0:
        base = IntegerChainComplex({})
        return cylindrify(base)

    vertices = list(K.simplices_of_dim(0))
    base = IntegerChainComplex({0: len(vertices)})
    # comparison map from skeleton chains into the current assembled complex
    skel = SimplicialComplex(K.vertices, vertices)
    skel_cx = chain_complex(skel)
    compare = ChainMap(skel_cx, base, {0: SparseIntMatrix.identity(len(vertices))})
    face_index = {
        d: {s: j for j, s in enumerate(K.simplices_of_dim(d))} for d in range(K.dim + 1)
    }

    stages = []
    current = base
    for i in range(1, K.dim + 1):
        cells = K.simplices_of_dim(i)
        f_dims = {}
        e_dims = {}
        simplex_cx, _ = _simplex_chain_complex(i + 1, True)
        bdry_cx, bdry_faces = _simplex_chain_complex(i + 1, False)
        nf = {d: simplex_cx.dim(d) for d in simplex_cx.dims}
        ne = {d: bdry_cx.dim(d) for d in bdry_cx.dims}
        for d in nf:
            f_dims[d] = nf[d] * len(cells)
        for d in ne:
            e_dims[d] = ne[d] * len(cells)
        f_diffs = {}
        e_diffs = {}
        for d, mat in simplex_cx.diffs.items():
            entries = {}
            for k in range(len(cells)):
                ro, co = k * nf[d - 1], k * nf[d]
                for (r, c), v in mat.entries.items():
                    entries[(ro + r, co + c)] = v
            f_diffs[d] = SparseIntMatrix(f_dims[d - 1], f_dims[d], entries)
        for d, mat in bdry_cx.diffs.items():
            entries = {}
            for k in range(len(cells)):
                ro, co = k * ne[d - 1], k * ne[d]
                for (r, c), v in mat.entries.items():
                    entries[(ro + r, co + c)] = v
            e_diffs[d] = SparseIntMatrix(e_dims[d - 1], e_dims[d], entries)
        F = IntegerChainComplex(f_dims, f_diffs, check=False)
        E = IntegerChainComplex(e_dims, e_diffs, check=False)
        pair = ChainPair.split(F, E)  # faces precede the top cell in each degree

        skel = SimplicialComplex(
            K.vertices, [s for d in range(i + 1) for s in K.simplices_of_dim(d)]
        )
        skel_cx = chain_complex(skel)

        # attaching map: E -> current, via the comparison map on each face
        attach_parts = {}
        for d in range(i):
            rows = current.dim(d)
            cols = e_dims.get(d, 0)
            compare_cols = {}
            for (r, c), v in compare.part(d).entries.items():
                compare_cols.setdefault(c, []).append((r, v))
            entries = {}
            for k, cell in enumerate(cells):
                off = k * ne[d]
                for c_local, face_idx in enumerate(bdry_faces[d]):
                    face = tuple(cell[j] for j in face_idx)
                    src = face_index[d][face]
                    for r, v in compare_cols.get(src, ()):
                        entries[(r, off + c_local)] = v
            if rows and cols:
                attach_parts[d] = SparseIntMatrix(rows, cols, entries)
        attach = ChainMap(E, current, attach_parts)

        cyl = assemble_cylinder(pair, current, attach)
        stages.append((pair, attach))

        # extend the comparison map to the new skeleton
        new_parts = {}
        nfull = cyl.assembled
        for d in range(i):
            old = compare.part(d)
            rows = nfull.dim(d)
            fo, eo, xo, _ = cyl.block_offsets(d)
            entries = {}
            for (r, c), v in old.entries.items():
                entries[(xo + r, c)] = v
            new_parts[d] = SparseIntMatrix(rows, skel_cx.dim(d), entries)
        # degree i: top cell minus the fundamental boundary chain in the E block
        rows = nfull.dim(i)
        cols = skel_cx.dim(i)
        entries = {}
        fo, eo, xo, _ = cyl.block_offsets(i)
        bdry_top_index = {s: j for j, s in enumerate(bdry_faces[i - 1])}
        for k, cell in enumerate(cells):
            col = face_index[i][cell]
            entries[(fo + k * nf[i], col)] = 1  # nf[i] == 1: the top cell
            for drop in range(len(cell)):
                face_idx = tuple(j for j in range(len(cell)) if j != drop)
                local = bdry_top_index[face_idx]
                entries[(eo + k * ne[i - 1] + local, col)] = -((-1) ** drop)
        new_parts[i] = SparseIntMatrix(rows, cols, entries)
        compare = ChainMap(skel_cx, nfull, new_parts)
        if not compare.is_chain_map():
            raise AssertionError("skeleton comparison map failed to be a chain map")
        current = nfull
    return cylindrify(base, stages)


@dataclass
class ComplexRebuild:
    """Replacement data for a bare complex (used for filtration stage 0)."""

    new_complex: IntegerChainComplex
    forward: ChainMap
    backward: ChainMap
    homotopy: ChainMap

    @classmethod
    def identity(cls, cx):
        ident = ChainMap.identity(cx)
        return cls(cx, ident, ident, ChainMap.zero(cx, cx, degree=1))

    def validate(self, cx):
        if self.forward.source != cx or self.forward.target != self.new_complex:
            raise ValueError("forward endpoints wrong")
        if self.backward.source != self.new_complex or self.backward.target != cx:
            raise ValueError("backward endpoints wrong")
        if not self.forward.is_chain_map() or not self.backward.is_chain_map():
            raise ValueError("replacement maps must be chain maps")
        if not self.homotopy.is_homotopy_between(
            ChainMap.identity(cx), self.backward @ self.forward
        ):
            raise ValueError("homotopy fails d*s + s*d = id - back o fwd")


@dataclass
class PairRebuild:
    """Replacement data for one filtration stage's pair."""

    new_pair: ChainPair
    forward: PairMap
    backward: PairMap
    homotopy: PairHomotopy

    @classmethod
    def identity(cls, pair):
        return cls(
            pair, PairMap.identity(pair), PairMap.identity(pair), PairHomotopy.zero(pair)
        )


@dataclass
class StageNormRecord:
    stage: int
    report: RebuildNormReport


def rebuild_filtration(filt, replacements, tol=1e-9):
    """Rebuild every stage, threading rebuilt maps as the next rebuilding data.

    replacements[0] is a ComplexRebuild for the base; replacements[i] for
    i >= 1 are PairRebuild instances.  Returns the rebuilt filtration and a
    per-stage norm report in which each bound is composed recursively from
    the previous stage's bounds.
    """
    if len(replacements) != len(filt.complexes):
        raise ValueError(
            f"expected {len(filt.complexes)} replacement records, got {len(replacements)}"
        )
    base_rep = replacements[0]
    base_rep.validate(filt.base)
    h = base_rep.forward
    h_back = base_rep.backward
    sigma = base_rep.homotopy
    bound_h = h.norm(tol)
    bound_h_back = h_back.norm(tol)
    bound_sigma = sigma.norm(tol)
    reports = []
    new_stages = []
    current_new = base_rep.new_complex
    for idx, (pair, attach) in enumerate(filt.stages, start=1):
        rep = replacements[idx]
        cyl = filt.cylinders[idx - 1]
        data = RebuildData(
            rep.new_pair,
            current_new,
            rep.forward,
            rep.backward,
            h,
            h_back,
            rep.homotopy,
            sigma,
        )
        result = rebuilt_maps(cyl, data)
        report = rebuild_norm_report(
            cyl,
            data,
            result,
            tol,
            h_bound=bound_h,
            h_back_bound=bound_h_back,
            sigma_bound=bound_sigma,
        )
        reports.append(StageNormRecord(idx, report))
        new_stages.append((rep.new_pair, result.new_attach))
        h, h_back, sigma = result.forward, result.backward, result.homotopy
        bound_h = report.bound_forward
        bound_h_back = report.bound_backward
        bound_sigma = report.bound_homotopy
        current_new = result.target.assembled
    new_filt = cylindrify(base_rep.new_complex, new_stages)
    return new_filt, reports

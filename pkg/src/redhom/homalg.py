"""Derived-functor machinery: duals, Ext, extensions, pushforwards.

Ext groups are computed from the minimal free resolution of the source:
maps out of the i-th free module are identified with tuples of images of
its generators, transitions precompose with the differentials, and the
table keeps ranks only, so large windows stay cheap.  A separate
small-scale path keeps full cocycle bases for realizing extension
classes as short exact sequences and reading classes back off sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import Algebra
from .linalg import ColumnSolver, Matrix, column_space_basis
from .modules import (
    Module,
    ModuleMap,
    ShortExactSequence,
    direct_sum,
    free_map_from_columns,
    free_module,
    hom_space_matrix,
    quotient_module,
    regular_module,
    split_ses,
    zero_module,
)
from .resolution import _radical_complement, assemble_action_columns, resolve

_FULL_EXT_LIMIT = 200_000  # max flat cochain entries for the cocycle path


class HomAlgError(RuntimeError):
    """Raised when a homological construction cannot be carried out."""


# -- linear dual -------------------------------------------------------------


def k_dual(mod: Module, label: str = "") -> Module:
    """Dual vector space with the transposed actions."""
    return Module(mod.algebra, mod.dim,
                  [va.transpose() for va in mod.var_actions],
                  label=label or (f"({mod.label})*" if mod.label else ""),
                  validate=False)


def canonical_module(alg: Algebra) -> Module:
    """Linear dual of the regular module (the injective hull of k)."""
    return k_dual(regular_module(alg), label="w")


# -- dual with respect to the ring -------------------------------------------


@dataclass
class DualData:
    """Module of maps into the ring: basis maps plus the module structure."""

    source: Module
    module: Module
    maps: list[Matrix]          # k-matrices source -> R, one per basis vector

    def map_from_coords(self, coords: Matrix) -> Matrix:
        fld = self.source.algebra.field
        out = Matrix.zeros(fld, self.source.algebra.dim, self.source.dim)
        for i, m in enumerate(self.maps):
            c = coords.entry(i, 0)
            if c != fld.zero():
                out = out + m.scale(c)
        return out


def _flatten(m: Matrix) -> Matrix:
    """Row-major vectorization as a single column."""
    return Matrix(m.field, m.a.reshape(-1, 1).copy())


def r_dual(mod: Module, label: str = "") -> DualData:
    """Maps from the module into the regular module, with the ring action
    given by postcomposition."""
    alg = mod.algebra
    fld = alg.field
    flat = hom_space_matrix(mod, regular_module(alg))
    h = flat.cols
    maps = [Matrix(fld, flat.a[:, i].reshape(alg.dim, mod.dim).copy())
            for i in range(h)]
    if h == 0:
        return DualData(mod, zero_module(alg), [])
    solver = ColumnSolver(flat)
    va = []
    for v in range(alg.nvars):
        acted = Matrix.hstack([_flatten(alg.varmat[v] @ m) for m in maps])
        coords, ok = solver.solve_columns(acted)
        if not all(ok):
            raise HomAlgError("dual space is not action-closed")
        va.append(coords)
    dm = Module(alg, h, va,
                label=label or (f"({mod.label})^" if mod.label else ""),
                validate=False)
    return DualData(mod, dm, maps)


def dual_map(f: ModuleMap, dual_target: DualData,
             dual_source: DualData) -> ModuleMap:
    """Precomposition with f, from the target's dual to the source's."""
    fld = f.source.algebra.field
    if not dual_target.maps:
        return ModuleMap(dual_target.module, dual_source.module,
                         Matrix.zeros(fld, dual_source.module.dim, 0),
                         validate=False)
    composed = Matrix.hstack([_flatten(m @ f.matrix)
                              for m in dual_target.maps])
    if not dual_source.maps:
        if not composed.is_zero():
            raise HomAlgError("map dualizes into an empty dual")
        return ModuleMap(dual_target.module, dual_source.module,
                         Matrix.zeros(fld, 0, dual_target.module.dim),
                         validate=False)
    flat_src = Matrix.hstack([_flatten(m) for m in dual_source.maps])
    coords, ok = ColumnSolver(flat_src).solve_columns(composed)
    if not all(ok):
        raise HomAlgError("dualized map leaves the dual space")
    return ModuleMap(dual_target.module, dual_source.module, coords,
                     validate=False)


@dataclass
class BidualityData:
    map: ModuleMap
    dual: DualData
    double_dual: DualData

    @property
    def is_injective(self) -> bool:
        return self.map.is_injective()

    @property
    def is_bijective(self) -> bool:
        return self.map.is_isomorphism()


def biduality(mod: Module) -> BidualityData:
    """Evaluation map from the module into its double dual."""
    alg = mod.algebra
    fld = alg.field
    d1 = r_dual(mod)
    d2 = r_dual(d1.module)
    if mod.dim == 0 or d2.module.dim == 0:
        lam = ModuleMap(mod, d2.module,
                        Matrix.zeros(fld, d2.module.dim, mod.dim),
                        validate=False)
        return BidualityData(lam, d1, d2)
    flat2 = Matrix.hstack([_flatten(m) for m in d2.maps])
    solver = ColumnSolver(flat2)
    cols = []
    for j in range(mod.dim):
        x = Matrix.zeros(fld, mod.dim, 1)
        x.a[j, 0] = fld.one()
        ev = Matrix.hstack([m @ x for m in d1.maps])
        cols.append(_flatten(ev))
    coords, ok = solver.solve_columns(Matrix.hstack(cols))
    if not all(ok):
        raise HomAlgError("evaluation map leaves the double dual")
    return BidualityData(ModuleMap(mod, d2.module, coords, validate=False),
                         d1, d2)


def is_torsionless(mod: Module) -> bool:
    return biduality(mod).is_injective


def is_reflexive(mod: Module) -> bool:
    return biduality(mod).is_bijective


# -- Ext dimension tables ------------------------------------------------------


class ExtTable:
    """Ranks of the cochain transitions for one (source, target) pair."""

    def __init__(self, source: Module, target: Module):
        self.source = source
        self.target = target
        self.res = resolve(source)
        self._ranks: dict[int, int] = {}

    def transition(self, i: int) -> Matrix:
        """Map from maps-out-of-F_i to maps-out-of-F_{i+1}; flat cochain
        coordinates are generator-major, target-coordinate-minor."""
        alg = self.source.algebra
        fld = alg.field
        n = self.target
        b_src = self.res.betti(i)
        b_tgt = self.res.betti(i + 1)
        dn = n.dim
        if b_src == 0 or b_tgt == 0 or dn == 0:
            return Matrix.zeros(fld, b_tgt * dn, b_src * dn)
        diff = self.res.differential(i + 1)
        d = alg.dim
        if fld.p is not None:
            acts = n.action_stack().astype(np.int64)
            dt = np.int8 if fld.p <= 127 else np.int64
            out = np.empty((b_tgt * dn, b_src * dn), dtype=dt)
            step = max(1, _FULL_EXT_LIMIT // max(1, b_src * dn))
            for lo in range(0, b_tgt, step):
                hi = min(lo + step, b_tgt)
                coeff = np.stack(
                    [diff.a[:, s * d].astype(np.int64).reshape(b_src, d)
                     for s in range(lo, hi)])
                blk = np.einsum("sjt,tab->sajb", coeff, acts) % fld.p
                out[lo * dn:hi * dn, :] = blk.reshape(
                    (hi - lo) * dn, b_src * dn).astype(dt)
            return Matrix(fld, out)
        cols = []
        for j in range(b_src):
            for b in range(dn):
                col = Matrix.zeros(fld, b_tgt * dn, 1)
                vec = Matrix.zeros(fld, dn, 1)
                vec.a[b, 0] = fld.one()
                for s in range(b_tgt):
                    coeff = Matrix(fld, diff.a[j * d:(j + 1) * d,
                                               s * d:s * d + 1])
                    img = n.action_of(coeff) @ vec
                    col.a[s * dn:(s + 1) * dn, :] = img.a
                cols.append(col)
        return Matrix.hstack(cols)

    def _rank(self, i: int) -> int:
        if i < 0:
            return 0
        if i not in self._ranks:
            self._ranks[i] = self.transition(i).rank()
        return self._ranks[i]

    def dim(self, i: int) -> int:
        if self.source.dim == 0 or self.target.dim == 0:
            return 0
        return (self.res.betti(i) * self.target.dim
                - self._rank(i) - self._rank(i - 1))

    def dims(self, window: int) -> list[int]:
        return [self.dim(i) for i in range(window + 1)]


def ext_dims(source: Module, target: Module, window: int) -> list[int]:
    return ExtTable(source, target).dims(window)


def ext_dim(source: Module, target: Module, i: int) -> int:
    return ExtTable(source, target).dim(i)


def ext_vanishes_through(source: Module, target: Module, window: int,
                         start: int = 1) -> tuple[bool, int | None]:
    """Whether every Ext^i vanishes for start <= i <= window; on failure
    also reports the first nonvanishing index."""
    table = ExtTable(source, target)
    for i in range(start, window + 1):
        if table.dim(i) != 0:
            return False, i
    return True, None


# -- largest nonvanishing Ext index, windowed ----------------------------------


@dataclass
class PValue:
    """Top nonvanishing Ext index against a fixed target, within a window."""

    kind: str                 # "finite", "above_window", "minus_infinity"
    value: int | None
    window: int
    dims: list[int]

    def same_as(self, other: "PValue") -> bool:
        return (self.kind, self.value) == (other.kind, other.value)

    def describe(self) -> str:
        if self.kind == "minus_infinity":
            return "-inf (zero module involved)"
        if self.kind == "above_window":
            return f">= window {self.window}"
        return str(self.value)


def p_invariant(source: Module, target: Module, window: int) -> PValue:
    if source.dim == 0 or target.dim == 0:
        return PValue("minus_infinity", None, window, [])
    dims = ext_dims(source, target, window)
    if dims[window] != 0:
        return PValue("above_window", None, window, dims)
    last = max((i for i, d in enumerate(dims) if d != 0), default=None)
    if last is None:
        raise HomAlgError("no nonvanishing index for nonzero modules")
    return PValue("finite", last, window, dims)


# -- first Ext with full cocycle data --------------------------------------------


class Ext1Data:
    """Full first-Ext workspace for one (right term, left term) pair.

    Cocycles live on the first free module of the right term's resolution
    in flat coordinates; representatives are kernel columns independent of
    the coboundaries.  The psi conversions move between such cochains and
    maps defined on the first syzygy subspace.
    """

    def __init__(self, right: Module, left: Module):
        self.right = right
        self.left = left
        alg = right.algebra
        self.alg = alg
        self.res = resolve(right)
        table = ExtTable(right, left)
        self.beta1 = self.res.betti(1)
        self.flat_dim = self.beta1 * left.dim
        if self.flat_dim > _FULL_EXT_LIMIT:
            raise HomAlgError("first-Ext cochain space too large for the "
                              "cocycle path")
        t0 = table.transition(0)
        t1 = table.transition(1)
        self.cocycles, _ = t1.kernel_data()
        self.boundaries = column_space_basis(t0)
        joint = Matrix.hstack([self.boundaries, self.cocycles])
        _, piv = joint.rref()
        nb = self.boundaries.cols
        rep_idx = [p - nb for p in piv if p >= nb]
        self.reps = self.cocycles.take_cols(rep_idx)
        self.dim = self.reps.cols
        self._class_solver = ColumnSolver(
            Matrix.hstack([self.boundaries, self.reps]))
        self._syz = self.res.syzygy_subspace(1)
        self._fp = self.res.free_positions(1)
        self._lift_cache: Matrix | None = None

    # cochain <-> generator-image table

    def _images_from_flat(self, flat: Matrix) -> Matrix:
        dn = self.left.dim
        return Matrix(self.alg.field,
                      flat.a.reshape(self.beta1, dn).T.copy())

    def _flat_from_images(self, images: Matrix) -> Matrix:
        return Matrix(self.alg.field, images.a.T.reshape(-1, 1).copy())

    def cochain_matrix(self, flat: Matrix) -> Matrix:
        """Full k-matrix of a cochain as a map off the first free module."""
        return assemble_action_columns(self.left, self._images_from_flat(flat))

    def psi_from_flat(self, flat: Matrix) -> Matrix:
        """Restrict a cocycle to the first syzygy (columns indexed by the
        syzygy's own coordinates)."""
        if self._lift_cache is None:
            diff = self.res.differential(1)
            lifts, ok = ColumnSolver(diff).solve_columns(self._syz)
            if not all(ok):
                raise HomAlgError("syzygy does not lift through the "
                                  "first differential")
            self._lift_cache = lifts
        return self.cochain_matrix(flat) @ self._lift_cache

    def flat_from_psi(self, psi: Matrix) -> Matrix:
        """Extend a map off the first syzygy to a cocycle."""
        fld = self.alg.field
        diff = self.res.differential(1)
        reduced = Matrix(fld, diff.a[self._fp, :].copy())
        full = psi @ reduced
        d = self.alg.dim
        images = full.take_cols([j * d for j in range(self.beta1)])
        return self._flat_from_images(images)

    def psi_from_class(self, coords: Matrix) -> Matrix:
        fld = self.alg.field
        flat = self.reps @ coords if self.dim else \
            Matrix.zeros(fld, self.flat_dim, 1)
        return self.psi_from_flat(flat)

    def class_of_flat(self, flat: Matrix) -> Matrix:
        sol, ok = self._class_solver.solve_columns(flat)
        if not all(ok):
            raise HomAlgError("vector is not a cocycle for this pair")
        nb = self.boundaries.cols
        return Matrix(self.alg.field, sol.a[nb:, :].copy())

    def zero_class(self) -> Matrix:
        return Matrix.zeros(self.alg.field, self.dim, 1)


def ext1_data(right: Module, left: Module) -> Ext1Data:
    return Ext1Data(right, left)


# -- extensions ------------------------------------------------------------------


def extension_from_psi(left: Module, right: Module,
                       psi: Matrix) -> ShortExactSequence:
    """Sequence with the given outer terms built as the pushout of the
    right term's cover along psi.

    psi must be the matrix of a module map from the right term's first
    syzygy (in syzygy coordinates) to the left term; its graph is then
    glued against the syzygy inside the sum of the left term and the
    cover.  The zero map yields the literal split sequence.
    """
    alg = left.algebra
    fld = alg.field
    res = resolve(right)
    syz = res.syzygy_subspace(1)
    if psi.rows != left.dim or psi.cols != syz.cols:
        raise HomAlgError("psi has the wrong shape for this pair")
    if psi.is_zero():
        return split_ses(left, right)
    amb = res.ambient_free(0)
    big = direct_sum([left, amb])
    glue = Matrix.vstack([psi, -syz])
    middle, proj = quotient_module(
        big, glue, label=f"E({left.label or '?'},{right.label or '?'})")
    inj_cols = Matrix.zeros(fld, big.dim, left.dim)
    inj_cols.a[:left.dim, :] = Matrix.identity(fld, left.dim).a
    inject = ModuleMap(left, middle, proj.matrix @ inj_cols, validate=False)
    section, ok = ColumnSolver(proj.matrix).solve_columns(
        Matrix.identity(fld, middle.dim))
    if not all(ok):
        raise HomAlgError("quotient projection admits no section")
    project_mat = Matrix.zeros(fld, right.dim, big.dim)
    project_mat.a[:, left.dim:] = res.cover_matrix().a
    project = ModuleMap(middle, right, project_mat @ section, validate=False)
    return ShortExactSequence(inject, project)


def extension_from_class(data: Ext1Data, coords: Matrix) -> ShortExactSequence:
    """Realize an extension class; the zero class gives the literal split."""
    if coords.is_zero():
        return split_ses(data.left, data.right)
    return extension_from_psi(data.left, data.right,
                              data.psi_from_class(coords))


def class_of_ses(data: Ext1Data, ses: ShortExactSequence) -> Matrix:
    """Extension class of a sequence with this pair's outer terms.

    The middle may be anything (free summands included); only the two
    maps matter.
    """
    alg = data.alg
    fld = alg.field
    if ses.right.dim != data.right.dim or ses.left.dim != data.left.dim:
        raise HomAlgError("sequence outer terms do not match the pair")
    res = data.res
    cover = res.cover_matrix()
    d = alg.dim
    gen_cols = [j * d for j in range(res.betti(0))]
    targets = Matrix(fld, cover.a[:, gen_cols].copy())
    sols, ok = ColumnSolver(ses.project.matrix).solve_columns(targets)
    if not all(ok):
        raise HomAlgError("cover does not lift through the right map")
    lift = assemble_action_columns(ses.middle, sols)
    through_syz = lift @ data._syz
    psi, ok = ColumnSolver(ses.inject.matrix).solve_columns(through_syz)
    if not all(ok):
        raise HomAlgError("syzygy image does not land in the left term")
    return data.class_of_flat(data.flat_from_psi(psi))


# -- pushforward -------------------------------------------------------------------


@dataclass
class Pushforward:
    """Embedding of a module into a minimal free hull of its dual maps,
    with the cokernel: 0 -> module -> free -> forward -> 0."""

    sequence: ShortExactSequence
    forward: Module


def pushforward(mod: Module) -> Pushforward:
    alg = mod.algebra
    if mod.dim == 0:
        # the zero module embeds into the zero free module
        target = free_module(alg, 0)
        zero = Matrix.zeros(alg.field, 0, 0)
        forward, proj = quotient_module(target, zero, label="push(0)")
        return Pushforward(ShortExactSequence(
            ModuleMap(mod, target, zero, validate=False), proj), forward)
    dual = r_dual(mod)
    gens = dual.module.min_generators()
    chosen = [dual.map_from_coords(Matrix(alg.field, gens.a[:, j:j + 1]))
              for j in range(gens.cols)]
    if not chosen:
        raise HomAlgError("module has no maps into the ring")
    q = Matrix.vstack(chosen)
    if q.rank() != mod.dim:
        raise HomAlgError("module does not embed into a free module "
                          "(evaluation has a kernel)")
    target = free_module(alg, len(chosen))
    forward, proj = quotient_module(target, q,
                                    label=f"push({mod.label or '?'})")
    inject = ModuleMap(mod, target, q, validate=False)
    return Pushforward(ShortExactSequence(inject, proj), forward)


# -- horseshoe construction -----------------------------------------------------------


@dataclass
class Horseshoe:
    """Syzygy sequence of a short exact sequence.

    The middle is the literal direct sum of the middle term's first
    syzygy and a free module of the recorded rank.
    """

    sequence: ShortExactSequence
    free_rank: int


def horseshoe(ses: ShortExactSequence) -> Horseshoe:
    alg = ses.left.algebra
    fld = alg.field
    l_mod = ses.middle
    res_n, res_l, res_m = resolve(ses.left), resolve(l_mod), resolve(ses.right)
    g_n, g_l, g_m = res_n.betti(0), res_l.betti(0), res_m.betti(0)
    d = alg.dim
    g_big = g_n + g_m

    # lift the right cover through the surjection, generator by generator
    cover_m = res_m.cover_matrix()
    targets = Matrix(fld, cover_m.a[:, [j * d for j in range(g_m)]].copy())
    sols, ok = ColumnSolver(ses.project.matrix).solve_columns(targets)
    if not all(ok):
        raise HomAlgError("cover does not lift through the surjection")
    h_full = assemble_action_columns(l_mod, sols)
    big = Matrix.hstack([ses.inject.matrix @ res_n.cover_matrix(), h_full])

    # factor the combined cover through the minimal one and split it
    cover_l = res_l.cover_matrix()
    big_gens = Matrix(fld, big.a[:, [j * d for j in range(g_big)]].copy())
    u_imgs, ok = ColumnSolver(cover_l).solve_columns(big_gens)
    if not all(ok):
        raise HomAlgError("combined cover does not factor minimally")
    u = free_map_from_columns(alg, g_l, u_imgs)
    if u.rank() != g_l * d:
        raise HomAlgError("factored cover lost surjectivity")
    unit_cols = Matrix.zeros(fld, g_l * d, g_l)
    for j in range(g_l):
        unit_cols.a[j * d, j] = fld.one()
    sec_imgs, ok = ColumnSolver(u).solve_columns(unit_cols)
    if not all(ok):
        raise HomAlgError("section of the factored cover does not exist")
    section = free_map_from_columns(alg, g_big, sec_imgs)

    # the kernel of u is free; pick minimal generators for it
    ker_u, kfp = u.kernel_data()
    gen_idx = _radical_complement(alg, g_big, ker_u, kfp)
    f_rank = len(gen_idx)
    if f_rank != g_big - g_l:
        raise HomAlgError("free complement has unexpected rank")
    ker_map = free_map_from_columns(alg, g_big, ker_u.take_cols(gen_idx))

    omega_l = res_l.syzygy_module(1)
    middle = direct_sum([omega_l, free_module(alg, f_rank)])

    # the middle embeds in the combined free as section(syzygy) + kernel
    embed = Matrix.hstack([section @ res_l.syzygy_subspace(1), ker_map])
    if embed.rank() != middle.dim:
        raise HomAlgError("middle embedding is not injective")

    # left leg: the left term's syzygy sits inside the first generator blocks
    b_n = res_n.syzygy_subspace(1)
    incl_n = Matrix.zeros(fld, g_big * d, b_n.cols)
    incl_n.a[:g_n * d, :] = b_n.a
    left_coords, ok = ColumnSolver(embed).solve_columns(incl_n)
    if not all(ok):
        raise HomAlgError("left syzygy does not land in the middle")
    inject = ModuleMap(res_n.syzygy_module(1), middle, left_coords,
                       validate=False)

    # right leg: project onto the last generator blocks, read syzygy coords
    proj_rows = [g_n * d + p for p in res_m.free_positions(1)]
    project = ModuleMap(middle, res_m.syzygy_module(1),
                        Matrix(fld, embed.a[proj_rows, :].copy()),
                        validate=False)
    return Horseshoe(ShortExactSequence(inject, project), f_rank)


# -- the syzygy map on first Ext --------------------------------------------------------


@dataclass
class ExtSyzygyMap:
    """Matrix of the map sending an extension class to the class of its
    horseshoe sequence, over the chosen representative bases."""

    source_data: Ext1Data      # pair (right, left)
    target_data: Ext1Data      # pair (right syzygy, left syzygy)
    matrix: Matrix

    def is_surjective(self) -> bool:
        return self.matrix.rank() == self.target_data.dim


def ext_syzygy_map(right: Module, left: Module) -> ExtSyzygyMap:
    src = ext1_data(right, left)
    tgt = ext1_data(resolve(right).syzygy_module(1),
                    resolve(left).syzygy_module(1))
    fld = right.algebra.field
    cols = []
    for i in range(src.dim):
        unit = Matrix.zeros(fld, src.dim, 1)
        unit.a[i, 0] = fld.one()
        shoe = horseshoe(extension_from_class(src, unit))
        cols.append(class_of_ses(tgt, shoe.sequence))
    mat = Matrix.hstack(cols) if cols else Matrix.zeros(fld, tgt.dim, 0)
    return ExtSyzygyMap(src, tgt, mat)

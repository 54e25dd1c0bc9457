"""Finitely generated modules over a local algebra, as explicit
matrix representations.

A module of k-dimension m stores one m x m matrix per algebra variable;
the action of an arbitrary basis element is the corresponding monomial
product of those matrices.  Free modules of rank g use the block layout
in which coordinate j*d + t is the t-th algebra basis coordinate of the
j-th generator, and may keep their actions implicit.

Direct sums remember their parts and offsets, so downstream constructions
(resolutions, syzygies, searches) can work blockwise and return literal
equalities instead of isomorphism witnesses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from .algebra import Algebra
from .linalg import (ColumnSolver, Field, Matrix, column_space_basis,
                     kron, nf_columns)


class ModuleError(ValueError):
    """Raised for ill-formed modules or maps."""


_CHUNK = 256  # column chunk size for large free-map assembly


class Module:
    """One module: a commuting variable representation over an algebra."""

    __slots__ = ("algebra", "dim", "label", "free_rank", "summands",
                 "_var_actions", "_actions", "_radical", "_socle",
                 "_resolution", "_res_hook")

    def __init__(self, algebra: Algebra, dim: int,
                 var_actions: list[Matrix] | None, label: str = "",
                 free_rank: int | None = None, validate: bool = True):
        self.algebra = algebra
        self.dim = dim
        self.label = label
        self.free_rank = free_rank
        self.summands: list[tuple["Module", int]] | None = None
        self._var_actions = var_actions
        self._actions = None
        self._radical = None
        self._socle = None
        self._resolution = None
        self._res_hook = None
        if var_actions is not None:
            for va in var_actions:
                if va.rows != dim or va.cols != dim:
                    raise ModuleError("variable action has wrong shape")
        if validate and var_actions is not None:
            validate_module(self)

    # -- actions ---------------------------------------------------------

    @property
    def var_actions(self) -> list[Matrix]:
        if self._var_actions is None:
            self._var_actions = self.algebra.free_varmat(self.free_rank)
        return self._var_actions

    @property
    def actions(self) -> list[Matrix]:
        """Action of every algebra basis element (index 0 is the identity)."""
        if self._actions is None:
            alg = self.algebra
            va = self.var_actions
            out = []
            for mon in alg.basis_mons:
                m = Matrix.identity(alg.field, self.dim)
                for v, e in enumerate(mon):
                    for _ in range(e):
                        m = va[v] @ m
                out.append(m)
            self._actions = out
        return self._actions

    def action_stack(self) -> np.ndarray:
        if self.free_rank is not None and self._actions is None:
            return self.algebra.free_action_stack(self.free_rank)
        return np.stack([m.a for m in self.actions])

    def action_of(self, coords: Matrix) -> Matrix:
        """Action of the element with the given basis-coordinate column."""
        out = Matrix.zeros(self.algebra.field, self.dim, self.dim)
        for t in range(self.algebra.dim):
            c = coords.entry(t, 0)
            if c != self.algebra.field.zero():
                out = out + self.actions[t].scale(c)
        return out

    def apply_var(self, v: int, vectors: Matrix) -> Matrix:
        """Variable action applied to a batch of coordinate columns.

        Free modules use the block structure directly instead of
        materializing the big diagonal action matrix.
        """
        if self.free_rank is not None and self._var_actions is None:
            return blockwise_apply(self.algebra, self.algebra.varmat[v],
                                         self.free_rank, vectors)
        return self.var_actions[v] @ vectors

    # -- structure -------------------------------------------------------

    def radical_span(self) -> Matrix:
        """Independent columns spanning (maximal ideal) * module."""
        if self._radical is None:
            alg = self.algebra
            if self.dim == 0 or alg.nvars == 0:
                self._radical = Matrix.zeros(alg.field, self.dim, 0)
            else:
                eye = Matrix.identity(alg.field, self.dim)
                big = Matrix.hstack([self.apply_var(v, eye)
                                     for v in range(alg.nvars)])
                self._radical = column_space_basis(big)
        return self._radical

    def socle_span(self) -> Matrix:
        if self._socle is None:
            alg = self.algebra
            if self.dim == 0:
                self._socle = Matrix.zeros(alg.field, 0, 0)
            elif alg.nvars == 0:
                self._socle = Matrix.identity(alg.field, self.dim)
            else:
                self._socle = Matrix.vstack(
                    [self.var_actions[v] for v in range(alg.nvars)]).kernel_basis()
        return self._socle

    def gens_count(self) -> int:
        if self.free_rank is not None:
            return self.free_rank
        return self.dim - self.radical_span().cols

    def min_generators(self) -> Matrix:
        """Unit-vector generators: a basis of the module modulo its radical."""
        fld = self.algebra.field
        if self.free_rank is not None:
            g, d = self.free_rank, self.algebra.dim
            out = Matrix.zeros(fld, self.dim, g)
            for j in range(g):
                out.a[j * d, j] = fld.one()
            return out
        rad = self.radical_span()
        _, piv = rad.transpose().rref()
        pivset = set(piv)
        free_pos = [i for i in range(self.dim) if i not in pivset]
        out = Matrix.zeros(fld, self.dim, len(free_pos))
        for j, pos in enumerate(free_pos):
            out.a[pos, j] = fld.one()
        return out

    def is_free(self) -> bool:
        """Arithmetic freeness test: minimal cover has matching dimension."""
        if self.free_rank is not None:
            return True
        if self.dim == 0:
            return True
        return self.dim == self.gens_count() * self.algebra.dim

    def is_radical_killed(self) -> bool:
        """True when the maximal ideal acts as zero."""
        return self.radical_span().cols == 0

    def __repr__(self):
        tag = self.label or "module"
        return f"Module({tag}, dim={self.dim} over {self.algebra.field})"


def blockwise_apply(alg: Algebra, small: Matrix, rank: int,
                    vectors: Matrix) -> Matrix:
    """Apply blockdiag(small, ..., small) (rank blocks) to coordinate columns."""
    fld = alg.field
    d = alg.dim
    s = vectors.cols
    if s == 0 or rank == 0:
        return Matrix.zeros(fld, rank * d, s)
    if fld.p is not None:
        v3 = vectors.a.astype(np.int64).reshape(rank, d, s)
        out = np.einsum("ab,gbs->gas", small.a.astype(np.int64), v3) % fld.p
        return Matrix(fld, out.reshape(rank * d, s).astype(vectors.a.dtype))
    out = Matrix.zeros(fld, rank * d, s)
    for g in range(rank):
        blk = Matrix(fld, vectors.a[g * d:(g + 1) * d, :])
        out.a[g * d:(g + 1) * d, :] = (small @ blk).a
    return out


def free_map_from_columns(alg: Algebra, target_rank: int, stacked: Matrix) -> Matrix:
    """k-matrix of the map free(s) -> free(target_rank) sending the j-th
    generator to the element whose stacked coordinates are column j.

    Column j*d + t of the result is the action of basis element t on that
    image, matching the free-module coordinate layout.
    """
    fld = alg.field
    d = alg.dim
    g, s = target_rank, stacked.cols
    if s == 0:
        return Matrix.zeros(fld, g * d, 0)
    if stacked.rows != g * d:
        raise ModuleError("stacked column height does not match target rank")
    if fld.p is not None:
        stack = alg.action_stack().astype(np.int64)
        dtype = stacked.a.dtype
        out = np.empty((g * d, s * d), dtype=dtype)
        for lo in range(0, s, _CHUNK):
            hi = min(lo + _CHUNK, s)
            chunk = stacked.a[:, lo:hi].astype(np.int64).reshape(g, d, hi - lo)
            part = np.einsum("tab,gbj->gajt", stack, chunk) % fld.p
            out[:, lo * d:hi * d] = part.reshape(g * d, (hi - lo) * d).astype(dtype)
        return Matrix(fld, out)
    out = Matrix.zeros(fld, g * d, s * d)
    for j in range(s):
        col = Matrix(fld, stacked.a[:, j:j + 1])
        for t in range(d):
            img = Matrix.zeros(fld, g * d, 1)
            for blk in range(g):
                piece = Matrix(fld, col.a[blk * d:(blk + 1) * d, :])
                img.a[blk * d:(blk + 1) * d, :] = (alg.regmat[t] @ piece).a
            out.a[:, j * d + t] = img.a[:, 0]
    return out


def validate_module(mod: Module) -> None:
    """Check commuting actions compatible with the multiplication table."""
    alg = mod.algebra
    va = mod.var_actions
    n = alg.nvars
    for u in range(n):
        for v in range(u + 1, n):
            if not (va[u] @ va[v]) == (va[v] @ va[u]):
                raise ModuleError("variable actions do not commute")
    acts = mod.actions
    for v in range(n):
        for t in range(alg.dim):
            # x_v * b_t reduced through the table must match composition
            coords = alg.multiply(alg.var_class[v],
                                  Matrix.column(alg.field,
                                                [alg.field.one() if i == t else alg.field.zero()
                                                 for i in range(alg.dim)]))
            want = Matrix.zeros(alg.field, mod.dim, mod.dim)
            for u in range(alg.dim):
                c = coords.entry(u, 0)
                if c != alg.field.zero():
                    want = want + acts[u].scale(c)
            if not (va[v] @ acts[t]) == want:
                raise ModuleError("actions violate an algebra relation")


# -- constructors ----------------------------------------------------------


def zero_module(alg: Algebra) -> Module:
    return Module(alg, 0, [Matrix.zeros(alg.field, 0, 0)] * alg.nvars,
                  label="0", free_rank=0, validate=False)


def residue_field(alg: Algebra) -> Module:
    return Module(alg, 1, [Matrix.zeros(alg.field, 1, 1)] * alg.nvars,
                  label="k", validate=False)


def free_module(alg: Algebra, rank: int, label: str = "") -> Module:
    if rank < 0:
        raise ModuleError("negative rank")
    if rank == 0:
        return zero_module(alg)
    return Module(alg, rank * alg.dim, None,
                  label=label or (f"R^{rank}" if rank > 1 else "R"),
                  free_rank=rank, validate=False)


def regular_module(alg: Algebra) -> Module:
    return free_module(alg, 1)


def direct_sum(parts: list[Module], label: str = "") -> Module:
    """Direct sum remembering parts and offsets; sums of frees stay free."""
    if not parts:
        raise ModuleError("direct sum of nothing; use zero_module")
    alg = parts[0].algebra
    for p in parts:
        if p.algebra is not alg:
            raise ModuleError("direct sum across different algebras")
    if len(parts) == 1:
        return parts[0]
    dim = sum(p.dim for p in parts)
    all_free = all(p.free_rank is not None for p in parts)
    fr = sum(p.free_rank for p in parts) if all_free else None
    if all_free:
        va = None
    else:
        va = [Matrix.block_diag(alg.field, [p.var_actions[v] for p in parts])
              for v in range(alg.nvars)]
    out = Module(alg, dim, va,
                 label=label or "+".join(p.label or "?" for p in parts),
                 free_rank=fr, validate=False)
    offsets = []
    off = 0
    for p in parts:
        offsets.append((p, off))
        off += p.dim
    out.summands = offsets
    return out


def power_module(mod: Module, a: int) -> Module:
    if a < 0:
        raise ModuleError("negative power")
    if a == 0:
        return zero_module(mod.algebra)
    if a == 1:
        return mod
    lbl = f"({mod.label})^{a}" if mod.label else ""
    return direct_sum([mod] * a, label=lbl)


def injection_map(summed: Module, idx: int) -> "ModuleMap":
    if summed.summands is None:
        raise ModuleError("module was not built as a direct sum")
    part, off = summed.summands[idx]
    m = Matrix.zeros(summed.algebra.field, summed.dim, part.dim)
    m.a[off:off + part.dim, :] = Matrix.identity(summed.algebra.field, part.dim).a
    return ModuleMap(part, summed, m, validate=False)


def projection_map(summed: Module, idx: int) -> "ModuleMap":
    if summed.summands is None:
        raise ModuleError("module was not built as a direct sum")
    part, off = summed.summands[idx]
    m = Matrix.zeros(summed.algebra.field, part.dim, summed.dim)
    m.a[:, off:off + part.dim] = Matrix.identity(summed.algebra.field, part.dim).a
    return ModuleMap(summed, part, m, validate=False)


def from_presentation(alg: Algebra, n_gens: int, rel_rows: list[list[str]],
                      label: str = "") -> Module:
    """Cokernel of the map free(s) -> free(n_gens) given by a relation
    matrix with polynomial-string entries (rows indexed by generator)."""
    if len(rel_rows) != n_gens:
        raise ModuleError(f"expected {n_gens} relation rows, got {len(rel_rows)}")
    s = len(rel_rows[0]) if rel_rows and rel_rows[0] else 0
    for row in rel_rows:
        if len(row) != s:
            raise ModuleError("ragged relation matrix")
    fld = alg.field
    if n_gens == 0:
        return zero_module(alg)
    if s == 0:
        return free_module(alg, n_gens, label=label)
    cols = []
    for j in range(s):
        stacked = Matrix.vstack([alg.element_from_string(rel_rows[i][j])
                                 for i in range(n_gens)])
        cols.append(stacked)
    stacked = Matrix.hstack(cols)
    relmap = free_map_from_columns(alg, n_gens, stacked)
    ambient = free_module(alg, n_gens)
    mod, _ = quotient_module(ambient, relmap, label=label)
    return mod


# -- maps ------------------------------------------------------------------


class ModuleMap:
    """An algebra-linear map between modules, as a k-matrix on coordinates."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: Module, target: Module, matrix: Matrix,
                 validate: bool = True):
        if matrix.rows != target.dim or matrix.cols != source.dim:
            raise ModuleError(
                f"map shape {matrix.rows}x{matrix.cols} does not match "
                f"{target.dim}x{source.dim}")
        self.source = source
        self.target = target
        self.matrix = matrix
        if validate:
            self.check_linear()

    def check_linear(self) -> None:
        for v in range(self.source.algebra.nvars):
            lhs = self.target.apply_var(v, self.matrix)
            rhs = _apply_var_rows(self.source, v, self.matrix)
            if not lhs == rhs:
                raise ModuleError("map does not commute with the actions")

    @staticmethod
    def identity(mod: Module) -> "ModuleMap":
        return ModuleMap(mod, mod, Matrix.identity(mod.algebra.field, mod.dim),
                         validate=False)

    @staticmethod
    def zero(source: Module, target: Module) -> "ModuleMap":
        return ModuleMap(source, target,
                         Matrix.zeros(source.algebra.field, target.dim, source.dim),
                         validate=False)

    def compose(self, first: "ModuleMap") -> "ModuleMap":
        """self after first."""
        if first.target is not self.source and first.target.dim != self.source.dim:
            raise ModuleError("composition dimension mismatch")
        return ModuleMap(first.source, self.target, self.matrix @ first.matrix,
                         validate=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix + other.matrix,
                         validate=False)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, -self.matrix, validate=False)

    def rank(self) -> int:
        return self.matrix.rank()

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def is_isomorphism(self) -> bool:
        return (self.source.dim == self.target.dim
                and self.rank() == self.source.dim)

    def inverse(self) -> "ModuleMap":
        inv = self.matrix.inverse()
        if inv is None:
            raise ModuleError("map is not invertible")
        return ModuleMap(self.target, self.source, inv, validate=False)

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def __repr__(self):
        return (f"ModuleMap({self.source.label or '?'} -> "
                f"{self.target.label or '?'}, {self.matrix.rows}x{self.matrix.cols})")


def _apply_var_rows(mod: Module, v: int, mat: Matrix) -> Matrix:
    """mat composed with the variable action on the source side."""
    if mod.free_rank is not None and mod._var_actions is None:
        # (M @ A_v) computed column-blockwise through the small action
        return _free_blockwise_apply_right(mod.algebra, v, mod.free_rank, mat)
    return mat @ mod.var_actions[v]


def _free_blockwise_apply_right(alg: Algebra, v: int, rank: int,
                                mat: Matrix) -> Matrix:
    fld = alg.field
    d = alg.dim
    small = alg.varmat[v]
    if fld.p is not None:
        m3 = mat.a.astype(np.int64).reshape(mat.rows, rank, d)
        out = np.einsum("rgb,ba->rga", m3, small.a.astype(np.int64)) % fld.p
        return Matrix(fld, out.reshape(mat.rows, rank * d).astype(mat.a.dtype))
    out = Matrix.zeros(fld, mat.rows, rank * d)
    for g in range(rank):
        blk = Matrix(fld, mat.a[:, g * d:(g + 1) * d])
        out.a[:, g * d:(g + 1) * d] = (blk @ small).a
    return out


@dataclass
class ShortExactSequence:
    """0 -> left --inject--> middle --project--> right -> 0."""

    inject: ModuleMap
    project: ModuleMap

    @property
    def left(self) -> Module:
        return self.inject.source

    @property
    def middle(self) -> Module:
        return self.inject.target

    @property
    def right(self) -> Module:
        return self.project.target

    def validate(self) -> None:
        if self.inject.target is not self.project.source:
            if self.inject.target.dim != self.project.source.dim:
                raise ModuleError("sequence maps do not share a middle module")
        self.inject.check_linear()
        self.project.check_linear()
        if not self.inject.is_injective():
            raise ModuleError("left map is not injective")
        if not self.project.is_surjective():
            raise ModuleError("right map is not surjective")
        if not (self.project.matrix @ self.inject.matrix).is_zero():
            raise ModuleError("composite through the middle is nonzero")
        if self.inject.rank() != self.middle.dim - self.project.rank():
            raise ModuleError("sequence is not exact in the middle")

    def is_valid(self) -> bool:
        try:
            self.validate()
            return True
        except ModuleError:
            return False


def split_ses(left: Module, right: Module) -> ShortExactSequence:
    """The canonical split sequence around a literal direct sum."""
    total = direct_sum([left, right])
    return ShortExactSequence(injection_map(total, 0), projection_map(total, 1))


# -- sub/quotient ----------------------------------------------------------


def submodule(mod: Module, span: Matrix, label: str = "") -> tuple[Module, ModuleMap]:
    """Module structure on a column span closed under the actions."""
    alg = mod.algebra
    basis = column_space_basis(span)
    if basis.cols == 0:
        sub = zero_module(alg)
        return sub, ModuleMap(sub, mod, Matrix.zeros(alg.field, mod.dim, 0),
                              validate=False)
    solver = ColumnSolver(basis)
    va = []
    for v in range(alg.nvars):
        img = mod.apply_var(v, basis)
        coords, ok = solver.solve_columns(img)
        if not all(ok):
            raise ModuleError("span is not closed under the module actions")
        va.append(coords)
    sub = Module(alg, basis.cols, va, label=label, validate=False)
    return sub, ModuleMap(sub, mod, basis, validate=False)


def quotient_module(mod: Module, span: Matrix,
                    label: str = "") -> tuple[Module, ModuleMap]:
    """Quotient by the submodule generated by the given columns."""
    alg = mod.algebra
    fld = alg.field
    if span.cols == 0 or span.is_zero():
        # trivial quotient: literally the same module
        return mod, ModuleMap.identity(mod)
    rr, piv = span.transpose().rref()
    rows = Matrix(fld, rr.a[:len(piv), :])
    pivset = set(piv)
    keep = [i for i in range(mod.dim) if i not in pivset]
    # reduction of each unit vector, restricted to the kept coordinates
    red = nf_columns(rows, list(piv), Matrix.identity(fld, mod.dim))
    proj = red.take_rows(keep)
    lift = Matrix.zeros(fld, mod.dim, len(keep))
    for j, pos in enumerate(keep):
        lift.a[pos, j] = fld.one()
    va = []
    for v in range(alg.nvars):
        va.append(proj @ mod.apply_var(v, lift))
    quot = Module(alg, len(keep), va, label=label, validate=False)
    return quot, ModuleMap(mod, quot, proj, validate=False)


def kernel_module(f: ModuleMap, label: str = "") -> tuple[Module, ModuleMap]:
    return submodule(f.source, f.matrix.kernel_basis(), label=label)


def image_module(f: ModuleMap, label: str = "") -> tuple[Module, ModuleMap]:
    return submodule(f.target, column_space_basis(f.matrix), label=label)


def cokernel_module(f: ModuleMap, label: str = "") -> tuple[Module, ModuleMap]:
    return quotient_module(f.target, f.matrix, label=label)


# -- hom spaces --------------------------------------------------------------


def hom_space_matrix(src: Module, tgt: Module) -> Matrix:
    """Columns are row-major vectorized k-matrices of the linear maps."""
    alg = src.algebra
    fld = alg.field
    nm = src.dim * tgt.dim
    if nm == 0:
        return Matrix.zeros(fld, 0, 0)
    if alg.nvars == 0:
        return Matrix.identity(fld, nm)
    blocks = []
    eye_t = Matrix.identity(fld, tgt.dim)
    eye_s = Matrix.identity(fld, src.dim)
    for v in range(alg.nvars):
        a = src.var_actions[v]
        b = tgt.var_actions[v]
        blocks.append(kron(eye_t, a.transpose()) - kron(b, eye_s))
    return Matrix.vstack(blocks).kernel_basis()


def hom_basis(src: Module, tgt: Module) -> list[Matrix]:
    km = hom_space_matrix(src, tgt)
    fld = src.algebra.field
    out = []
    for j in range(km.cols):
        out.append(Matrix(fld, km.a[:, j].reshape(tgt.dim, src.dim).copy()))
    return out


def hom_dim(src: Module, tgt: Module) -> int:
    if src.dim == 0 or tgt.dim == 0:
        return 0
    return hom_space_matrix(src, tgt).cols


# -- isomorphism testing ------------------------------------------------------


@dataclass
class IsoVerdict:
    kind: str                 # "yes", "no", "unknown"
    witness: ModuleMap | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.kind == "yes"


def is_isomorphic(m1: Module, m2: Module, seed: int = 0, trials: int = 40,
                  exhaustive_limit: int = 2 ** 14,
                  use_betti: bool = True) -> IsoVerdict:
    """Decide isomorphism where feasible, with an explicit witness on yes.

    Invariant mismatches give definitive refusals; a sampled or enumerated
    bijective map gives a definitive witness; small hom spaces over prime
    fields are enumerated for a definitive refusal; anything else is
    reported unknown.
    """
    if m1.algebra is not m2.algebra:
        return IsoVerdict("no", reason="different algebras")
    fld = m1.algebra.field
    if m1.dim != m2.dim:
        return IsoVerdict("no", reason=f"dimensions {m1.dim} != {m2.dim}")
    if m1.dim == 0:
        return IsoVerdict("yes", ModuleMap(m1, m2, Matrix.zeros(fld, 0, 0),
                                           validate=False))
    r1, r2 = m1.radical_span().cols, m2.radical_span().cols
    if r1 != r2:
        return IsoVerdict("no", reason=f"radical dimensions {r1} != {r2}")
    s1, s2 = m1.socle_span().cols, m2.socle_span().cols
    if s1 != s2:
        return IsoVerdict("no", reason=f"socle dimensions {s1} != {s2}")
    if r1 == 0:
        # the ideal kills both; any linear bijection is a module map
        return IsoVerdict("yes", ModuleMap(m1, m2,
                                           Matrix.identity(fld, m1.dim),
                                           validate=False))
    hom = hom_space_matrix(m1, m2)
    h = hom.cols
    if h == 0:
        return IsoVerdict("no", reason="no nonzero maps at all")
    rng = random.Random(seed)
    dim = m1.dim
    for _ in range(trials):
        coeffs = Matrix.column(fld, [fld.random(rng) for _ in range(h)])
        vec = hom @ coeffs
        cand = Matrix(fld, vec.a.reshape(dim, dim).copy())
        if cand.rank() == dim:
            return IsoVerdict("yes", ModuleMap(m1, m2, cand, validate=False))
    if use_betti:
        from .resolution import resolve
        b1a = resolve(m1).betti(1)
        b1b = resolve(m2).betti(1)
        if b1a != b1b:
            return IsoVerdict("no", reason=f"first betti {b1a} != {b1b}")
    if fld.p is not None and fld.p ** h <= exhaustive_limit:
        for combo in iter_product(range(fld.p), repeat=h):
            if not any(combo):
                continue
            coeffs = Matrix.column(fld, list(combo))
            vec = hom @ coeffs
            cand = Matrix(fld, vec.a.reshape(dim, dim).copy())
            if cand.rank() == dim:
                return IsoVerdict("yes", ModuleMap(m1, m2, cand, validate=False))
        return IsoVerdict("no", reason="no invertible map in the full hom space")
    return IsoVerdict("unknown",
                      reason=f"hom space of dimension {h} too large to enumerate")


# -- free summands -------------------------------------------------------------


@dataclass
class FreeSplit:
    """Decomposition M = free(rank) (+) remainder, with an explicit witness
    from the literal direct sum onto the original module."""

    rank: int
    remainder: Module
    iso: ModuleMap


def split_free_summands(mod: Module, max_peel: int | None = None) -> FreeSplit:
    """Peel off free direct summands one rank at a time.

    A rank-one free summand exists exactly when some map to the regular
    module hits a unit; the found surjection is split by a solved section
    and the kernel is carried forward.
    """
    alg = mod.algebra
    fld = alg.field
    reg = regular_module(alg)
    if mod.free_rank is not None:
        rem = zero_module(alg)
        total = direct_sum([free_module(alg, mod.free_rank), rem]) \
            if mod.free_rank else rem
        eye = Matrix.identity(fld, mod.dim)
        return FreeSplit(mod.free_rank, rem,
                         ModuleMap(total, mod, eye, validate=False))
    rank = 0
    current = mod
    # columns embedding the current remainder back into the original module
    embed = Matrix.identity(fld, mod.dim)
    sections: list[Matrix] = []  # columns in original coordinates
    limit = max_peel if max_peel is not None else mod.dim
    while current.dim > 0 and rank < limit:
        maps = hom_basis(current, reg)
        found = None
        for hm in maps:
            if fld.p is not None:
                if hm.a[0, :].any():
                    found = hm
                    break
            else:
                if any(x != 0 for x in hm.a[0, :]):
                    found = hm
                    break
        if found is None:
            break
        # section: w with found(w) = 1, extended to a splitting R -> current
        one = Matrix.zeros(fld, alg.dim, 1)
        one.a[0, 0] = fld.one()
        w = found.solve(one)
        if w is None:
            raise ModuleError("surjection onto the regular module failed to split")
        sec_cols = Matrix.hstack(
            [current.actions[t] @ w for t in range(alg.dim)])
        sections.append(embed @ sec_cols)
        ker = found.kernel_basis()
        sub, incl = submodule(current, ker)
        embed = embed @ incl.matrix
        current = sub
        rank += 1
    rem = current
    if rank == 0:
        return FreeSplit(0, rem, ModuleMap(rem, mod, embed, validate=False))
    total = direct_sum([free_module(alg, rank), rem])
    cols = Matrix.hstack(sections + [embed])
    iso = ModuleMap(total, mod, cols, validate=False)
    if cols.rank() != mod.dim:
        raise ModuleError("free splitting produced a non-bijective witness")
    return FreeSplit(rank, rem, iso)


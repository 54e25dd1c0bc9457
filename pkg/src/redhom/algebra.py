"""Finite-dimensional commutative local algebras over an exact field.

An algebra is presented by variable names, polynomial relations with zero
constant term, and a declared nilpotency bound N for the maximal ideal.
The underlying ring is k[x_1,...,x_n] modulo the relations together with
all monomials of degree N, so every instance is Artinian local with
residue field k.

The k-basis consists of the monomials of degree below N that are not
reducible by the relation ideal; it is closed under monomial division,
basis index 0 is always the identity element, and indices 1 and up span
the maximal ideal.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .linalg import Field, Matrix, nf_columns


class AlgebraError(ValueError):
    """Raised for ill-formed algebra presentations."""


def _monomials_below(nvars: int, bound: int) -> list[tuple[int, ...]]:
    """All exponent tuples of total degree < bound, sorted by degree then
    by decreasing leading exponents (so 1, x, y, x^2, x*y, y^2, ...)."""
    out: list[tuple[int, ...]] = []

    def rec(prefix, remaining, budget):
        if remaining == 0:
            out.append(tuple(prefix))
            return
        for e in range(budget + 1):
            rec(prefix + [e], remaining - 1, budget - e)

    for deg in range(bound):
        chunk: list[tuple[int, ...]] = []
        out_len = len(out)
        rec([], nvars, deg)
        chunk = [m for m in out[out_len:] if sum(m) == deg]
        del out[out_len:]
        chunk.sort(key=lambda m: tuple(-e for e in m))
        out.extend(chunk)
    return out


def parse_polynomial(src: str, var_names: list[str], fld: Field):
    """Parse polynomial text into {exponent_tuple: coefficient}.

    Accepts caret powers ("x^2"), explicit products ("x*y"), integer and
    fraction coefficients.  Unknown symbols and non-rational coefficients
    are rejected.
    """
    import sympy
    from sympy.parsing.sympy_parser import (
        convert_xor,
        parse_expr,
        standard_transformations,
    )

    syms = [sympy.Symbol(n) for n in var_names]
    local = {n: s for n, s in zip(var_names, syms)}
    try:
        expr = parse_expr(
            src,
            local_dict=local,
            transformations=standard_transformations + (convert_xor,),
        )
    except Exception as exc:
        raise AlgebraError(f"cannot parse polynomial {src!r}: {exc}") from None
    extra = expr.free_symbols - set(syms)
    if extra:
        names = sorted(str(s) for s in extra)
        raise AlgebraError(f"unknown variables {names} in {src!r}")
    expr = sympy.expand(expr)
    if expr == 0:
        return {}
    try:
        poly = sympy.Poly(expr, *syms, domain="QQ")
    except Exception as exc:
        raise AlgebraError(f"not a rational-coefficient polynomial: {src!r} ({exc})") from None
    out = {}
    for mono, coef in poly.terms():
        frac = Fraction(int(coef.p), int(coef.q))
        if fld.p is not None:
            den = frac.denominator % fld.p
            if den == 0:
                raise AlgebraError(
                    f"coefficient {frac} in {src!r} has denominator divisible "
                    f"by the characteristic {fld.p}")
            val = fld.div(frac.numerator % fld.p, den)
        else:
            val = frac
        if val != fld.zero():
            out[tuple(int(e) for e in mono)] = val
    return out


@dataclass(eq=False)
class Algebra:
    """Structure constants and cached operators of one local algebra."""

    field: Field
    var_names: list[str]
    nilpotency: int
    relation_srcs: list[str]
    basis_mons: list[tuple[int, ...]]
    dim: int
    regmat: list[Matrix]           # left multiplication by each basis element
    varmat: list[Matrix]           # left multiplication by each variable
    var_class: list[Matrix]        # each variable as a basis-coordinate column
    socle_basis: Matrix
    embedding_dim: int
    _free_cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def nvars(self) -> int:
        return len(self.var_names)

    @property
    def is_gorenstein(self) -> bool:
        return self.socle_basis.cols == 1

    @property
    def socle_dim(self) -> int:
        return self.socle_basis.cols

    @property
    def maximal_ideal_dim(self) -> int:
        return self.dim - 1

    def hilbert_function(self) -> list[int]:
        top = max(sum(m) for m in self.basis_mons)
        counts = [0] * (top + 1)
        for m in self.basis_mons:
            counts[sum(m)] += 1
        return counts

    def action_stack(self) -> np.ndarray:
        """All regular-representation matrices as one (dim, dim, dim) array."""
        return np.stack([m.a for m in self.regmat])

    def mon_label(self, mon: tuple[int, ...]) -> str:
        parts = []
        for name, e in zip(self.var_names, mon):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def basis_labels(self) -> list[str]:
        return [self.mon_label(m) for m in self.basis_mons]

    def element_str(self, coords) -> str:
        """Human-readable form of a basis-coordinate vector."""
        if isinstance(coords, Matrix):
            coords = [coords.entry(i, 0) for i in range(coords.rows)]
        terms = []
        for c, mon in zip(coords, self.basis_mons):
            if c == self.field.zero():
                continue
            lbl = self.mon_label(mon)
            if lbl == "1":
                terms.append(self.field.format(c))
            elif c == self.field.one():
                terms.append(lbl)
            else:
                terms.append(f"{self.field.format(c)}*{lbl}")
        return " + ".join(terms) if terms else "0"

    def element_from_string(self, src: str) -> Matrix:
        """Basis-coordinate column of a polynomial expression."""
        poly = parse_polynomial(src, self.var_names, self.field)
        vec = Matrix.zeros(self.field, self.dim, 1)
        for mon, coef in poly.items():
            col = self._mon_nf(mon)
            vec = vec + col.scale(coef)
        return vec

    def _mon_nf(self, mon: tuple[int, ...]) -> Matrix:
        """Normal form of an arbitrary monomial as a basis column."""
        if sum(mon) >= self.nilpotency:
            return Matrix.zeros(self.field, self.dim, 1)
        try:
            idx = self._mon_index[mon]
        except KeyError:
            raise AlgebraError(f"monomial {mon} has wrong arity") from None
        return Matrix(self.field, self._nf_table.a[:, idx:idx + 1].copy())

    def multiply(self, a: Matrix, b: Matrix) -> Matrix:
        """Product of two elements given as basis columns."""
        out = Matrix.zeros(self.field, self.dim, 1)
        for i in range(self.dim):
            c = a.entry(i, 0)
            if c != self.field.zero():
                out = out + (self.regmat[i] @ b).scale(c)
        return out

    def free_varmat(self, rank: int) -> list[Matrix]:
        """Variable actions on the rank-g free module (block diagonal)."""
        key = ("v", rank)
        if key not in self._free_cache:
            self._free_cache[key] = [
                Matrix.block_diag(self.field, [m] * rank) for m in self.varmat]
        return self._free_cache[key]

    def free_action_stack(self, rank: int) -> np.ndarray:
        key = ("a", rank)
        if key not in self._free_cache:
            base = self.action_stack()
            d = self.dim
            out = np.zeros((d, rank * d, rank * d), dtype=base.dtype)
            for j in range(rank):
                out[:, j * d:(j + 1) * d, j * d:(j + 1) * d] = base
            self._free_cache[key] = out
        return self._free_cache[key]

    def presentation(self) -> dict:
        return {
            "characteristic": 0 if self.field.p is None else self.field.p,
            "variables": list(self.var_names),
            "relations": list(self.relation_srcs),
            "nilpotency": self.nilpotency,
        }

    def summary(self) -> dict:
        return {
            "presentation": self.presentation(),
            "dimension": self.dim,
            "basis": self.basis_labels(),
            "hilbert_function": self.hilbert_function(),
            "embedding_dimension": self.embedding_dim,
            "socle_dimension": self.socle_dim,
            "gorenstein": self.is_gorenstein,
        }

    def __repr__(self):
        rel = ",".join(self.relation_srcs) or "0"
        return (f"Algebra({self.field}[{','.join(self.var_names)}]/"
                f"({rel})+m^{self.nilpotency}, dim={self.dim})")


def build_algebra(fld: Field, var_names: list[str], relations: list[str],
                  nilpotency: int, validate: bool = True) -> Algebra:
    """Construct the algebra and all cached structure data.

    `relations` are polynomial strings with zero constant term; the ideal
    they generate is enlarged by all monomials of degree `nilpotency`.
    """
    if nilpotency < 1:
        raise AlgebraError("nilpotency bound must be at least 1")
    if len(set(var_names)) != len(var_names):
        raise AlgebraError("duplicate variable names")
    n = len(var_names)
    mons = _monomials_below(n, nilpotency)
    mon_index = {m: i for i, m in enumerate(mons)}
    nm = len(mons)

    parsed = []
    for src in relations:
        poly = parse_polynomial(src, var_names, fld)
        zero_mon = (0,) * n
        if zero_mon in poly:
            raise AlgebraError(f"relation {src!r} has a nonzero constant term")
        poly = {m: c for m, c in poly.items() if sum(m) < nilpotency}
        if poly:
            parsed.append(poly)

    # span of the relation ideal inside the degree-truncated monomial space
    rows = []
    for poly in parsed:
        fdeg = min(sum(m) for m in poly)
        for u in mons:
            if sum(u) + fdeg >= nilpotency:
                continue
            row = [fld.zero()] * nm
            nonzero = False
            for m, c in poly.items():
                tot = tuple(a + b for a, b in zip(u, m))
                if sum(tot) < nilpotency:
                    row[mon_index[tot]] = fld.add(row[mon_index[tot]], c)
                    nonzero = True
            if nonzero:
                rows.append(row)
    if rows:
        ideal = Matrix.from_rows(fld, rows)
    else:
        ideal = Matrix.zeros(fld, 0, nm)
    rref, pivots = ideal.rref()
    pivset = set(pivots)
    basis_pos = [i for i in range(nm) if i not in pivset]
    if 0 in pivset:
        raise AlgebraError("relations collapse the identity; algebra is zero")
    basis_mons = [mons[i] for i in basis_pos]
    d = len(basis_mons)
    basis_of_mon = {m: i for i, m in enumerate(basis_mons)}

    # normal form of every truncated monomial, as a (d x nm) table
    nf_full = nf_columns(Matrix(fld, rref.a[:len(pivots), :]), list(pivots),
                         Matrix.identity(fld, nm))
    nf_table = nf_full.take_rows(basis_pos)

    # multiplication through normal forms of product monomials
    regmat = []
    zero_col = Matrix.zeros(fld, d, 1)
    for i, mi in enumerate(basis_mons):
        cols = []
        for j, mj in enumerate(basis_mons):
            tot = tuple(a + b for a, b in zip(mi, mj))
            if sum(tot) >= nilpotency:
                cols.append(zero_col)
            else:
                idx = mon_index[tot]
                cols.append(Matrix(fld, nf_table.a[:, idx:idx + 1]))
        regmat.append(Matrix.hstack(cols) if cols else Matrix.zeros(fld, d, 0))

    var_class = []
    varmat = []
    for v in range(n):
        e = tuple(1 if t == v else 0 for t in range(n))
        if nilpotency == 1:
            var_class.append(Matrix.zeros(fld, d, 1))
            varmat.append(Matrix.zeros(fld, d, d))
            continue
        idx = mon_index[e]
        var_class.append(Matrix(fld, nf_table.a[:, idx:idx + 1].copy()))
        cols = []
        for mj in basis_mons:
            tot = tuple(a + b for a, b in zip(e, mj))
            if sum(tot) >= nilpotency:
                cols.append(zero_col)
            else:
                cols.append(Matrix(fld, nf_table.a[:, mon_index[tot]:mon_index[tot] + 1]))
        varmat.append(Matrix.hstack(cols))

    # socle: simultaneous kernel of the variable actions
    if n:
        socle = Matrix.vstack(varmat).kernel_basis()
    else:
        socle = Matrix.identity(fld, d)

    # embedding dimension: dim m minus dim m^2
    if d > 1 and n:
        m2 = Matrix.hstack([vm.take_cols(range(1, d)) for vm in varmat])
        emb = (d - 1) - m2.rank()
    else:
        emb = 0

    alg = Algebra(
        field=fld, var_names=list(var_names), nilpotency=nilpotency,
        relation_srcs=list(relations), basis_mons=basis_mons, dim=d,
        regmat=regmat, varmat=varmat, var_class=var_class,
        socle_basis=socle, embedding_dim=emb,
    )
    alg._mon_index = mon_index  # type: ignore[attr-defined]
    alg._nf_table = nf_table    # type: ignore[attr-defined]
    if validate:
        _validate_algebra(alg)
    return alg


def _validate_algebra(alg: Algebra) -> None:
    """Internal consistency: commutativity, associativity, nilpotency."""
    d, fld = alg.dim, alg.field
    assert alg.basis_mons[0] == (0,) * alg.nvars
    assert alg.regmat[0] == Matrix.identity(fld, d)
    for u in range(alg.nvars):
        for v in range(u + 1, alg.nvars):
            if not (alg.varmat[u] @ alg.varmat[v]) == (alg.varmat[v] @ alg.varmat[u]):
                raise AlgebraError("variable actions do not commute")
    if d <= 64:
        if fld.p is not None:
            stack = alg.action_stack().astype(np.int64)
            prod = np.einsum("iab,jbc->ijac", stack, stack) % fld.p
            coef = np.stack(
                [np.stack([alg.regmat[i].a[:, j].astype(np.int64)
                           for j in range(d)]) for i in range(d)])
            want = np.einsum("ijt,tac->ijac", coef, stack) % fld.p
            if not (prod == want).all():
                raise AlgebraError("multiplication table is not associative")
        else:
            for i in range(d):
                for j in range(d):
                    lhs = alg.regmat[i] @ alg.regmat[j]
                    rhs = Matrix.zeros(fld, d, d)
                    for t in range(d):
                        c = alg.regmat[i].entry(t, j)
                        if c != 0:
                            rhs = rhs + alg.regmat[t].scale(c)
                    if not lhs == rhs:
                        raise AlgebraError("multiplication table is not associative")
    # m^N = 0: iterate spans of m, m^2, ...
    span = Matrix.identity(fld, d).take_cols(range(1, d))
    for _ in range(alg.nilpotency - 1):
        if span.cols == 0:
            break
        if alg.nvars == 0:
            span = Matrix.zeros(fld, d, 0)
            break
        nxt = Matrix.hstack([vm @ span for vm in alg.varmat])
        keep, piv = nxt.rref()
        span = nxt.take_cols(list(piv)) if piv else Matrix.zeros(fld, d, 0)
    if span.cols and alg.nvars:
        last = Matrix.hstack([vm @ span for vm in alg.varmat])
        if not last.is_zero():
            raise AlgebraError("declared nilpotency bound is violated")


@lru_cache(maxsize=32)
def _cached_algebra(p: int | None, names: tuple, rels: tuple, nilp: int) -> Algebra:
    return build_algebra(Field(p), list(names), list(rels), nilp)


def algebra_from_presentation(pres: dict) -> Algebra:
    """Rebuild an algebra from its serialized presentation dict."""
    ch = pres["characteristic"]
    return _cached_algebra(None if ch == 0 else int(ch),
                           tuple(pres["variables"]),
                           tuple(pres["relations"]),
                           int(pres["nilpotency"]))

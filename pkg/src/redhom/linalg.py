"""Exact dense linear algebra over prime fields and the rationals.

All arithmetic is exact: prime-field entries are canonical integers in
[0, p), rational entries are `fractions.Fraction` values.  No floating
point anywhere.

Layout contract relied on by the rest of the package: `kernel_basis`
returns its columns in unit-at-free-column form (each basis vector has a
1 at its own free column of the rref and 0 at the other free columns),
so coordinates of any kernel vector with respect to that basis can be
read off the free positions directly.

Row reduction never chooses pivots inside carried (augmented) columns,
which keeps batched solves exact even when some targets lie outside the
column span.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

_GF2_PACK_MIN = 4096  # below this many entries the plain int path is faster


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Field:
    """A prime field F_p (p < 2**31) or the rationals (p is None)."""

    __slots__ = ("p",)

    def __init__(self, p: int | None = None):
        if p is not None:
            if not (2 <= p < 2**31):
                raise ValueError(f"field characteristic out of range: {p}")
            if not _is_prime(p):
                raise ValueError(f"field characteristic must be prime: {p}")
        self.p = p

    @property
    def is_prime_field(self) -> bool:
        return self.p is not None

    def zero(self):
        return 0 if self.p is not None else Fraction(0)

    def one(self):
        return 1 if self.p is not None else Fraction(1)

    def coerce(self, x):
        if self.p is not None:
            return int(x) % self.p
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into {self!r}")

    def add(self, a, b):
        return (a + b) % self.p if self.p is not None else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p is not None else a - b

    def mul(self, a, b):
        return (a * b) % self.p if self.p is not None else a * b

    def neg(self, a):
        return (-a) % self.p if self.p is not None else -a

    def inv(self, a):
        if self.p is not None:
            a %= self.p
            if a == 0:
                raise ZeroDivisionError("inverse of zero")
            return pow(a, self.p - 2, self.p)
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / a

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def parse(self, s: str):
        """Parse a field element from decimal text like "3" or "-1/2"."""
        s = s.strip()
        if self.p is not None:
            if "/" in s:
                num, den = s.split("/", 1)
                return self.div(int(num) % self.p, int(den) % self.p)
            return int(s) % self.p
        return Fraction(s)

    def format(self, x) -> str:
        return str(x)

    def random(self, rng):
        if self.p is not None:
            return rng.randrange(self.p)
        return Fraction(rng.randrange(-4, 5), rng.randrange(1, 4))

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"


QQ = Field(None)
GF2 = Field(2)
GF3 = Field(3)


def _storage_dtype(p: int):
    return np.int8 if p <= 127 else np.int64


# ---------------------------------------------------------------------------
# GF(2) bit-packed kernels.  Rows are packed little-endian into uint64 words.


def _gf2_pack(a: np.ndarray) -> np.ndarray:
    r, c = a.shape
    if c == 0:
        return np.zeros((r, 0), dtype=np.uint64)
    packed = np.packbits(a.astype(np.uint8), axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.hstack([packed, np.zeros((r, pad), dtype=np.uint8)])
    return packed.view(np.uint64)


def _gf2_unpack(w: np.ndarray, cols: int) -> np.ndarray:
    r = w.shape[0]
    if cols == 0:
        return np.zeros((r, 0), dtype=np.int8)
    bytes_ = w.view(np.uint8)
    bits = np.unpackbits(bytes_, axis=1, count=cols, bitorder="little")
    return bits.astype(np.int8)


def _gf2_rref_packed(w: np.ndarray, pivot_cols: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of packed rows; pivots only in the first
    `pivot_cols` columns."""
    w = w.copy()
    r = w.shape[0]
    pivots: list[int] = []
    row = 0
    for col in range(pivot_cols):
        if row == r:
            break
        word, bit = col >> 6, np.uint64(col & 63)
        colbits = (w[row:, word] >> bit) & np.uint64(1)
        nz = np.nonzero(colbits)[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            w[[row, pr]] = w[[pr, row]]
        mask = ((w[:, word] >> bit) & np.uint64(1)).astype(bool)
        mask[row] = False
        if mask.any():
            w[mask] ^= w[row]
        pivots.append(col)
        row += 1
    return w, pivots


# ---------------------------------------------------------------------------


def _rref_fp_carry(a: np.ndarray, p: int, pivot_cols: int):
    """In-place reduced row echelon over F_p; pivots restricted to the
    leading `pivot_cols` columns.  `a` must be int64."""
    r = a.shape[0]
    pivots: list[int] = []
    row = 0
    for col in range(pivot_cols):
        if row == r:
            break
        nz = np.nonzero(a[row:, col])[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            a[[row, pr]] = a[[pr, row]]
        pv = int(a[row, col])
        if pv != 1:
            a[row] = (a[row] * pow(pv, p - 2, p)) % p
        fac = a[:, col].copy()
        fac[row] = 0
        nzm = np.nonzero(fac)[0]
        if nzm.size:
            a[nzm] = (a[nzm] - np.outer(fac[nzm], a[row])) % p
        pivots.append(col)
        row += 1
    return a, pivots


def _rref_q_carry(rows: list[list[Fraction]], ncols: int, pivot_cols: int):
    r = len(rows)
    pivots: list[int] = []
    row = 0
    for col in range(pivot_cols):
        if row == r:
            break
        pr = None
        for i in range(row, r):
            if rows[i][col] != 0:
                pr = i
                break
        if pr is None:
            continue
        if pr != row:
            rows[row], rows[pr] = rows[pr], rows[row]
        pv = rows[row][col]
        if pv != 1:
            inv = 1 / pv
            rows[row] = [x * inv for x in rows[row]]
        rr = rows[row]
        for i in range(r):
            if i != row and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rr)]
        pivots.append(col)
        row += 1
    return rows, pivots


class Matrix:
    """Dense exact matrix over a `Field`.

    Storage: int8/int64 numpy array for prime fields (canonical residues),
    object array of Fractions for the rationals.
    """

    __slots__ = ("field", "a")

    def __init__(self, field: Field, a: np.ndarray):
        self.field = field
        self.a = a

    # -- constructors -------------------------------------------------

    @staticmethod
    def from_rows(field: Field, rows) -> "Matrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if field.p is not None:
            arr = np.array([[int(x) % field.p for x in row] for row in rows],
                           dtype=_storage_dtype(field.p)).reshape(r, c)
        else:
            arr = np.empty((r, c), dtype=object)
            for i, row in enumerate(rows):
                for j, x in enumerate(row):
                    arr[i, j] = field.coerce(x)
        return Matrix(field, arr)

    @staticmethod
    def zeros(field: Field, r: int, c: int) -> "Matrix":
        if field.p is not None:
            return Matrix(field, np.zeros((r, c), dtype=_storage_dtype(field.p)))
        arr = np.empty((r, c), dtype=object)
        arr.fill(Fraction(0))
        return Matrix(field, arr)

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        m = Matrix.zeros(field, n, n)
        for i in range(n):
            m.a[i, i] = field.one()
        return m

    @staticmethod
    def column(field: Field, entries) -> "Matrix":
        return Matrix.from_rows(field, [[x] for x in entries])

    # -- basic shape / access ------------------------------------------

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def copy(self) -> "Matrix":
        return Matrix(self.field, self.a.copy())

    def __getitem__(self, key):
        v = self.a[key]
        if isinstance(v, np.ndarray):
            return Matrix(self.field, v.copy() if v.base is not None else v)
        return int(v) if self.field.p is not None else v

    def entry(self, i: int, j: int):
        v = self.a[i, j]
        return int(v) if self.field.p is not None else v

    def take_cols(self, idx) -> "Matrix":
        return Matrix(self.field, self.a[:, list(idx)].copy())

    def take_rows(self, idx) -> "Matrix":
        return Matrix(self.field, self.a[list(idx), :].copy())

    def to_lists(self):
        if self.field.p is not None:
            return [[int(x) for x in row] for row in self.a]
        return [list(row) for row in self.a]

    def to_str_rows(self):
        return [[self.field.format(self.entry(i, j)) for j in range(self.cols)]
                for i in range(self.rows)]

    @staticmethod
    def from_str_rows(field: Field, rows) -> "Matrix":
        return Matrix.from_rows(field, [[field.parse(s) for s in row] for row in rows])

    # -- arithmetic -----------------------------------------------------

    def _check(self, other: "Matrix"):
        if self.field != other.field:
            raise ValueError("field mismatch")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.field.p is not None:
            return Matrix(self.field,
                          ((self.a.astype(np.int64) + other.a) % self.field.p
                           ).astype(self.a.dtype))
        return Matrix(self.field, self.a + other.a)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.field.p is not None:
            return Matrix(self.field,
                          ((self.a.astype(np.int64) - other.a) % self.field.p
                           ).astype(self.a.dtype))
        return Matrix(self.field, self.a - other.a)

    def __neg__(self) -> "Matrix":
        if self.field.p is not None:
            return Matrix(self.field,
                          ((-self.a.astype(np.int64)) % self.field.p).astype(self.a.dtype))
        return Matrix(self.field, -self.a)

    def scale(self, c) -> "Matrix":
        c = self.field.coerce(c)
        if self.field.p is not None:
            return Matrix(self.field,
                          ((self.a.astype(np.int64) * c) % self.field.p).astype(self.a.dtype))
        return Matrix(self.field, self.a * c)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.a.shape} @ {other.a.shape}")
        p = self.field.p
        if p is None:
            return Matrix(self.field, np.dot(self.a, other.a))
        # int64 accumulation is exact while cols * (p-1)^2 < 2**63
        if self.cols * (p - 1) ** 2 < 2**62:
            prod = np.dot(self.a.astype(np.int64), other.a.astype(np.int64)) % p
            return Matrix(self.field, prod.astype(_storage_dtype(p)))
        obj = np.dot(self.a.astype(object), other.a.astype(object))
        return Matrix(self.field, (obj % p).astype(np.int64))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self.a.T.copy())

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        if self.field.p is not None:
            return not self.a.any()
        return all(x == 0 for x in self.a.flat)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field or self.a.shape != other.a.shape:
            return False
        if self.field.p is not None:
            return bool((self.a == other.a).all())
        return all(x == y for x, y in zip(self.a.flat, other.a.flat))

    def __hash__(self):
        raise TypeError("Matrix is unhashable")

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols})"

    # -- stacking ---------------------------------------------------------

    @staticmethod
    def hstack(mats: list["Matrix"]) -> "Matrix":
        mats = [m for m in mats]
        if not mats:
            raise ValueError("hstack of nothing")
        return Matrix(mats[0].field, np.hstack([m.a for m in mats]))

    @staticmethod
    def vstack(mats: list["Matrix"]) -> "Matrix":
        if not mats:
            raise ValueError("vstack of nothing")
        return Matrix(mats[0].field, np.vstack([m.a for m in mats]))

    @staticmethod
    def block_diag(field: Field, mats: list["Matrix"]) -> "Matrix":
        r = sum(m.rows for m in mats)
        c = sum(m.cols for m in mats)
        out = Matrix.zeros(field, r, c)
        i = j = 0
        for m in mats:
            out.a[i:i + m.rows, j:j + m.cols] = m.a
            i += m.rows
            j += m.cols
        return out

    # -- reduction ---------------------------------------------------------

    def _rref_carry(self, carry: "Matrix | None"):
        """Reduced row echelon form with optional carried columns.

        Pivots are chosen only among self's columns; row operations are
        applied to the carried block as well.  Returns (R, pivots, C).
        """
        f = self.field
        ccols = carry.cols if carry is not None else 0
        total = self.cols + ccols
        if f.p == 2 and self.rows * total >= _GF2_PACK_MIN:
            joint = self.a if carry is None else np.hstack([self.a, carry.a])
            w, piv = _gf2_rref_packed(_gf2_pack(joint), self.cols)
            flat = _gf2_unpack(w, total)
            r = Matrix(f, flat[:, :self.cols].copy())
            c = Matrix(f, flat[:, self.cols:].copy()) if carry is not None else None
            return r, piv, c
        if f.p is not None:
            joint = (self.a if carry is None else np.hstack([self.a, carry.a])
                     ).astype(np.int64)
            joint, piv = _rref_fp_carry(joint, f.p, self.cols)
            dt = _storage_dtype(f.p)
            r = Matrix(f, joint[:, :self.cols].astype(dt))
            c = Matrix(f, joint[:, self.cols:].astype(dt)) if carry is not None else None
            return r, piv, c
        rows = [list(row) for row in self.a]
        if carry is not None:
            for row, crow in zip(rows, carry.a):
                row.extend(crow)
        rows, piv = _rref_q_carry(rows, total, self.cols)
        rm = Matrix.from_rows(f, [row[:self.cols] for row in rows]) if self.rows else \
            Matrix.zeros(f, 0, self.cols)
        cm = None
        if carry is not None:
            cm = Matrix.from_rows(f, [row[self.cols:] for row in rows]) if self.rows else \
                Matrix.zeros(f, 0, ccols)
        return rm, piv, cm

    def rref(self) -> tuple["Matrix", tuple[int, ...]]:
        r, piv, _ = self._rref_carry(None)
        return r, tuple(piv)

    def rank(self) -> int:
        _, piv, _ = self._rref_carry(None)
        return len(piv)

    def kernel_data(self) -> tuple["Matrix", list[int]]:
        """Kernel basis plus the free column positions defining it.

        Basis column t has a 1 at its free position and 0 at the other
        free positions, so the coordinates of any kernel vector in this
        basis can be read off the free positions directly.
        """
        f = self.field
        r, piv, _ = self._rref_carry(None)
        piv = list(piv)
        pivset = set(piv)
        free = [j for j in range(self.cols) if j not in pivset]
        out = Matrix.zeros(f, self.cols, len(free))
        for k, fc in enumerate(free):
            out.a[fc, k] = f.one()
            for i, pc in enumerate(piv):
                v = r.entry(i, fc)
                if v != 0:
                    out.a[pc, k] = f.neg(v)
        return out, free

    def kernel_basis(self) -> "Matrix":
        """Column basis of the right null space, unit-at-free-column form."""
        return self.kernel_data()[0]

    def solve_columns(self, targets: "Matrix") -> tuple["Matrix", list[bool]]:
        """Particular solutions X of self @ X = targets, free vars zero.

        Returns (X, ok) where ok[j] is False when column j is unsolvable
        (the corresponding X column is then meaningless).
        """
        r, piv, c = self._rref_carry(targets)
        piv = list(piv)
        rank = len(piv)
        x = Matrix.zeros(self.field, self.cols, targets.cols)
        for i, pc in enumerate(piv):
            x.a[pc, :] = c.a[i, :]
        if rank < self.rows:
            tail = c.a[rank:, :]
            if self.field.p is not None:
                ok = [not tail[:, j].any() for j in range(targets.cols)]
            else:
                ok = [all(v == 0 for v in tail[:, j]) for j in range(targets.cols)]
        else:
            ok = [True] * targets.cols
        return x, ok

    def solve(self, target: "Matrix") -> "Matrix | None":
        x, ok = self.solve_columns(target)
        return x if all(ok) else None

    def inverse(self) -> "Matrix | None":
        if self.rows != self.cols:
            return None
        x, ok = self.solve_columns(Matrix.identity(self.field, self.rows))
        if not all(ok):
            return None
        return x


class ColumnSolver:
    """Repeated exact solves against a fixed coefficient matrix.

    Caches the row-operation matrix E with E @ A in rref, so each batch of
    targets costs one multiplication.
    """

    def __init__(self, a: Matrix):
        self.a = a
        r, piv, e = a._rref_carry(Matrix.identity(a.field, a.rows))
        self.rref = r
        self.pivots = list(piv)
        self.e = e
        self.rank = len(self.pivots)

    def solve_columns(self, targets: Matrix) -> tuple[Matrix, list[bool]]:
        f = self.a.field
        et = self.e @ targets
        x = Matrix.zeros(f, self.a.cols, targets.cols)
        for i, pc in enumerate(self.pivots):
            x.a[pc, :] = et.a[i, :]
        if self.rank < self.a.rows:
            tail = et.a[self.rank:, :]
            if f.p is not None:
                ok = [not tail[:, j].any() for j in range(targets.cols)]
            else:
                ok = [all(v == 0 for v in tail[:, j]) for j in range(targets.cols)]
        else:
            ok = [True] * targets.cols
        return x, ok

    def in_span(self, targets: Matrix) -> list[bool]:
        return self.solve_columns(targets)[1]


def nf_columns(rref: Matrix, pivots, vectors: Matrix) -> Matrix:
    """Normal form of column vectors modulo the row space held in `rref`.

    `rref` rows live in the same coordinate space as the columns of
    `vectors`; each pivot coordinate is eliminated in turn.
    """
    out = vectors.copy()
    f = rref.field
    for i, pc in enumerate(pivots):
        coef = out.a[pc, :].copy()
        if f.p is not None:
            if not coef.any():
                continue
            upd = np.outer(rref.a[i].astype(np.int64), coef.astype(np.int64))
            out.a[:] = ((out.a.astype(np.int64) - upd) % f.p).astype(out.a.dtype)
        else:
            for j in range(out.cols):
                cv = out.a[pc, j]
                if cv != 0:
                    for rr in range(out.rows):
                        out.a[rr, j] = out.a[rr, j] - cv * rref.a[i, rr]
    return out


def column_space_basis(m: Matrix) -> Matrix:
    """Deterministic basis of the column space: the original columns
    sitting at the rref pivot positions."""
    _, piv = m.rref()
    return m.take_cols(list(piv))


def random_matrix(field: Field, r: int, c: int, rng) -> Matrix:
    return Matrix.from_rows(field, [[field.random(rng) for _ in range(c)]
                                    for _ in range(r)]) if r else Matrix.zeros(field, 0, c)


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product, exact."""
    f = a.field
    if f.p is not None:
        prod = np.kron(a.a.astype(np.int64), b.a.astype(np.int64)) % f.p
        return Matrix(f, prod.astype(_storage_dtype(f.p)))
    out = Matrix.zeros(f, a.rows * b.rows, a.cols * b.cols)
    for i in range(a.rows):
        for j in range(a.cols):
            v = a.a[i, j]
            if v != 0:
                for k in range(b.rows):
                    for l in range(b.cols):
                        out.a[i * b.rows + k, j * b.cols + l] = v * b.a[k, l]
    return out

"""Block supermatrices over Grassmann elements, forms or numeric elements.

Rows and columns are ordered even-first. Entries only need ``+ - *``,
``parity()``, ``is_zero()``, ``zero_like()``, ``one_like()`` and
``inverse()``, so the same code serves exact, form-valued and numeric
matrices.
"""
from __future__ import annotations

from itertools import permutations
from typing import Callable, Sequence

from .errors import BadDimensions, DimensionMismatch, NonInvertibleBlock, NonInvertibleBody, ZeroBody


class SuperMatrix:
    __slots__ = ("row_dims", "col_dims", "rows", "parity", "proto")

    def __init__(self, row_dims, col_dims, rows: Sequence[Sequence], parity: int = 0,
                 check: bool = True, proto=None):
        self.row_dims = tuple(row_dims)
        self.col_dims = tuple(col_dims)
        self.rows = tuple(tuple(r) for r in rows)
        self.parity = parity
        nr, nc = sum(self.row_dims), sum(self.col_dims)
        if len(self.rows) != nr or any(len(r) != nc for r in self.rows):
            raise BadDimensions(f"expected {nr}x{nc} entries")
        if proto is None:
            proto = next((x for r in self.rows for x in r), None)
            if proto is None:
                raise BadDimensions("empty supermatrix needs an explicit prototype entry")
        self.proto = proto.zero_like()
        if check:
            for a, row in enumerate(self.rows):
                for b, x in enumerate(row):
                    if x.is_zero():
                        continue
                    want = (self.row_parity(a) + self.col_parity(b) + parity) & 1
                    if x.parity() != want:
                        raise BadDimensions(
                            f"entry ({a},{b}) has parity {x.parity()}, block needs {want}")

    # -- shape helpers ----------------------------------------------------
    @property
    def shape(self):
        return sum(self.row_dims), sum(self.col_dims)

    def row_parity(self, a: int) -> int:
        return 0 if a < self.row_dims[0] else 1

    def col_parity(self, b: int) -> int:
        return 0 if b < self.col_dims[0] else 1

    def is_square(self) -> bool:
        return self.row_dims == self.col_dims

    def __getitem__(self, ab):
        a, b = ab
        return self.rows[a][b]

    def blocks(self):
        r, k = self.row_dims[0], self.col_dims[0]
        A = [list(row[:k]) for row in self.rows[:r]]
        B = [list(row[k:]) for row in self.rows[:r]]
        C = [list(row[:k]) for row in self.rows[r:]]
        D = [list(row[k:]) for row in self.rows[r:]]
        return A, B, C, D

    @classmethod
    def from_blocks(cls, A, B, C, D, row_dims, col_dims, parity=0, proto=None, check=True):
        rows = [list(A[i]) + list(B[i]) for i in range(row_dims[0])]
        rows += [list(C[i]) + list(D[i]) for i in range(row_dims[1])]
        return cls(row_dims, col_dims, rows, parity, check=check, proto=proto)

    @classmethod
    def identity(cls, dims, proto) -> "SuperMatrix":
        n = sum(dims)
        zero, one = proto.zero_like(), proto.one_like()
        rows = [[one if a == b else zero for b in range(n)] for a in range(n)]
        return cls(dims, dims, rows, 0, check=False, proto=proto)

    @classmethod
    def zero(cls, row_dims, col_dims, proto, parity=0) -> "SuperMatrix":
        z = proto.zero_like()
        return cls(row_dims, col_dims, [[z] * sum(col_dims) for _ in range(sum(row_dims))],
                   parity, check=False, proto=proto)

    def map(self, f: Callable, parity: int | None = None, check: bool = False) -> "SuperMatrix":
        rows = [[f(x) for x in row] for row in self.rows]
        proto = f(self.proto)
        return SuperMatrix(self.row_dims, self.col_dims, rows,
                           self.parity if parity is None else parity, check=check, proto=proto)

    # -- arithmetic -------------------------------------------------------
    def _same_shape(self, other):
        if self.row_dims != other.row_dims or self.col_dims != other.col_dims:
            raise DimensionMismatch("supermatrix shapes differ")

    def __add__(self, other):
        self._same_shape(other)
        rows = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        return SuperMatrix(self.row_dims, self.col_dims, rows, self.parity, check=False,
                           proto=self.proto)

    def __neg__(self):
        return self.map(lambda x: -x)

    def __sub__(self, other):
        self._same_shape(other)
        rows = [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(self.rows, other.rows)]
        return SuperMatrix(self.row_dims, self.col_dims, rows, self.parity, check=False,
                           proto=self.proto)

    def __mul__(self, other):
        if isinstance(other, SuperMatrix):
            return sm_mul(self, other)
        return self.map(lambda x: x * other)

    def __rmul__(self, other):
        return self.map(lambda x: other * x)

    def __eq__(self, other):
        if not isinstance(other, SuperMatrix):
            return NotImplemented
        return (self.row_dims == other.row_dims and self.col_dims == other.col_dims
                and all(x == y for r1, r2 in zip(self.rows, other.rows) for x, y in zip(r1, r2)))

    __hash__ = None

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.rows for x in row)

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.rows)
        return f"SuperMatrix({self.row_dims}x{self.col_dims}, p={self.parity}: [{body}])"


def sm_mul(X: SuperMatrix, Y: SuperMatrix) -> SuperMatrix:
    if X.col_dims != Y.row_dims:
        raise DimensionMismatch(f"cannot multiply {X.col_dims} columns by {Y.row_dims} rows")
    n_inner = sum(X.col_dims)
    proto = X.proto if X.proto.__class__ is Y.proto.__class__ else (X.proto * Y.proto)
    rows = []
    for a in range(sum(X.row_dims)):
        xr = X.rows[a]
        row = []
        for b in range(sum(Y.col_dims)):
            acc = None
            for c in range(n_inner):
                x, y = xr[c], Y.rows[c][b]
                if x.is_zero() or y.is_zero():
                    continue
                t = x * y
                acc = t if acc is None else acc + t
            row.append(acc if acc is not None else proto.zero_like())
        rows.append(row)
    return SuperMatrix(X.row_dims, Y.col_dims, rows, (X.parity + Y.parity) & 1, check=False,
                       proto=proto)


# -- plain matrices of mutually commuting (even) entries ----------------------------

def _try_inverse(x):
    try:
        return x.inverse()
    except (NonInvertibleBody, ZeroBody):
        return None


def matrix_inverse(M: list[list], proto) -> list[list]:
    """Gauss-Jordan by left row operations; pivots need invertible bodies."""
    n = len(M)
    if n == 0:
        return []
    zero, one = proto.zero_like(), proto.one_like()
    work = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv, pinv = None, None
        for r in range(col, n):
            if work[r][col].is_zero():
                continue
            pinv = _try_inverse(work[r][col])
            if pinv is not None:
                piv = r
                break
        if piv is None:
            raise NonInvertibleBlock(f"no invertible pivot in column {col}")
        work[col], work[piv] = work[piv], work[col]
        work[col] = [pinv * x for x in work[col]]
        for r in range(n):
            if r != col and not work[r][col].is_zero():
                f = work[r][col]
                work[r] = [x - f * y for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def _perm_sign(p) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def matrix_det(M: list[list], proto):
    """Leibniz determinant; only meaningful for mutually commuting entries."""
    n = len(M)
    if n == 0:
        return proto.one_like()
    total = None
    for p in permutations(range(n)):
        term = None
        for i in range(n):
            x = M[i][p[i]]
            if x.is_zero():
                term = None
                break
            term = x if term is None else term * x
        else:
            if term is None:
                continue
            if _perm_sign(p) < 0:
                term = -term
            total = term if total is None else total + term
    return total if total is not None else proto.zero_like()


def _mat_mul(P, Q, proto):
    if not P or not Q:
        return [[proto.zero_like() for _ in range(len(Q[0]) if Q else 0)] for _ in P]
    out = []
    for row in P:
        out_row = []
        for b in range(len(Q[0])):
            acc = proto.zero_like()
            for c, x in enumerate(row):
                y = Q[c][b]
                if not x.is_zero() and not y.is_zero():
                    acc = acc + x * y
            out_row.append(acc)
        out.append(out_row)
    return out


def _mat_sub(P, Q):
    return [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(P, Q)]


def _mat_neg(P):
    return [[-x for x in r] for r in P]


def _require_even_square(X: SuperMatrix):
    if not X.is_square():
        raise DimensionMismatch("operation needs a square supermatrix")
    if X.parity != 0:
        raise DimensionMismatch("operation needs an even supermatrix")


def _block_inverse(M, proto, which):
    try:
        return matrix_inverse(M, proto)
    except NonInvertibleBody:
        raise NonInvertibleBlock(f"{which} block is not invertible") from None


def sm_inverse(X: SuperMatrix) -> SuperMatrix:
    """Schur-complement inverse of a square even supermatrix."""
    _require_even_square(X)
    proto = X.proto
    A, B, C, D = X.blocks()
    Ai = _block_inverse(A, proto, "A")
    Di = _block_inverse(D, proto, "D")
    SA = _mat_sub(A, _mat_mul(_mat_mul(B, Di, proto), C, proto)) if D else A
    SD = _mat_sub(D, _mat_mul(_mat_mul(C, Ai, proto), B, proto)) if A else D
    SAi = _block_inverse(SA, proto, "A - B D^-1 C")
    SDi = _block_inverse(SD, proto, "D - C A^-1 B")
    nB = _mat_neg(_mat_mul(_mat_mul(Ai, B, proto), SDi, proto)) if A and D else [[] for _ in A]
    nC = _mat_neg(_mat_mul(_mat_mul(Di, C, proto), SAi, proto)) if A and D else [[] for _ in D]
    return SuperMatrix.from_blocks(SAi, nB, nC, SDi, X.row_dims, X.col_dims, 0, proto=proto,
                                   check=False)


def berezinian(X: SuperMatrix):
    """Ber(X) = det(A - B D^-1 C) / det(D)."""
    _require_even_square(X)
    proto = X.proto
    A, B, C, D = X.blocks()
    Di = _block_inverse(D, proto, "D")
    S = _mat_sub(A, _mat_mul(_mat_mul(B, Di, proto), C, proto)) if D else A
    detD = matrix_det(D, proto)
    inv = _try_inverse(detD)
    if inv is None:
        raise NonInvertibleBlock("det(D) is not invertible")
    return matrix_det(S, proto) * inv


def berezinian_a(X: SuperMatrix):
    """Ber(X) = det(A) / det(D - C A^-1 B); cross-check of :func:`berezinian`."""
    _require_even_square(X)
    proto = X.proto
    A, B, C, D = X.blocks()
    Ai = _block_inverse(A, proto, "A")
    S = _mat_sub(D, _mat_mul(_mat_mul(C, Ai, proto), B, proto)) if A else D
    inv = _try_inverse(matrix_det(S, proto))
    if inv is None:
        raise NonInvertibleBlock("det(D - C A^-1 B) is not invertible")
    return matrix_det(A, proto) * inv


def supertrace(X: SuperMatrix):
    """tr A - tr D for even X; tr A + tr D for odd X, so Str(XY) = (-1)^{p(X)p(Y)} Str(YX)."""
    if not X.is_square():
        raise DimensionMismatch("supertrace needs a square supermatrix")
    k = X.row_dims[0]
    acc = X.proto.zero_like()
    for a in range(sum(X.row_dims)):
        x = X.rows[a][a]
        acc = acc + x if a < k or X.parity else acc - x
    return acc


def det(X: SuperMatrix):
    """Ordinary determinant of a purely even (k|0) matrix."""
    if not X.is_square() or X.row_dims[1] != 0:
        raise DimensionMismatch("det needs a square k|0 matrix")
    return matrix_det([list(r) for r in X.rows], X.proto)

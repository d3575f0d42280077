"""Exact integer matrix algebra: Smith and Hermite normal forms, rank,
the maximal-minor polynomial, and lattice membership.

Everything works over arbitrary-precision Python ints.  Entries grow without
bound during elimination, so none of this is allowed anywhere near fixed-width
arithmetic; numpy stays out of this module on purpose.

The Smith routine records every elementary operation it performs.  That log is
the single source of truth for mirroring matrix reduction as Nielsen
transformations of group presentations (see ``nilq.words``).  Log entries:

* ``row_add(src, dst, mult)``  --  ``row[dst] += mult * row[src]``
* ``col_add(src, dst, mult)``  --  ``col[dst] += mult * col[src]``
* ``row_swap(i, j)``, ``col_swap(i, j)``
* ``row_negate(i)``, ``col_negate(i)``

Indices are 0-based.  An add with ``|mult| > 1`` abbreviates ``|mult|``
repetitions of the unit operation; replay code may apply it in one step.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional, Sequence, Tuple


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix, entries stored row-major."""

    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        data = [list(r) for r in rows]
        n = len(data)
        m = len(data[0]) if data else 0
        for r in data:
            if len(r) != m:
                raise ValueError("ragged rows")
        flat = tuple(int(v) for r in data for v in r)
        return cls(n, m, flat)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, key: Tuple[int, int]) -> int:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(key)
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def to_rows(self) -> list:
        return [list(self.row(i)) for i in range(self.rows)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix(
            self.cols,
            self.rows,
            tuple(self.entries[i * self.cols + j] for j in range(self.cols) for i in range(self.rows)),
        )

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        a, b = self, other
        out = []
        for i in range(a.rows):
            arow = a.row(i)
            for j in range(b.cols):
                out.append(sum(arow[k] * b.entries[k * b.cols + j] for k in range(a.cols)))
        return IntMatrix(a.rows, b.cols, tuple(out))


@dataclass(frozen=True)
class ElementaryOp:
    """One elementary row/column operation.

    kind is one of row_add, col_add, row_swap, col_swap, row_negate,
    col_negate.  For adds, ``src``/``dst`` name the source and destination
    line and ``mult`` the integer multiplier; for swaps they are the two
    indices; for negations only ``src`` is used.
    """

    kind: str
    src: int
    dst: int = -1
    mult: int = 0


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ M @ V == D with U, V unimodular and D diagonal, d1 | d2 | ...

    ``rank`` is the number of nonzero diagonal entries and
    ``invariant_factors`` the nonzero diagonal, all positive.  ``ops`` is the
    ordered elementary-operation log that transforms M into D (row ops were
    also applied to U, column ops to V).
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    rank: int
    invariant_factors: Tuple[int, ...]
    ops: Tuple[ElementaryOp, ...]


def smith_normal_form(M: IntMatrix) -> SmithDecomposition:
    """Smith normal form over the integers with recorded operations.

    Pivot selection always takes a smallest-magnitude nonzero entry of the
    working submatrix, which keeps intermediate growth modest.  Signs are
    normalized with explicit negation ops so they land in U/V and the
    invariant factors come out positive.
    """
    r, m = M.rows, M.cols
    A = M.to_rows()
    U = IntMatrix.identity(r).to_rows()
    V = IntMatrix.identity(m).to_rows()
    ops: list[ElementaryOp] = []

    def row_add(src, dst, mult):
        Asrc, Adst = A[src], A[dst]
        for j in range(m):
            Adst[j] += mult * Asrc[j]
        Us, Ud = U[src], U[dst]
        for j in range(r):
            Ud[j] += mult * Us[j]
        ops.append(ElementaryOp("row_add", src, dst, mult))

    def col_add(src, dst, mult):
        for i in range(r):
            A[i][dst] += mult * A[i][src]
        for i in range(m):
            V[i][dst] += mult * V[i][src]
        ops.append(ElementaryOp("col_add", src, dst, mult))

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        ops.append(ElementaryOp("row_swap", i, j))

    def col_swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        ops.append(ElementaryOp("col_swap", i, j))

    def row_negate(i):
        A[i] = [-v for v in A[i]]
        U[i] = [-v for v in U[i]]
        ops.append(ElementaryOp("row_negate", i))

    def col_negate(j):
        for row in A:
            row[j] = -row[j]
        for row in V:
            row[j] = -row[j]
        ops.append(ElementaryOp("col_negate", j))

    limit = min(r, m)
    t = 0
    while t < limit:
        best = None
        for i in range(t, r):
            Ai = A[i]
            for j in range(t, m):
                v = Ai[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        if A[t][t] < 0:
            row_negate(t)
        p = A[t][t]
        dirty = False
        for i in range(t + 1, r):
            q = A[i][t] // p
            if q:
                row_add(t, i, -q)
            if A[i][t]:
                dirty = True
        for j in range(t + 1, m):
            q = A[t][j] // p
            if q:
                col_add(t, j, -q)
            if A[t][j]:
                dirty = True
        if dirty:
            # some remainder strictly smaller than the pivot survives;
            # re-pivot on it
            continue
        p = A[t][t]
        stuck = None
        for i in range(t + 1, r):
            Ai = A[i]
            for j in range(t + 1, m):
                if Ai[j] % p:
                    stuck = i
                    break
            if stuck is not None:
                break
        if stuck is not None:
            # drag a row with a non-multiple into the pivot row and re-reduce;
            # the next pivot becomes gcd(p, offender) < p
            row_add(stuck, t, 1)
            continue
        t += 1

    rank = t
    inv = tuple(A[i][i] for i in range(rank))
    # the divisibility sweep above guarantees the chain; fail loudly if not
    for a, b in zip(inv, inv[1:]):
        if b % a:
            raise AssertionError("invariant factor chain violated")
    return SmithDecomposition(
        U=IntMatrix.from_rows(U) if r else IntMatrix(0, 0, ()),
        D=IntMatrix.from_rows(A) if r else IntMatrix(0, m, ()),
        V=IntMatrix.from_rows(V) if m else IntMatrix(m, m, ()),
        rank=rank,
        invariant_factors=inv,
        ops=tuple(ops),
    )


def apply_op(M: IntMatrix, op: ElementaryOp) -> IntMatrix:
    """Apply one logged elementary operation to a fresh copy of M."""
    A = M.to_rows()
    k = op.kind
    if k == "row_add":
        for j in range(M.cols):
            A[op.dst][j] += op.mult * A[op.src][j]
    elif k == "col_add":
        for row in A:
            row[op.dst] += op.mult * row[op.src]
    elif k == "row_swap":
        A[op.src], A[op.dst] = A[op.dst], A[op.src]
    elif k == "col_swap":
        for row in A:
            row[op.src], row[op.dst] = row[op.dst], row[op.src]
    elif k == "row_negate":
        A[op.src] = [-v for v in A[op.src]]
    elif k == "col_negate":
        for row in A:
            row[op.src] = -row[op.src]
    else:
        raise ValueError(f"unknown op kind {k!r}")
    return IntMatrix.from_rows(A) if A else M


def rank(M: IntMatrix) -> int:
    """Rank over the rationals by fraction-free (Bareiss) elimination.

    Deliberately independent of smith_normal_form so the two can check each
    other.
    """
    A = M.to_rows()
    r, m = M.rows, M.cols
    prev = 1
    t = 0
    while True:
        piv = None
        for i in range(t, r):
            for j in range(t, m):
                if A[i][j]:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            return t
        pi, pj = piv
        if pi != t:
            A[t], A[pi] = A[pi], A[t]
        if pj != t:
            for row in A:
                row[t], row[pj] = row[pj], row[t]
        p = A[t][t]
        for i in range(t + 1, r):
            Ai, At = A[i], A[t]
            f = Ai[t]
            for j in range(t, m):
                Ai[j] = (Ai[j] * p - f * At[j]) // prev
        prev = p
        t += 1
        if t == r or t == m:
            return t


def determinant(M: IntMatrix) -> int:
    """Exact determinant by Bareiss elimination with row pivoting."""
    if M.rows != M.cols:
        raise ValueError("determinant needs a square matrix")
    n = M.rows
    if n == 0:
        return 1
    A = M.to_rows()
    sign = 1
    prev = 1
    for t in range(n - 1):
        if A[t][t] == 0:
            for i in range(t + 1, n):
                if A[i][t]:
                    A[t], A[i] = A[i], A[t]
                    sign = -sign
                    break
            else:
                return 0
        p = A[t][t]
        for i in range(t + 1, n):
            Ai, At = A[i], A[t]
            f = Ai[t]
            for j in range(t, n):
                Ai[j] = (Ai[j] * p - f * At[j]) // prev
        prev = p
    return sign * A[n - 1][n - 1]


def minor_polynomial(M: IntMatrix) -> int:
    """Sum of squared maximal minors.

    Zero iff the matrix has less than full rank min(rows, cols).  For an
    empty matrix the single empty minor has determinant 1, so the value is 1.
    """
    r, m = M.rows, M.cols
    k = min(r, m)
    if k == 0:
        return 1
    rows_list = M.to_rows()
    total = 0
    if r <= m:
        for cols in combinations(range(m), k):
            sub = IntMatrix.from_rows([[rows_list[i][j] for j in cols] for i in range(r)])
            d = determinant(sub)
            total += d * d
    else:
        for rws in combinations(range(r), k):
            sub = IntMatrix.from_rows([[rows_list[i][j] for j in range(m)] for i in rws])
            d = determinant(sub)
            total += d * d
    return total


def hermite_normal_form(M: IntMatrix) -> Tuple[IntMatrix, IntMatrix, Tuple[int, ...]]:
    """Row-style Hermite normal form.

    Returns (H, W, pivot_cols) with W unimodular, W @ M == H, pivots positive,
    entries above each pivot reduced into [0, pivot), and zero rows last.
    """
    r, m = M.rows, M.cols
    A = M.to_rows()
    W = IntMatrix.identity(r).to_rows()

    def row_add(src, dst, mult):
        As, Ad = A[src], A[dst]
        for j in range(m):
            Ad[j] += mult * As[j]
        Ws, Wd = W[src], W[dst]
        for j in range(r):
            Wd[j] += mult * Ws[j]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        W[i], W[j] = W[j], W[i]

    def row_negate(i):
        A[i] = [-v for v in A[i]]
        W[i] = [-v for v in W[i]]

    pivots: list[int] = []
    prow = 0
    for col in range(m):
        if prow == r:
            break
        while True:
            nz = [i for i in range(prow, r) if A[i][col]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda i: abs(A[i][col]))
            for i in nz:
                if i != piv:
                    q = A[i][col] // A[piv][col]
                    if q:
                        row_add(piv, i, -q)
        nz = [i for i in range(prow, r) if A[i][col]]
        if not nz:
            continue
        if nz[0] != prow:
            row_swap(prow, nz[0])
        if A[prow][col] < 0:
            row_negate(prow)
        p = A[prow][col]
        for i in range(prow):
            q = A[i][col] // p
            if q:
                row_add(prow, i, -q)
        pivots.append(col)
        prow += 1
    H = IntMatrix.from_rows(A) if r else IntMatrix(0, m, ())
    Wm = IntMatrix.from_rows(W) if r else IntMatrix(0, 0, ())
    return H, Wm, tuple(pivots)


def lattice_membership(
    basis: Sequence[Sequence[int]], target: Sequence[int]
) -> Optional[list]:
    """Integer coefficients expressing target in the Z-span of basis, or None.

    Decided via the Hermite normal form of the basis matrix; coefficients are
    pulled back through the recorded unimodular transform, so the returned x
    satisfies sum_i x[i] * basis[i] == target exactly.
    """
    basis = [list(v) for v in basis]
    target = list(target)
    dim = len(target)
    for v in basis:
        if len(v) != dim:
            raise ValueError("basis vector dimension mismatch")
    if not basis:
        return [] if all(v == 0 for v in target) else None
    B = IntMatrix.from_rows(basis)
    H, W, pivots = hermite_normal_form(B)
    n = len(basis)
    resid = list(target)
    y = [0] * n
    for k, col in enumerate(pivots):
        p = H[k, col]
        q, rem = divmod(resid[col], p)
        if rem:
            return None
        if q:
            y[k] = q
            hrow = H.row(k)
            for j in range(dim):
                resid[j] -= q * hrow[j]
    if any(resid):
        return None
    return [sum(y[k] * W[k, j] for k in range(n)) for j in range(n)]


def rational_membership(basis: Sequence[Sequence[int]], target: Sequence[int]) -> bool:
    """True iff target lies in the Q-span of basis.

    Equivalently, some nonzero integer multiple of target lies in the Z-span.
    Decided by a rank comparison (Bareiss), independent of the HNF path.
    """
    basis = [list(v) for v in basis]
    target = list(target)
    for v in basis:
        if len(v) != len(target):
            raise ValueError("basis vector dimension mismatch")
    if not basis:
        return all(v == 0 for v in target)
    B = IntMatrix.from_rows(basis)
    E = IntMatrix.from_rows(basis + [target])
    return rank(E) == rank(B)

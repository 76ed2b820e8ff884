"""Exact linear algebra over the rationals.

Dense routines take rows as tuples of Fractions and are meant for small
matrices (dimensions in the tens).  The sparse rank routine handles the
larger cochain and resolution matrices, whose entries are mostly 0 and +-1.
No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Vec = tuple[Fraction, ...]
Mat = list[Vec]

ZERO = Fraction(0)
ONE = Fraction(1)


def frac_vec(seq) -> Vec:
    out = []
    for x in seq:
        if isinstance(x, float):
            raise TypeError("floating point input rejected; use exact rationals")
        out.append(Fraction(x))
    return tuple(out)


def dot(a, b) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), ZERO)


def vadd(a, b) -> Vec:
    return tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b))


def vsub(a, b) -> Vec:
    return tuple(Fraction(x) - Fraction(y) for x, y in zip(a, b))


def vscale(c, a) -> Vec:
    c = Fraction(c)
    return tuple(c * Fraction(x) for x in a)


def is_zero_vec(a) -> bool:
    return all(Fraction(x) == 0 for x in a)


def content(ints) -> int:
    g = 0
    for x in ints:
        g = gcd(g, abs(int(x)))
    return g


def primitive_int_vector(vec) -> tuple[int, ...]:
    """Scale a rational vector by a positive rational to a primitive integer
    vector.  The direction is preserved; the zero vector maps to itself."""
    fracs = [Fraction(x) for x in vec]
    if all(f == 0 for f in fracs):
        return tuple(0 for _ in fracs)
    denom_lcm = 1
    for f in fracs:
        denom_lcm = denom_lcm * f.denominator // gcd(denom_lcm, f.denominator)
    ints = [int(f * denom_lcm) for f in fracs]
    g = content(ints)
    return tuple(x // g for x in ints)


def rref(rows: list, ncols: int | None = None):
    """Reduced row echelon form.  Returns (rows, pivot_columns)."""
    mat = [list(frac_vec(r)) for r in rows]
    if ncols is None:
        ncols = len(mat[0]) if mat else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(mat)):
            if mat[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return [tuple(row) for row in mat], pivots


def rank_dense(rows, ncols: int | None = None) -> int:
    _, pivots = rref(rows, ncols)
    return len(pivots)


def kernel_basis(rows, ncols: int) -> list[Vec]:
    """Basis of {x : A x = 0}, echelon-derived, deterministic."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][fc]
        basis.append(tuple(v))
    return basis


def solve_dense(rows, rhs) -> Vec | None:
    """One solution of A x = b over Q, or None."""
    if not rows:
        return tuple()
    ncols = len(rows[0])
    aug = [tuple(frac_vec(r)) + (Fraction(b),) for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [ZERO] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = red[i][ncols]
    return tuple(x)


def det(rows) -> Fraction:
    mat = [list(frac_vec(r)) for r in rows]
    n = len(mat)
    sign = 1
    result = ONE
    for c in range(n):
        pivot_row = None
        for i in range(c, n):
            if mat[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return ZERO
        if pivot_row != c:
            mat[c], mat[pivot_row] = mat[pivot_row], mat[c]
            sign = -sign
        pv = mat[c][c]
        result *= pv
        for i in range(c + 1, n):
            if mat[i][c] != 0:
                f = mat[i][c] / pv
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[c])]
    return result * sign


def smith_normal_form(rows: list) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form of an integer matrix: returns (U, D, V) with
    D = U A V, U and V unimodular, D diagonal."""
    A = [[int(x) for x in r] for r in rows]
    m = len(A)
    n = len(A[0]) if m else 0
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, c):
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + c * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for r in A:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    t = 0
    while t < min(m, n):
        # find a nonzero pivot in the remaining block
        pivot = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] != 0:
                    if pivot is None or abs(A[i][j]) < abs(A[pivot[0]][pivot[1]]):
                        pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        done = False
        while not done:
            done = True
            for i in range(t + 1, m):
                if A[i][t] != 0:
                    q = A[i][t] // A[t][t]
                    add_row(t, i, -q)
                    if A[i][t] != 0:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j] != 0:
                    q = A[t][j] // A[t][t]
                    add_col(t, j, -q)
                    if A[t][j] != 0:
                        swap_cols(t, j)
                        done = False
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, A, V


def integer_solve(rows: list, rhs) -> tuple[int, ...] | None:
    """One integer solution of A x = b (A integer, b rational), or None."""
    b = [Fraction(x) for x in rhs]
    if any(f.denominator != 1 for f in b):
        return None
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0:
        return tuple(0 for _ in range(n))
    U, D, V = smith_normal_form(rows)
    ub = [sum(U[i][k] * int(b[k]) for k in range(m)) for i in range(m)]
    y = [0] * n
    for i in range(min(m, n)):
        d = D[i][i]
        if d == 0:
            if ub[i] != 0:
                return None
        else:
            if ub[i] % d != 0:
                return None
            y[i] = ub[i] // d
    for i in range(n, m):
        pass
    for i in range(min(m, n), m):
        if ub[i] != 0:
            return None
    x = [sum(V[i][k] * y[k] for k in range(n)) for i in range(n)]
    return tuple(x)


def sparse_rank(rows: list[dict[int, Fraction]]) -> int:
    """Rank of a sparse rational matrix given as row dicts {col: value}.

    Gaussian elimination with a column index and a pivot heuristic
    favouring unit entries in short rows; exact Fractions throughout."""
    work: dict[int, dict[int, Fraction]] = {i: dict(r) for i, r in enumerate(rows) if r}
    col_index: dict[int, set[int]] = {}
    for i, row in work.items():
        for c in row:
            col_index.setdefault(c, set()).add(i)
    rank = 0
    while work:
        pidx = min(
            work,
            key=lambda i: (
                len(work[i]),
                0 if any(abs(v) == 1 for v in work[i].values()) else 1,
                i,
            ),
        )
        prow = work.pop(pidx)
        # prefer a unit entry in a sparsely populated column
        pcol, pval = None, None
        best_key = None
        for c, v in prow.items():
            key = (0 if abs(v) == 1 else 1, len(col_index.get(c, ())), c)
            if best_key is None or key < best_key:
                best_key, pcol, pval = key, c, v
        for c in prow:
            col_index[c].discard(pidx)
        rank += 1
        targets = [i for i in col_index.get(pcol, ()) if i in work]
        for i in targets:
            row = work[i]
            v = row.get(pcol)
            if v is None:
                continue
            f = v / pval
            for c, pv in prow.items():
                nv = row.get(c, ZERO) - f * pv
                if nv == 0:
                    if c in row:
                        del row[c]
                        col_index[c].discard(i)
                else:
                    if c not in row:
                        col_index.setdefault(c, set()).add(i)
                    row[c] = nv
            if not row:
                del work[i]
    return rank

"""Exact integer matrices: Smith normal form, lattice kernels and quotients.

Matrices are lists of rows of Python ints.  Nothing here depends on numpy so
that entries never overflow.
"""

from fractions import Fraction


def zeros(m, n):
    return [[0] * n for _ in range(m)]


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    if not A or not B:
        return zeros(len(A), len(B[0]) if B else 0)
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def transpose(A, ncols=None):
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*A)]


def shape(A, ncols=None):
    return len(A), (len(A[0]) if A else (ncols or 0))


def is_zero(A):
    return all(x == 0 for row in A for x in row)


def snf(A, ncols=None):
    """Smith normal form.

    Returns ``(U, D, V)`` with U*A*V = D, U and V unimodular, D diagonal with
    d_1 | d_2 | ... (nonnegative).  ``ncols`` is needed for 0-row matrices.
    """
    m, n = shape(A, ncols)
    D = [list(r) for r in A]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, k):  # row_dst += k * row_src
        if k:
            D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
            U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(src, dst, k):
        if k:
            for r in D:
                r[dst] += k * r[src]
            for r in V:
                r[dst] += k * r[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero absolute value in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            p = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // p
                    add_row(t, i, -q)
                    if D[i][t]:
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // p
                    add_col(t, j, -q)
                    if D[t][j]:
                        done = False
            if not done:
                best = min(((i, t) for i in range(t, m) if D[i][t]), key=lambda ij: abs(D[ij[0]][ij[1]]))
                best2 = min(((t, j) for j in range(t, n) if D[t][j]), key=lambda ij: abs(D[ij[0]][ij[1]]))
                if abs(D[best2[0]][best2[1]]) < abs(D[best[0]][best[1]]):
                    swap_cols(t, best2[1])
                else:
                    swap_rows(t, best[0])
                continue
            # divisibility: pivot must divide the rest of the block
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


def diagonal(D):
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def invariant_factors(A, ncols=None):
    """Nonzero diagonal of the Smith form (includes 1's)."""
    _, D, _ = snf(A, ncols)
    return [d for d in diagonal(D) if d]


def rank(A, ncols=None):
    return len(invariant_factors(A, ncols))


def rational_rank(A):
    """Rank over Q by fraction-exact elimination (independent of snf)."""
    M = [[Fraction(x) for x in r] for r in A]
    if not M:
        return 0
    rows, cols = len(M), len(M[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def kernel(A, ncols):
    """Integer basis (as columns of an ncols x k matrix) of {x : A x = 0}."""
    m = len(A)
    if m == 0:
        return identity(ncols)
    U, D, V = snf(A, ncols)
    r = len([d for d in diagonal(D) if d])
    return [row[r:] for row in V]


def columns(M):
    return [list(c) for c in zip(*M)] if M and M[0] else []


def from_columns(cols, nrows):
    if not cols:
        return [[] for _ in range(nrows)]
    return [list(r) for r in zip(*cols)]


def hstack(*Ms, nrows):
    out = [[] for _ in range(nrows)]
    for M in Ms:
        for i in range(nrows):
            out[i].extend(M[i] if M else [])
    return out


def column_basis(M, nrows):
    """Basis (columns) of the lattice spanned by the columns of M."""
    cols = [c for c in columns(M) if any(c)]
    if not cols:
        return from_columns([], nrows)
    A = from_columns(cols, nrows)
    U, D, V = snf(A)
    # columns of A*V = U^{-1} D; the nonzero ones span the lattice
    AV = matmul(A, V)
    r = len([d for d in diagonal(D) if d])
    return [row[:r] for row in AV]


def solve_rational(B, x):
    """Solve B y = x over Q for B of full column rank; None if inconsistent."""
    rows = len(B)
    k = len(B[0]) if B else 0
    M = [[Fraction(v) for v in B[i]] + [Fraction(x[i])] for i in range(rows)]
    piv_cols = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = 1 / M[r][c]
        M[r] = [a * inv for a in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
    if any(M[i][k] for i in range(r, rows)):
        return None
    y = [Fraction(0)] * k
    for i, c in enumerate(piv_cols):
        y[c] = M[i][k]
    return y


def quotient(Z, Bgens, nrows):
    """Structure of the lattice quotient span(Z) / span(Bgens), Bgens inside span(Z).

    Z: basis columns (nrows x r).  Returns ``(free_rank, torsion_factors)``
    with torsion factors > 1.
    """
    r = len(Z[0]) if Z and Z[0] else 0
    if r == 0:
        return 0, []
    coords = []
    for c in columns(Bgens):
        y = solve_rational(Z, c)
        if y is None or any(v.denominator != 1 for v in y):
            raise ValueError("generator not in the lattice")
        coords.append([int(v) for v in y])
    if not coords:
        return r, []
    C = from_columns(coords, r)
    facs = invariant_factors(C)
    free = r - len(facs)
    return free, sorted(d for d in facs if d > 1)

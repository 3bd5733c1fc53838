"""Independent homology computation for truncated complexes, using sympy only."""

import sympy
from sympy.matrices.normalforms import smith_normal_decomp


def sym_matrix(A, nrows, ncols):
    return sympy.Matrix(nrows, ncols, lambda i, j: A[i][j]) if nrows and ncols else sympy.zeros(nrows, ncols)


def _integer_kernel(M):
    """Integer kernel basis of a sympy matrix, from the Smith decomposition."""
    if M.cols == 0:
        return sympy.zeros(0, 0)
    if M.rows == 0:
        return sympy.eye(M.cols)
    D, U, V = smith_normal_decomp(M, domain=sympy.ZZ)
    r = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    return V[:, r:]


def _lattice_basis(P):
    """Basis (as columns) of the lattice spanned by the columns of P."""
    if P.cols == 0:
        return P
    D, U, V = smith_normal_decomp(P, domain=sympy.ZZ)
    r = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    Uinv = U.inv()
    return sympy.Matrix.hstack(*[Uinv[:, i] * D[i, i] for i in range(r)]) if r else sympy.zeros(P.rows, 0)


def _term_relations(t):
    g = len(t.generators)
    if not t.point.is_generic:
        return [[m if i == j else 0 for i in range(g)] for j, m in enumerate(t.moduli) if m]
    k = len(t.moduli)
    if not k:
        return [[int(i == j) for i in range(g)] for j in range(g)]
    M = sympy.Matrix(k, g + k, lambda i, j: t.coords[j][i] if j < g else (t.moduli[i] if j - g == i else 0))
    K = _integer_kernel(M)
    return [list(K[:g, j]) for j in range(K.cols) if any(K[:g, j])]


def _relations(c, p):
    out, offset, g = [], 0, c.size(p)
    for t in c.terms.get(p, []):
        for col in _term_relations(t):
            full = [0] * g
            full[offset:offset + len(col)] = col
            out.append(full)
        offset += len(t.generators)
    return out


def oracle_homology(c, p):
    """(free rank, torsion) at delta p, computed with sympy only."""
    g = c.size(p)
    if g == 0:
        return 0, []
    R_here = _relations(c, p)
    D = c.differentials.get(p)
    h = c.size(p - 1)
    if D and h:
        R_next = _relations(c, p - 1)
        M = sym_matrix(D, h, g)
        if R_next:
            M = sympy.Matrix.hstack(M, *[sympy.Matrix(col) for col in R_next])
        K = _integer_kernel(M)
        Z = _lattice_basis(K[:g, :])
    else:
        Z = sympy.eye(g)
    bounds = list(R_here)
    D_in = c.differentials.get(p + 1)
    if D_in:
        bounds += [list(col) for col in sym_matrix(D_in, g, c.size(p + 1)).T.tolist()]
    r = Z.cols
    if r == 0:
        return 0, []
    if not bounds:
        return r, []
    B = sympy.Matrix.hstack(*[sympy.Matrix(b) for b in bounds])
    Y = (Z.T * Z).inv() * Z.T * B
    assert all(x.is_integer for x in Y)
    D_Y = smith_normal_decomp(Y, domain=sympy.ZZ)[0]
    diag = [abs(int(D_Y[i, i])) for i in range(min(D_Y.shape))]
    nonzero = [d for d in diag if d]
    return r - len(nonzero), [d for d in nonzero if d != 1]

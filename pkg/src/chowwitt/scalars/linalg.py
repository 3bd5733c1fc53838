"""Dense linear algebra over an arbitrary field (raw payloads)."""


def det(F, M):
    M = [list(r) for r in M]
    n = len(M)
    d = F.one_raw
    for c in range(n):
        piv = next((r for r in range(c, n) if not F.is_zero(M[r][c])), None)
        if piv is None:
            return F.zero_raw
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            d = F.neg(d)
        d = F.mul(d, M[c][c])
        inv = F.inv(M[c][c])
        for r in range(c + 1, n):
            f = F.mul(M[r][c], inv)
            if F.is_zero(f):
                continue
            for k in range(c, n):
                M[r][k] = F.sub(M[r][k], F.mul(f, M[c][k]))
    return d


def rank(F, M):
    M = [list(r) for r in M]
    if not M:
        return 0
    rows, cols = len(M), len(M[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if not F.is_zero(M[i][c])), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        for i in range(rows):
            if i != r and not F.is_zero(M[i][c]):
                f = F.mul(M[i][c], inv)
                for k in range(c, cols):
                    M[i][k] = F.sub(M[i][k], F.mul(f, M[r][k]))
        r += 1
        if r == rows:
            break
    return r

"""Dense exact linear algebra over any of the fields in :mod:`eql.fields`.

Matrices are lists of rows.  Every routine that may need to manufacture
a scalar takes the field explicitly, since empty matrices carry no
elements to infer it from.
"""


def zeros(rows, cols, field):
    z = field.zero
    return [[z] * cols for _ in range(rows)]


def identity(n, field):
    m = zeros(n, n, field)
    for k in range(n):
        m[k][k] = field.one
    return m


def shape(a, cols=None):
    if not a:
        return (0, cols or 0)
    return (len(a), len(a[0]))


def copy(a):
    return [list(r) for r in a]


def transpose(a, rows_if_empty=0):
    if not a:
        return [[] for _ in range(rows_if_empty)]
    return [list(c) for c in zip(*a)]


def matmul(a, b, field, inner=None):
    """Product ``a @ b``.  ``inner`` is the shared dimension, needed only
    when one side is empty."""
    n = len(a)
    m = len(b[0]) if b else 0
    if b:
        k = len(b)
    else:
        k = inner if inner is not None else (len(a[0]) if a else 0)
    if a and len(a[0]) != k:
        raise ValueError(f"shape mismatch {len(a)}x{len(a[0])} @ {k}x{m}")
    z = field.zero
    out = []
    for i in range(n):
        ai = a[i]
        row = [z] * m
        for t in range(k):
            x = ai[t]
            if x == 0:
                continue
            bt = b[t]
            for j in range(m):
                y = bt[j]
                if y != 0:
                    row[j] = row[j] + x * y
        out.append(row)
    return out


def matvec(a, v, field):
    z = field.zero
    out = []
    for row in a:
        s = z
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                s = s + x * y
        out.append(s)
    return out


def add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(c, a):
    return [[c * x for x in r] for r in a]


def is_zero(a):
    return all(x == 0 for r in a for x in r)


def block_diag(blocks, field):
    rows = sum(len(b) for b in blocks)
    cols = sum((len(b[0]) if b else 0) for b in blocks)
    out = zeros(rows, cols, field)
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[r0 + i][c0 + j] = x
        r0 += len(b)
        c0 += len(b[0]) if b else 0
    return out


def rref(a, field, ncols=None):
    """Reduced row echelon form.  Returns ``(rows, pivot_columns)`` with
    zero rows dropped."""
    m = [list(r) for r in a]
    ncols = len(m[0]) if m else (ncols or 0)
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.one / m[r][c]
        rowr = [x * inv if x != 0 else x for x in m[r]]
        m[r] = rowr
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f != 0:
                    mi = m[i]
                    for j in range(c, ncols):
                        y = rowr[j]
                        if y != 0:
                            mi[j] = mi[j] - f * y
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m[:r], pivots


def rank(a, field):
    return len(rref(a, field)[1])


def nullspace(a, field, ncols=None):
    """Basis of ``{x : a x = 0}`` as a list of vectors."""
    ncols = len(a[0]) if a else (ncols or 0)
    rows, pivots = rref(a, field, ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = [field.zero] * ncols
        v[f] = field.one
        for row, pc in zip(rows, pivots):
            if row[f] != 0:
                v[pc] = -row[f]
        basis.append(v)
    return basis


def solve(a, b, field, ncols=None):
    """One solution of ``a x = b`` or ``None`` if inconsistent."""
    ncols = len(a[0]) if a else (ncols or 0)
    aug = [list(r) + [y] for r, y in zip(a, b)]
    rows, pivots = rref(aug, field, ncols + 1)
    if ncols in pivots:
        return None
    x = [field.zero] * ncols
    for row, pc in zip(rows, pivots):
        x[pc] = row[ncols]
    return x


def solve_many(a, bs, field, ncols=None):
    """Solve ``a x = b`` for each right-hand side; ``None`` where
    inconsistent.  Shares a single elimination."""
    ncols = len(a[0]) if a else (ncols or 0)
    k = len(bs)
    aug = [list(r) + [b[i] for b in bs] for i, r in enumerate(a)]
    rows, pivots = rref(aug, field, ncols + k)
    out = []
    for j in range(k):
        col = ncols + j
        if col in pivots:
            out.append(None)
            continue
        x = [field.zero] * ncols
        for row, pc in zip(rows, pivots):
            if pc < ncols:
                x[pc] = row[col]
        out.append(x)
    return out


def inverse(a, field):
    n = len(a)
    aug = [list(r) + e for r, e in zip(a, identity(n, field))]
    rows, pivots = rref(aug, field, 2 * n)
    if pivots[:n] != list(range(n)) or len(rows) < n:
        raise ZeroDivisionError("matrix is singular")
    return [r[n:] for r in rows]


def is_invertible(a, field):
    return len(a) == (len(a[0]) if a else 0) and rank(a, field) == len(a)


def row_space(vectors, field, ncols=None):
    """RREF basis of the span of ``vectors``."""
    return rref(vectors, field, ncols)[0]


def in_span(basis_rref, pivots, v):
    """Membership test against a basis already in RREF."""
    w = list(v)
    for row, pc in zip(basis_rref, pivots):
        f = w[pc]
        if f != 0:
            w = [x - f * y for x, y in zip(w, row)]
    return all(x == 0 for x in w)


def reduce_against(basis_rref, pivots, v):
    w = list(v)
    for row, pc in zip(basis_rref, pivots):
        f = w[pc]
        if f != 0:
            w = [x - f * y for x, y in zip(w, row)]
    return w


def extend_to_basis(vectors, n, field):
    """Return standard basis indices completing ``vectors`` to a basis."""
    rows, pivots = rref(vectors, field, n)
    extra = []
    cur_rows, cur_piv = rows, pivots
    for k in range(n):
        e = [field.zero] * n
        e[k] = field.one
        if not in_span(cur_rows, cur_piv, e):
            extra.append(k)
            cur_rows, cur_piv = rref(cur_rows + [e], field, n)
    return extra


def coordinates(basis_cols, v, field):
    """Coordinates of ``v`` in the basis given as a list of vectors."""
    n = len(v)
    a = [[b[i] for b in basis_cols] for i in range(n)]
    return solve(a, v, field, ncols=len(basis_cols))

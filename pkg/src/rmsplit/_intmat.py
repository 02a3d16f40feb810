"""Exact integer linear algebra on small dense matrices (lists of lists of int).

Only what the rest of the package needs: a column echelon form with its
unimodular transform, integer solutions of A v = t, integer kernels and
bases of the Z-span of a set of vectors.
"""
from fractions import Fraction


def _xgcd(a, b):
    # returns (g, s, t) with s*a + t*b = g >= 0
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def column_echelon(A):
    """Return (H, U, pivots) with A @ U == H, U unimodular.

    H is in column echelon form: the pivot of column k sits in row
    pivots[k], pivot rows strictly increase and columns past len(pivots)
    are zero.
    """
    rows = len(A)
    cols = len(A[0]) if rows else 0
    H = [list(map(int, r)) for r in A]
    U = [[int(i == j) for j in range(cols)] for i in range(cols)]

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a col_j + b col_k, c col_j + d col_k)
        for M in (H, U):
            for r in M:
                x, y = r[j], r[k]
                r[j], r[k] = a * x + b * y, c * x + d * y

    pivots = []
    col = 0
    for i in range(rows):
        if col >= cols:
            break
        for k in range(col + 1, cols):
            if H[i][k] == 0:
                continue
            x, y = H[i][col], H[i][k]
            g, s, t = _xgcd(x, y)
            # det [[s, -y/g], [t, x/g]] = 1
            colop(col, k, s, t, -y // g, x // g)
        if H[i][col] == 0:
            continue
        if H[i][col] < 0:
            for M in (H, U):
                for r in M:
                    r[col] = -r[col]
        # reduce earlier pivot columns against this one
        for k in range(col):
            q = H[i][k] // H[i][col]
            if q:
                for M in (H, U):
                    for r in M:
                        r[k] -= q * r[col]
        pivots.append(i)
        col += 1
    return H, U, pivots


def solve_integer(A, t):
    """An integer vector v with A v = t, or None when no integer solution exists."""
    H, U, pivots = column_echelon(A)
    cols = len(U)
    w = [0] * cols
    t = [int(x) for x in t]
    residual = list(t)
    for k, i in enumerate(pivots):
        # earlier columns already accounted for; pivot row i determines w[k]
        if residual[i] % H[i][k]:
            return None
        w[k] = residual[i] // H[i][k]
        for r in range(len(A)):
            residual[r] -= H[r][k] * w[k]
    if any(residual):
        return None
    return [sum(U[r][k] * w[k] for k in range(cols)) for r in range(cols)]


def integer_kernel(A):
    """A Z-basis (list of vectors) of {v in Z^n : A v = 0}."""
    H, U, pivots = column_echelon(A)
    n = len(U)
    return [[U[r][k] for r in range(n)] for k in range(len(pivots), n)]


def span_basis(vectors):
    """A Z-basis (as rows) of the lattice spanned by the given integer vectors."""
    vectors = [list(map(int, v)) for v in vectors]
    if not vectors:
        return []
    dim = len(vectors[0])
    At = [[v[i] for v in vectors] for i in range(dim)]
    H, _, pivots = column_echelon(At)
    return [[H[i][k] for i in range(dim)] for k in range(len(pivots))]


def det(M):
    """Exact determinant of a square matrix of ints or Fractions."""
    n = len(M)
    A = [[Fraction(x) for x in r] for r in M]
    result = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            A[k], A[piv] = A[piv], A[k]
            result = -result
        result *= A[k][k]
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            if f:
                for j in range(k, n):
                    A[i][j] -= f * A[k][j]
    return int(result) if result.denominator == 1 else result


def inverse(M):
    """Exact inverse of a square matrix of ints or Fractions (Gauss-Jordan)."""
    n = len(M)
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[k], A[piv] = A[piv], A[k]
        p = A[k][k]
        A[k] = [x / p for x in A[k]]
        for i in range(n):
            if i != k and A[i][k]:
                f = A[i][k]
                A[i] = [x - f * y for x, y in zip(A[i], A[k])]
    return [r[n:] for r in A]

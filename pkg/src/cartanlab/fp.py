"""Dense linear algebra over F_p.

Row reduction, ranks, kernels and inverses go through FLINT's nmod_mat;
products use float64 BLAS, which is exact as long as every partial sum
stays below 2**53 (inner dimension times (p-1)**2).
"""

import numpy as np
import scipy.sparse as sp
import flint

_EXACT = 2 ** 52


def is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def inv_mod(a, p):
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod %d" % p)
    return pow(int(a), -1, p)


def as_array(M):
    if sp.issparse(M):
        M = M.toarray()
    return np.asarray(M, dtype=np.int64)


def to_flint(M, p):
    M = as_array(M) % p
    r, c = M.shape
    return flint.nmod_mat(r, c, M.ravel().tolist(), p)


def from_flint(F):
    r, c = F.nrows(), F.ncols()
    if r == 0 or c == 0:
        return np.zeros((r, c), dtype=np.int64)
    return np.fromiter(map(int, F.entries()), dtype=np.int64, count=r * c).reshape(r, c)


def matmul(A, B, p):
    """A @ B mod p for dense or sparse integer operands."""
    if sp.issparse(A) or sp.issparse(B):
        C = A @ B
        if sp.issparse(C):
            C = C.toarray()
        return np.asarray(C, dtype=np.int64) % p
    A = np.asarray(A)
    B = np.asarray(B)
    inner = A.shape[-1]
    if inner == 0:
        return np.zeros(A.shape[:-1] + B.shape[-1:], dtype=np.int64)
    step = max(1, _EXACT // ((p - 1) ** 2 or 1))
    if inner <= step:
        C = np.asarray(A, dtype=np.float64) @ np.asarray(B, dtype=np.float64)
        return np.rint(C).astype(np.int64) % p
    C = 0
    for s in range(0, inner, step):
        C = (C + matmul(A[..., s:s + step], B[s:s + step], p)) % p
    return C


def rref(M, p):
    """Reduced row echelon form; returns (rows, pivots) with zero rows dropped."""
    M = as_array(M) % p
    r, c = M.shape
    if r == 0 or c == 0 or not M.any():
        return np.zeros((0, c), dtype=np.int64), np.zeros(0, dtype=np.int64)
    R, rank = to_flint(M, p).rref()
    R = from_flint(R)[:rank]
    pivots = np.argmax(R != 0, axis=1)
    return R, pivots


def rank(M, p):
    M = as_array(M) % p
    if M.size == 0 or not M.any():
        return 0
    return to_flint(M, p).rank()


def nullspace(M, p):
    """Basis (as rows) of {x : M x = 0}."""
    M = as_array(M) % p
    r, c = M.shape
    if c == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if r == 0 or not M.any():
        return np.eye(c, dtype=np.int64)
    N, k = to_flint(M, p).nullspace()
    return from_flint(N)[:, :k].T.copy()


def left_nullspace(M, p):
    """Basis (as rows) of {y : y M = 0}."""
    return nullspace(as_array(M).T, p)


def inverse(M, p):
    M = as_array(M) % p
    if M.shape[0] == 0:
        return M.copy()
    return from_flint(to_flint(M, p).inv())


def independent_rows(M, p):
    """Indices of a greedy maximal independent set of rows (first rows win)."""
    M = as_array(M) % p
    if M.shape[0] == 0:
        return np.zeros(0, dtype=np.int64)
    _, piv = rref(M.T, p)
    return piv


def solve_rows(B, V, p):
    """Coefficients C with C @ B = V, or None if some row of V is outside rowspace(B)."""
    B = as_array(B) % p
    V = as_array(V) % p
    R, piv = rref(B, p)
    if R.shape[0] < B.shape[0]:
        raise ValueError("rows of B are dependent")
    X = V[:, piv]
    if (matmul(X, R, p) != V).any():
        return None
    # C @ B agrees with V on the pivot columns, and B[:, piv] is invertible
    return matmul(X, inverse(B[:, piv], p), p)


def charpoly_factors(M, p):
    """Irreducible factors of the characteristic polynomial as coefficient lists (low to high)."""
    cp = to_flint(M, p).charpoly()
    _, facs = cp.factor()
    out = []
    for f, e in facs:
        out.append(([int(c) for c in f.coeffs()], e))
    return out


def poly_at_matrix(coeffs, M, p):
    """Evaluate sum coeffs[k] M^k by Horner's rule."""
    n = M.shape[0]
    R = np.zeros((n, n), dtype=np.int64)
    eye = np.eye(n, dtype=np.int64)
    for c in reversed(coeffs):
        R = (matmul(R, M, p) + c * eye) % p
    return R

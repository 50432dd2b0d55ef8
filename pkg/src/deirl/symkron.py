"""Symmetric Kronecker product algebra.

Construction of the symmetric Kronecker product/sum on the space S^n of
symmetric matrices, together with the svec/smat isometries and the indexing
maps that enumerate the upper triangle row-wise. All svec layouts in this
package use the single scheme built here; mixing layouts silently is the
classic source of permutation bugs in this algebra, so every module routes
through these functions.

Conventions: vec stacks columns (Fortran order), so W @ kron(A, B) @ W.T
acts on svec coordinates consistently with (A (x) B) vec(C) = vec(B C A^T).
The off-diagonal svec components carry a sqrt(2) weight, making svec an
isometry: svec(A) . svec(B) = <A, B>_F.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

_SQRT2 = np.sqrt(2.0)
_SYM_ATOL = 1e-10


@dataclass(frozen=True)
class SymIndexScheme:
    """Indexing maps for the row-wise upper-triangle enumeration of S^n.

    s[k] is the number of upper-triangle entries in the first k rows,
    so s[0] = 0, s[n] = nbar = n(n+1)/2 and s is strictly increasing.
    row[j], col[j] (0-based) give the matrix position of svec component j;
    the sequence (row[j], col[j]) runs (0,0), (0,1), ..., (0,n-1), (1,1), ...
    weight[j] is 1/2 on diagonal components and sqrt(2)/2 off the diagonal
    (the per-index factor of the entrywise product identity).
    """

    n: int
    nbar: int
    s: np.ndarray
    row: np.ndarray
    col: np.ndarray
    weight: np.ndarray


_SCHEME_CACHE = {}


def build_scheme(n):
    """Build the indexing scheme for S^n.

    Parameters
    ----------
    n : int
        Dimension, n >= 1.

    Returns
    -------
    SymIndexScheme
    """
    n = int(n)
    if n < 1:
        raise ValueError("scheme dimension must be a positive integer, got %d" % n)
    cached = _SCHEME_CACHE.get(n)
    if cached is not None:
        return cached
    nbar = n * (n + 1) // 2
    # s(j) = sum_{i=1..j} (n - (i-1)), cumulative row lengths
    s = np.concatenate([[0], np.cumsum(np.arange(n, 0, -1))])
    row = np.empty(nbar, dtype=int)
    col = np.empty(nbar, dtype=int)
    j = 0
    for r in range(n):
        for c in range(r, n):
            row[j] = r
            col[j] = c
            j += 1
    weight = np.where(row == col, 0.5, _SQRT2 / 2.0)
    scheme = SymIndexScheme(n=n, nbar=nbar, s=s, row=row, col=col, weight=weight)
    _SCHEME_CACHE[n] = scheme
    return scheme


@dataclass(frozen=True)
class SymBasis:
    """Orthonormal basis E_1..E_nbar of S^n and its vectorization matrix W.

    W is nbar x n^2 with rows vec(E_j)^T; W W^T = I and W^T W is the
    orthogonal projector onto vectorized symmetric matrices.
    """

    scheme: SymIndexScheme
    E: tuple
    W: np.ndarray


def sym_basis(n):
    """Enumerate the orthonormal symmetric basis and its W matrix."""
    scheme = build_scheme(n)
    E = []
    for j in range(scheme.nbar):
        r, c = scheme.row[j], scheme.col[j]
        M = np.zeros((n, n))
        if r == c:
            M[r, c] = 1.0
        else:
            M[r, c] = _SQRT2 / 2.0
            M[c, r] = _SQRT2 / 2.0
        E.append(M)
    W = np.array([M.flatten(order="F") for M in E])
    return SymBasis(scheme=scheme, E=tuple(E), W=W)


def _check_symmetric(P, name="matrix"):
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ValueError("%s must be square, got shape %s" % (name, (P.shape,)))
    scale = max(1.0, np.abs(P).max()) if P.size else 1.0
    if np.abs(P - P.T).max() > _SYM_ATOL * scale:
        raise ValueError("%s is not symmetric within tolerance" % name)
    return P


def svec(P):
    """Symmetric vectorization of P in S^n.

    Component j equals <P, E_j>_F: diagonal entries pass through, the
    off-diagonal entries are scaled by sqrt(2), so ||svec(P)||_2 = ||P||_F.
    """
    P = _check_symmetric(P, "svec input")
    sch = build_scheme(P.shape[0])
    v = P[sch.row, sch.col].copy()
    off = sch.row != sch.col
    v[off] *= _SQRT2
    return v


def triangular_dim(nbar):
    """Return n with n(n+1)/2 = nbar, or raise if nbar is not triangular."""
    nbar = int(nbar)
    n = int((np.sqrt(8 * nbar + 1) - 1) / 2)
    if n * (n + 1) // 2 != nbar:
        raise ValueError("length %d is not a triangular number" % nbar)
    return n


def smat(v):
    """Inverse of svec: rebuild the symmetric matrix from its svec vector."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("smat expects a vector, got shape %s" % (v.shape,))
    n = triangular_dim(v.size)
    sch = build_scheme(n)
    vals = v.copy()
    off = sch.row != sch.col
    vals[off] /= _SQRT2
    P = np.zeros((n, n))
    P[sch.row, sch.col] = vals
    P[sch.col, sch.row] = vals
    return P


def sym_project(A):
    """Orthogonal projection pi(A) = (A + A^T)/2 onto S^n."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("sym_project expects a square matrix, got shape %s" % (A.shape,))
    return 0.5 * (A + A.T)


def skron(A, B):
    """Symmetric Kronecker product of two m x n matrices, an mbar x nbar matrix.

    Production path: the entrywise four-case identity, vectorized over all
    (i, j). Each entry is weight_m(i) * weight_n(j) times the four-term sum
    a_{rm,rn} b_{cm,cn} + a_{rm,cn} b_{cm,rn} + a_{cm,rn} b_{rm,cn}
    + a_{cm,cn} b_{rm,rn}, which collapses to the published per-case forms.
    Avoids materializing the m^2 x n^2 Kronecker product; see skron_dense
    for the W_m (A (x) B) W_n^T oracle.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape != B.shape:
        raise ValueError("skron operands must share a 2-D shape, got %s and %s"
                         % ((A.shape,), (B.shape,)))
    m, n = A.shape
    sm = build_scheme(m)
    sn = build_scheme(n)
    rm, cm = sm.row, sm.col
    rn, cn = sn.row, sn.col
    # pair the terms that coincide in the diagonal cases so those sums stay
    # exact, and use exact 1/4 and 1/2 weight products (the float square of
    # sqrt(2)/2 is off by one ulp)
    S4 = ((A[np.ix_(rm, rn)] * B[np.ix_(cm, cn)]
           + A[np.ix_(cm, cn)] * B[np.ix_(rm, rn)])
          + (A[np.ix_(rm, cn)] * B[np.ix_(cm, rn)]
             + A[np.ix_(cm, rn)] * B[np.ix_(rm, cn)]))
    diag_m = rm == cm
    diag_n = rn == cn
    wprod = np.where(np.outer(diag_m, diag_n), 0.25,
                     np.where(np.outer(~diag_m, ~diag_n), 0.5, _SQRT2 / 4.0))
    return S4 * wprod


def skron_entry(A, B, i, j):
    """Single entry (i, j) of the symmetric Kronecker product, 1-based.

    Literal transcription of the four-case closed form; serves as the
    independent scalar oracle for skron.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError("skron_entry operands must share a shape")
    m, n = A.shape
    sm = build_scheme(m)
    sn = build_scheme(n)
    if not (1 <= i <= sm.nbar):
        raise IndexError("row index %d out of range 1..%d" % (i, sm.nbar))
    if not (1 <= j <= sn.nbar):
        raise IndexError("column index %d out of range 1..%d" % (j, sn.nbar))
    rm, cm = sm.row[i - 1], sm.col[i - 1]
    rn, cn = sn.row[j - 1], sn.col[j - 1]
    if rm == cm and rn == cn:
        return A[rm, rn] * B[rm, rn]
    if rm == cm and rn < cn:
        return (_SQRT2 / 2.0) * (A[rm, rn] * B[rm, cn] + A[rm, cn] * B[rm, rn])
    if rm < cm and rn == cn:
        return (_SQRT2 / 2.0) * (A[rm, rn] * B[cm, rn] + A[cm, rn] * B[rm, rn])
    return 0.5 * (A[rm, rn] * B[cm, cn] + A[rm, cn] * B[cm, rn]
                  + A[cm, rn] * B[rm, cn] + A[cm, cn] * B[rm, rn])


def skron_dense(A, B):
    """Dense-path oracle W_m (A (x) B) W_n^T for the symmetric Kronecker product."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise ValueError("skron_dense operands must share a shape")
    m, n = A.shape
    Wm = sym_basis(m).W
    Wn = sym_basis(n).W
    return Wm @ np.kron(A, B) @ Wn.T


def skron_sum(A, B):
    """Symmetric Kronecker sum skron(A, I) + skron(I, B) of square A, B."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise ValueError("skron_sum operands must be square with equal shape")
    I = np.eye(A.shape[0])
    return skron(A, I) + skron(I, B)


def skron_pow_identity_check(A, k, tol=1e-10):
    """Check (A skron I)^k against its binomial expansion.

    (A skron I)^k = 2^{-k} sum_i C(k, i) A^{k-i} skron A^i, k >= 0.
    """
    A = np.asarray(A, dtype=float)
    k = int(k)
    if k < 0:
        raise ValueError("power must be nonnegative")
    n = A.shape[0]
    I = np.eye(n)
    lhs = np.linalg.matrix_power(skron(A, I), k)
    from math import comb
    rhs = np.zeros_like(lhs)
    for i in range(k + 1):
        rhs += comb(k, i) * skron(np.linalg.matrix_power(A, k - i),
                                  np.linalg.matrix_power(A, i))
    rhs /= 2.0 ** k
    scale = max(1.0, np.abs(lhs).max())
    return bool(np.abs(lhs - rhs).max() <= tol * scale)


def skron_exp_identity_check(A, tol=1e-9):
    """Check exp(A skron_sum A) = exp(A) skron exp(A)."""
    A = np.asarray(A, dtype=float)
    lhs = expm(skron_sum(A, A))
    eA = expm(A)
    rhs = skron(eA, eA)
    scale = max(1.0, np.abs(lhs).max())
    return bool(np.abs(lhs - rhs).max() <= tol * scale)


def eig_multisets_match(w1, w2, tol):
    """Compare two eigenvalue multisets in real arithmetic.

    Values are taken in (real, imag) lexicographic order and matched
    greedily: each element of the first set consumes its nearest unused
    element of the second, and the match must lie within tol (absolute,
    caller supplies any scale factor). Greedy matching tolerates the
    reorderings that plain sorted pairing suffers when conjugate pairs or
    near-ties scramble the sort.
    """
    w1 = np.sort_complex(np.asarray(w1, dtype=complex).ravel())
    w2 = np.sort_complex(np.asarray(w2, dtype=complex).ravel())
    if w1.shape != w2.shape:
        return False
    used = np.zeros(w2.size, dtype=bool)
    for z in w1:
        d = np.where(used, np.inf, np.abs(w2 - z))
        k = int(np.argmin(d))
        if d[k] > tol:
            return False
        used[k] = True
    return True


def spectrum_check_skron(A, tol=1e-8):
    """Check sigma(A skron A) = {lambda_i lambda_j, i <= j} as multisets."""
    A = np.asarray(A, dtype=float)
    lam = np.linalg.eigvals(A)
    n = A.shape[0]
    prods = [lam[i] * lam[j] for i in range(n) for j in range(i, n)]
    got = np.linalg.eigvals(skron(A, A))
    scale = max(1.0, np.abs(np.asarray(prods)).max())
    return eig_multisets_match(prods, got, tol * scale)


def spectrum_check_skron_sum(A, tol=1e-8):
    """Check sigma(A skron_sum A) = {lambda_i + lambda_j, i <= j} as multisets."""
    A = np.asarray(A, dtype=float)
    lam = np.linalg.eigvals(A)
    n = A.shape[0]
    sums = [lam[i] + lam[j] for i in range(n) for j in range(i, n)]
    got = np.linalg.eigvals(skron_sum(A, A))
    scale = max(1.0, np.abs(np.asarray(sums)).max())
    return eig_multisets_match(sums, got, tol * scale)

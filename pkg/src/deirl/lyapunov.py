"""Algebraic Lyapunov and Riccati equation solvers.

The ALE A^T P + P A + Q = 0 is solved on svec coordinates through the
symmetric Kronecker sum, (A skron_sum A)^T svec(P) = -svec(Q), as a dense
nbar x nbar linear system. An independent matrix-exponential quadrature
oracle and a Hamiltonian invariant-subspace CARE reference are provided so
the iterative solvers elsewhere in the package can be validated against
algorithmically unrelated methods.
"""

import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import cholesky, expm, schur

from .symkron import skron_sum, smat, svec, sym_project

HURWITZ_MARGIN = 1e-10
_RANK_RTOL = 1e-10


def is_hurwitz(A, margin=HURWITZ_MARGIN):
    """True when every eigenvalue of A has real part below -margin."""
    A = np.asarray(A, dtype=float)
    return bool(np.max(np.linalg.eigvals(A).real) < -margin)


def hurwitz_margin(A):
    """Largest eigenvalue real part; negative for Hurwitz A."""
    return float(np.max(np.linalg.eigvals(np.asarray(A, dtype=float)).real))


def ale_unique_solvable(A, tol=HURWITZ_MARGIN):
    """Unique-solvability test for the ALE: no eigenvalue pair sums to zero."""
    A = np.asarray(A, dtype=float)
    lam = np.linalg.eigvals(A)
    sums = lam[:, None] + lam[None, :]
    return bool(np.min(np.abs(sums)) > tol)


def _closest_eig_pair(A):
    lam = np.linalg.eigvals(A)
    sums = np.abs(lam[:, None] + lam[None, :])
    i, j = np.unravel_index(np.argmin(sums), sums.shape)
    return lam[i], lam[j]


def solve_ale_svec(A, Q, residual_rtol=1e-9):
    """Solve A^T P + P A + Q = 0 through the symmetric Kronecker sum.

    Parameters
    ----------
    A : (n, n) ndarray
    Q : (n, n) ndarray, symmetric

    Returns
    -------
    P : (n, n) ndarray, symmetric

    Raises
    ------
    ValueError when the eigenvalue condition lambda_i + lambda_j != 0 fails
    (reported with the offending pair) or the residual check fails.
    """
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if not ale_unique_solvable(A):
        li, lj = _closest_eig_pair(A)
        raise ValueError(
            "ALE has no unique solution: eigenvalue pair (%s, %s) sums to ~0" % (li, lj))
    M = skron_sum(A, A).T
    P = smat(np.linalg.solve(M, -svec(Q)))
    resid = np.linalg.norm(A.T @ P + P @ A + Q)
    if resid > residual_rtol * max(1.0, np.linalg.norm(Q)):
        raise ValueError("ALE residual %.3e exceeds tolerance" % resid)
    return P


def solve_ale_integral(A, Q, tol=1e-10, seg0=1.0, max_doublings=60):
    """Quadrature oracle P = int_0^inf e^{A^T t} Q e^{A t} dt for Hurwitz A.

    Integrates segment by segment with adaptive vector quadrature, doubling
    the horizon until the analytic tail bound falls below tol. Used only as
    an independent cross-check of solve_ale_svec.
    """
    A = np.asarray(A, dtype=float)
    Q = np.asarray(Q, dtype=float)
    n = A.shape[0]
    decay = hurwitz_margin(A)
    if decay >= -1e-8:
        raise ValueError("integral oracle requires Hurwitz A; slowest real part %.3e" % decay)

    def integrand(t):
        E = expm(A * t)
        return (E.T @ Q @ E).ravel()

    P = np.zeros(n * n)
    t0, t1 = 0.0, seg0
    for _ in range(max_doublings):
        seg, _err = quad_vec(integrand, t0, t1, epsabs=0.1 * tol, epsrel=0.1 * tol)
        P += seg
        # remaining mass decays at least like e^{2 * decay * (t - t1)}
        E1 = expm(A * t1)
        tail = np.linalg.norm(E1.T @ Q @ E1) / (2.0 * abs(decay))
        if tail < tol * max(1.0, np.linalg.norm(P)):
            return sym_project(P.reshape((n, n)))
        t0, t1 = t1, 2.0 * t1
    raise ValueError("integral oracle failed to converge within horizon doublings")


def _rank(M, rtol=_RANK_RTOL):
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def psd_sqrt(Q, floor=-1e-10):
    """Symmetric square root of a PSD matrix; rejects indefinite input."""
    Q = np.asarray(Q, dtype=float)
    w, V = np.linalg.eigh(sym_project(Q))
    scale = max(1.0, np.abs(w).max())
    if w.min() < floor * scale:
        raise ValueError("matrix is not positive semidefinite (min eig %.3e)" % w.min())
    return V @ np.diag(np.sqrt(np.clip(w, 0.0, None))) @ V.T


def check_stabilizable_detectable(A, B, Q):
    """PBH tests: (A, B) stabilizable and (Q^{1/2}, A) detectable.

    Rank tests run at every eigenvalue of A with nonnegative real part,
    with singular values thresholded relative to the largest.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    n = A.shape[0]
    C = psd_sqrt(Q)
    lam = np.linalg.eigvals(A)
    stab = True
    detect = True
    for lv in lam[lam.real >= -HURWITZ_MARGIN]:
        M = np.hstack([A - lv * np.eye(n), B.astype(complex)])
        if _rank(M) < n:
            stab = False
        M = np.vstack([A - lv * np.eye(n), C.astype(complex)])
        if _rank(M) < n:
            detect = False
    return stab, detect


def validate_care(A, B, Q, R):
    """Shape and definiteness checks shared by the CARE-facing solvers."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or B.shape[0] != n:
        raise ValueError("A must be square and B row-conformable with A")
    m = B.shape[1]
    if Q.shape != (n, n) or R.shape != (m, m):
        raise ValueError("Q must be n x n and R must be m x m")
    try:
        cholesky(sym_project(R), lower=True)
    except np.linalg.LinAlgError:
        raise ValueError("R is not positive definite")
    except Exception as exc:  # scipy raises LinAlgError subclasses
        raise ValueError("R is not positive definite") from exc
    wq = np.linalg.eigvalsh(sym_project(Q))
    if wq.min() < -1e-10 * max(1.0, np.abs(wq).max()):
        raise ValueError("Q is not positive semidefinite (min eig %.3e)" % wq.min())
    return A, B, Q, R


def care_residual(A, B, Q, R, P):
    """Frobenius norm of A^T P + P A - P B R^{-1} B^T P + Q."""
    G = B @ np.linalg.solve(R, B.T)
    return float(np.linalg.norm(A.T @ P + P @ A - P @ G @ P + Q))


def care_residual_scale(A, B, Q, R, P):
    """Backward-error normalization for the CARE residual.

    Badly scaled instances produce huge P, so the raw residual is compared
    against the magnitude of the terms that formed it.
    """
    G = B @ np.linalg.solve(R, B.T)
    nP = np.linalg.norm(P)
    return float(max(1.0, np.linalg.norm(Q) + 2.0 * np.linalg.norm(A) * nP
                     + np.linalg.norm(G) * nP ** 2))


def solve_care_reference(A, B, Q, R, residual_tol=1e-8):
    """Stabilizing CARE solution from the Hamiltonian stable invariant subspace.

    Builds H = [[A, -B R^{-1} B^T], [-Q, -A^T]], takes an ordered real Schur
    factorization with the left-half-plane block leading, and recovers
    P = X2 X1^{-1} from the first n Schur vectors. Independent of the
    Newton-type iteration it is used to validate.

    Returns
    -------
    (P, K) : stabilizing solution and gain K = R^{-1} B^T P.
    """
    A, B, Q, R = validate_care(A, B, Q, R)
    stab, detect = check_stabilizable_detectable(A, B, Q)
    if not stab:
        raise ValueError("(A, B) is not stabilizable")
    if not detect:
        raise ValueError("(Q^{1/2}, A) is not detectable")
    n = A.shape[0]
    G = B @ np.linalg.solve(R, B.T)
    H = np.block([[A, -G], [-Q, -A.T]])
    _T, Z, sdim = schur(H, output="real", sort="lhp")
    if sdim != n:
        raise ValueError(
            "Hamiltonian stable subspace has dimension %d, expected %d" % (sdim, n))
    X1 = Z[:n, :n]
    X2 = Z[n:, :n]
    cond = np.linalg.cond(X1)
    if not np.isfinite(cond) or cond > 1e12:
        raise ValueError("stable-subspace basis is ill conditioned (cond %.3e)" % cond)
    P = sym_project(X2 @ np.linalg.inv(X1))
    resid = care_residual(A, B, Q, R, P)
    if resid > residual_tol * care_residual_scale(A, B, Q, R, P):
        raise ValueError("CARE residual %.3e exceeds tolerance" % resid)
    wp = np.linalg.eigvalsh(P)
    if wp.min() < -1e-8 * max(1.0, np.abs(wp).max()):
        raise ValueError("CARE solution is not positive semidefinite")
    K = np.linalg.solve(R, B.T @ P)
    if not is_hurwitz(A - B @ K, margin=0.0):
        raise ValueError("closed loop A - B K is not Hurwitz")
    return P, K

"""Newton-type policy iteration for the continuous-time LQR problem.

Each sweep solves the policy-evaluation ALE

    (A - B K_i)^T P_i + P_i (A - B K_i) + Q + K_i^T R K_i = 0

on svec coordinates and updates the gain K_{i+1} = R^{-1} B^T P_i. Starting
from a stabilizing K_0 the closed loop stays Hurwitz at every iterate, the
value matrices decrease monotonically in the semidefinite order, and the
gains converge quadratically to the stabilizing Riccati solution.
"""

from dataclasses import dataclass, field

import numpy as np

from .lyapunov import hurwitz_margin, solve_ale_svec, solve_care_reference, validate_care
from .symkron import sym_project


@dataclass(frozen=True)
class KleinmanIterate:
    """One policy-evaluation step: the gain used and the value it earned."""

    P: np.ndarray
    K: np.ndarray
    ale_residual: float
    hurwitz_margin: float


@dataclass
class KleinmanRun:
    """Record of one policy-iteration run on a single loop."""

    loop_index: int
    iterates: list = field(default_factory=list)
    K_final: np.ndarray = None
    converged: bool = False
    final_gap: float = np.inf
    P_star: np.ndarray = None
    K_star: np.ndarray = None

    @property
    def P_list(self):
        return [it.P for it in self.iterates]

    @property
    def K_list(self):
        return [it.K for it in self.iterates] + [self.K_final]


def kleinman_iterate(A, B, Q, R, K0, i_star, gap_tol=None, loop_index=1,
                     reference=True):
    """Run policy iteration from a stabilizing gain.

    Parameters
    ----------
    A, B, Q, R : ndarray
        Plant and cost matrices; R positive definite, Q positive
        semidefinite.
    K0 : (m, n) ndarray
        Initial gain; A - B K0 must be Hurwitz.
    i_star : int
        Number of sweeps. Each sweep records (P_i, K_i) and produces
        K_{i+1}.
    gap_tol : float, optional
        When given, stop early once the gain increment drops below it
        (convergence-threshold mode for fuzz tests).
    reference : bool
        Compute the Riccati reference (P*, K*) and the final gap. Disable
        for plants where the reference solve is exercised separately.

    Returns
    -------
    KleinmanRun
    """
    A, B, Q, R = validate_care(A, B, Q, R)
    K = np.atleast_2d(np.asarray(K0, dtype=float))
    if K.shape != (B.shape[1], A.shape[0]):
        raise ValueError("K0 shape %s does not match (m, n) = %s"
                         % ((K.shape,), ((B.shape[1], A.shape[0]),)))
    run = KleinmanRun(loop_index=loop_index)
    margin0 = hurwitz_margin(A - B @ K)
    if margin0 >= 0.0:
        raise ValueError("initial gain is not stabilizing (margin %.3e)" % margin0)
    for i in range(int(i_star)):
        Acl = A - B @ K
        margin = hurwitz_margin(Acl)
        if margin >= 0.0:
            raise ValueError("closed loop lost stability at iterate %d (margin %.3e)"
                             % (i, margin))
        Qi = Q + K.T @ R @ K
        P = solve_ale_svec(Acl, sym_project(Qi))
        resid = np.linalg.norm(Acl.T @ P + P @ Acl + Qi)
        run.iterates.append(KleinmanIterate(P=P, K=K, ale_residual=float(resid),
                                            hurwitz_margin=float(margin)))
        K_next = np.linalg.solve(R, B.T @ P)
        step = np.linalg.norm(K_next - K)
        K = K_next
        if gap_tol is not None and step <= gap_tol:
            break
    run.K_final = K
    if reference:
        run.P_star, run.K_star = solve_care_reference(A, B, Q, R)
        run.final_gap = float(np.linalg.norm(K - run.K_star))
        run.converged = bool(run.final_gap <= (gap_tol if gap_tol is not None else 1e-8))
    return run


def verify_monotonicity(run, P_star=None, floor=-1e-8):
    """Check P* <= P_{i+1} <= P_i across a completed run.

    Eigenvalues of the ordered differences may dip slightly negative from
    solver precision; floor sets the tolerance.
    """
    if P_star is None:
        P_star = run.P_star
    Ps = run.P_list
    for Pa, Pb in zip(Ps[:-1], Ps[1:]):
        if np.linalg.eigvalsh(sym_project(Pa - Pb)).min() < floor:
            return False
    if P_star is not None:
        for P in Ps:
            if np.linalg.eigvalsh(sym_project(P - P_star)).min() < floor:
                return False
    return True

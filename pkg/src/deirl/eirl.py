"""Data-driven policy-iteration regression, per decentralized loop.

Each iteration forms the least-squares system A_mat svec(P_ij) = b over one
fixed trajectory dataset:

    A_mat = delta_xx - 2 [ I_xx (I (x)_s B_jj K_ij)^T + I_x,gu + I_x,w ]
    b     = - I_xx svec(Q_j + K_ij^T R_j K_ij)

whose exact solution is the policy-evaluation ALE solution for the loop's
linearization, so the iterate sequence reproduces model-based policy
iteration from data. The condition number of A_mat is the central
diagnostic; all iterations reuse the single dataset.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .kleinman import kleinman_iterate
from .lyapunov import hurwitz_margin
from .simulate import delta_matrix, integral_matrix
from .symkron import skron, smat, svec, sym_project


@dataclass(frozen=True)
class RegressionProblem:
    """One loop-iteration least-squares system and the gain that formed it."""

    loop_index: int
    iteration: int
    A_mat: np.ndarray = field(repr=False)
    b_vec: np.ndarray = field(repr=False)
    K: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class LearningStep:
    """One solved iteration: value estimate, conditioning, and diagnostics."""

    iteration: int
    P: np.ndarray
    K: np.ndarray
    K_next: np.ndarray
    kappa: float
    residual: float
    gap_to_kleinman: float


@dataclass
class LearningRecord:
    """Per-loop record of a data-driven policy-iteration run."""

    loop_index: int
    algorithm: str
    steps: list = field(default_factory=list)
    K_final: np.ndarray = None
    kleinman: object = None
    final_gap: float = np.inf

    @property
    def kappa_series(self):
        return [s.kappa for s in self.steps]

    @property
    def kappa_max(self):
        return max(self.kappa_series)

    @property
    def kappa_min(self):
        return min(self.kappa_series)

    @property
    def P_list(self):
        return [s.P for s in self.steps]

    @property
    def K_list(self):
        return [s.K for s in self.steps] + [self.K_final]


def assemble_regression(dataset, plant, K, loop_index, iteration=0):
    """Build the loop regression for the current gain from stored integrals.

    Parameters
    ----------
    dataset : TrajectoryDataset
        Must cover the plant's partition with all three integrand families.
    plant : DecentralizedPlant
    K : (m_j, n_j) ndarray
        Gain of the current iteration for this loop.
    loop_index : int
        0-based loop selector.

    Returns
    -------
    RegressionProblem
    """
    if tuple(dataset.state_dims) != tuple(plant.state_dims):
        raise ValueError("dataset partition %s does not match plant partition %s"
                         % (dataset.state_dims, plant.state_dims))
    j = int(loop_index)
    nj = int(plant.state_dims[j])
    mj = int(plant.control_dims[j])
    K = np.asarray(K, dtype=float)
    if K.shape != (mj, nj):
        raise ValueError("gain shape %s does not match loop %d dims (%d, %d)"
                         % ((K.shape,), j + 1, mj, nj))
    Bjj = plant.B_block(j)
    D = delta_matrix(dataset, j)
    I_xx = integral_matrix(dataset, j, "xx")
    I_gu = integral_matrix(dataset, j, "gu")
    I_w = integral_matrix(dataset, j, "w")
    A_mat = D - 2.0 * (I_xx @ skron(np.eye(nj), Bjj @ K).T + I_gu + I_w)
    Qj = plant.Q_block(j)
    Rj = plant.R_block(j)
    b = -I_xx @ svec(sym_project(Qj + K.T @ Rj @ K))
    return RegressionProblem(loop_index=j, iteration=int(iteration),
                             A_mat=A_mat, b_vec=b, K=K)


def solve_regression(problem, rank_rtol=1e-10):
    """Minimum-norm least-squares solve with conditioning diagnostics.

    Returns
    -------
    (P, kappa, residual) : symmetric value estimate, 2-norm condition
    number sigma_max / sigma_min of the regressor, and the residual norm
    ||A_mat svec(P) - b||_2.

    Raises
    ------
    ValueError if rows are fewer than unknowns or the regressor is rank
    deficient (the excitation was not persistent enough); the singular
    value spectrum is included in the message.
    """
    A = problem.A_mat
    b = problem.b_vec
    rows, cols = A.shape
    if rows < cols:
        raise ValueError("regression has %d rows for %d unknowns; need more samples"
                         % (rows, cols))
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= rank_rtol * s[0]:
        raise ValueError("regressor is rank deficient; singular values %s" % s)
    x = Vt.T @ ((U.T @ b) / s)
    kappa = float(s[0] / s[-1])
    residual = float(np.linalg.norm(A @ x - b))
    P = smat(x)
    asym = np.max(np.abs(P - P.T)) if P.size else 0.0
    if asym > 1e-10:
        warnings.warn("value estimate asymmetry %.3e exceeds 1e-10" % asym)
    return sym_project(P), kappa, residual


def update_gain(P, plant, loop_index):
    """Policy improvement K_{i+1,j} = R_j^{-1} B_jj^T P_ij."""
    j = int(loop_index)
    P = np.asarray(P, dtype=float)
    return np.linalg.solve(plant.R_block(j), plant.B_block(j).T @ P)


def run_eirl(plant, K0, dataset, i_star, algorithm=None, reference=True):
    """Iterate assemble/solve/update on one dataset for every loop.

    Parameters
    ----------
    plant : DecentralizedPlant
    K0 : (m, n) ndarray
        Initial stabilizing gain, block diagonal over the partition.
    dataset : TrajectoryDataset
        Collected once; reused by all iterations of all loops.
    i_star : int
        Iterations per loop.
    algorithm : str, optional
        Label stored on the records; defaults by loop count.

    Returns
    -------
    list of LearningRecord, one per loop, each carrying the matched
    model-based policy-iteration run for gap diagnostics.
    """
    K0 = np.asarray(K0, dtype=float).reshape(plant.m, plant.n)
    if algorithm is None:
        algorithm = "EIRL" if plant.N == 1 else "dEIRL"
    records = []
    for j in range(plant.N):
        Aj, Bj, Qj, Rj = plant.loop_problem(j)
        Kj = K0[plant.control_slice(j), plant.state_slice(j)]
        klm = kleinman_iterate(Aj, Bj, Qj, Rj, Kj, i_star,
                               reference=reference) if i_star > 0 else None
        rec = LearningRecord(loop_index=j + 1, algorithm=algorithm, kleinman=klm)
        K = Kj
        for i in range(int(i_star)):
            prob = assemble_regression(dataset, plant, K, j, iteration=i)
            P, kappa, resid = solve_regression(prob)
            K_next = update_gain(P, plant, j)
            gap = np.linalg.norm(P - klm.iterates[i].P)
            rec.steps.append(LearningStep(iteration=i, P=P, K=K, K_next=K_next,
                                          kappa=kappa, residual=resid,
                                          gap_to_kleinman=float(gap)))
            K = K_next
        rec.K_final = K
        if klm is not None and klm.K_star is not None:
            rec.final_gap = float(np.linalg.norm(K - klm.K_star))
        records.append(rec)
    return records


def stability_margins(plant, record):
    """Closed-loop linearization margins A_jj - B_jj K_ij across a record."""
    j = record.loop_index - 1
    Aj = plant.A_block(j)
    Bj = plant.B_block(j)
    return [hurwitz_margin(Aj - Bj @ K) for K in record.K_list]

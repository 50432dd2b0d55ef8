"""Modulation-enhanced excitation: state rescaling of the learning problem.

A nonsingular block-diagonal modulation S = blockdiag(S_1..S_N) rescales
each loop's state, x~ = S x. The learning regression transforms by a right
multiplication A~ = A_mat (S_j (x)_s S_j)^T with the target vector
unchanged, so the recovered iterates are in bijection with the original
ones: P = S_j^T P~ S_j and K = K~ S_j. Conditioning, however, is not
invariant, which is the entire point: a well-chosen S shrinks the spread of
the regressor columns without touching the learned controller.

Two data paths are supported and must agree: the algebraic path transforms
regressions (or datasets) already collected, while the physical path
simulates the modulated plant itself.
"""

from dataclasses import dataclass

import numpy as np

from .eirl import (LearningRecord, LearningStep, RegressionProblem,
                   solve_regression)
from .eirl import assemble_regression as _assemble
from .kleinman import kleinman_iterate
from .plants import DecentralizedPlant, block_diag, validate_plant
from .simulate import (TrajectoryDataset, apply_pair_transform,
                       simulate_closed_loop)
from .symkron import skron, sym_project

DEG2RAD = np.pi / 180.0

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class ModulationSpec:
    """Per-loop invertible modulation blocks S_j."""

    blocks: tuple

    @property
    def N(self):
        return len(self.blocks)

    def block(self, j):
        return self.blocks[j]

    def inv_block(self, j):
        return np.linalg.inv(self.blocks[j])

    @property
    def S(self):
        return block_diag(list(self.blocks))

    @property
    def S_inv(self):
        return block_diag([self.inv_block(j) for j in range(self.N)])


def modulation_spec(blocks):
    """Validate and freeze a list of per-loop modulation matrices."""
    frozen = []
    for j, b in enumerate(blocks):
        b = np.atleast_2d(np.asarray(b, dtype=float))
        if b.shape[0] != b.shape[1]:
            raise ValueError("modulation block %d is not square" % (j + 1))
        cond = np.linalg.cond(b)
        if not np.isfinite(cond) or cond > _COND_LIMIT:
            raise ValueError("modulation block %d is singular or ill conditioned "
                             "(cond %.3e)" % (j + 1, cond))
        frozen.append(b)
    return ModulationSpec(blocks=tuple(frozen))


def identity_modulation(state_dims):
    return modulation_spec([np.eye(int(nj)) for nj in state_dims])


def diagonal_modulation(entries, state_dims):
    """Per-state diagonal scaling, split over the loop partition."""
    entries = np.asarray(entries, dtype=float).ravel()
    if entries.size != int(sum(state_dims)):
        raise ValueError("need one diagonal entry per state")
    blocks = []
    off = 0
    for nj in state_dims:
        blocks.append(np.diag(entries[off:off + int(nj)]))
        off += int(nj)
    return modulation_spec(blocks)


def degree_to_radian_modulation(state_dims, angular_states):
    """Diagonal modulation converting selected state indices to radians."""
    n = int(sum(state_dims))
    entries = np.ones(n)
    for i in angular_states:
        entries[int(i)] = DEG2RAD
    return diagonal_modulation(entries, state_dims)


def check_spec(spec, state_dims):
    dims = tuple(int(b.shape[0]) for b in spec.blocks)
    if dims != tuple(int(d) for d in state_dims):
        raise ValueError("modulation partition %s does not match plant partition %s"
                         % (dims, tuple(state_dims)))
    return spec


def modulate_problem(plant, spec):
    """Transformed plant in modulated coordinates x~ = S x.

    A~ = S A S^{-1}, B~ = S B, Q~ = S^{-T} Q S^{-1}, R unchanged;
    the drift and input maps conjugate accordingly.
    """
    check_spec(spec, plant.state_dims)
    S = spec.S
    S_inv = spec.S_inv
    f, g = plant.f, plant.g
    plant_t = DecentralizedPlant(
        name=plant.name + "~mod",
        state_dims=plant.state_dims,
        control_dims=plant.control_dims,
        f=lambda x: S @ np.asarray(f(S_inv @ np.asarray(x, dtype=float)), dtype=float),
        g=lambda x: S @ np.atleast_2d(np.asarray(g(S_inv @ np.asarray(x, dtype=float)),
                                                 dtype=float)),
        A=S @ plant.A @ S_inv,
        B=S @ plant.B,
        Q=S_inv.T @ plant.Q @ S_inv,
        R=plant.R)
    return validate_plant(plant_t)


def modulate_dataset(dataset, spec):
    """Algebraic image of a dataset under x~ = S x (the control is untouched).

    States map by S, the initial gain by K0 S^{-1}, and every per-loop
    accumulator family by a right multiplication with skron(S_j, S_j)^T,
    because all three integrand pairs (x_j, x_j), (x_j, g_j u_j) and
    (x_j, w_j) transform with S_j in both slots.
    """
    check_spec(spec, dataset.state_dims)
    S = spec.S
    accs = []
    for j in range(dataset.N):
        Sj = spec.block(j)
        accs.append({name: apply_pair_transform(dataset.accumulators[j][name], Sj)
                     for name in dataset.accumulators[j]})
    return TrajectoryDataset(
        plant_name=dataset.plant_name + "~mod",
        state_dims=dataset.state_dims,
        times=dataset.times.copy(),
        states=dataset.states @ S.T,
        controls=dataset.controls.copy(),
        accumulators=tuple(accs),
        K0=dataset.K0 @ spec.S_inv,
        probing=dataset.probing)


def modulated_regression(problem, spec):
    """Right-multiply a regression by skron(S_j, S_j)^T; the target is unchanged."""
    j = problem.loop_index
    Sj = spec.block(j)
    A_t = problem.A_mat @ skron(Sj, Sj).T
    return RegressionProblem(loop_index=j, iteration=problem.iteration,
                             A_mat=A_t, b_vec=problem.b_vec,
                             K=problem.K @ spec.inv_block(j))


def back_transform(P_t, K_t, spec, j):
    """Recover original-coordinate iterates: P = S_j^T P~ S_j, K = K~ S_j."""
    Sj = spec.block(j)
    P = Sj.T @ np.asarray(P_t, dtype=float) @ Sj
    K = np.asarray(K_t, dtype=float) @ Sj
    return sym_project(P), K


def run_eirl_mee(plant, K0, dataset, i_star, spec, algorithm=None,
                 path="algebraic"):
    """Data-driven policy iteration through the modulated regression.

    Each iteration's regression is formed in modulated coordinates, solved
    there for the modulated value, and the iterates are backed out exactly.
    Conditioning is recorded from the modulated regressor; the gain
    sequence matches the unmodulated run.

    Parameters
    ----------
    path : {"algebraic", "physical"}
        "algebraic" right-multiplies regressions assembled from the given
        dataset. "physical" re-simulates the modulated plant under the
        dataset's probing, sample grid, and mapped initial condition, then
        assembles directly from the modulated trajectory. The two paths
        agree to integration accuracy, which is itself an invariance check.
    """
    check_spec(spec, plant.state_dims)
    K0 = np.asarray(K0, dtype=float).reshape(plant.m, plant.n)
    if algorithm is None:
        algorithm = ("EIRL" if plant.N == 1 else "dEIRL") + "+MEE"
    if path == "algebraic":
        def build(K, j, i):
            return modulated_regression(_assemble(dataset, plant, K, j,
                                                  iteration=i), spec)
    elif path == "physical":
        plant_t = modulate_problem(plant, spec)
        dataset_t = simulate_closed_loop(plant_t, dataset.K0 @ spec.S_inv,
                                         dataset.probing,
                                         spec.S @ dataset.states[0],
                                         dataset.times)

        def build(K, j, i):
            return _assemble(dataset_t, plant_t, K @ spec.inv_block(j), j,
                             iteration=i)
    else:
        raise ValueError("unknown data path %r" % (path,))
    records = []
    for j in range(plant.N):
        Aj, Bj, Qj, Rj = plant.loop_problem(j)
        Kj = K0[plant.control_slice(j), plant.state_slice(j)]
        klm = kleinman_iterate(Aj, Bj, Qj, Rj, Kj, i_star) if i_star > 0 else None
        rec = LearningRecord(loop_index=j + 1, algorithm=algorithm, kleinman=klm)
        K = Kj
        for i in range(int(i_star)):
            P_t, kappa, resid = solve_regression(build(K, j, i))
            K_t = np.linalg.solve(Rj, (spec.block(j) @ Bj).T @ P_t)
            P, K_next = back_transform(P_t, K_t, spec, j)
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


def verify_ale_modulation_invariance(A, B, Q, R, S, K0, i_star, tol=1e-8):
    """Dual-path policy-iteration check of modulation invariance.

    Runs model-based policy iteration on (A, B, Q, R) and on the modulated
    quadruple (S A S^{-1}, S B, S^{-T} Q S^{-1}, R), then compares
    P_i = S^T P~_i S and K_i = K~_i S across all iterates. S may be a
    ModulationSpec or a nonsingular matrix.

    Returns
    -------
    (ok, max_deviation)
    """
    A = np.asarray(A, dtype=float)
    if isinstance(S, ModulationSpec):
        S = S.S
    S = np.asarray(S, dtype=float)
    S_inv = np.linalg.inv(S)
    K0 = np.asarray(K0, dtype=float)
    run = kleinman_iterate(A, B, Q, R, K0, i_star, reference=False)
    run_t = kleinman_iterate(S @ A @ S_inv, S @ B, S_inv.T @ Q @ S_inv, R,
                             K0 @ S_inv, i_star, reference=False)
    dev = 0.0
    for it, it_t in zip(run.iterates, run_t.iterates):
        dev = max(dev, np.max(np.abs(it.P - S.T @ it_t.P @ S)))
        dev = max(dev, np.max(np.abs(it.K - it_t.K @ S)))
    dev = max(dev, np.max(np.abs(run.K_final - run_t.K_final @ S)))
    return bool(dev <= tol), float(dev)

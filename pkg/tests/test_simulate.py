"""Tests for closed-loop simulation, accumulators, and data operators.

The linear benchmark has a closed-form forced response, so both the sampled
states and the integral accumulators are checked against symbolic
antiderivatives. The nonlinear plant's accumulators are checked against
dense trapezoid quadrature of a separately integrated trajectory.
"""

import math

import numpy as np
import pytest
import sympy as sp

from deirl.plants import DecentralizedPlant, lin2d_plant, synthetic2loop_plant
from deirl.simulate import (
    ProbingSignal,
    TrajectoryDataset,
    apply_pair_transform,
    dataset_from_json,
    dataset_to_json,
    delta_matrix,
    evaluate_lqr_cost,
    integral_matrix,
    lin2d_probing,
    simulate_closed_loop,
    uniform_samples,
)
from deirl.symkron import skron, svec, sym_project

STATE_TOL = 1e-9
ACC_TOL = 1e-8

X0 = np.array([0.3, -0.2])


def _rng(seed=0):
    return np.random.default_rng(seed)


def _forced_response_exprs(x0):
    # xdot_1 = -x_1 + cos t        -> x_1 = (cos t + sin t)/2 + c_1 e^{-t}
    # xdot_2 = -0.1 x_2 + 0.1 cos 0.1 t -> x_2 = (cos 0.1t + sin 0.1t)/2 + c_2 e^{-0.1t}
    t = sp.symbols("t", real=True)
    x1 = (sp.cos(t) + sp.sin(t)) / 2 + (x0[0] - sp.Rational(1, 2)) * sp.exp(-t)
    x2 = (sp.cos(t / 10) + sp.sin(t / 10)) / 2 + (x0[1] - sp.Rational(1, 2)) * sp.exp(-t / 10)
    return t, x1, x2


def test_probing_signal_values_and_bound():
    d = lin2d_probing()
    v = d(0.0)
    assert v == pytest.approx(np.array([1.0, 0.1]))
    v = d(np.pi)
    assert v[0] == pytest.approx(-1.0)
    assert d.bound == pytest.approx(1.0)
    z = ProbingSignal.zero(3)
    assert np.array_equal(z(1.23), np.zeros(3))


def test_uniform_samples():
    assert np.array_equal(uniform_samples(0.1, 5), np.arange(6) * 0.1)
    with pytest.raises(ValueError):
        uniform_samples(0.0, 5)
    with pytest.raises(ValueError):
        uniform_samples(0.1, 0)


def test_equilibrium_stays_zero():
    plant = lin2d_plant(loops=2)
    ds = simulate_closed_loop(plant, np.zeros((2, 2)), None, np.zeros(2),
                              uniform_samples(0.1, 5))
    assert np.max(np.abs(ds.states)) == 0.0
    for acc in ds.accumulators:
        for fam in acc.values():
            assert np.max(np.abs(fam)) == 0.0


def test_rejects_destabilizing_gain_and_bad_samples():
    plant = lin2d_plant(loops=2)
    with pytest.raises(ValueError):
        simulate_closed_loop(plant, -3.0 * np.eye(2), None, np.zeros(2),
                             uniform_samples(0.1, 5))
    with pytest.raises(ValueError):
        simulate_closed_loop(plant, np.zeros((2, 2)), None, np.zeros(2),
                             np.array([0.0, 0.2, 0.1]))


def test_forced_response_matches_closed_form():
    plant = lin2d_plant(loops=1)
    samples = uniform_samples(0.1, 5)
    ds = simulate_closed_loop(plant, np.zeros((2, 2)), lin2d_probing(), X0, samples)
    t, x1, x2 = _forced_response_exprs(X0)
    f1 = sp.lambdify(t, x1, "numpy")
    f2 = sp.lambdify(t, x2, "numpy")
    assert np.max(np.abs(ds.states[:, 0] - f1(samples))) < STATE_TOL
    assert np.max(np.abs(ds.states[:, 1] - f2(samples))) < STATE_TOL


def test_accumulators_match_symbolic_antiderivatives():
    plant = lin2d_plant(loops=1)
    samples = uniform_samples(0.1, 5)
    ds = simulate_closed_loop(plant, np.zeros((2, 2)), lin2d_probing(), X0, samples)
    t, x1, x2 = _forced_response_exprs(X0)
    tau = sp.symbols("tau", real=True)
    sub = {t: tau}
    x1t, x2t = x1.subs(sub), x2.subs(sub)
    def antiderivative_values(expr):
        # indefinite antiderivative, evaluated as F(t_k) - F(0)
        F = sp.lambdify(tau, sp.integrate(sp.expand(expr), tau), "numpy")
        return np.array([F(tk) - F(0.0) for tk in samples])

    # xx family: integrals of (x1^2, sqrt2 x1 x2, x2^2)
    targets = [x1t * x1t, sp.sqrt(2) * x1t * x2t, x2t * x2t]
    for col, expr in enumerate(targets):
        want = antiderivative_values(expr)
        got = ds.accumulators[0]["xx"][:, col]
        assert np.max(np.abs(got - want)) < ACC_TOL
    # gu family with K0 = 0: g u = d(t) = (cos tau, 0.1 cos 0.1 tau)
    d1, d2 = sp.cos(tau), sp.cos(tau / 10) / 10
    pairs = [x1t * d1, sp.sqrt(2) * (x1t * d2 + x2t * d1) / 2, x2t * d2]
    for col, expr in enumerate(pairs):
        want = antiderivative_values(expr)
        got = ds.accumulators[0]["gu"][:, col]
        assert np.max(np.abs(got - want)) < ACC_TOL
    # linear plant: the nonlinear residual vanishes identically
    assert np.max(np.abs(ds.accumulators[0]["w"])) < 1e-12


def test_split_view_matches_joint_view():
    # the two-loop partition's scalar accumulators equal the joint view's
    # corresponding components on the same trajectory
    samples = uniform_samples(0.1, 5)
    joint = simulate_closed_loop(lin2d_plant(loops=1), np.zeros((2, 2)),
                                 lin2d_probing(), X0, samples)
    split = simulate_closed_loop(lin2d_plant(loops=2), np.zeros((2, 2)),
                                 lin2d_probing(), X0, samples)
    assert np.max(np.abs(joint.states - split.states)) < 1e-10
    assert np.max(np.abs(joint.accumulators[0]["xx"][:, 0]
                         - split.accumulators[0]["xx"][:, 0])) < 1e-10
    assert np.max(np.abs(joint.accumulators[0]["xx"][:, 2]
                         - split.accumulators[1]["xx"][:, 0])) < 1e-10


def test_nonlinear_accumulators_match_trapezoid():
    from scipy.integrate import solve_ivp

    plant = synthetic2loop_plant()
    d = ProbingSignal(terms=(((0.3, 1.0, 0.0),), ((0.3, 0.5, 0.0), (0.1, 0.05, 0.0))))
    x0 = np.array([0.1, -0.05, 0.08])
    samples = uniform_samples(0.5, 4)
    ds = simulate_closed_loop(plant, np.zeros((2, 3)), d, x0, samples)

    def rhs(t, x):
        u = -np.zeros((2, 3)) @ x + d(t)
        return plant.f(x) + plant.g(x) @ u

    grid = np.arange(0.0, samples[-1] + 1e-12, 1e-4)
    sol = solve_ivp(rhs, (0.0, samples[-1]), x0, method="DOP853",
                    rtol=1e-12, atol=1e-13, t_eval=grid, dense_output=False)
    X = sol.y.T
    U = d(grid).T
    # loop 2 xx family, all three svec components
    x2 = X[:, 1:3]
    vals = np.stack([x2[:, 0] ** 2,
                     math.sqrt(2.0) * x2[:, 0] * x2[:, 1],
                     x2[:, 1] ** 2], axis=1)
    for col in range(3):
        acc = np.array([np.trapezoid(vals[grid <= tk + 1e-12, col],
                                     grid[grid <= tk + 1e-12]) for tk in samples])
        assert np.max(np.abs(ds.accumulators[1]["xx"][:, col] - acc)) < 1e-6
    # loop 1 w family: w_1 = f_1(x) - A_11 x_1
    w1 = np.array([plant.nonlinear_residual(x, 0)[0] for x in X])
    vals = X[:, 0] * w1
    acc = np.array([np.trapezoid(vals[grid <= tk + 1e-12],
                                 grid[grid <= tk + 1e-12]) for tk in samples])
    assert np.max(np.abs(ds.accumulators[0]["w"][:, 0] - acc)) < 1e-6


def test_solver_tolerance_halving_is_stable():
    plant = lin2d_plant(loops=1)
    samples = uniform_samples(0.1, 5)
    a = simulate_closed_loop(plant, np.zeros((2, 2)), lin2d_probing(), X0,
                             samples)
    b = simulate_closed_loop(plant, np.zeros((2, 2)), lin2d_probing(), X0,
                             samples, rtol=5e-11, atol=5e-13)
    for fam in ("xx", "gu"):
        fa, fb = a.accumulators[0][fam], b.accumulators[0][fam]
        scale = max(1.0, np.max(np.abs(fa)))
        assert np.max(np.abs(fa - fb)) < 1e-8 * scale


def test_divergence_guard():
    A = np.array([[-1.0]])

    def f(x):
        return np.array([-x[0] + 2.0 * x[0] ** 3])

    plant = DecentralizedPlant(name="blowup", state_dims=(1,), control_dims=(1,),
                               f=f, g=lambda x: np.eye(1),
                               A=A, B=np.eye(1), Q=np.eye(1), R=np.eye(1))
    with pytest.raises(RuntimeError):
        simulate_closed_loop(plant, np.zeros((1, 1)), None, np.array([2.0]),
                             np.array([0.0, 1.0]))


def _craft_dataset(times, states, state_dims=(2,)):
    n = states.shape[1]
    accs = []
    for j, nj in enumerate(state_dims):
        nbar = nj * (nj + 1) // 2
        accs.append({name: np.zeros((times.size, nbar)) for name in ("xx", "gu", "w")})
    return TrajectoryDataset(plant_name="crafted", state_dims=tuple(state_dims),
                             times=times, states=states,
                             controls=np.zeros((times.size, 1)),
                             accumulators=tuple(accs), K0=np.zeros((1, n)),
                             probing=ProbingSignal.zero(1))


def test_delta_matrix_known_cases():
    times = np.arange(4.0)
    const = _craft_dataset(times, np.ones((4, 2)))
    assert np.max(np.abs(delta_matrix(const, 0))) == 0.0
    xs = np.array([[1.0], [2.0], [4.0]])
    ds = _craft_dataset(np.arange(3.0), xs, state_dims=(1,))
    D = delta_matrix(ds, 0)
    assert np.array_equal(D, np.array([[3.0], [12.0]]))  # x_k^2 - x_{k-1}^2


def test_delta_matrix_quadratic_difference_identity():
    rng = _rng(1)
    for _ in range(20):
        X = rng.standard_normal((6, 2))
        ds = _craft_dataset(np.arange(6.0), X)
        D = delta_matrix(ds, 0)
        P = sym_project(rng.standard_normal((2, 2)))
        v = svec(P)
        for k in range(1, 6):
            want = X[k] @ P @ X[k] - X[k - 1] @ P @ X[k - 1]
            assert abs(D[k - 1] @ v - want) < 1e-12 * max(1.0, abs(want))
        # telescoping across the whole record
        total = D @ v
        want = X[-1] @ P @ X[-1] - X[0] @ P @ X[0]
        assert abs(total.sum() - want) < 1e-12 * max(1.0, abs(want))


def test_integral_matrix_constant_and_errors():
    times = np.arange(3.0)
    ds = _craft_dataset(times, np.ones((3, 1)), state_dims=(1,))
    ds.accumulators[0]["xx"][:, 0] = 4.0 * times  # x = 2 constant
    M = integral_matrix(ds, 0, "xx")
    assert np.array_equal(M, np.array([[4.0], [4.0]]))
    with pytest.raises(KeyError):
        integral_matrix(ds, 0, "xu")


def test_pair_transform_identities():
    rng = _rng(2)
    for _ in range(20):
        n = int(rng.integers(1, 5))
        X = rng.standard_normal((5, n))
        S = rng.standard_normal((n, n)) + 2.0 * np.eye(n)
        ds = _craft_dataset(np.arange(5.0), X, state_dims=(n,))
        dsS = _craft_dataset(np.arange(5.0), X @ S.T, state_dims=(n,))
        D = delta_matrix(ds, 0)
        DS = delta_matrix(dsS, 0)
        assert np.max(np.abs(DS - apply_pair_transform(D, S))) < 1e-10
        # pointwise integrand identity for the (A x, B x) family
        A = rng.standard_normal((n, n))
        B = rng.standard_normal((n, n))
        x = rng.standard_normal(n)
        lhs = svec(sym_project(np.outer(A @ x, B @ x)))
        rhs = skron(A, B) @ svec(sym_project(np.outer(x, x)))
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_lqr_cost_value_function():
    from deirl.lyapunov import solve_care_reference

    plant = lin2d_plant(loops=1)
    P, K = solve_care_reference(plant.A, plant.B, plant.Q, plant.R)
    x0 = np.array([1.0, -0.5])
    J = evaluate_lqr_cost(plant, K, x0)
    assert abs(J - x0 @ P @ x0) < 1e-6
    assert evaluate_lqr_cost(plant, K, np.zeros(2)) == pytest.approx(0.0, abs=1e-12)
    J_sub = evaluate_lqr_cost(plant, np.zeros((2, 2)), x0)
    assert J_sub >= x0 @ P @ x0 - 1e-9
    with pytest.raises(ValueError):
        evaluate_lqr_cost(plant, -3.0 * np.eye(2), x0)


def test_dataset_json_round_trip_is_bit_exact():
    plant = lin2d_plant(loops=2)
    ds = simulate_closed_loop(plant, np.zeros((2, 2)), lin2d_probing(), X0,
                              uniform_samples(0.1, 5))
    text = dataset_to_json(ds)
    back = dataset_from_json(text)
    assert back.plant_name == ds.plant_name
    assert back.state_dims == ds.state_dims
    assert np.array_equal(back.times, ds.times)
    assert np.array_equal(back.states, ds.states)
    assert np.array_equal(back.controls, ds.controls)
    for a, b in zip(ds.accumulators, back.accumulators):
        for fam in a:
            assert np.array_equal(a[fam], b[fam])
    assert np.array_equal(back.K0, ds.K0)
    assert back.probing.terms == ds.probing.terms
    # determinism of the encoding itself
    assert dataset_to_json(back) == text

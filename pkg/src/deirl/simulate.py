"""Closed-loop simulation and the trajectory data operators.

Data collection integrates xdot = f(x) + g(x) u under u = -K0 x + d(t) with
an adaptive embedded Runge-Kutta pair, and appends one running integral per
needed quadratic integrand family to the ODE state. The learning regressions
difference those accumulators between sample instants, so every integral
carries solver accuracy instead of quadrature-on-samples accuracy.

For a pair of signals x, y the two data operators are

    delta row k:    (x(t_k) + y(t_{k-1}))^T (x)_s (x(t_k) - y(t_{k-1}))^T
    integral row k: int_{t_{k-1}}^{t_k} x^T (x)_s y^T dtau

with rows living in svec coordinates: the 1 x nbar row for vectors a, b is
svec(pi(a b^T))^T, so row . svec(P) = a^T P b for symmetric P.
"""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .lyapunov import is_hurwitz
from .symkron import build_scheme, skron, svec, sym_project

RTOL = 1e-10
ATOL = 1e-12
DIVERGENCE_BOUND = 1e6

FAMILIES = ("xx", "gu", "w")


@dataclass(frozen=True)
class ProbingSignal:
    """Per-channel sum of sinusoids d(t), one tuple of terms per control channel.

    terms[c] is a tuple of (amplitude, frequency rad/s, phase) triples;
    channel c produces sum_i a_i cos(omega_i t + phi_i). The signal is
    bounded by the per-channel sum of |a_i|.
    """

    terms: tuple

    @property
    def channels(self):
        return len(self.terms)

    @property
    def bound(self):
        return max((sum(abs(a) for a, _w, _p in ch) for ch in self.terms),
                   default=0.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros((self.channels,) + t.shape)
        for c, ch in enumerate(self.terms):
            for a, w, p in ch:
                out[c] += a * np.cos(w * t + p)
        return out

    @staticmethod
    def zero(channels):
        return ProbingSignal(terms=tuple(() for _ in range(channels)))


def lin2d_probing():
    """The probing pair d_1 = cos t, d_2 = 0.1 cos 0.1 t."""
    return ProbingSignal(terms=(((1.0, 1.0, 0.0),), ((0.1, 0.1, 0.0),)))


def uniform_samples(Ts, l):
    """Sample instants t_k = k Ts for k = 0..l."""
    if Ts <= 0.0 or l < 1:
        raise ValueError("need positive sample period and at least one interval")
    return np.arange(l + 1) * float(Ts)


@dataclass(frozen=True)
class TrajectoryDataset:
    """Sampled closed-loop data plus per-loop integral accumulators.

    accumulators[j][family] is an (l+1) x nbar_j array of running integrals
    at the sample instants, for family in ("xx", "gu", "w"): the pairs
    (x_j, x_j), (x_j, g_j u_j) and (x_j, w_j).
    """

    plant_name: str
    state_dims: tuple
    times: np.ndarray = field(repr=False)
    states: np.ndarray = field(repr=False)
    controls: np.ndarray = field(repr=False)
    accumulators: tuple = field(repr=False)
    K0: np.ndarray = field(repr=False)
    probing: ProbingSignal = field(repr=False)

    @property
    def l(self):
        return self.times.size - 1

    @property
    def N(self):
        return len(self.state_dims)

    def state_slice(self, j):
        start = int(sum(self.state_dims[:j]))
        return slice(start, start + int(self.state_dims[j]))

    def loop_states(self, j):
        return self.states[:, self.state_slice(j)]


def _pair_row(a, b):
    # svec(pi(a b^T)) as a length-nbar row
    return svec(sym_project(np.outer(a, b)))


def simulate_closed_loop(plant, K0, d, x0, samples, rtol=RTOL, atol=ATOL,
                         divergence_bound=DIVERGENCE_BOUND):
    """Collect a closed-loop trajectory dataset under u = -K0 x + d(t).

    Parameters
    ----------
    plant : DecentralizedPlant
    K0 : (m, n) ndarray
        Stabilizing gain for the linearization (checked).
    d : ProbingSignal or None
        Exploration input, one channel per control; None means no probing.
    x0 : length-n initial state.
    samples : strictly increasing instants, samples[0] >= 0. The
        integration starts at t = 0 and the horizon is samples[-1].

    Returns
    -------
    TrajectoryDataset
    """
    n, m = plant.n, plant.m
    K0 = np.asarray(K0, dtype=float).reshape(m, n)
    if not is_hurwitz(plant.A - plant.B @ K0, margin=0.0):
        raise ValueError("initial gain does not stabilize the linearization")
    if d is None:
        d = ProbingSignal.zero(m)
    if d.channels != m:
        raise ValueError("probing signal has %d channels, plant has %d controls"
                         % (d.channels, m))
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < 2 or np.any(np.diff(samples) <= 0.0):
        raise ValueError("sample instants must be strictly increasing, length >= 2")
    if samples[0] < 0.0:
        raise ValueError("sample instants must be nonnegative")
    x0 = np.asarray(x0, dtype=float).reshape(n)

    N = plant.N
    nbars = [build_scheme(int(nj)).nbar for nj in plant.state_dims]
    acc_len = 3 * int(np.sum(nbars))
    slices = []
    off = n
    for nbar in nbars:
        fam = {}
        for name in FAMILIES:
            fam[name] = slice(off, off + nbar)
            off += nbar
        slices.append(fam)

    schemes = [build_scheme(int(nj)) for nj in plant.state_dims]
    offmask = [sch.row != sch.col for sch in schemes]
    sqrt2 = np.sqrt(2.0)
    A_blocks = [plant.A_block(j) for j in range(N)]
    state_slices = [plant.state_slice(j) for j in range(N)]

    def control(t, x):
        return -K0 @ x + d(t)

    def _row(a, b, j):
        sch = schemes[j]
        v = 0.5 * (a[sch.row] * b[sch.col] + a[sch.col] * b[sch.row])
        v[offmask[j]] *= sqrt2
        return v

    def rhs(t, z):
        x = z[:n]
        u = control(t, x)
        fx = np.asarray(plant.f(x), dtype=float)
        gx = np.atleast_2d(np.asarray(plant.g(x), dtype=float))
        gu = gx @ u
        dz = np.empty_like(z)
        dz[:n] = fx + gu
        for j in range(N):
            sl = state_slices[j]
            xj = x[sl]
            wj = fx[sl] - A_blocks[j] @ xj
            dz[slices[j]["xx"]] = _row(xj, xj, j)
            dz[slices[j]["gu"]] = _row(xj, gu[sl], j)
            dz[slices[j]["w"]] = _row(xj, wj, j)
        return dz

    z = np.concatenate([x0, np.zeros(acc_len)])
    states = np.empty((samples.size, n))
    acc_store = [{name: np.empty((samples.size, nbars[j])) for name in FAMILIES}
                 for j in range(N)]
    k_out = 0

    def record(z):
        nonlocal k_out
        states[k_out] = z[:n]
        for j in range(N):
            for name in FAMILIES:
                acc_store[j][name][k_out] = z[slices[j][name]]
        k_out += 1

    t_prev = 0.0
    start = 0
    if samples[0] == 0.0:
        record(z)
        start = 1
    for t_next in samples[start:]:
        sol = solve_ivp(rhs, (t_prev, t_next), z, method="DOP853",
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError("integration failed on [%g, %g]: %s"
                               % (t_prev, t_next, sol.message))
        if np.max(np.abs(sol.y[:n])) > divergence_bound:
            raise RuntimeError("state norm exceeded divergence bound %g" % divergence_bound)
        z = sol.y[:, -1]
        t_prev = t_next
        record(z)

    controls = np.empty((samples.size, m))
    for k, t in enumerate(samples):
        controls[k] = control(t, states[k])
    return TrajectoryDataset(
        plant_name=plant.name,
        state_dims=tuple(plant.state_dims),
        times=samples.copy(),
        states=states,
        controls=controls,
        accumulators=tuple(acc_store),
        K0=K0.copy(),
        probing=d)


def delta_matrix(dataset, j):
    """Rows (x_j(t_k) + x_j(t_{k-1}))^T (x)_s (x_j(t_k) - x_j(t_{k-1}))^T."""
    X = dataset.loop_states(j)
    l = dataset.l
    nbar = build_scheme(X.shape[1]).nbar
    D = np.empty((l, nbar))
    for k in range(1, l + 1):
        a = X[k] + X[k - 1]
        b = X[k] - X[k - 1]
        D[k - 1] = skron(a[None, :], b[None, :])[0]
    return D


def integral_matrix(dataset, j, family):
    """Rows of consecutive accumulator differences for one integrand family."""
    if family not in FAMILIES:
        raise KeyError("unknown integrand family %r; have %s" % (family, FAMILIES))
    acc = dataset.accumulators[j][family]
    return np.diff(acc, axis=0)


def apply_pair_transform(M, A, B=None):
    """Right-multiply a data matrix by skron(A, B)^T.

    Implements the transformation identities of the data operators:
    rows built from (A x, A y) equal rows built from (x, y) times
    skron(A, A)^T, and rows from (A x, B x) equal rows from (x, x) times
    skron(A, B)^T.
    """
    A = np.asarray(A, dtype=float)
    B = A if B is None else np.asarray(B, dtype=float)
    return np.asarray(M, dtype=float) @ skron(A, B).T


def evaluate_lqr_cost(plant, K, x0, tol=1e-8, seg=20.0, max_doublings=12,
                      rtol=RTOL, atol=ATOL):
    """Integrate the running cost x^T Q x + u^T R u under u = -K x.

    Doubles the horizon until the last segment's cost increment falls
    below tol. Diagnostic use only.
    """
    n, m = plant.n, plant.m
    K = np.asarray(K, dtype=float).reshape(m, n)
    if not is_hurwitz(plant.A - plant.B @ K, margin=0.0):
        raise ValueError("gain does not stabilize the linearization")
    x0 = np.asarray(x0, dtype=float).reshape(n)

    def rhs(t, z):
        x = z[:n]
        u = -K @ x
        gx = np.atleast_2d(np.asarray(plant.g(x), dtype=float))
        dx = np.asarray(plant.f(x), dtype=float) + gx @ u
        dc = x @ plant.Q @ x + u @ plant.R @ u
        return np.concatenate([dx, [dc]])

    z = np.concatenate([x0, [0.0]])
    t0, t1 = 0.0, seg
    for _ in range(max_doublings):
        sol = solve_ivp(rhs, (t0, t1), z, method="DOP853", rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError("cost integration failed: %s" % sol.message)
        if np.max(np.abs(sol.y[:n])) > DIVERGENCE_BOUND:
            raise RuntimeError("closed loop diverged during cost evaluation")
        increment = sol.y[-1, -1] - z[-1]
        z = sol.y[:, -1]
        if increment < tol:
            return float(z[-1])
        t0, t1 = t1, 2.0 * t1
    raise RuntimeError("cost integral did not settle within the horizon doublings")


# ---------------------------------------------------------------------------
# serialization (bit-exact via hex floats)


def _enc(arr):
    arr = np.asarray(arr, dtype=float)
    flat = [v.hex() for v in arr.ravel().tolist()]
    return {"shape": list(arr.shape), "hex": flat}


def _dec(obj):
    vals = np.array([float.fromhex(h) for h in obj["hex"]], dtype=float)
    return vals.reshape(obj["shape"])


def dataset_to_json(dataset):
    """Serialize a dataset to a JSON string with bit-exact float encoding."""
    doc = {
        "plant_name": dataset.plant_name,
        "state_dims": list(dataset.state_dims),
        "times": _enc(dataset.times),
        "states": _enc(dataset.states),
        "controls": _enc(dataset.controls),
        "accumulators": [
            {name: _enc(acc[name]) for name in FAMILIES}
            for acc in dataset.accumulators
        ],
        "K0": _enc(dataset.K0),
        "probing": [[list(term) for term in ch] for ch in dataset.probing.terms],
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def dataset_from_json(text):
    doc = json.loads(text)
    probing = ProbingSignal(terms=tuple(
        tuple(tuple(term) for term in ch) for ch in doc["probing"]))
    return TrajectoryDataset(
        plant_name=doc["plant_name"],
        state_dims=tuple(doc["state_dims"]),
        times=_dec(doc["times"]),
        states=_dec(doc["states"]),
        controls=_dec(doc["controls"]),
        accumulators=tuple(
            {name: _dec(acc[name]) for name in FAMILIES}
            for acc in doc["accumulators"]),
        K0=_dec(doc["K0"]),
        probing=probing)

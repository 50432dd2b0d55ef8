"""Plant definitions: affine nonlinear systems with an N-loop partition.

A plant is the data of drift f, input map g, the linearization (A, B) at the
origin, and block-diagonal cost weights (Q, R). The loop partition splits
the state into blocks x_j with their own controls u_j; the input map and the
costs are block diagonal across loops while the drift may couple loops
through terms that vanish to first order at the origin.
"""

from dataclasses import dataclass, field

import numpy as np

from .lyapunov import psd_sqrt

_FD_STEP = 1e-5
_ORIGIN_ATOL = 1e-12
_JAC_ATOL = 1e-6


def block_diag(blocks):
    """Assemble a dense block-diagonal matrix from a list of 2-D arrays."""
    blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols))
    r = c = 0
    for b in blocks:
        out[r:r + b.shape[0], c:c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


@dataclass(frozen=True)
class DecentralizedPlant:
    """Affine nonlinear plant xdot = f(x) + g(x) u with an N-loop partition.

    Attributes
    ----------
    name : str
        Identifier used in reports.
    state_dims, control_dims : tuple of int
        Per-loop state and control dimensions; their sums give n and m.
    f : callable
        Drift, length-n vector for a length-n state, f(0) = 0.
    g : callable
        Input map, n x m matrix for a length-n state.
    A, B : ndarray
        Linearization of (f, g) at the origin; B = g(0) is block diagonal
        across loops.
    Q, R : ndarray
        Cost weights, block diagonal across loops; Q_j PSD, R_j PD.
    """

    name: str
    state_dims: tuple
    control_dims: tuple
    f: callable = field(repr=False)
    g: callable = field(repr=False)
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    R: np.ndarray = field(repr=False)

    @property
    def N(self):
        return len(self.state_dims)

    @property
    def n(self):
        return int(sum(self.state_dims))

    @property
    def m(self):
        return int(sum(self.control_dims))

    def state_slice(self, j):
        """0-based slice of loop j's state block."""
        start = int(sum(self.state_dims[:j]))
        return slice(start, start + int(self.state_dims[j]))

    def control_slice(self, j):
        start = int(sum(self.control_dims[:j]))
        return slice(start, start + int(self.control_dims[j]))

    def A_block(self, j):
        sl = self.state_slice(j)
        return self.A[sl, sl]

    def B_block(self, j):
        return self.B[self.state_slice(j), self.control_slice(j)]

    def Q_block(self, j):
        sl = self.state_slice(j)
        return self.Q[sl, sl]

    def R_block(self, j):
        sl = self.control_slice(j)
        return self.R[sl, sl]

    def loop_problem(self, j):
        """The (A_jj, B_jj, Q_j, R_j) LQR quadruple of loop j."""
        return self.A_block(j), self.B_block(j), self.Q_block(j), self.R_block(j)

    def nonlinear_residual(self, x, j):
        """w_j(x) = f_j(x) - A_jj x_j, the drift beyond the loop linear part."""
        x = np.asarray(x, dtype=float)
        sl = self.state_slice(j)
        return self.f(x)[sl] - self.A_block(j) @ x[sl]


def _central_jacobian(f, n, h=_FD_STEP):
    J = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        J[:, i] = (np.asarray(f(e)) - np.asarray(f(-e))) / (2.0 * h)
    return J


def validate_plant(plant):
    """Numeric consistency checks tying (f, g) to (A, B) and the partition.

    Verifies f(0) = 0, the central-difference Jacobian of f at 0 against A,
    g(0) against B, exact block-diagonal tiling of B, Q, R, and per-loop
    cost definiteness. Raises ValueError on the first violation.
    """
    n, m = plant.n, plant.m
    if plant.A.shape != (n, n) or plant.B.shape != (n, m):
        raise ValueError("linearization shapes do not match the partition")
    if plant.Q.shape != (n, n) or plant.R.shape != (m, m):
        raise ValueError("cost shapes do not match the partition")
    f0 = np.asarray(plant.f(np.zeros(n)), dtype=float)
    if f0.shape != (n,) or np.linalg.norm(f0) > _ORIGIN_ATOL:
        raise ValueError("drift does not vanish at the origin (|f(0)| = %.3e)"
                         % np.linalg.norm(f0))
    J = _central_jacobian(plant.f, n)
    if np.max(np.abs(J - plant.A)) > _JAC_ATOL:
        raise ValueError("linearization mismatch: max |Df(0) - A| = %.3e"
                         % np.max(np.abs(J - plant.A)))
    g0 = np.atleast_2d(np.asarray(plant.g(np.zeros(n)), dtype=float))
    if g0.shape != (n, m) or np.max(np.abs(g0 - plant.B)) > _ORIGIN_ATOL:
        raise ValueError("input map at the origin does not match B")
    # exact tiling: off-block entries must be identically zero
    for M, blocks in ((plant.B, [plant.B_block(j) for j in range(plant.N)]),
                      (plant.Q, [plant.Q_block(j) for j in range(plant.N)]),
                      (plant.R, [plant.R_block(j) for j in range(plant.N)])):
        if not np.array_equal(M, block_diag(blocks)):
            raise ValueError("matrix is not block diagonal over the loop partition")
    for j in range(plant.N):
        psd_sqrt(plant.Q_block(j))
        w = np.linalg.eigvalsh(plant.R_block(j))
        if w.min() <= 0.0:
            raise ValueError("loop %d control weight is not positive definite" % (j + 1))
    return plant


def linear_plant(A, B, Q, R, state_dims=None, control_dims=None, name="linear"):
    """Wrap a linear quadruple as a plant; defaults to a single loop."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Q = np.asarray(Q, dtype=float)
    R = np.asarray(R, dtype=float)
    n, m = B.shape
    if state_dims is None:
        state_dims = (n,)
    if control_dims is None:
        control_dims = (m,)
    plant = DecentralizedPlant(
        name=name,
        state_dims=tuple(int(d) for d in state_dims),
        control_dims=tuple(int(d) for d in control_dims),
        f=lambda x: A @ np.asarray(x, dtype=float),
        g=lambda x: B,
        A=A, B=B, Q=Q, R=R)
    return validate_plant(plant)


def lin2d_plant(loops=2):
    """Two decoupled first-order states with mismatched control weights.

    xdot_1 = -x_1 + u_1, xdot_2 = -0.1 x_2 + u_2, Q = I, R = diag(1, 10).
    With loops=1 the plant is treated as one joint loop (the EIRL view);
    with loops=2 each state is its own loop (the decentralized view).
    """
    if loops == 1:
        dims = ((2,), (2,))
    elif loops == 2:
        dims = ((1, 1), (1, 1))
    else:
        raise ValueError("loops must be 1 or 2")
    return linear_plant(np.diag([-1.0, -0.1]), np.eye(2), np.eye(2),
                        np.diag([1.0, 10.0]), dims[0], dims[1],
                        name="lin2d[%d-loop]" % loops)


def synthetic2loop_plant(stiffness=0.2, coupling=0.1):
    """Synthetic two-loop nonlinear plant with bandwidth and scale separation.

    Loop 1 is scalar with a cubic stiffness term; loop 2 is second order
    with a weakly actuated slow state and cubic/cross terms. All
    nonlinearities vanish to first order at the origin, so the
    linearization is exactly block diagonal. stiffness scales the in-loop
    cubic terms and coupling the cross-loop quadratic terms; both zero
    reduces the plant to two independent linear loops.
    """
    A11 = np.array([[-1.0]])
    A22 = np.array([[-1.0, 0.2], [0.0, -0.1]])
    B11 = np.array([[1.0]])
    B22 = np.array([[1.0], [0.1]])
    A = block_diag([A11, A22])
    B = block_diag([B11, B22])
    ka, kc = float(stiffness), float(coupling)

    def f(x):
        x = np.asarray(x, dtype=float)
        x1, x2, x3 = x
        return np.array([
            -x1 - ka * x1 ** 3 + kc * x2 ** 2,
            -x2 + 0.2 * x3 - ka * x2 ** 3 + kc * x1 ** 2,
            -0.1 * x3 - ka * x3 ** 3 + kc * x1 * x2 ** 2,
        ])

    plant = DecentralizedPlant(
        name="synthetic2loop",
        state_dims=(1, 2),
        control_dims=(1, 1),
        f=f,
        g=lambda x: B,
        A=A, B=B, Q=np.eye(3), R=np.eye(2))
    return validate_plant(plant)

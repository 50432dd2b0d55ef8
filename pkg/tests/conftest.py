"""Shared random-instance builders for the learning-path tests."""

import numpy as np

from deirl.mee import modulation_spec
from deirl.plants import block_diag, linear_plant
from deirl.simulate import ProbingSignal, simulate_closed_loop, uniform_samples


def random_orthogonal(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def random_modulation_blocks(rng, state_dims):
    """Well-conditioned per-loop blocks: orthogonal times modest diagonal."""
    blocks = []
    for nj in state_dims:
        d = np.diag(10.0 ** rng.uniform(-0.7, 0.7, size=int(nj)))
        blocks.append(random_orthogonal(rng, int(nj)) @ d)
    return blocks


def random_linear_instance(rng, max_loops=2):
    """Stable coupled linear plant, an excited dataset, and a modulation.

    States stay order one by construction so absolute comparison
    tolerances across transformed datasets remain meaningful.
    """
    N = int(rng.integers(1, max_loops + 1))
    state_dims = tuple(int(rng.integers(1, 3)) for _ in range(N))
    control_dims = (1,) * N
    n = sum(state_dims)
    A = rng.uniform(-1.0, 1.0, size=(n, n))
    shift = max(np.real(np.linalg.eigvals(A)).max(), 0.0) + rng.uniform(0.3, 0.8)
    A = A - shift * np.eye(n)
    B = block_diag([(rng.uniform(0.5, 1.5, size=(int(nj), 1))
                     * rng.choice([-1.0, 1.0], size=(int(nj), 1)))
                    for nj in state_dims])
    plant = linear_plant(A, B, np.eye(n), np.eye(N),
                         state_dims=state_dims, control_dims=control_dims,
                         name="fuzz")
    K0 = np.zeros((N, n))
    terms = tuple(tuple((float(10.0 ** rng.uniform(-0.5, 0.3)),
                         float(10.0 ** rng.uniform(-0.5, 0.7)),
                         float(rng.uniform(0.0, 2.0 * np.pi)))
                        for _ in range(2))
                  for _ in range(N))
    d = ProbingSignal(terms=terms)
    x0 = rng.uniform(-1.0, 1.0, size=n)
    nbar_max = max(nj * (nj + 1) // 2 for nj in state_dims)
    samples = uniform_samples(float(rng.uniform(0.1, 0.3)), nbar_max + 3)
    dataset = simulate_closed_loop(plant, K0, d, x0, samples)
    spec = modulation_spec(random_modulation_blocks(rng, state_dims))
    return plant, K0, dataset, spec

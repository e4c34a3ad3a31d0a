"""Monte Carlo oracle for the gap-probability expectations.

For the Gaussian weight the source tilt is exactly a matrix shift: the
density is proportional to e^{-Tr(M-A)^2/2}, so sampling is A plus a
Hermitian matrix with standard normal diagonal and complex off-diagonal
entries of variance one half per real part.  Only the Gaussian weight is
supported; any other weight would need an MCMC sampler whose own convergence
would have to be validated, defeating the point of an oracle.

Streams use the counter-based Philox generator with jumped substreams per
batch, so estimates are bit-reproducible for a given seed regardless of how
batches are scheduled.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import NamedTuple

import numpy as np

from .weights import GaussianWeight, IntervalSet
from .matrix_model import SourceModel, ExpectationQuery, expectation

BATCH = 20000


class McEstimate(NamedTuple):
    mean: float
    stderr: float
    n: int
    seed: int


class CrossCheck(NamedTuple):
    mc: McEstimate
    quad: float
    z: float


def _rng_for_batch(seed, batch_index):
    return np.random.Generator(np.random.Philox(key=seed).jumped(batch_index))


def _hermitian_batch(rng, n, d):
    X = rng.standard_normal((n, d, d))
    Y = rng.standard_normal((n, d, d))
    Xt = np.swapaxes(X, 1, 2)
    Yt = np.swapaxes(Y, 1, 2)
    return (X + Xt) / 2 + 1j * (Y - Yt) / 2


def sample_spiked_eigenvalues(d, a, seed):
    """Eigenvalues of A + H for one draw; a lists the nonzero eigenvalues of
    A (padded with zeros to dimension d)."""
    a = list(a)
    if len(a) > d:
        raise ValueError("more sources than dimensions")
    rng = _rng_for_batch(seed, 0)
    H = _hermitian_batch(rng, 1, d)[0]
    A = np.diag(np.array(a + [0.0] * (d - len(a)), dtype=float))
    return np.linalg.eigvalsh(A + H)


def estimate_expectation(d, a, E, s, N, seed, workers=1):
    """Sample mean of prod_j (1 - s chi_E(lambda_j)) over N spiked draws."""
    if N < 1000:
        raise ValueError("need N >= 1000")
    E = E if isinstance(E, IntervalSet) else IntervalSet(E)
    a = [float(v) for v in a]
    if len(a) > d:
        raise ValueError("more sources than dimensions")
    A = np.array(a + [0.0] * (d - len(a)), dtype=float)
    sizes = []
    left = N
    while left > 0:
        take = min(BATCH, left)
        sizes.append(take)
        left -= take

    def run_batch(idx_take):
        idx, take = idx_take
        rng = _rng_for_batch(seed, idx)
        H = _hermitian_batch(rng, take, d)
        H += np.diag(A)[None, :, :]
        lam = np.linalg.eigvalsh(H)
        v = np.prod(1.0 - s * E.indicator(lam), axis=1)
        return float(v.sum()), float((v * v).sum())

    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run_batch, jobs))
    else:
        parts = [run_batch(j) for j in jobs]
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / N
    var = max(0.0, (s2 - N * mean * mean) / (N - 1))
    stderr = math.sqrt(var / N)
    return McEstimate(mean, stderr, N, seed)


def cross_check(d, a, E, s, N, seed, workers=1, quad=None):
    """|mc - quadrature| in units of the Monte Carlo standard error.

    quad may be supplied to compare against a precomputed (or deliberately
    corrupted) value; by default it is the determinant-pipeline expectation.
    """
    est = estimate_expectation(d, a, E, s, N, seed, workers)
    if quad is None:
        model = SourceModel(d, [(v, 1) for v in a], GaussianWeight())
        quad = expectation(ExpectationQuery(model, E, s))
    diff = abs(est.mean - quad)
    if est.stderr == 0.0:
        z = 0.0 if diff == 0.0 else math.inf
    else:
        z = diff / est.stderr
    return CrossCheck(est, float(quad), z)

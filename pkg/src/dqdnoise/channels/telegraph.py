"""Monte Carlo estimate of the telegraph-noise dephasing kernel.

Each trajectory is a +-1 signal with a uniformly random initial sign that
flips at the events of a Poisson process of rate ``1/(2 tau)``. A qubit
driven by ``Delta(t) sigma_z`` with that signal acquires the relative phase
``2 int_0^t Delta dt'``; the kernel is the ensemble mean of its cosine.

Trajectories are simulated in fixed-size chunks, each with its own child
seed spawned from ``seed``, and reduced in chunk order, so the estimate does
not depend on ``workers``.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameter, InvalidSampleCount

CHUNK_SIZE = 10_000


@dataclass(frozen=True)
class KernelEstimate:
    t: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_traj: int
    seed: int

    def z_scores(self, reference) -> np.ndarray:
        """``|mean - reference| / stderr``; 0 where both difference and stderr vanish."""
        diff = np.abs(self.mean - np.asarray(reference, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            z = diff / self.stderr
        return np.where(diff == 0.0, 0.0, z)


def _phase_integrals(rng: np.random.Generator, n: int, rate: float, t_grid: np.ndarray) -> np.ndarray:
    """``int_0^t m(t') dt'`` for ``n`` trajectories at each grid time, shape (n, len(t_grid))."""
    t_max = float(t_grid.max())
    sign0 = rng.choice(np.array([-1.0, 1.0]), size=n)
    mean_flips = rate * t_max
    width = int(math.ceil(mean_flips + 8.0 * math.sqrt(mean_flips) + 16))
    times = np.cumsum(rng.exponential(1.0 / rate, size=(n, width)), axis=1)
    # Rarely a row needs more flips than the first block provides.
    while times.size and np.any(times[:, -1] < t_max):
        more = np.cumsum(rng.exponential(1.0 / rate, size=(n, width)), axis=1)
        times = np.hstack([times, times[:, -1:] + more])
    edges = np.hstack([np.zeros((n, 1)), times])
    alternating = np.where(np.arange(edges.shape[1] - 1) % 2 == 0, 1.0, -1.0)
    out = np.empty((n, t_grid.size))
    for j, t in enumerate(t_grid):
        seg = np.diff(np.minimum(edges, t), axis=1)
        out[:, j] = seg @ alternating
    return sign0[:, None] * out


def _chunk_sums(args):
    seed_seq, n, rate, t_grid = args
    rng = np.random.default_rng(seed_seq)
    c = np.cos(2.0 * _phase_integrals(rng, n, rate, t_grid))
    return c.sum(axis=0), (c * c).sum(axis=0)


def rtn_monte_carlo_kernel(tau: float, t_grid, n_traj: int, seed: int,
                           workers: int = 1) -> KernelEstimate:
    """Estimate the dephasing kernel on ``t_grid`` from ``n_traj`` telegraph trajectories.

    Returns the per-point mean and its standard error ``std / sqrt(n_traj)``.
    """
    if not isinstance(n_traj, (int, np.integer)) or n_traj < 1:
        raise InvalidSampleCount(f"n_traj must be a positive integer, got {n_traj!r}")
    if not tau > 0:
        raise InvalidParameter(f"tau must be > 0, got {tau!r}")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(t_grid < 0):
        raise InvalidParameter("t_grid must be >= 0")
    n_traj = int(n_traj)
    rate = 1.0 / (2.0 * tau)

    sizes = [CHUNK_SIZE] * (n_traj // CHUNK_SIZE)
    if n_traj % CHUNK_SIZE:
        sizes.append(n_traj % CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(ss, n, rate, t_grid) for ss, n in zip(children, sizes)]

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_sums, jobs))
    else:
        parts = [_chunk_sums(j) for j in jobs]

    total = np.zeros(t_grid.size)
    total_sq = np.zeros(t_grid.size)
    for s1, s2 in parts:
        total += s1
        total_sq += s2
    mean = total / n_traj
    if n_traj > 1:
        var = np.maximum(total_sq - n_traj * mean * mean, 0.0) / (n_traj - 1)
        stderr = np.sqrt(var / n_traj)
    else:
        stderr = np.zeros(t_grid.size)
    return KernelEstimate(t=t_grid, mean=mean, stderr=stderr, n_traj=n_traj, seed=seed)

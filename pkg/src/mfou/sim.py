"""Trajectory synthesis.

Exact Gaussian sampling of the multivariate fractional OU process and
of multivariate fBm on a uniform grid, via Cholesky factorization of
the joint Gram matrix, plus an Euler-Maruyama scheme driven by exactly
simulated fBm increments.

The Gram matrices are assembled from stationary lag tables: each
(i, j) block is Toeplitz, so only n+1 distinct covariance values per
ordered pair are ever computed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from . import kernels
from .model import ModelParams

__all__ = [
    "SamplingGrid",
    "Trajectory",
    "GramFactor",
    "rng_for",
    "gram_mfou",
    "gram_mfbm_increments",
    "sample",
    "simulate_mfou_exact",
    "simulate_mfbm",
    "simulate_mfou_euler",
    "stationary_cov_matrix",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

# exact sampling refuses Gram matrices larger than this (d * points)
MAX_EXACT_DIM = 20000

JITTER_LADDER = (0.0, 1e-12, 1e-10, 1e-8)


@dataclass(frozen=True)
class SamplingGrid:
    """Uniform grid t_k = k * delta, k = 0..n."""

    n: int
    delta: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.delta <= 0:
            raise ValueError("delta must be > 0")

    @property
    def horizon(self) -> float:
        return self.n * self.delta

    def times(self) -> np.ndarray:
        return self.delta * np.arange(self.n + 1)


@dataclass
class Trajectory:
    """Sampled path: values[i, k] = component i at time k * delta."""

    grid: SamplingGrid
    values: np.ndarray  # (d, n + 1)
    origin: str  # "mfBm" | "mfOU-exact" | "mfOU-euler"
    seed: int


@dataclass
class GramFactor:
    """Lower-triangular Cholesky factor of a joint Gram matrix."""

    L: np.ndarray
    jitter: float
    layout: str  # "levels" (d blocks of n+1 points) | "increments" (d blocks of n)

    @property
    def dim(self) -> int:
        return self.L.shape[0]


def rng_for(seed: int, *indices: int) -> np.random.Generator:
    """Counter-based generator for a (seed, index...) substream.

    The same arguments always produce the same stream, independent of
    thread count or call order, which is what makes Monte Carlo runs
    reproducible under any parallel schedule.
    """
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1),
                                spawn_key=tuple(int(i) for i in indices))
    return np.random.Generator(np.random.Philox(ss))


def _cholesky_with_jitter(G: np.ndarray) -> tuple[np.ndarray, float]:
    scale = np.trace(G) / G.shape[0]
    for level in JITTER_LADDER:
        try:
            L = np.linalg.cholesky(G + level * scale * np.eye(G.shape[0]))
            return L, level * scale
        except np.linalg.LinAlgError:
            continue
    raise np.linalg.LinAlgError(
        "Gram not positive definite (inadmissible joint parameters or kernel bug)"
    )


def gram_mfou(params: ModelParams, grid: SamplingGrid) -> GramFactor:
    """Cholesky factor of the d(n+1) Gram of stacked process levels."""
    params.validate()
    d, n = params.d, grid.n
    dim = d * (n + 1)
    if dim > MAX_EXACT_DIM:
        raise ValueError(
            f"exact simulation refused: Gram dimension {dim} > {MAX_EXACT_DIM}; "
            "use the Euler scheme for long grids"
        )
    G = np.empty((dim, dim))
    for i in range(d):
        for j in range(i, d):
            if i == j:
                r = kernels.auto_cov_table(
                    params.H[i], params.alpha[i], params.nu[i], grid.delta, n)
                block = toeplitz(r)
            else:
                r12, r21 = kernels.cross_cov_table(params.pair(i, j), grid.delta, n)
                # entry [k, l] = Cov(Y^i_{k delta}, Y^j_{l delta})
                block = toeplitz(r12, r21)
            G[i * (n + 1):(i + 1) * (n + 1), j * (n + 1):(j + 1) * (n + 1)] = block
            if j > i:
                G[j * (n + 1):(j + 1) * (n + 1), i * (n + 1):(i + 1) * (n + 1)] = block.T
    L, jitter = _cholesky_with_jitter(G)
    return GramFactor(L=L, jitter=jitter, layout="levels")


def _increment_cov_table(H1, H2, rho, eta12, delta, n):
    """g(k) = Cov(B1_{(k+1)d} - B1_{kd}, B2_d - B2_0) for k = -(n-1)..(n-1)."""
    k = np.arange(-(n - 1), n)

    def c(t, s):
        return kernels.mfbm_cross_cov(t, s, H1, H2, rho, eta12)

    g = (c((k + 1) * delta, delta) - c(k * delta, delta)
         - c((k + 1) * delta, 0.0) + c(k * delta, 0.0))
    return k, np.atleast_1d(g)


def gram_mfbm_increments(H, rho, eta, grid: SamplingGrid) -> GramFactor:
    """Cholesky factor of the d*n Gram of stacked fBm increments."""
    H = np.atleast_1d(np.asarray(H, dtype=float))
    rho = np.atleast_2d(np.asarray(rho, dtype=float))
    eta = np.atleast_2d(np.asarray(eta, dtype=float))
    d, n = len(H), grid.n
    dim = d * n
    if dim > MAX_EXACT_DIM:
        raise ValueError(f"Gram dimension {dim} > {MAX_EXACT_DIM}")
    G = np.empty((dim, dim))
    for i in range(d):
        for j in range(d):
            k, g = _increment_cov_table(H[i], H[j], rho[i, j], eta[i, j],
                                        grid.delta, n)
            # entry [a, b] = g(a - b)
            pos = g[n - 1:]          # k >= 0
            neg = g[n - 1::-1]       # k <= 0
            G[i * n:(i + 1) * n, j * n:(j + 1) * n] = toeplitz(pos, neg)
    L, jitter = _cholesky_with_jitter(G)
    return GramFactor(L=L, jitter=jitter, layout="increments")


def sample(factor: GramFactor, seed: int, count: int) -> np.ndarray:
    """count independent draws L @ z, shape (count, dim).

    Draw m comes from the substream keyed by (seed, m), so any subset
    of draws can be regenerated independently and in parallel.
    """
    out = np.empty((count, factor.dim))
    for m in range(count):
        z = rng_for(seed, m).standard_normal(factor.dim)
        out[m] = factor.L @ z
    return out


_factor_cache: dict[str, GramFactor] = {}
_MAX_CACHED_FACTORS = 2


def _cache_get(key: str, build) -> GramFactor:
    if key not in _factor_cache:
        while len(_factor_cache) >= _MAX_CACHED_FACTORS:
            _factor_cache.pop(next(iter(_factor_cache)))
        _factor_cache[key] = build()
    return _factor_cache[key]


def _cached_gram_mfou(params: ModelParams, grid: SamplingGrid) -> GramFactor:
    key = json.dumps(["mfou", params.to_json(), grid.n, grid.delta])
    return _cache_get(key, lambda: gram_mfou(params, grid))


def _cached_gram_mfbm_increments(H, rho, eta, grid: SamplingGrid) -> GramFactor:
    key = json.dumps(["mfbm-inc", np.asarray(H).tolist(),
                      np.asarray(rho).tolist(), np.asarray(eta).tolist(),
                      grid.n, grid.delta])
    return _cache_get(key, lambda: gram_mfbm_increments(H, rho, eta, grid))


def simulate_mfou_exact(params: ModelParams, grid: SamplingGrid, seed: int,
                        replicate: int = 0) -> Trajectory:
    """One exact stationary trajectory; the Gram factor is cached."""
    factor = _cached_gram_mfou(params, grid)
    z = rng_for(seed, replicate).standard_normal(factor.dim)
    values = (factor.L @ z).reshape(params.d, grid.n + 1)
    return Trajectory(grid=grid, values=values, origin="mfOU-exact", seed=seed)


def simulate_mfbm(H, rho, eta, grid: SamplingGrid, seed: int,
                  replicate: int = 0) -> Trajectory:
    """Exact multivariate fBm path started at 0 in every component."""
    H = np.atleast_1d(np.asarray(H, dtype=float))
    factor = _cached_gram_mfbm_increments(H, rho, eta, grid)
    z = rng_for(seed, replicate).standard_normal(factor.dim)
    inc = (factor.L @ z).reshape(len(H), grid.n)
    values = np.concatenate([np.zeros((len(H), 1)), np.cumsum(inc, axis=1)], axis=1)
    return Trajectory(grid=grid, values=values, origin="mfBm", seed=seed)


def stationary_cov_matrix(params: ModelParams) -> np.ndarray:
    """d x d lag-zero covariance of the stationary process."""
    d = params.d
    S = np.empty((d, d))
    for i in range(d):
        S[i, i] = kernels.fou_variance(params.H[i], params.alpha[i], params.nu[i])
        for j in range(i + 1, d):
            S[i, j] = S[j, i] = kernels.stationary_cov(params.pair(i, j))
    return S


def simulate_mfou_euler(params: ModelParams, grid: SamplingGrid, seed: int,
                        substeps: int = 1, replicate: int = 0) -> Trajectory:
    """Euler-Maruyama path with mean-reverting drift -alpha * Y.

    The driving fBm increments are simulated exactly on a grid
    ``substeps`` times finer than the observation grid; the initial
    state is a stationary draw, and the returned trajectory is
    subsampled back to the observation grid.
    """
    params.validate()
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    d, n = params.d, grid.n
    nf = n * substeps
    h = grid.delta / substeps
    fine = SamplingGrid(n=nf, delta=h)
    values = simulate_mfou_euler_batch(params, grid, seed, substeps,
                                       [replicate])[0]
    return Trajectory(grid=grid, values=values, origin="mfOU-euler", seed=seed)


def simulate_mfou_euler_batch(params: ModelParams, grid: SamplingGrid, seed: int,
                              substeps: int, replicates) -> np.ndarray:
    """Euler paths for many replicates at once, shape (M, d, n+1).

    Replicate m reproduces :func:`simulate_mfou_euler` with the same
    (seed, m) bit for bit; only the recursion is batched.
    """
    params.validate()
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    replicates = list(replicates)
    d, n = params.d, grid.n
    nf = n * substeps
    h = grid.delta / substeps
    fine = SamplingGrid(n=nf, delta=h)
    inc_factor = _cached_gram_mfbm_increments(params.H, params.rho, params.eta, fine)
    dim = inc_factor.dim
    Z = np.empty((dim + d, len(replicates)))
    for c, m in enumerate(replicates):
        Z[:, c] = rng_for(seed, m).standard_normal(dim + d)
    inc = (inc_factor.L @ Z[d:]).reshape(d, nf, -1)
    y0 = np.linalg.cholesky(stationary_cov_matrix(params)) @ Z[:d]
    alpha = params.alpha[:, None]
    nu = params.nu[:, None]
    Y = np.empty((d, nf + 1, len(replicates)))
    Y[:, 0] = y0
    for k in range(nf):
        Y[:, k + 1] = Y[:, k] * (1.0 - alpha * h) + nu * inc[:, k]
    return np.moveaxis(Y[:, ::substeps], 2, 0)


# ---------------------------------------------------------------------------
# trajectory persistence
# ---------------------------------------------------------------------------

def write_trajectory_csv(traj: Trajectory, path, metadata: dict | None = None):
    """CSV with header t,Y1,...,Yd plus a metadata sidecar JSON."""
    d = traj.values.shape[0]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"Y{i + 1}" for i in range(d)])
        for k, t in enumerate(traj.grid.times()):
            w.writerow([f"{t:.17g}"] + [f"{traj.values[i, k]:.17g}" for i in range(d)])
    meta = {
        "n": traj.grid.n,
        "delta": traj.grid.delta,
        "origin": traj.origin,
        "seed": traj.seed,
    }
    if metadata:
        meta.update(metadata)
    with open(str(path) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2)


def read_trajectory_csv(path) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    d = len(header) - 1
    arr = np.array([[float(x) for x in row] for row in data])
    t = arr[:, 0]
    n = len(t) - 1
    delta = (t[-1] - t[0]) / n if n else 1.0
    try:
        with open(str(path) + ".meta.json") as fh:
            meta = json.load(fh)
        origin, seed = meta.get("origin", "unknown"), meta.get("seed", 0)
    except FileNotFoundError:
        origin, seed = "unknown", 0
    return Trajectory(grid=SamplingGrid(n=n, delta=float(delta)),
                      values=arr[:, 1:].T.copy(), origin=origin, seed=seed)

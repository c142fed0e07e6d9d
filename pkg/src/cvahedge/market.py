"""Synthetic market generation: stock paths, bank account and default times.

Random numbers are drawn in fixed-size blocks of paths.  Every block owns its
own counter-based streams keyed by ``(seed, block index, stream id)``, so the
draws for path ``l`` depend only on ``seed`` and ``l``: changing the number of
paths or the number of worker threads never changes an existing path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BLOCK_SIZE = 2048

# stream ids inside a block
_DIFFUSION, _JUMP_COUNT, _JUMP_SIZE, _DEFAULT = range(4)


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    tK: float
    steps_per_year: int

    def __post_init__(self):
        if self.steps_per_year < 1:
            raise ValueError("steps_per_year must be a positive integer")
        if not self.tK > self.t0:
            raise ValueError("grid end must be after grid start")

    @property
    def n_steps(self) -> int:
        return max(1, int(round((self.tK - self.t0) * self.steps_per_year)))

    @property
    def dt(self) -> float:
        return (self.tK - self.t0) / self.n_steps

    @property
    def dates(self) -> np.ndarray:
        dates = self.t0 + self.dt * np.arange(self.n_steps + 1)
        dates[-1] = self.tK
        return dates


@dataclass(frozen=True)
class GBMParams:
    mu: float
    r: float
    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


@dataclass(frozen=True)
class MertonParams:
    r: float
    sigma: float
    mu_j: float
    sigma_j: float
    xi: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.sigma_j < 0:
            raise ValueError("jump volatility must be non-negative")
        if self.xi < 0:
            raise ValueError("jump intensity must be non-negative")

    @property
    def mean_jump(self) -> float:
        """Average relative jump size E[e^J] - 1."""
        return math.expm1(self.mu_j + 0.5 * self.sigma_j**2)

    @property
    def log_drift(self) -> float:
        """Risk-neutral drift of log S."""
        return self.r - self.xi * self.mean_jump - 0.5 * self.sigma**2


@dataclass(frozen=True)
class PathSet:
    values: np.ndarray  # shape (L, K + 1)
    seed: int
    grid: TimeGrid

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]


def bank_account(r: float, t0: float, t):
    """M(t) for dM = r M dt with M(t0) = 1."""
    t = np.asarray(t, dtype=float)
    if np.any(t < t0):
        raise ValueError("bank account is defined for t >= t0 only")
    return np.exp(r * (t - t0))


def _generator(seed: int, block: int, stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, block, stream])
    return np.random.Generator(np.random.Philox(ss))


def _blocks(n_paths: int, block_size: int = BLOCK_SIZE):
    for b, start in enumerate(range(0, n_paths, block_size)):
        yield b, start, min(block_size, n_paths - start)


def diffusion_normals(seed: int, block: int, n_steps: int, size: int) -> np.ndarray:
    # always draw the full block so a path's draws do not depend on L
    z = _generator(seed, block, _DIFFUSION).standard_normal((BLOCK_SIZE, n_steps))
    return z[:size]


def gbm_block(params: GBMParams, s0: float, grid: TimeGrid, seed: int, block: int, size: int):
    dt = grid.dt
    z = diffusion_normals(seed, block, grid.n_steps, size)
    growth = 1.0 + params.mu * dt + params.sigma * math.sqrt(dt) * z
    out = np.empty((size, grid.n_steps + 1))
    out[:, 0] = s0
    np.cumprod(growth, axis=1, out=out[:, 1:])
    out[:, 1:] *= s0
    return out


def merton_block(params: MertonParams, s0: float, grid: TimeGrid, seed: int, block: int, size: int,
                 return_jumps: bool = False):
    dt = grid.dt
    K = grid.n_steps
    z = diffusion_normals(seed, block, K, size)
    counts = _generator(seed, block, _JUMP_COUNT).poisson(params.xi * dt, (BLOCK_SIZE, K))[:size]
    zj = _generator(seed, block, _JUMP_SIZE).standard_normal((BLOCK_SIZE, K))[:size]
    # the sum of n iid N(mu_j, sigma_j^2) sizes is N(n mu_j, n sigma_j^2)
    jumps = counts * params.mu_j + params.sigma_j * np.sqrt(counts) * zj
    dlog = params.log_drift * dt + params.sigma * math.sqrt(dt) * z + jumps
    out = np.empty((size, K + 1))
    out[:, 0] = 0.0
    np.cumsum(dlog, axis=1, out=out[:, 1:])
    out = s0 * np.exp(out)
    out[:, 0] = s0
    if return_jumps:
        return out, counts
    return out


def default_block(hazard: float, seed: int, block: int, size: int) -> np.ndarray:
    u = _generator(seed, block, _DEFAULT).random(BLOCK_SIZE)[:size]
    if hazard == 0:
        return np.full(size, np.inf)
    # 1 - u lies in (0, 1], so the log is finite
    return -np.log1p(-u) / hazard


def _check_inputs(s0: float, n_paths: int):
    if not s0 > 0:
        raise ValueError("initial stock value must be positive")
    if n_paths < 1:
        raise ValueError("need at least one path")


def simulate_gbm(params: GBMParams, s0: float, grid: TimeGrid, n_paths: int, seed: int) -> PathSet:
    """Euler scheme on the price level: S_k = S_{k-1} (1 + mu dt + sigma sqrt(dt) Z)."""
    _check_inputs(s0, n_paths)
    parts = [gbm_block(params, s0, grid, seed, b, size) for b, _, size in _blocks(n_paths)]
    return PathSet(np.concatenate(parts), seed, grid)


def simulate_merton(params: MertonParams, s0: float, grid: TimeGrid, n_paths: int, seed: int) -> PathSet:
    """Euler scheme on log S with Poisson jump counts per step and normal log-jumps."""
    _check_inputs(s0, n_paths)
    parts = [merton_block(params, s0, grid, seed, b, size) for b, _, size in _blocks(n_paths)]
    return PathSet(np.concatenate(parts), seed, grid)


def simulate_default_times(hazard: float, n_paths: int, seed: int) -> np.ndarray:
    """First jump times of a Poisson process with constant intensity."""
    if hazard < 0:
        raise ValueError("hazard rate must be non-negative")
    return np.concatenate([default_block(hazard, seed, b, size) for b, _, size in _blocks(n_paths)])

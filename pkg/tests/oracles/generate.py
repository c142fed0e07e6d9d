"""Regenerate the frozen Monte Carlo oracle values in ``frozen.py``.

Independent of the package: exact terminal sampling with plain numpy, no pricers.
Run ``python3 tests/oracles/generate.py`` (about a minute).
"""

import numpy as np

N, CHUNK = 10_000_000, 1_000_000
S0, K, R, SIGMA, T = 100.0, 95.0, 0.1, 0.2, 1.0
MU_J, SIGMA_J, XI = -0.125, 0.1, 0.1


def mc(sampler, strike, seed):
    rng = np.random.default_rng(seed)
    total, total_sq = 0.0, 0.0
    for _ in range(N // CHUNK):
        x = np.exp(-R * T) * np.maximum(sampler(rng, CHUNK) - strike, 0.0)
        total += x.sum()
        total_sq += (x * x).sum()
    mean = total / N
    return mean, np.sqrt((total_sq / N - mean**2) / N)


def gbm(rng, n):
    return S0 * np.exp((R - 0.5 * SIGMA**2) * T + SIGMA * np.sqrt(T) * rng.standard_normal(n))


def merton(rng, n):
    kappa = np.exp(MU_J + 0.5 * SIGMA_J**2) - 1.0
    jumps = rng.poisson(XI * T, n)
    jump_sum = MU_J * jumps + SIGMA_J * np.sqrt(jumps) * rng.standard_normal(n)
    drift = (R - XI * kappa - 0.5 * SIGMA**2) * T
    return S0 * np.exp(drift + SIGMA * np.sqrt(T) * rng.standard_normal(n) + jump_sum)


if __name__ == "__main__":
    print("BS_CALL_K95", mc(gbm, K, 1))
    print("MERTON_CALL_ATM", mc(merton, 100.0, 2))
    print("BS_CALL_ATM_SAME_PATHS", mc(gbm, 100.0, 2))

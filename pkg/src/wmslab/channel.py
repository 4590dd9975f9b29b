"""BSC and BIAWGN channel models producing LLR vectors.

Sign convention: BPSK maps bit 0 to +1, so a positive LLR favors bit 0.
All logarithms are natural.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Bsc:
    """Binary symmetric channel with crossover probability p in (0, 0.5)."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p < 0.5:
            raise ValueError(f"BSC crossover must lie in (0, 0.5), got {self.p}")

    @property
    def llr_magnitude(self):
        return math_log1mp(self.p)


@dataclass(frozen=True)
class Biawgn:
    """Binary-input AWGN channel, unit-energy BPSK, noise std sigma > 0."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"BIAWGN sigma must be positive, got {self.sigma}")


ChannelSpec = Bsc | Biawgn


def math_log1mp(p):
    return float(np.log((1.0 - p) / p))


def _as_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample(spec: ChannelSpec, codeword, seed):
    """Noisy observation of a transmitted codeword; deterministic given seed.

    BSC returns flipped bits (uint8); BIAWGN returns y = (1-2x) + noise.
    """
    rng = _as_rng(seed)
    bits = np.asarray(codeword, dtype=np.uint8)
    if isinstance(spec, Bsc):
        flips = rng.random(bits.shape) < spec.p
        return bits ^ flips.astype(np.uint8)
    noise = rng.normal(0.0, spec.sigma, size=bits.shape)
    return (1.0 - 2.0 * bits) + noise


def llr(spec: ChannelSpec, observation):
    """Channel LLR vector gamma from an observation."""
    if isinstance(spec, Bsc):
        y = np.asarray(observation, dtype=np.float64)
        return (1.0 - 2.0 * y) * math_log1mp(spec.p)
    y = np.asarray(observation, dtype=np.float64)
    return 2.0 * y / spec.sigma**2


def sample_llr(spec: ChannelSpec, codeword, seed):
    """Convenience: sample an observation and return its LLR vector."""
    return llr(spec, sample(spec, codeword, seed))


def all_minus_one_llr(n):
    """Constant LLR vector of -1's (the adversarial counterexample input)."""
    return -np.ones(n, dtype=np.float64)


def perturb_ties(gamma, seed, eta=1e-9):
    """Add i.i.d. uniform noise in [-eta, eta] to break exact ties."""
    rng = _as_rng(seed)
    gamma = np.asarray(gamma, dtype=np.float64)
    return gamma + rng.uniform(-eta, eta, size=gamma.shape)


def llr_sampler(spec: ChannelSpec):
    """All-zeros-codeword LLR sampler f(size, rng) for density evolution."""
    if isinstance(spec, Bsc):
        a = math_log1mp(spec.p)
        p = spec.p

        def draw(size, rng):
            return np.where(rng.random(size) < p, -a, a)
    else:
        sigma = spec.sigma

        def draw(size, rng):
            return 2.0 * rng.normal(1.0, sigma, size=size) / sigma**2

    return draw

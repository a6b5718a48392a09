"""Monte Carlo samplers for the two-group model.

Single-spin-flip Glauber dynamics: pick one of the N particles uniformly
at random, compute the energy change of flipping it, flip with
probability 1/(1 + exp(dH)). The chain state is tracked as the
magnetization pair (S1, S2) only, which is exact because the energy is a
function of that pair. One sweep is N flip attempts.

Randomness comes from a splitmix64 stream, fixed across platforms.
Per-chain streams are derived from the master seed by the documented
rule in `split_seed`, so a chain's output is reproducible bit for bit
regardless of how many chains run or in what order they finish. An
independent direct sampler draws from an exact pmf by inverse CDF using
numpy's PCG64, for cross-checking the dynamics.

Chains start from the all-plus configuration; discard a burn-in
accordingly (the command line defaults to 10 N sweeps).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .exact import MagnetizationPmf, SystemSize
from .model import ModelParams

_U64 = np.uint64
_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


def split_seed(seed: int, chain_index: int) -> int:
    """Derive the stream seed of one chain from the master seed.

    Rule: state = (seed + (chain_index + 1) * 0x9E3779B97F4A7C15) mod 2^64,
    then one splitmix64 finalizer (xor-shift 30, multiply
    0xBF58476D1CE4E5B9, xor-shift 27, multiply 0x94D049BB133111EB,
    xor-shift 31). The kernel then walks the splitmix64 stream from that
    state.
    """
    z = (seed + (chain_index + 1) * _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


@numba.njit(cache=True, nogil=True)
def _mix_next(state):
    state = state + _U64(0x9E3779B97F4A7C15)
    z = state
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    z = z ^ (z >> _U64(31))
    return state, z


@numba.njit(cache=True, nogil=True)
def _attempt(n1, n2, j11, j12, j22, s1, s2, state):
    n = n1 + n2
    state, z = _mix_next(state)
    u_particle = (z >> _U64(11)) * _INV53
    state, z = _mix_next(state)
    u_value = (z >> _U64(11)) * _INV53
    state, z = _mix_next(state)
    u_accept = (z >> _U64(11)) * _INV53

    i = int(u_particle * n)
    if i >= n:
        i = n - 1
    if i < n1:
        # the chosen particle is +1 with probability (n1 + s1)/(2 n1)
        delta = -2 if u_value * (2.0 * n1) < n1 + s1 else 2
        dq = delta * (j11 * (2.0 * s1 + delta) + 2.0 * j12 * s2)
    else:
        delta = -2 if u_value * (2.0 * n2) < n2 + s2 else 2
        dq = delta * (j22 * (2.0 * s2 + delta) + 2.0 * j12 * s1)
    dh = -dq / (2.0 * n)
    if dh <= 0.0:
        accept = u_accept * (1.0 + math.exp(dh)) < 1.0
    else:
        e = math.exp(-dh)
        accept = u_accept * (1.0 + e) < e
    if accept:
        if i < n1:
            s1 += delta
        else:
            s2 += delta
    return s1, s2, state


@numba.njit(cache=True, nogil=True)
def _run_chain(n1, n2, j11, j12, j22, sweeps, burn_in, thinning, seed, out):
    n = n1 + n2
    s1 = n1
    s2 = n2
    state = _U64(seed)
    idx = 0
    for sweep in range(1, sweeps + 1):
        for _ in range(n):
            s1, s2, state = _attempt(n1, n2, j11, j12, j22, s1, s2, state)
        if sweep > burn_in and (sweep - burn_in) % thinning == 0:
            out[idx, 0] = s1
            out[idx, 1] = s2
            idx += 1
    return idx


@numba.njit(cache=True, nogil=True)
def _run_steps(n1, n2, j11, j12, j22, s1, s2, n_steps, seed, out):
    state = _U64(seed)
    for k in range(n_steps):
        s1, s2, state = _attempt(n1, n2, j11, j12, j22, s1, s2, state)
        out[k, 0] = s1
        out[k, 1] = s2


@dataclass(frozen=True)
class ChainConfig:
    """Glauber run lengths, all in units of sweeps, plus the master seed."""

    seed: int
    sweeps: int
    burn_in: int = 0
    thinning: int = 1
    n_chains: int = 1

    def __post_init__(self):
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.sweeps < 1:
            raise ValueError(f"sweeps must be positive, got {self.sweeps}")
        if not 0 <= self.burn_in < self.sweeps:
            raise ValueError("burn_in must be nonnegative and below sweeps")
        if self.thinning < 1:
            raise ValueError(f"thinning must be at least 1, got {self.thinning}")
        if self.n_chains < 1:
            raise ValueError(f"n_chains must be at least 1, got {self.n_chains}")

    @property
    def records_per_chain(self) -> int:
        return (self.sweeps - self.burn_in) // self.thinning

    def to_dict(self) -> dict:
        return {"seed": self.seed, "sweeps": self.sweeps, "burn_in": self.burn_in,
                "thinning": self.thinning, "n_chains": self.n_chains}


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """Recorded magnetization pairs with their chain and sweep labels."""

    draws: np.ndarray        # (m, 2) int64 magnetization pairs
    chain_index: np.ndarray  # (m,) which chain produced each row
    sweep_index: np.ndarray  # (m,) sweep (or step) number of each row
    sizes: SystemSize
    config: ChainConfig | None


def glauber_step(state: tuple[int, int], p: ModelParams, sz: SystemSize, rng) -> tuple[int, int]:
    """One flip attempt in pure Python, driven by a numpy Generator.

    Reference implementation of the kernel's update: uniform particle,
    uniform spin value inside its group, acceptance 1/(1 + exp(dH)).
    """
    s1, s2 = state
    if abs(s1) > sz.n1 or (s1 + sz.n1) % 2 or abs(s2) > sz.n2 or (s2 + sz.n2) % 2:
        raise ValueError(f"state {state} is not on the lattice of {sz}")
    n = sz.n
    i = min(int(rng.random() * n), n - 1)
    if i < sz.n1:
        delta = -2 if rng.random() * (2.0 * sz.n1) < sz.n1 + s1 else 2
        dq = delta * (p.j11 * (2.0 * s1 + delta) + 2.0 * p.j12 * s2)
    else:
        delta = -2 if rng.random() * (2.0 * sz.n2) < sz.n2 + s2 else 2
        dq = delta * (p.j22 * (2.0 * s2 + delta) + 2.0 * p.j12 * s1)
    dh = -dq / (2.0 * n)
    if dh <= 0.0:
        accept = rng.random() * (1.0 + math.exp(dh)) < 1.0
    else:
        e = math.exp(-dh)
        accept = rng.random() * (1.0 + e) < e
    if accept:
        if i < sz.n1:
            s1 += delta
        else:
            s2 += delta
    return s1, s2


def _thread_count(n_chains: int) -> int:
    raw = os.environ.get("CBL_THREADS", "")
    if raw:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ValueError(f"CBL_THREADS must be an integer, got {raw!r}") from exc
        if cap < 1:
            raise ValueError(f"CBL_THREADS must be positive, got {cap}")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(n_chains, cap))


def run_chains(p: ModelParams, sz: SystemSize, cfg: ChainConfig) -> SampleBatch:
    """Run independent Glauber chains and merge their records by chain index.

    Chains are dispatched to a thread pool capped by the CBL_THREADS
    environment variable (default: cpu count); the kernel releases the
    GIL. Output is deterministic for a fixed config: chain c consumes the
    splitmix64 stream seeded by split_seed(cfg.seed, c), and rows are
    ordered by (chain, sweep) no matter how the pool schedules them.
    """
    m = cfg.records_per_chain
    out = np.empty((cfg.n_chains, m, 2), dtype=np.int64)

    def one(c: int) -> None:
        _run_chain(sz.n1, sz.n2, p.j11, p.j12, p.j22,
                   cfg.sweeps, cfg.burn_in, cfg.thinning,
                   _U64(split_seed(cfg.seed, c)), out[c])

    workers = _thread_count(cfg.n_chains)
    if workers == 1:
        for c in range(cfg.n_chains):
            one(c)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(cfg.n_chains)))

    sweeps = cfg.burn_in + cfg.thinning * np.arange(1, m + 1, dtype=np.int64)
    return SampleBatch(draws=out.reshape(-1, 2),
                       chain_index=np.repeat(np.arange(cfg.n_chains, dtype=np.int64), m),
                       sweep_index=np.tile(sweeps, cfg.n_chains),
                       sizes=sz, config=cfg)


def step_stream(p: ModelParams, sz: SystemSize, n_steps: int, seed: int,
                init: tuple[int, int] | None = None) -> np.ndarray:
    """States after every single flip attempt, as an (n_steps, 2) array.

    Finer-grained than run_chains (which records per sweep); used to
    study the transition kernel itself.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    s1, s2 = (sz.n1, sz.n2) if init is None else init
    out = np.empty((n_steps, 2), dtype=np.int64)
    _run_steps(sz.n1, sz.n2, p.j11, p.j12, p.j22, s1, s2, n_steps,
               _U64(split_seed(seed, 0)), out)
    return out


def sample_direct(pmf: MagnetizationPmf, n_draws: int, seed: int) -> SampleBatch:
    """Independent draws from an exact pmf by inverse CDF.

    Uses numpy's PCG64 stream for the uniforms; rows are (S1, S2) pairs.
    """
    if n_draws < 0:
        raise ValueError("n_draws must be nonnegative")
    flat = pmf.probabilities.ravel()
    cdf = np.cumsum(flat)
    u = np.random.Generator(np.random.PCG64(seed)).random(n_draws)
    idx = np.minimum(np.searchsorted(cdf, u, side="right"), flat.size - 1)
    i1, i2 = np.unravel_index(idx, pmf.probabilities.shape)
    draws = np.stack([pmf.k1[i1], pmf.k2[i2]], axis=1).astype(np.int64)
    return SampleBatch(draws=draws,
                       chain_index=np.zeros(n_draws, dtype=np.int64),
                       sweep_index=np.arange(n_draws, dtype=np.int64),
                       sizes=pmf.sizes, config=None)


def empirical_pmf(draws: np.ndarray, sz: SystemSize) -> np.ndarray:
    """Empirical frequencies of (S1, S2) rows on the standard lattice."""
    shifted1 = draws[:, 0] + sz.n1
    shifted2 = draws[:, 1] + sz.n2
    if np.any((shifted1 % 2 != 0) | (shifted2 % 2 != 0)):
        raise ValueError("draw with wrong parity for the magnetization lattice")
    i1 = shifted1 // 2
    i2 = shifted2 // 2
    if np.any((i1 < 0) | (i1 > sz.n1) | (i2 < 0) | (i2 > sz.n2)):
        raise ValueError("draw outside the magnetization lattice")
    counts = np.bincount(i1 * (sz.n2 + 1) + i2, minlength=(sz.n1 + 1) * (sz.n2 + 1))
    freq = counts.reshape(sz.n1 + 1, sz.n2 + 1).astype(float)
    return freq / max(1, draws.shape[0])

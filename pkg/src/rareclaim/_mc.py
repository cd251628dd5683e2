"""Numba kernels for the forward rejection simulator.

RNG identity (the reproducibility contract):

* Generator: SplitMix64 (Steele/Lea/Flood mixing constants, the
  SplittableRandom core). State update s += 0x9E3779B97F4A7C15; output
  z = s; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
  z = (z ^ z>>27) * 0x94D049BB133111EB; z ^= z>>31. Integer-exact on
  every platform.
* Uniform doubles in [0, 1): (next64() >> 11) * 2^-53.
* Sharding: shard i (0-based, NUM_SHARDS fixed at 16) runs its own
  SplitMix64 stream seeded with the (i+1)-th output of a master
  SplitMix64 stream seeded with the user seed. Shards get fixed
  sample quotas and draw caps and are merged in shard order, so the
  result is independent of thread count and scheduling.

Draw schedule per candidate world, aborting at the first failed
requirement: the error rate d; one error-flip uniform per known-false
slot (all must flip); the rare-event rate v; one latent uniform per
known-false slot (all must be the common outcome); a latent/flip pair
per common slot (testimony must report common); the assessed slot's
latent/flip pair last (testimony must report rare). The stage order
differs from the narrative order purely to reject cheap-to-reject
worlds early; per-slot draws are independent given (v, d), so only the
number of uniforms consumed changes, never the sampled distribution.
"""

from __future__ import annotations

import numba
import numpy as np
from numba import njit, prange

# Shards are scheduling-independent; pin the portable threading layer
# so numba does not probe optional backends (and warn) at JIT time.
numba.config.THREADING_LAYER = "workqueue"

U64 = np.uint64

_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_TO_UNIT = 1.1102230246251565e-16  # 2^-53


@njit(cache=True, inline="always")
def _next64(state):
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return state, z


@njit(cache=True, inline="always")
def _next_unit(state):
    state, z = _next64(state)
    return state, (z >> U64(11)) * _TO_UNIT


@njit(cache=True)
def _run_shard(seed, quota, draw_cap, n, l, v_lo, v_span, d_lo, d_span):
    """One shard's rejection loop. Returns (rare_hits, accepted, draws)."""
    state = seed
    hits = np.int64(0)
    accepted = np.int64(0)
    draws = np.int64(0)
    while accepted < quota and draws < draw_cap:
        draws += 1
        state, u = _next_unit(state)
        d = d_lo + d_span * u
        ok = True
        for _ in range(l):  # known-false slots: every testimony erroneous
            state, u = _next_unit(state)
            if u >= d:
                ok = False
                break
        if not ok:
            continue
        state, u = _next_unit(state)
        v = v_lo + v_span * u
        for _ in range(l):  # known-false slots: latent outcome common
            state, u = _next_unit(state)
            if u < v:
                ok = False
                break
        if not ok:
            continue
        for _ in range(n):  # common slots: testimony must report common
            state, u1 = _next_unit(state)
            latent_rare = u1 < v
            state, u2 = _next_unit(state)
            flip = u2 < d
            if latent_rare != flip:  # testimony reports the rare outcome
                ok = False
                break
        if not ok:
            continue
        # assessed slot: testimony must report the rare outcome
        state, u1 = _next_unit(state)
        latent_rare = u1 < v
        state, u2 = _next_unit(state)
        flip = u2 < d
        if latent_rare == flip:  # testimony reports the common outcome
            continue
        accepted += 1
        if latent_rare:
            hits += 1
    return hits, accepted, draws


@njit(cache=True, parallel=True)
def run_sharded(master_seed, quotas, draw_caps, n, l, v_lo, v_span, d_lo, d_span):
    """Run every shard (in parallel when threads are available) and
    return an (S, 3) int64 array of [rare_hits, accepted, draws] rows."""
    nshards = quotas.shape[0]
    seeds = np.empty(nshards, np.uint64)
    state = master_seed
    for i in range(nshards):
        state, z = _next64(state)
        seeds[i] = z
    out = np.zeros((nshards, 3), np.int64)
    for i in prange(nshards):
        hits, accepted, draws = _run_shard(
            seeds[i], quotas[i], draw_caps[i], n, l, v_lo, v_span, d_lo, d_span
        )
        out[i, 0] = hits
        out[i, 1] = accepted
        out[i, 2] = draws
    return out

"""Independent ground truth for gating the analytic model.

Three routes that never touch the closed-form kernel identity or the
quadrature: exhaustive enumeration over the 2^n latent truth vectors,
a forward world simulator with rejection, and hand-integrated
polynomial closed forms for the no-counter-testimony case. Plus the
pure-induction reference 1/(n+2) that treats events, not testimonies,
as data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Evidence, PriorSpec

__all__ = [
    "McConfig",
    "McEstimate",
    "OracleError",
    "BudgetExceeded",
    "Unsupported",
    "InsufficientAcceptance",
    "enumerate_s_n",
    "mc_posterior",
    "closed_form_small",
    "simple_induction",
    "NUM_SHARDS",
]

MAX_ENUM_N = 24
MAX_MC_COUNT = 8  # per-count cap for the rejection simulator
NUM_SHARDS = 16  # fixed shard count; part of the seed -> result contract
_ENUM_CHUNK = 1 << 16


class OracleError(Exception):
    """Base class for oracle failures."""


class BudgetExceeded(OracleError):
    """Enumeration would exceed the 2^n budget."""


class Unsupported(OracleError):
    """Closed form requested outside its tiny-case domain."""


class InsufficientAcceptance(OracleError):
    """max_draws hit before enough samples were accepted. ``estimate``
    carries the partial result; ``requested`` the sample target."""

    def __init__(self, estimate: "McEstimate", requested: int):
        super().__init__(
            f"accepted only {estimate.accepted} of {requested} requested "
            f"samples within {estimate.drawn} draws"
        )
        self.estimate = estimate
        self.requested = requested


@dataclass(frozen=True)
class McConfig:
    """Budget and seed for the rejection simulator. The seed is
    mandatory: there is no ambient-entropy mode."""

    seed: int
    samples: int = 100_000
    max_draws: int = 10**10

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.max_draws < self.samples:
            raise ValueError(
                f"max_draws ({self.max_draws}) must be >= samples ({self.samples})"
            )
        if not isinstance(self.seed, (int, np.integer)) or isinstance(
            self.seed, bool
        ):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")


@dataclass(frozen=True)
class McEstimate:
    """Binomial estimate from accepted forward draws."""

    p_hat: float
    std_err: float
    accepted: int
    drawn: int


def enumerate_s_n(v: float, d: float, n: int) -> float:
    """Sum p(C^n|v) p(all-common testimonies | C^n, d) over all 2^n
    latent truth vectors, term by term.

    Each vector's probability is the product over its n slots of
    v*d (slot's event rare, testimony erroneously common) or
    (1-v)*(1-d) (event common, testimony correct). No power-of-n
    shortcut is taken anywhere; this is the brute-force counterpart the
    closed-form kernel is tested against. Budget-capped at n <= 24.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if n > MAX_ENUM_N:
        raise BudgetExceeded(f"2^{n} truth vectors exceed the n <= {MAX_ENUM_N} budget")
    if n == 0:
        return 1.0  # single empty vector, empty product
    rare_slot = float(v) * float(d)
    common_slot = (1.0 - float(v)) * (1.0 - float(d))
    shifts = np.arange(n, dtype=np.uint32)
    total = 0.0
    for start in range(0, 1 << n, _ENUM_CHUNK):
        stop = min(start + _ENUM_CHUNK, 1 << n)
        idx = np.arange(start, stop, dtype=np.uint32)
        bits = (idx[:, None] >> shifts[None, :]) & np.uint32(1)
        slot_probs = np.where(bits.astype(bool), rare_slot, common_slot)
        total += float(slot_probs.prod(axis=1).sum())
    return total


def closed_form_small(evidence: Evidence, prior: PriorSpec | None = None) -> float:
    """Exact posterior for n = 0, l = 0 by hand-integrated polynomials.

    Both evidence integrals separate:
      rare branch   = [(v_hi^2 - v_lo^2)/2] * [(d_hi - d_lo) - (d_hi^2 - d_lo^2)/2]
      common branch = [(v_hi - v_lo) - (v_hi^2 - v_lo^2)/2] * [(d_hi^2 - d_lo^2)/2]
    """
    if prior is None:
        prior = PriorSpec()
    if evidence.n != 0 or evidence.l != 0:
        raise Unsupported("closed form covers only n = 0, l = 0")
    v_sq = 0.5 * (prior.v_hi**2 - prior.v_lo**2)
    d_sq = 0.5 * (prior.d_hi**2 - prior.d_lo**2)
    j_w = v_sq * ((prior.d_hi - prior.d_lo) - d_sq)
    j_b = ((prior.v_hi - prior.v_lo) - v_sq) * d_sq
    return j_w / (j_w + j_b)


def simple_induction(n: int) -> float:
    """1/(n+2): the posterior for the rare event when the n common
    events themselves (not testimonies about them) are the data."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return 1.0 / (n + 2)


def _split_budget(total: int, shards: int) -> np.ndarray:
    base, rem = divmod(total, shards)
    out = np.full(shards, base, dtype=np.int64)
    out[:rem] += 1
    return out


def mc_posterior(
    evidence: Evidence, prior: PriorSpec | None = None, cfg: McConfig | None = None
) -> McEstimate:
    """Forward-simulate worlds and estimate the assessed posterior by
    rejection.

    Each candidate world draws (v, d) uniformly from the prior box, a
    latent outcome for each of the n + l + 1 events (rare with
    probability v), and a testimony for each (flipped with probability
    d). A world is accepted iff every common-slot testimony reports the
    common outcome, every known-false slot has a common latent outcome
    with a rare-reporting testimony, and the assessed slot's testimony
    reports the rare outcome. p_hat is the accepted fraction whose
    assessed latent outcome is rare.

    Deterministic given cfg.seed (see _mc for the exact RNG identity
    and draw schedule). Raises InsufficientAcceptance, with the partial
    estimate attached, if max_draws is exhausted first.
    """
    if prior is None:
        prior = PriorSpec()
    if cfg is None:
        raise ValueError("an McConfig with an explicit seed is required")
    if evidence.n > MAX_MC_COUNT or evidence.l > MAX_MC_COUNT:
        raise ValueError(
            f"rejection oracle handles n, l <= {MAX_MC_COUNT}; "
            f"got n={evidence.n}, l={evidence.l}"
        )
    from . import _mc  # deferred: numba import/JIT only when simulating

    quotas = _split_budget(cfg.samples, NUM_SHARDS)
    caps = _split_budget(cfg.max_draws, NUM_SHARDS)
    rows = _mc.run_sharded(
        np.uint64(cfg.seed % (1 << 64)),
        quotas,
        caps,
        evidence.n,
        evidence.l,
        prior.v_lo,
        prior.v_hi - prior.v_lo,
        prior.d_lo,
        prior.d_hi - prior.d_lo,
    )
    hits = int(rows[:, 0].sum())
    accepted = int(rows[:, 1].sum())
    drawn = int(rows[:, 2].sum())
    p_hat = hits / accepted if accepted else 0.0
    std_err = math.sqrt(p_hat * (1.0 - p_hat) / accepted) if accepted else 0.0
    estimate = McEstimate(p_hat=p_hat, std_err=std_err, accepted=accepted, drawn=drawn)
    if accepted < cfg.samples:
        raise InsufficientAcceptance(estimate, cfg.samples)
    return estimate

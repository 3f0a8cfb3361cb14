"""Domain types, validation, and deterministic randomness.

Category values are 1-based everywhere a user sees them (configs, reports,
datasets, exports) and 0-based inside numeric kernels.  Randomness is a
counter-based 64-bit stream: every (master_seed, run, user) triple owns an
independent stream whose j-th draw is addressable directly, so scalar code and
vectorized kernels produce identical values and runs can execute in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
# splitmix64 increment and finalizer multipliers
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_RUN_SALT = 0x8A183895E7EB0A7D
_USER_SALT = 0xC2B2AE3D27D4EB4F

_U64 = np.uint64
_NP_GAMMA = _U64(_GAMMA)
_NP_MIX1 = _U64(_MIX1)
_NP_MIX2 = _U64(_MIX2)

# ε-LDP tightness tolerance for UE parameter pairs
UE_TIGHTNESS_TOL = 1e-9


class Family(str, Enum):
    GRR = "grr"
    SS = "ss"
    UE = "ue"
    LH = "lh"
    SHE = "she"
    THE = "the"


class RangeError(ValueError):
    """A config field is outside its allowed range."""

    def __init__(self, field, allowed, got):
        self.field = field
        self.allowed = allowed
        self.got = got
        super().__init__(f"{field} must be {allowed}, got {got!r}")


class UnsupportedFamily(ValueError):
    """Operation not defined for this protocol family."""


class EmptyInput(ValueError):
    """An operation received an empty collection."""


class TooLarge(ValueError):
    """Enumeration space exceeds the configured cap."""


class NonFinite(ArithmeticError):
    """Objective evaluated to a non-finite value."""

    def __init__(self, x, value):
        self.x = x
        self.value = value
        super().__init__(f"objective returned {value!r} at x={x!r}")


class EmptyCandidates(ValueError):
    """Grid search received no candidates."""


@dataclass(frozen=True)
class ProtocolConfig:
    """One protocol instance: family tag, privacy budget, domain size, and the
    family-specific free parameter.

    Parameters
    ----------
    family : Family
    eps : float
        Privacy budget in nats, > 0.
    k : int
        Domain size, >= 2.
    omega : int, optional
        Subset size for SS, 1 <= omega < k.
    p, q : float, optional
        Bit-keep / bit-flip probabilities for UE, each in (0, 1) and tight
        for eps: ln(p(1-q)/((1-p)q)) = eps within 1e-9.
    g : int, optional
        Hash range for LH, >= 2.
    theta : float, optional
        Threshold for THE, in [0.5, 1].
    """

    family: Family
    eps: float
    k: int
    omega: int | None = None
    p: float | None = None
    q: float | None = None
    g: int | None = None
    theta: float | None = None


def validate_config(cfg: ProtocolConfig) -> ProtocolConfig:
    """Check every invariant of `cfg`; return it unchanged when valid.

    Raises
    ------
    RangeError
        Naming the violated field, the allowed range, and the actual value.
    """
    fam = Family(cfg.family)
    if not (isinstance(cfg.eps, (int, float)) and not isinstance(cfg.eps, bool)
            and math.isfinite(cfg.eps) and cfg.eps > 0):
        raise RangeError("eps", "a finite real > 0", cfg.eps)
    if not (isinstance(cfg.k, (int, np.integer)) and not isinstance(cfg.k, bool) and cfg.k >= 2):
        raise RangeError("k", "an integer >= 2", cfg.k)

    if fam is Family.SS:
        w = cfg.omega
        if not (isinstance(w, (int, np.integer)) and not isinstance(w, bool)
                and 1 <= w < cfg.k):
            raise RangeError("omega", f"an integer in [1, {cfg.k - 1}]", w)
    elif fam is Family.UE:
        for name, v in (("p", cfg.p), ("q", cfg.q)):
            if not (isinstance(v, (int, float)) and math.isfinite(v) and 0 < v < 1):
                raise RangeError(name, "a real in (0, 1)", v)
        gap = abs(math.log(cfg.p * (1 - cfg.q) / ((1 - cfg.p) * cfg.q)) - cfg.eps)
        if gap > UE_TIGHTNESS_TOL:
            raise RangeError("(p, q)",
                             f"tight for eps={cfg.eps} within {UE_TIGHTNESS_TOL}",
                             (cfg.p, cfg.q))
    elif fam is Family.LH:
        if not (isinstance(cfg.g, (int, np.integer)) and not isinstance(cfg.g, bool)
                and cfg.g >= 2):
            raise RangeError("g", "an integer >= 2", cfg.g)
    elif fam is Family.THE:
        t = cfg.theta
        if not (isinstance(t, (int, float)) and math.isfinite(t) and 0.5 <= t <= 1.0):
            raise RangeError("theta", "a real in [0.5, 1]", t)
    # GRR and SHE carry no extra parameter; reject stray ones to keep
    # validation total
    if fam in (Family.GRR, Family.SHE):
        for name in ("omega", "p", "q", "g", "theta"):
            if getattr(cfg, name) is not None:
                raise RangeError(name, f"absent for family {fam.value}",
                                 getattr(cfg, name))
    return cfg


@dataclass(frozen=True)
class PureParams:
    """The (p*, q*) pair of a pure protocol: probability that the report
    supports the true value / any given other value."""

    p_star: float
    q_star: float

    def __post_init__(self):
        if not (0 < self.p_star <= 1) or not (0 <= self.q_star < 1):
            raise RangeError("(p_star, q_star)", "p* in (0,1], q* in [0,1)",
                             (self.p_star, self.q_star))
        if self.p_star <= self.q_star:
            raise RangeError("p_star", f"> q_star = {self.q_star}", self.p_star)


# -- reports ------------------------------------------------------------------

@dataclass(frozen=True)
class CategoryReport:
    """GRR output: one category in 1..k."""
    value: int


@dataclass(frozen=True)
class SubsetReport:
    """SS output: a sorted tuple of omega distinct categories in 1..k."""
    values: tuple


@dataclass(frozen=True)
class BitVectorReport:
    """UE/THE output: length-k 0/1 array."""
    bits: np.ndarray


@dataclass(frozen=True)
class HashedReport:
    """LH output: the sampled 64-bit hash seed and a value in 1..g."""
    seed: int
    value: int


@dataclass(frozen=True)
class RealVectorReport:
    """SHE output: length-k noisy real vector."""
    values: np.ndarray


# -- randomness ---------------------------------------------------------------

def mix64(z: int) -> int:
    """splitmix64 finalizer on a python int, result in [0, 2^64)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def mix64_np(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array (wrapping multiplies)."""
    z = np.asarray(z, dtype=_U64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U64(30))) * _NP_MIX1
        z = (z ^ (z >> _U64(27))) * _NP_MIX2
    return z ^ (z >> _U64(31))


def _stream_seed(master_seed: int, run: int, user: int) -> int:
    return mix64(master_seed ^ mix64((run + _RUN_SALT) & MASK64)
                 ^ mix64((user + _USER_SALT) & MASK64))


def stream_seeds(master_seed: int, run: int, users: np.ndarray) -> np.ndarray:
    """Vectorized stream seeds for many users of one (master_seed, run)."""
    users = np.asarray(users, dtype=_U64)
    base = _U64(master_seed & MASK64) ^ mix64_np(
        np.asarray((run + _RUN_SALT) & MASK64, dtype=_U64))
    with np.errstate(over="ignore"):
        salted = users + _U64(_USER_SALT)
    return mix64_np(base ^ mix64_np(salted))


def draws_u64(seeds, counters) -> np.ndarray:
    """The counters[...]-th 64-bit outputs of the streams with the given
    seeds; broadcasts, so (n,1) seeds x (1,m) counters gives an (n,m) block."""
    seeds = np.asarray(seeds, dtype=_U64)
    counters = np.asarray(counters, dtype=_U64)
    with np.errstate(over="ignore"):
        mixed = seeds + (counters + _U64(1)) * _NP_GAMMA
    return mix64_np(mixed)


def draws_uniform(seeds, counters) -> np.ndarray:
    """Same, mapped to float64 in [0, 1)."""
    return (draws_u64(seeds, counters) >> _U64(11)) * 2.0 ** -53


def draws_laplace(seeds, counters, b: float) -> np.ndarray:
    """Same, mapped through the Laplace(0, b) inverse CDF.

    One uniform u in (-1/2, 1/2) per draw; sample = -b sgn(u) ln(1-2|u|).
    The offset keeps u off both 0 and the endpoints, so the result is finite.
    """
    v = ((draws_u64(seeds, counters) >> _U64(11)) + 0.5) * 2.0 ** -53
    u = v - 0.5
    return -b * np.sign(u) * np.log1p(-2.0 * np.abs(u))


class RngStream:
    """Sequential view of one counter-based stream.

    The j-th call of `u64` returns exactly `draws_u64(seed, j)`, so code using
    an RngStream and vectorized code addressing counters directly agree
    draw-for-draw.
    """

    __slots__ = ("seed", "_count")

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._count = 0

    def u64(self) -> int:
        c = self._count
        self._count = c + 1
        return mix64((self.seed + ((c + 1) * _GAMMA)) & MASK64)

    def uniform(self) -> float:
        """One float64 in [0, 1)."""
        return (self.u64() >> 11) * 2.0 ** -53

    def below(self, m: int) -> int:
        """One integer uniform on [0, m)."""
        return min(int(self.uniform() * m), m - 1)

    def laplace(self, b: float) -> float:
        """One Laplace(0, b) draw via the inverse CDF."""
        c = self._count
        self._count = c + 1
        return float(draws_laplace(_U64(self.seed), np.asarray([c]), b)[0])

    def uniforms(self, count: int) -> np.ndarray:
        """`count` float64 draws at once; advances the stream by `count`."""
        c = self._count
        self._count = c + count
        return draws_uniform(_U64(self.seed), np.arange(c, c + count))

    def laplaces(self, count: int, b: float) -> np.ndarray:
        c = self._count
        self._count = c + count
        return draws_laplace(_U64(self.seed), np.arange(c, c + count), b)


def derive_stream(master_seed: int, run: int, user: int) -> RngStream:
    """The stream owned by (master_seed, run, user); deterministic, and
    distinct triples give statistically independent streams."""
    return RngStream(_stream_seed(master_seed, run, user))

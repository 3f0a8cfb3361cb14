"""The eight frequency-estimation protocols.

Per-user reference implementations (perturb / support / estimate) plus the
closed-form machinery shared by the optimizer and the sweep harness:
pure-parameter extraction and analytic MSE.  Vectorized whole-run kernels
live in `simulate`; they reproduce these functions draw-for-draw.

Families and their standard instantiations:

- GRR: direct randomized response over k categories.
- SS: report a size-omega subset; omega = round(k/(e^eps+1)) clipped to >= 1
  minimizes the first-order variance.
- UE: per-bit randomized one-hot; symmetric variant keeps p = e^(eps/2)/(e^(eps/2)+1),
  the variance-optimized variant fixes p = 1/2, q = 1/(e^eps+1).
- LH: hash to g buckets (seed travels with the report), then GRR over buckets;
  g = 2 is the binary variant, g = round(e^eps+1) the variance-optimized one.
- SHE: add Laplace(2/eps) noise to the one-hot vector.
- THE: SHE followed by thresholding at theta, giving a bit vector with
  p = 1 - exp(eps(theta-1)/2)/2 and q = exp(-eps*theta/2)/2.
"""

from __future__ import annotations

import math

import numpy as np

from .model import (
    BitVectorReport,
    CategoryReport,
    EmptyInput,
    Family,
    HashedReport,
    ProtocolConfig,
    PureParams,
    RangeError,
    RealVectorReport,
    RngStream,
    SubsetReport,
    UnsupportedFamily,
    mix64,
    mix64_np,
    validate_config,
)

_U64 = np.uint64
_HGAMMA = 0x9E3779B97F4A7C15


def round_half_away(x: float) -> int:
    """Nearest integer, halves away from zero (so 2.5 -> 3, -2.5 -> -3)."""
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def hash_bucket(seed: int, x: int, g: int) -> int:
    """Bucket of category x (1-based) under the seeded hash, in 1..g."""
    return int(mix64(seed ^ mix64(x * _HGAMMA))) % g + 1


def hash_buckets(seeds, xs, g: int) -> np.ndarray:
    """Vectorized `hash_bucket` minus 1 (0-based buckets); broadcasts.

    `xs` are 1-based categories, as in the scalar form.
    """
    xs = np.asarray(xs, dtype=_U64)
    h = mix64_np(np.asarray(seeds, dtype=_U64) ^ mix64_np(xs * _U64(_HGAMMA)))
    return (h % _U64(g)).astype(np.int64)


# -- parameter pairs ----------------------------------------------------------

def grr_params(eps: float, k: int) -> PureParams:
    e = math.exp(eps)
    p = e / (e + k - 1)
    return PureParams(p, (1 - p) / (k - 1))


def sue_params(eps: float) -> tuple:
    """Symmetric UE pair (p, q) with p + q = 1."""
    s = math.exp(eps / 2)
    return s / (s + 1), 1 / (s + 1)


def oue_params(eps: float) -> tuple:
    """Variance-optimized UE pair (1/2, 1/(e^eps+1))."""
    return 0.5, 1 / (math.exp(eps) + 1)


def ue_pair_from_p(eps: float, p: float) -> tuple:
    """The tight UE pair with keep-probability p: q = p/(e^eps(1-p)+p)."""
    return p, p / (math.exp(eps) * (1 - p) + p)


def ss_default_omega(eps: float, k: int) -> int:
    """Variance-minimizing subset size, round(k/(e^eps+1)) clipped to >= 1."""
    return max(1, round_half_away(k / (math.exp(eps) + 1)))


def olh_g(eps: float) -> int:
    """Variance-optimized hash range round(e^eps + 1)."""
    return round_half_away(math.exp(eps) + 1)


def the_params(eps: float, theta: float) -> tuple:
    """Per-bit (p, q) of the thresholded-histogram report."""
    p = 1 - 0.5 * math.exp(eps * (theta - 1) / 2)
    q = 0.5 * math.exp(-eps * theta / 2)
    return p, q


def pure_params(cfg: ProtocolConfig) -> PureParams:
    """(p*, q*) of any pure family; SHE has none.

    Raises
    ------
    UnsupportedFamily
        For SHE.
    """
    validate_config(cfg)
    fam = Family(cfg.family)
    if fam is Family.GRR:
        return grr_params(cfg.eps, cfg.k)
    if fam is Family.SS:
        e = math.exp(cfg.eps)
        w, k = cfg.omega, cfg.k
        p_star = w * e / (w * e + k - w)
        q_star = (w * e * (w - 1) + (k - w) * w) / ((k - 1) * (w * e + k - w))
        return PureParams(p_star, q_star)
    if fam is Family.UE:
        return PureParams(cfg.p, cfg.q)
    if fam is Family.LH:
        e = math.exp(cfg.eps)
        return PureParams(e / (e + cfg.g - 1), 1 / cfg.g)
    if fam is Family.THE:
        p, q = the_params(cfg.eps, cfg.theta)
        return PureParams(p, q)
    raise UnsupportedFamily("SHE is not pure; it has no (p*, q*)")


# -- perturbation -------------------------------------------------------------

def _uniform_other(u: float, x0: int, k: int) -> int:
    """Map u in [0,1) to a 0-based category != x0, uniformly."""
    j = min(int(u * (k - 1)), k - 2)
    return j + (j >= x0)


def grr_perturb(x: int, eps: float, k: int, rng: RngStream) -> CategoryReport:
    """Report x with probability e^eps/(e^eps+k-1), else a uniform other."""
    if not 1 <= x <= k:
        raise RangeError("x", f"in [1, {k}]", x)
    p = math.exp(eps) / (math.exp(eps) + k - 1)
    u = rng.uniform()
    if u < p:
        return CategoryReport(x)
    return CategoryReport(_uniform_other((u - p) / (1 - p), x - 1, k) + 1)


def ss_perturb(x: int, eps: float, k: int, omega: int, rng: RngStream) -> SubsetReport:
    """Report a uniform size-omega subset biased to include x.

    x enters with probability omega*e^eps/(omega*e^eps + k - omega); the other
    slots are a uniform subset of the remaining categories, chosen as the
    smallest random 64-bit keys (one key per candidate, drawn in category
    order, which is what the vectorized kernel does too).
    """
    if not 1 <= omega < k:
        raise RangeError("omega", f"an integer in [1, {k - 1}]", omega)
    if not 1 <= x <= k:
        raise RangeError("x", f"in [1, {k}]", x)
    e = math.exp(eps)
    p_inc = omega * e / (omega * e + k - omega)
    include = rng.uniform() < p_inc
    others = [c for c in range(1, k + 1) if c != x]
    keys = [(rng.u64(), c) for c in others]
    keys.sort()
    take = omega - 1 if include else omega
    chosen = [c for _, c in keys[:take]]
    if include:
        chosen.append(x)
    return SubsetReport(tuple(sorted(chosen)))


def ue_perturb(x: int, p: float, q: float, k: int, rng: RngStream) -> BitVectorReport:
    """Randomized one-hot: bit x keeps with probability p, others flip on
    with probability q; one draw per bit in index order."""
    if not 1 <= x <= k:
        raise RangeError("x", f"in [1, {k}]", x)
    u = rng.uniforms(k)
    thresholds = np.full(k, q)
    thresholds[x - 1] = p
    return BitVectorReport((u < thresholds).astype(np.uint8))


def lh_perturb(x: int, eps: float, k: int, g: int, rng: RngStream) -> HashedReport:
    """Draw a fresh hash seed, bucket x, then randomize the bucket over 1..g."""
    if g < 2:
        raise RangeError("g", "an integer >= 2", g)
    if not 1 <= x <= k:
        raise RangeError("x", f"in [1, {k}]", x)
    seed = rng.u64()
    b = hash_bucket(seed, x, g)
    p = math.exp(eps) / (math.exp(eps) + g - 1)
    u = rng.uniform()
    if u < p:
        return HashedReport(seed, b)
    return HashedReport(seed, _uniform_other((u - p) / (1 - p), b - 1, g) + 1)


def she_perturb(x: int, eps: float, k: int, rng: RngStream) -> RealVectorReport:
    """One-hot of x plus i.i.d. Laplace(0, 2/eps) noise per coordinate."""
    if not 1 <= x <= k:
        raise RangeError("x", f"in [1, {k}]", x)
    b = 2.0 / eps
    v = rng.laplaces(k, b)
    v[x - 1] += 1.0
    return RealVectorReport(v)


def the_threshold(v, theta: float) -> BitVectorReport:
    """Bit i = 1 iff v_i > theta."""
    if not 0.5 <= theta <= 1.0:
        raise RangeError("theta", "a real in [0.5, 1]", theta)
    vals = v.values if isinstance(v, RealVectorReport) else np.asarray(v, dtype=float)
    return BitVectorReport((vals > theta).astype(np.uint8))


def the_perturb(x: int, eps: float, k: int, theta: float, rng: RngStream) -> BitVectorReport:
    """SHE noise followed by thresholding; k draws, like she_perturb."""
    return the_threshold(she_perturb(x, eps, k, rng), theta)


def perturb(x: int, cfg: ProtocolConfig, rng: RngStream):
    """Dispatch to the family's perturbation."""
    fam = Family(cfg.family)
    if fam is Family.GRR:
        return grr_perturb(x, cfg.eps, cfg.k, rng)
    if fam is Family.SS:
        return ss_perturb(x, cfg.eps, cfg.k, cfg.omega, rng)
    if fam is Family.UE:
        return ue_perturb(x, cfg.p, cfg.q, cfg.k, rng)
    if fam is Family.LH:
        return lh_perturb(x, cfg.eps, cfg.k, cfg.g, rng)
    if fam is Family.SHE:
        return she_perturb(x, cfg.eps, cfg.k, rng)
    if fam is Family.THE:
        return the_perturb(x, cfg.eps, cfg.k, cfg.theta, rng)
    raise UnsupportedFamily(str(cfg.family))


# -- support and estimation ---------------------------------------------------

def support(report, cfg: ProtocolConfig) -> frozenset:
    """Categories (1-based) the report supports.

    LH recomputes the hash of all k candidates, an intentional O(k) cost.
    SHE reports support no discrete set.
    """
    fam = Family(cfg.family)
    if fam is Family.GRR:
        if not isinstance(report, CategoryReport):
            raise UnsupportedFamily("report does not match family grr")
        return frozenset((report.value,))
    if fam is Family.SS:
        if not isinstance(report, SubsetReport):
            raise UnsupportedFamily("report does not match family ss")
        return frozenset(report.values)
    if fam in (Family.UE, Family.THE):
        if not isinstance(report, BitVectorReport):
            raise UnsupportedFamily(f"report does not match family {fam.value}")
        return frozenset(int(i) + 1 for i in np.flatnonzero(report.bits))
    if fam is Family.LH:
        if not isinstance(report, HashedReport):
            raise UnsupportedFamily("report does not match family lh")
        cats = np.arange(1, cfg.k + 1)
        buckets = hash_buckets(_U64(report.seed), cats, cfg.g) + 1
        return frozenset(int(c) for c in cats[buckets == report.value])
    raise UnsupportedFamily("SHE reports have no support set")


def estimate_from_counts(counts: np.ndarray, n: int, pp: PureParams) -> np.ndarray:
    """Unbiased estimate (C_i - n q*)/(n (p* - q*)) per coordinate."""
    return (np.asarray(counts, dtype=float) - n * pp.q_star) / (n * (pp.p_star - pp.q_star))


def estimate_frequencies(reports, cfg: ProtocolConfig) -> np.ndarray:
    """Frequency estimate from pure-protocol reports via support counts."""
    if len(reports) == 0:
        raise EmptyInput("no reports")
    pp = pure_params(cfg)
    counts = np.zeros(cfg.k, dtype=np.int64)
    for r in reports:
        for c in support(r, cfg):
            counts[c - 1] += 1
    return estimate_from_counts(counts, len(reports), pp)


def she_estimate(reports) -> np.ndarray:
    """Coordinate means of the noisy vectors (already frequency-scaled)."""
    if len(reports) == 0:
        raise EmptyInput("no reports")
    vecs = [r.values if isinstance(r, RealVectorReport) else np.asarray(r, float)
            for r in reports]
    return np.mean(np.stack(vecs), axis=0)


# -- analytic MSE -------------------------------------------------------------

def generic_pure_mse(pp: PureParams, n: float = 1) -> float:
    """First-order per-coordinate variance q*(1-q*)/(n (p*-q*)^2)."""
    return pp.q_star * (1 - pp.q_star) / (n * (pp.p_star - pp.q_star) ** 2)


def subset_alternative_mse(eps: float, k: int, omega: int, n: float = 1) -> float:
    """A second closed-form subset-report variance that circulates alongside
    the first-order one; it exceeds generic_pure_mse by
    (k-1) e^eps (k - omega + (omega-1) e^eps) / ((k-omega)^2 (e^eps-1)^2 n).

    Monte Carlo adjudication (see the test suite) shows the estimator's actual
    variance matches the first-order form, not this one, so `analytic_mse`
    does not use it; it is kept for the comparison.
    """
    e = math.exp(eps)
    pp = pure_params(ProtocolConfig(Family.SS, eps, k, omega=omega))
    extra = (k - 1) * e * (k - omega + (omega - 1) * e) / (
        (k - omega) ** 2 * (e - 1) ** 2 * n)
    return generic_pure_mse(pp, n) + extra


def analytic_mse(cfg: ProtocolConfig, n: float = 1) -> float:
    """Closed-form approximate estimator variance, per user at n=1.

    Pure families use the first-order form at their (p*, q*) (for UE, LH, THE
    the published per-family closed forms reduce to it algebraically; for SS
    the first-order form is the one validated by simulation).  SHE is exact:
    8/(n eps^2).
    """
    validate_config(cfg)
    if Family(cfg.family) is Family.SHE:
        return 8.0 / (n * cfg.eps ** 2)
    return generic_pure_mse(pure_params(cfg), n)

"""Independent reference computations used to pin expected values in tests.

Everything here is derived from first principles with stdlib / numpy only and
deliberately shares no code with the package under test: enumeration over
report outcomes, idealized random hash functions via random.Random, and
Monte Carlo with numpy's own Generator.  Tests compare package output against
these, or against literals frozen from running this module.
"""

import math
import random
from itertools import combinations

import numpy as np


def grr_pq(eps, k):
    e = math.exp(eps)
    p = e / (e + k - 1)
    return p, (1 - p) / (k - 1)


def sue_pq(eps):
    e = math.exp(eps / 2)
    return e / (e + 1), 1 / (e + 1)


def oue_pq(eps):
    return 0.5, 1 / (math.exp(eps) + 1)


def ss_pure(eps, k, omega):
    e = math.exp(eps)
    p_star = omega * e / (omega * e + k - omega)
    q_star = (omega * e * (omega - 1) + (k - omega) * omega) / (
        (k - 1) * (omega * e + k - omega))
    return p_star, q_star


def lh_pq(eps, g):
    e = math.exp(eps)
    return e / (e + g - 1), 1 / g


def the_pq(eps, theta):
    p = 1 - 0.5 * math.exp(eps * (theta - 1) / 2)
    q = 0.5 * math.exp(-eps * theta / 2)
    return p, q


def pure_variance(p_star, q_star, n=1):
    """First-order per-coordinate variance of the pure-protocol estimator."""
    return q_star * (1 - q_star) / (n * (p_star - q_star) ** 2)


def exact_mean_variance(p_star, q_star, k, n=1):
    """Exact mean over coordinates of Var[f_hat_i], any true frequency vector.

    Var[f_hat_i] = [f_i p*(1-p*) + (1-f_i) q*(1-q*)] / (n (p*-q*)^2); averaging
    over i with sum f_i = 1 leaves the data-independent value below.
    """
    return pure_variance(p_star, q_star, n) + (1 - p_star - q_star) / (
        k * n * (p_star - q_star))


def ue_asr_subset_enum(p, q, k):
    """Exact attack success rate for bit-vector reports by subset enumeration.

    Success picks uniformly among set bits; an all-zero report falls back to a
    uniform guess over the domain.  Enumerates the 2^(k-1) competitor patterns,
    so keep k small.
    """
    total = 0.0
    others = range(k - 1)
    for s in range(k):
        for comb in combinations(others, s):
            pr = q ** s * (1 - q) ** (k - 1 - s)
            total += pr * p / (1 + s)
            if s == 0:
                total += pr * (1 - p) / k
    return total


def ue_asr_binomial(p, q, k):
    """Same quantity via the binomial collapse, in log space; any k."""
    if q == 0.0:
        return p + (1 - p) / k
    logq, log1q = math.log(q), math.log1p(-q)
    logs = []
    # log of p * C(k-1, m-1) q^(m-1) (1-q)^(k-m) / m   for m = 1..k
    for m in range(1, k + 1):
        lt = (math.log(p) + math.lgamma(k) - math.lgamma(m) - math.lgamma(k - m + 1)
              + (m - 1) * logq + (k - m) * log1q - math.log(m))
        logs.append(lt)
    hi = max(logs)
    acc = sum(math.exp(lt - hi) for lt in logs)
    hit = math.exp(hi) * acc
    miss = (1 - p) * math.exp((k - 1) * log1q) / k
    return hit + miss


def lh_asr_ideal(p, k, g, trials, seed=0):
    """Attack success rate under an idealized uniformly random hash, averaged
    over `trials` independent hash functions with the conditional success
    probability computed exactly (no report sampling noise)."""
    rnd = random.Random(seed)
    acc = 0.0
    for _ in range(trials):
        buckets = [rnd.randrange(g) for _ in range(k)]
        counts = [0] * g
        for b in buckets:
            counts[b] += 1
        empty = sum(1 for c in counts if c == 0)
        # true item x: success = p / |preimage(bucket(x))|, plus the fallback
        # 1/k guess when the perturbed bucket has an empty preimage
        s = 0.0
        for x in range(k):
            s += p / counts[buckets[x]]
        s /= k
        s += (1 - p) / (g - 1) * empty / k if g > 1 else 0.0
        acc += s
    return acc / trials


def lh_asr_exact(p, k, g):
    """Closed form of the idealized-hash ASR via E[1/(1+Binomial(k-1,1/g))]."""
    t = (1 - 1 / g) ** (k - 1)
    hit = p * (g / k) * (1 - (1 - 1 / g) ** k)
    miss = (1 - p) * t / k
    return hit + miss


def lh_asr_approx(eps, k, g):
    """The coarse closed form that treats every preimage as having k/g items."""
    e = math.exp(eps)
    return e / ((e + g - 1) * max(k / g, 1.0))


def she_asr_mc(eps, k, trials, seed=0):
    """Monte Carlo ASR for Laplace-summation reports, numpy Generator."""
    rng = np.random.default_rng(seed)
    b = 2.0 / eps
    hits = 0
    chunk = 200_000
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        z = rng.laplace(0.0, b, size=(m, k))
        z[:, 0] += 1.0
        hits += int(np.count_nonzero(np.argmax(z, axis=1) == 0))
        done += m
    return hits / trials


def she_variance(eps, n=1):
    return 8.0 / (n * eps * eps)


def grr_asr(eps, k):
    e = math.exp(eps)
    return e / (e + k - 1)


def ss_asr(eps, k, omega):
    e = math.exp(eps)
    return e / (omega * e + k - omega)


def ss_alt_variance(eps, k, omega, n=1):
    """The longer closed-form subset-variance expression, for adjudication.

    Kept in the factored form generic + excess; algebraically identical to the
    fully expanded rational expression.
    """
    e = math.exp(eps)
    p_star, q_star = ss_pure(eps, k, omega)
    extra = (k - 1) * e * (k - omega + (omega - 1) * e) / (
        (k - omega) ** 2 * (e - 1) ** 2 * n)
    return pure_variance(p_star, q_star, n) + extra


def the_variance(eps, theta, n=1):
    p, q = the_pq(eps, theta)
    return pure_variance(p, q, n)


def optimal_theta(eps):
    """MSE-minimizing threshold via plain golden-section on [0.5, 1]."""
    lo, hi = 0.5, 1.0
    phi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = the_variance(eps, c), the_variance(eps, d)
    for _ in range(200):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = the_variance(eps, c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = the_variance(eps, d)
    return (a + b) / 2


def ue_pq_from_p(eps, p):
    """Tight unary-encoding pair with the given keep probability."""
    e = math.exp(eps)
    return p, p / (e * (1 - p) + p)


def she_mse_exact(eps, n=1):
    return 8.0 / (n * eps * eps)


def ss_outcome_prob(eps, k, omega, x, subset):
    """Exact probability that subset-selection with true value x emits the
    given subset: inclusion branch uniform over C(k-1, omega-1) completions,
    exclusion branch uniform over C(k-1, omega) subsets avoiding x."""
    e = math.exp(eps)
    p_inc = omega * e / (omega * e + k - omega)
    if x in subset:
        return p_inc / math.comb(k - 1, omega - 1)
    return (1 - p_inc) / math.comb(k - 1, omega)

"""Vectorized whole-run simulation kernels.

One call simulates every user of one run: perturb, aggregate, estimate, and
attack, all as array operations.  Each user owns the counter-based stream
derived from (master_seed, run, user), with a fixed per-family draw layout:

- grr: counter 0 = perturbation; the attack guess is the report itself.
- ss:  counter 0 = inclusion; 1..k-1 = selection keys for the non-true
       categories in category order; k = attack pick.
- ue:  counters 0..k-1 = bits in index order; k = attack pick.
- lh:  counter 0 = report hash seed (raw 64-bit); 1 = bucket perturbation;
       2 = attack pick.
- she: counters 0..k-1 = Laplace noise per coordinate; attack is argmax.
- the: counters 0..k-1 = Laplace noise, then thresholding; k = attack pick.

The scalar functions in `protocols`/`attacks` consume draws in exactly this
order, so for any user the kernel and the per-user reference path produce
identical reports and guesses (tested).
"""

from __future__ import annotations

import math

import numpy as np

from .model import Family, ProtocolConfig, stream_seeds, draws_u64, draws_uniform, draws_laplace
from .protocols import (
    estimate_from_counts,
    hash_buckets,
    pure_params,
    the_params,
)


def _pick_other(u: np.ndarray, x0: np.ndarray, m: int) -> np.ndarray:
    """Map uniforms to a category in [0, m) excluding x0, uniformly."""
    j = np.clip((u * (m - 1)).astype(np.int64), 0, m - 2)
    return j + (j >= x0)


def _rank_attack_success(bits: np.ndarray, x0: np.ndarray, u_att: np.ndarray,
                         k: int) -> np.ndarray:
    """Success mask of the uniform-over-support attack given a boolean support
    matrix: pick the r-th set bit, or uniform over [k] when the row is empty."""
    n = bits.shape[0]
    rows = np.arange(n)
    m = bits.sum(axis=1)
    csum = np.cumsum(bits, axis=1)
    pos = csum[rows, x0] - 1
    r = np.clip((u_att * m).astype(np.int64), 0, np.maximum(m - 1, 0))
    hit = bits[rows, x0] & (pos == r) & (m > 0)
    fallback = np.clip((u_att * k).astype(np.int64), 0, k - 1)
    return hit | ((m == 0) & (fallback == x0))


def _run_grr(cfg, x0, seeds):
    n, k = x0.size, cfg.k
    e = math.exp(cfg.eps)
    p = e / (e + k - 1)
    u = draws_uniform(seeds, 0)
    keep = u < p
    other = _pick_other((u - p) / (1 - p), x0, k)
    y0 = np.where(keep, x0, other)
    counts = np.bincount(y0, minlength=k)
    return counts, int(np.count_nonzero(keep))


def _run_ss(cfg, x0, seeds):
    n, k, omega = x0.size, cfg.k, cfg.omega
    e = math.exp(cfg.eps)
    p_inc = omega * e / (omega * e + k - omega)
    include = draws_uniform(seeds, 0) < p_inc
    keys = draws_u64(seeds[:, None], np.arange(1, k)[None, :])
    sel = np.zeros((n, k), dtype=bool)

    def pick(rows_idx, take):
        if rows_idx.size == 0 or take == 0:
            return
        part = np.argpartition(keys[rows_idx], take - 1, axis=1)[:, :take]
        others = part + (part >= x0[rows_idx, None])
        sel[rows_idx[:, None], others] = True

    inc_rows = np.flatnonzero(include)
    exc_rows = np.flatnonzero(~include)
    pick(inc_rows, omega - 1)
    pick(exc_rows, omega)
    sel[inc_rows, x0[inc_rows]] = True

    counts = sel.sum(axis=0)
    u_att = draws_uniform(seeds, k)
    succ = _rank_attack_success(sel, x0, u_att, k)
    return counts, int(np.count_nonzero(succ))


def _run_ue(cfg, x0, seeds):
    n, k = x0.size, cfg.k
    u = draws_uniform(seeds[:, None], np.arange(k)[None, :])
    thr = np.where(np.arange(k)[None, :] == x0[:, None], cfg.p, cfg.q)
    bits = u < thr
    counts = bits.sum(axis=0)
    succ = _rank_attack_success(bits, x0, draws_uniform(seeds, k), k)
    return counts, int(np.count_nonzero(succ))


def _run_lh(cfg, x0, seeds):
    n, k, g = x0.size, cfg.k, cfg.g
    rows = np.arange(n)
    e = math.exp(cfg.eps)
    p = e / (e + g - 1)
    rep_seeds = draws_u64(seeds, 0)
    buckets = hash_buckets(rep_seeds[:, None], np.arange(1, k + 1)[None, :], g)
    bx = buckets[rows, x0]
    u = draws_uniform(seeds, 1)
    keep = u < p
    y0 = np.where(keep, bx, _pick_other((u - p) / (1 - p), bx, g))
    supp = buckets == y0[:, None]
    counts = supp.sum(axis=0)
    succ = _rank_attack_success(supp, x0, draws_uniform(seeds, 2), k)
    return counts, int(np.count_nonzero(succ))


def _noisy_onehot(cfg, x0, seeds):
    n, k = x0.size, cfg.k
    b = 2.0 / cfg.eps
    v = draws_laplace(seeds[:, None], np.arange(k)[None, :], b)
    v[np.arange(n), x0] += 1.0
    return v


def _run_she(cfg, x0, seeds):
    v = _noisy_onehot(cfg, x0, seeds)
    f_hat = v.mean(axis=0)
    succ = np.argmax(v, axis=1) == x0
    return f_hat, int(np.count_nonzero(succ))


def _run_the(cfg, x0, seeds):
    k = cfg.k
    v = _noisy_onehot(cfg, x0, seeds)
    bits = v > cfg.theta
    counts = bits.sum(axis=0)
    succ = _rank_attack_success(bits, x0, draws_uniform(seeds, k), k)
    return counts, int(np.count_nonzero(succ))


def simulate_run(cfg: ProtocolConfig, x0: np.ndarray, master_seed: int,
                 run: int) -> tuple:
    """Simulate one run: every user perturbs their (0-based) value in `x0`
    and is attacked once.

    Returns (f_hat, successes): the frequency estimate over the whole run and
    the number of users whose value the attacker guessed.
    """
    x0 = np.asarray(x0, dtype=np.int64)
    n = x0.size
    seeds = stream_seeds(master_seed, run, np.arange(n))
    fam = Family(cfg.family)
    if fam is Family.GRR:
        counts, succ = _run_grr(cfg, x0, seeds)
        return estimate_from_counts(counts, n, pure_params(cfg)), succ
    if fam is Family.SS:
        counts, succ = _run_ss(cfg, x0, seeds)
        return estimate_from_counts(counts, n, pure_params(cfg)), succ
    if fam is Family.UE:
        counts, succ = _run_ue(cfg, x0, seeds)
        return estimate_from_counts(counts, n, pure_params(cfg)), succ
    if fam is Family.LH:
        counts, succ = _run_lh(cfg, x0, seeds)
        return estimate_from_counts(counts, n, pure_params(cfg)), succ
    if fam is Family.SHE:
        return _run_she(cfg, x0, seeds)
    if fam is Family.THE:
        counts, succ = _run_the(cfg, x0, seeds)
        pp = pure_params(cfg)
        return estimate_from_counts(counts, n, pp), succ
    raise ValueError(f"unknown family {cfg.family!r}")

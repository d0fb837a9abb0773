"""Entropy minimization over variational-distance balls.

The central object is the closed-form minimizer of Shannon entropy over all
distributions within variational distance ``delta`` of a target: sort the
atoms by descending probability, move the whole budget onto the largest
atom, zero every atom past the pivot index where the retained mass first
reaches ``1 - delta``, and trim the pivot atom by the leftover.  The module
computes that minimizer exactly for explicit vectors, for binary i.i.d.
blocks via type classes (blocklengths up to ~1e6), and for finite mixtures
of such blocks.  It also solves the budget-split linear program across
mixture components, carries grid-search oracles for both the linear and the
finite-blocklength split problems, and builds the shared-pivot truncations
of mixture components used to relate the joint and per-component problems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from . import _kernels
from .dist import (
    FiniteDist,
    IIDSpec,
    InvariantError,
    MixedSourceSpec,
    entropy,
    mixture,
)

__all__ = [
    "SmoothedResult",
    "AllocationResult",
    "TypeClassTable",
    "TruncationResult",
    "smooth_min_entropy_dist",
    "smooth_entropy_iid",
    "smooth_entropy_mixed_iid",
    "allocate_budget",
    "allocate_budget_grid",
    "split_smooth_entropy_grid",
    "truncate_components",
    "ball_members",
    "ball_sample_stats",
]

LN2 = math.log(2.0)

# Largest blocklength accepted by the type-class routines.
MAX_TYPECLASS_N = 2_000_000


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    return delta


def _descending_order(probs: np.ndarray) -> np.ndarray:
    # stable: descending probability, ascending original index on ties
    return np.lexsort((np.arange(probs.size), -probs))


def _pivot_index(cum: np.ndarray, probs_sorted: np.ndarray, delta: float) -> int:
    """Index of the first sorted atom whose cumulative mass reaches 1 - delta."""
    jj = int(np.searchsorted(cum, (1.0 - delta) - 1e-12, side="left"))
    if jj >= cum.size:
        jj = int(np.flatnonzero(probs_sorted > 0.0)[-1])
    return jj


@dataclass(frozen=True)
class SmoothedResult:
    """Minimizer of entropy over the delta-ball around a target.

    ``j_star`` is the 1-based pivot rank in sorted order, ``epsilon`` the
    mass trimmed from the pivot atom, and ``sort_perm`` maps sorted rank to
    original index.
    """

    v_delta: FiniteDist
    h_bits: float
    j_star: int
    epsilon: float
    sort_perm: np.ndarray


def smooth_min_entropy_dist(p: FiniteDist, delta: float) -> SmoothedResult:
    """Exact entropy minimizer within variational distance ``delta`` of ``p``."""
    delta = _check_delta(delta)
    order = _descending_order(p.probs)
    srt = p.probs[order]
    cum = np.cumsum(srt)
    jj = _pivot_index(cum, srt, delta)
    tail = float(srt[jj + 1:].sum())
    eps = min(max(delta - tail, 0.0), float(srt[jj]))
    v_sorted = srt.copy()
    v_sorted[0] += delta
    v_sorted[jj] -= eps
    v_sorted[jj + 1:] = 0.0
    v = np.empty_like(v_sorted)
    v[order] = v_sorted
    v_delta = FiniteDist(v)
    return SmoothedResult(
        v_delta=v_delta,
        h_bits=entropy(v_delta, 2.0),
        j_star=jj + 1,
        epsilon=eps,
        sort_perm=order,
    )


def _xlog2(a: np.ndarray) -> np.ndarray:
    return np.where(a > 0.0, -a * np.log(np.where(a > 0.0, a, 1.0)) / LN2, 0.0)


def _h_delta_many(srt: np.ndarray, cum: np.ndarray, cum_ent: np.ndarray,
                  deltas: np.ndarray) -> np.ndarray:
    """Vectorized ball-minimum entropy over many budgets for one sorted target.

    Accepts deltas in [0, 1]; a full budget always reaches entropy zero.
    """
    deltas = np.asarray(deltas, dtype=np.float64)
    jj = np.searchsorted(cum, (1.0 - deltas) - 1e-12, side="left")
    last = int(np.flatnonzero(srt > 0.0)[-1])
    jj = np.minimum(jj, last)
    p0 = srt[0]
    pj = srt[jj]
    tail = cum[-1] - cum[jj]
    eps = np.clip(deltas - tail, 0.0, pj)
    h = cum_ent[jj] - _xlog2(np.array(p0)) - _xlog2(pj) + _xlog2(p0 + deltas) + _xlog2(pj - eps)
    h = np.where(jj == 0, 0.0, np.maximum(h, 0.0))
    return np.where(deltas >= 1.0, 0.0, h)


def _sorted_tables(p: FiniteDist):
    srt = p.probs[_descending_order(p.probs)]
    cum = np.cumsum(srt)
    cum_ent = np.cumsum(_xlog2(srt))
    return srt, cum, cum_ent


# ---------------------------------------------------------------------------
# type-class fast path for (mixtures of) binary i.i.d. blocks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TypeClassTable:
    """Per-class log counts and log per-sequence probabilities for binary blocks.

    Class ``k`` collects the sequences containing ``k`` copies of symbol 0;
    every sequence in a class has the same probability under each i.i.d.
    component and hence under the mixture.
    """

    n: int
    log_counts: np.ndarray
    log_probs: np.ndarray
    log_mixed: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, single_letters, weights, n: int) -> "TypeClassTable":
        n = int(n)
        if not 1 <= n <= MAX_TYPECLASS_N:
            raise ValueError(f"blocklength must be in [1, {MAX_TYPECLASS_N}], got {n}")
        for sl in single_letters:
            if sl.alphabet_size != 2:
                raise ValueError("type-class path requires binary single-letter alphabets")
        weights = np.asarray(weights, dtype=np.float64)
        k = np.arange(n + 1, dtype=np.float64)
        log_counts = gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)

        def scaled_log(counts: np.ndarray, prob: float) -> np.ndarray:
            if prob > 0.0:
                return counts * math.log(prob)
            return np.where(counts > 0, -np.inf, 0.0)

        log_probs = np.stack([scaled_log(k, float(sl.probs[0])) + scaled_log(n - k, float(sl.probs[1]))
                              for sl in single_letters])
        with np.errstate(divide="ignore"):
            log_w = np.where(weights > 0, np.log(np.where(weights > 0, weights, 1.0)), -np.inf)
        log_mixed = logsumexp(log_probs + log_w[:, None], axis=0)
        total = float(np.exp(log_counts + log_mixed).sum())
        if abs(total - 1.0) > 1e-9:
            raise InvariantError(f"type-class masses sum to {total!r}, not 1")
        return cls(n=n, log_counts=log_counts, log_probs=log_probs,
                   log_mixed=log_mixed, weights=weights)

    def sorted_classes(self):
        """(log per-atom prob, class mass) sorted by descending probability."""
        order = np.lexsort((np.arange(self.n + 1), -self.log_mixed))
        log_q = np.ascontiguousarray(self.log_mixed[order])
        mass = np.ascontiguousarray(np.exp(self.log_counts + self.log_mixed)[order])
        return log_q, mass


def _typeclass_smooth_bits(table: TypeClassTable, delta: float) -> float:
    log_q, mass = table.sorted_classes()
    return float(_kernels.class_smooth_entropy(log_q, mass, delta))


def smooth_entropy_iid(spec: IIDSpec, delta: float) -> float:
    """Ball-minimum entropy per symbol of a binary i.i.d. block, via type classes.

    Matches the explicit construction on the expanded product wherever both
    are feasible, but runs in O(n) for blocklengths up to ~1e6.
    """
    delta = _check_delta(delta)
    table = TypeClassTable.build([spec.single_letter], np.array([1.0]), spec.blocklength)
    return _typeclass_smooth_bits(table, delta) / spec.blocklength


def smooth_entropy_mixed_iid(spec: MixedSourceSpec, delta: float) -> float:
    """Ball-minimum entropy per symbol of a mixture of binary i.i.d. blocks."""
    delta = _check_delta(delta)
    singles = []
    lengths = set()
    for c in spec.components:
        if not isinstance(c, IIDSpec):
            raise ValueError("mixed type-class path requires IIDSpec components")
        singles.append(c.single_letter)
        lengths.add(c.blocklength)
    if len(lengths) != 1:
        raise ValueError(f"components must share one blocklength, got {sorted(lengths)}")
    n = lengths.pop()
    table = TypeClassTable.build(singles, spec.weights, n)
    return _typeclass_smooth_bits(table, delta) / n


# ---------------------------------------------------------------------------
# budget allocation across mixture components
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AllocationResult:
    """Solution of the budget-split linear program.

    ``deltas`` are per-component budgets in entropy-sorted order (full
    budget below the active component, remainder at it, none above);
    ``active_index`` is the 1-based pivot position in sorted order and
    ``order`` maps sorted rank to input index.
    """

    deltas: np.ndarray
    objective: float
    active_index: int
    order: np.ndarray


def _sorted_components(entropies, weights):
    ent = np.asarray(entropies, dtype=np.float64)
    wts = np.asarray(weights, dtype=np.float64)
    if ent.ndim != 1 or ent.size < 1 or ent.size != wts.size:
        raise ValueError("need one weight per entropy")
    if np.any(wts < -1e-12) or abs(float(wts.sum()) - 1.0) > 1e-9:
        raise ValueError("weights must be non-negative and sum to 1")
    wts = np.maximum(wts, 0.0) / wts.sum()
    order = np.lexsort((np.arange(ent.size), -ent))
    return ent[order], wts[order], order


def allocate_budget(entropies, weights, delta: float) -> AllocationResult:
    """Minimize the weighted sum of (1 - delta_i) * H_i over feasible splits.

    Feasible splits satisfy delta_i >= 0 and sum_i w_i delta_i = delta.  The
    optimum exhausts the budget greedily on the highest-entropy components.
    """
    delta = _check_delta(delta)
    ent_s, w_s, order = _sorted_components(entropies, weights)
    cum_w = np.cumsum(w_s)
    ii = int(np.searchsorted(cum_w, delta, side="right"))
    ii = min(ii, ent_s.size - 1)
    before = float(cum_w[ii - 1]) if ii > 0 else 0.0
    deltas = np.zeros_like(ent_s)
    deltas[:ii] = 1.0
    deltas[ii] = (delta - before) / w_s[ii]
    objective = float(np.dot(w_s * (1.0 - deltas), ent_s))
    return AllocationResult(deltas=deltas, objective=objective,
                            active_index=ii + 1, order=order)


def _feasible_splits(weights: np.ndarray, delta: float, step: float) -> np.ndarray:
    """Grid of feasible (delta_i) rows; the last component absorbs the remainder."""
    c = weights.size
    if c == 1:
        return np.array([[delta]])

    def axis(w):
        hi = min(1.0, delta / w) if w > 0 else 1.0
        g = np.arange(0.0, hi, step)
        return np.append(g, hi)

    if c == 2:
        g0 = axis(weights[0])
        rem = (delta - weights[0] * g0) / weights[1]
        rows = np.stack([g0, rem], axis=1)
    else:
        g0, g1 = np.meshgrid(axis(weights[0]), axis(weights[1]), indexing="ij")
        g0 = g0.ravel()
        g1 = g1.ravel()
        rem = (delta - weights[0] * g0 - weights[1] * g1) / weights[2]
        rows = np.stack([g0, g1, rem], axis=1)
    ok = (rows[:, -1] >= -1e-12) & (rows[:, -1] <= 1.0 + 1e-12)
    rows = rows[ok]
    if rows.size == 0:
        raise InvariantError("empty feasible grid; allocation constraints inconsistent")
    rows[:, -1] = np.clip(rows[:, -1], 0.0, 1.0)
    return rows


def allocate_budget_grid(entropies, weights, delta: float, step: float = 1e-3) -> float:
    """Brute-force grid minimum of the linear split objective.

    Independent check for :func:`allocate_budget`; exceeds the true optimum
    by at most ``step * max(entropies)``.
    """
    delta = _check_delta(delta)
    if not 0.0 < step <= 0.1:
        raise ValueError(f"step must lie in (0, 0.1], got {step}")
    ent = np.asarray(entropies, dtype=np.float64)
    wts = np.asarray(weights, dtype=np.float64)
    keep = wts > 0.0
    ent, wts = ent[keep], wts[keep]
    if ent.size > 3:
        raise ValueError("grid oracle supports at most 3 weighted components")
    rows = _feasible_splits(wts, delta, step)
    objective = (wts * (1.0 - rows) * ent).sum(axis=1)
    return float(objective.min())


def split_smooth_entropy_grid(components, weights, delta: float,
                              grid_step: float = 1e-3) -> float:
    """Grid minimum of the weighted per-component ball-minimum entropies.

    Evaluates sum_i w_i H_[delta_i](component_i) over feasible budget splits
    of explicit components; the finite-blocklength counterpart of
    :func:`allocate_budget_grid`.
    """
    delta = _check_delta(delta)
    if not 0.0 < grid_step <= 0.1:
        raise ValueError(f"grid_step must lie in (0, 0.1], got {grid_step}")
    comps = list(components)
    wts = np.asarray(weights, dtype=np.float64)
    if len(comps) != wts.size:
        raise ValueError("need one weight per component")
    keep = wts > 0.0
    comps = [c for c, k in zip(comps, keep) if k]
    wts = wts[keep]
    if len(comps) > 3:
        raise ValueError("grid oracle supports at most 3 weighted components")
    rows = _feasible_splits(wts, delta, grid_step)
    objective = np.zeros(rows.shape[0])
    for i, comp in enumerate(comps):
        srt, cum, cum_ent = _sorted_tables(comp)
        objective += wts[i] * _h_delta_many(srt, cum, cum_ent, rows[:, i])
    return float(objective.min())


# ---------------------------------------------------------------------------
# shared-pivot truncation of mixture components
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationResult:
    """Per-component truncations sharing the mixture's pivot index.

    Atoms are ordered by descending mixture probability once; every
    component keeps its own probabilities before the pivot, collects its
    whole remaining mass ``eta_i`` on the pivot atom, and drops the rest.
    The weighted combination of the truncations equals the truncation of
    the mixture, and the weighted distance to the originals is exactly the
    mixture's tail mass past the pivot.
    """

    v_components: list
    v_mixture: FiniteDist
    j_star: int
    etas: np.ndarray
    sort_perm: np.ndarray


def truncate_components(spec: MixedSourceSpec, delta: float) -> TruncationResult:
    delta = _check_delta(delta)
    comps = spec.materialized()
    mixed = mixture(spec)
    order = _descending_order(mixed.probs)
    srt = mixed.probs[order]
    cum = np.cumsum(srt)
    jj = _pivot_index(cum, srt, delta)

    def truncate(probs: np.ndarray) -> tuple[FiniteDist, float]:
        s = probs[order]
        eta = float(s[jj:].sum())
        v_sorted = np.zeros_like(s)
        v_sorted[:jj] = s[:jj]
        v_sorted[jj] = eta
        v = np.empty_like(v_sorted)
        v[order] = v_sorted
        return FiniteDist(v), eta

    v_comps = []
    etas = []
    for comp in comps:
        v, eta = truncate(comp.probs)
        v_comps.append(v)
        etas.append(eta)
    v_mix, _ = truncate(mixed.probs)
    return TruncationResult(v_components=v_comps, v_mixture=v_mix,
                            j_star=jj + 1, etas=np.array(etas), sort_perm=order)


# ---------------------------------------------------------------------------
# sampling oracle for ball members
# ---------------------------------------------------------------------------

def ball_members(p: FiniteDist, delta: float, count: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Random distributions within variational distance ``delta`` of ``p``.

    Draws uniform Dirichlet directions and contracts each toward ``p`` so
    half the samples sit on the ball boundary and half are spread through
    the interior.  A statistical oracle, not an exhaustive search.
    """
    if count < 1:
        raise ValueError("count must be positive")
    n = p.alphabet_size
    u = rng.dirichlet(np.ones(n), size=count)
    dist = 0.5 * np.abs(u - p.probs).sum(axis=1)
    radius = rng.uniform(0.0, delta, size=count) if delta > 0 else np.zeros(count)
    radius[::2] = delta
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dist > 0.0, np.minimum(1.0, radius / dist), 0.0)
    return p.probs + t[:, None] * (u - p.probs)


def ball_sample_stats(result: SmoothedResult, samples: np.ndarray) -> tuple[float, float]:
    """(minimum sample entropy in bits, max partial-sum dominance violation).

    A non-positive second value (up to float noise) certifies that the
    minimizer majorizes every sampled ball member.
    """
    v_sorted = np.sort(result.v_delta.probs)[::-1]
    partials = np.ascontiguousarray(np.cumsum(v_sorted))
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    min_h, max_gap = _kernels.ball_dominance(samples, partials)
    return float(min_h), float(max_gap)

"""Uniform-random-number encoders and fixed-to-variable codes.

The encoder approximates a target distribution by a deterministic map of a
variable-length uniform random string over a coin alphabet of size K.  Each
target sequence gets the length ``m(x) = ceil(log_K(1/P(x)) + n*gamma)``,
lengths partition the support into classes, and within a class the K^m
strings of that length are apportioned among the member sequences in
proportion to their conditional probabilities (largest-remainder rounding,
ties to the lower index).  Exact integer bookkeeping makes the induced
distribution and both construction guarantees checkable to machine
precision:

    distance(target, induced) <= K^(-n*gamma)/2 + gamma
    E[length] <= (1 + K^(-n*gamma)) (H_K(target) + n*gamma + 1)

A budget-``delta`` fixed-to-variable code keeps the most probable sequences
until their mass reaches ``1 - delta`` and assigns ceil-log lengths on the
renormalized kept mass; the tail is the exact decoding-error probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .dist import FiniteDist, InvariantError, entropy, variational_distance
from .smooth import TypeClassTable, _descending_order, _pivot_index

__all__ = [
    "LengthPartition",
    "VLCode",
    "MixedVLCode",
    "FVCode",
    "FVRateReport",
    "partition_lengths",
    "build_vlcode",
    "build_mixed_vlcode",
    "build_fv_code",
    "fv_rate_iid",
]

LN2 = math.log(2.0)


def _check_coding_params(K: int, n: int, gamma: float):
    K = int(K)
    n = int(n)
    gamma = float(gamma)
    if K < 2:
        raise ValueError(f"coin alphabet size K must be >= 2, got {K}")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not gamma > 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return K, n, gamma


@dataclass(frozen=True)
class LengthPartition:
    """Length assignment m(x) and the induced classes over the target support.

    ``lengths[x]`` is -1 for zero-probability sequences, which are excluded
    from the partition.
    """

    lengths: np.ndarray
    classes: dict
    length_pmf: dict

    @property
    def expected_length(self) -> float:
        return float(sum(m * pr for m, pr in self.length_pmf.items()))


def partition_lengths(p_v: FiniteDist, K: int, n: int, gamma: float) -> LengthPartition:
    """Group target sequences by m(x) = ceil(log_K(1/P(x)) + n*gamma)."""
    K, n, gamma = _check_coding_params(K, n, gamma)
    log_k = math.log(K)
    lengths = np.full(p_v.alphabet_size, -1, dtype=np.int64)
    classes: dict[int, list[int]] = {}
    for idx, prob in enumerate(p_v.probs):
        if prob <= 0.0:
            continue
        value = -math.log(prob) / log_k + n * gamma
        m = math.ceil(value - 1e-9)
        if m == 0:
            m = 1  # value is strictly positive; the nudge undershot an integer
        if m < 1:
            raise InvariantError(f"length {m} < 1 for probability {prob}")
        lengths[idx] = m
        classes.setdefault(m, []).append(idx)
    class_arrays = {m: np.array(sorted(idxs), dtype=np.int64) for m, idxs in classes.items()}
    length_pmf = {m: float(p_v.probs[idxs].sum()) for m, idxs in class_arrays.items()}
    return LengthPartition(lengths=lengths, classes=class_arrays, length_pmf=length_pmf)


def _apportion(quota_weights, total: int):
    """Split ``total`` items along exact fractional quotas, largest remainder first."""
    denom = sum(quota_weights)
    quotas = [w * total / denom for w in quota_weights]
    counts = [math.floor(q) for q in quotas]
    leftover = total - sum(counts)
    by_remainder = sorted(range(len(quotas)),
                          key=lambda i: (counts[i] - quotas[i], i))
    for i in by_remainder[:leftover]:
        counts[i] += 1
    return counts


@dataclass(frozen=True)
class VLCode:
    """A built uniform-random-number encoder with its exact metrics.

    ``apportionment[m][x]`` counts the K-ary strings of length m mapped to
    sequence x; per class the counts sum to K^m exactly.
    """

    K: int
    n: int
    gamma: float
    target: FiniteDist
    partition: LengthPartition
    apportionment: dict
    induced: FiniteDist
    expected_length: float
    distance: float
    distance_bound: float
    length_bound: float


def build_vlcode(p_v: FiniteDist, K: int, n: int, gamma: float) -> VLCode:
    """Construct the encoder for one target and evaluate it exactly."""
    K, n, gamma = _check_coding_params(K, n, gamma)
    partition = partition_lengths(p_v, K, n, gamma)
    induced = np.zeros(p_v.alphabet_size)
    apportionment: dict[int, dict[int, int]] = {}
    for m, idxs in partition.classes.items():
        total = K**m
        if len(idxs) > total:
            raise InvariantError(f"class of length {m} holds {len(idxs)} > K^m sequences")
        weights = [Fraction(float(p_v.probs[i])) for i in idxs]
        counts = _apportion(weights, total)
        if sum(counts) != total:
            raise InvariantError("apportionment lost strings")
        apportionment[m] = {int(i): c for i, c in zip(idxs, counts)}
        pr_m = partition.length_pmf[m]
        for i, c in zip(idxs, counts):
            induced[i] = pr_m * (c / total)
    induced_dist = FiniteDist(induced)
    expected_length = partition.expected_length
    distance = variational_distance(p_v, induced_dist)
    coin_decay = float(K) ** (-n * gamma)
    distance_bound = 0.5 * coin_decay + gamma
    length_bound = (1.0 + coin_decay) * (entropy(p_v, K) + n * gamma + 1.0)
    if distance > distance_bound + 1e-12:
        raise InvariantError(f"distance {distance} exceeds bound {distance_bound}")
    if expected_length > length_bound + 1e-9:
        raise InvariantError(f"length {expected_length} exceeds bound {length_bound}")
    return VLCode(K=K, n=n, gamma=gamma, target=p_v, partition=partition,
                  apportionment=apportionment, induced=induced_dist,
                  expected_length=expected_length, distance=distance,
                  distance_bound=distance_bound, length_bound=length_bound)


@dataclass(frozen=True)
class MixedVLCode:
    """Per-component encoders with weight-averaged metrics.

    ``aggregate_distance`` is the weighted sum of component distances (the
    quantity the per-component problem constrains); ``mixture_distance``
    compares the mixed target against the mixed induced distribution and is
    never larger, by joint convexity of the distance.
    """

    codes: list
    weights: np.ndarray
    length_pmf: dict
    expected_length: float
    aggregate_distance: float
    mixture_distance: float


def build_mixed_vlcode(targets, weights, K: int, n: int, gamma: float) -> MixedVLCode:
    targets = list(targets)
    weights = np.asarray(weights, dtype=np.float64)
    if len(targets) != weights.size or len(targets) < 1:
        raise ValueError("need one weight per target")
    if np.any(weights < -1e-12) or abs(float(weights.sum()) - 1.0) > 1e-9:
        raise ValueError("weights must be non-negative and sum to 1")
    weights = np.maximum(weights, 0.0) / weights.sum()
    sizes = {t.alphabet_size for t in targets}
    if len(sizes) != 1:
        raise ValueError("targets must share one alphabet")
    codes = [build_vlcode(t, K, n, gamma) for t in targets]
    length_pmf: dict[int, float] = {}
    for w, code in zip(weights, codes):
        for m, pr in code.partition.length_pmf.items():
            length_pmf[m] = length_pmf.get(m, 0.0) + float(w) * pr
    expected_length = float(np.dot(weights, [c.expected_length for c in codes]))
    aggregate_distance = float(np.dot(weights, [c.distance for c in codes]))
    mixed_target = FiniteDist(sum(w * t.probs for w, t in zip(weights, targets)))
    mixed_induced = FiniteDist(sum(w * c.induced.probs for w, c in zip(weights, codes)))
    mixture_distance = variational_distance(mixed_target, mixed_induced)
    return MixedVLCode(codes=codes, weights=weights, length_pmf=length_pmf,
                       expected_length=expected_length,
                       aggregate_distance=aggregate_distance,
                       mixture_distance=mixture_distance)


# ---------------------------------------------------------------------------
# fixed-to-variable codes with decoding error at most delta
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FVCode:
    """Explicit budget-``delta`` fixed-to-variable code over a block distribution.

    ``kept`` holds original sequence indices in descending-probability order;
    ``lengths`` aligns with it.  ``expected_length`` weights kept lengths by
    the original (unrenormalized) probabilities; ``rate`` divides by the
    blocklength.
    """

    kept: np.ndarray
    error_probability: float
    lengths: np.ndarray
    expected_length: float
    rate: float
    kraft_sum: float
    K: int
    n: int


def build_fv_code(p: FiniteDist, K: int, n: int, delta: float) -> FVCode:
    """Keep the most probable sequences up to mass 1 - delta; ceil-log lengths."""
    K = int(K)
    n = int(n)
    if K < 2 or n < 1:
        raise ValueError("need K >= 2 and n >= 1")
    delta = float(delta)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    order = _descending_order(p.probs)
    srt = p.probs[order]
    cum = np.cumsum(srt)
    jj = _pivot_index(cum, srt, delta)
    kept = order[:jj + 1]
    error = float(srt[jj + 1:].sum())
    kappa = float(srt[:jj + 1].sum())
    log_k = math.log(K)
    lengths = np.array(
        [max(math.ceil((math.log(kappa) - math.log(q)) / log_k - 1e-9), 0)
         for q in srt[:jj + 1]],
        dtype=np.int64,
    )
    expected_length = float(np.dot(srt[:jj + 1], lengths))
    kraft = float(np.sum(np.power(float(K), -lengths.astype(np.float64))))
    return FVCode(kept=kept, error_probability=error, lengths=lengths,
                  expected_length=expected_length, rate=expected_length / n,
                  kraft_sum=kraft, K=K, n=n)


@dataclass(frozen=True)
class FVRateReport:
    """Metrics of the type-class fixed-to-variable code for a binary i.i.d. block."""

    error_probability: float
    expected_length: float
    rate: float
    kraft_sum: float
    kept_classes: int
    K: int
    n: int


def fv_rate_iid(single_letter: FiniteDist, n: int, delta: float, K: int = 2) -> FVRateReport:
    """Budget-``delta`` code rate for a binary i.i.d. block, via type classes.

    Same construction as :func:`build_fv_code` on the expanded product, but
    per class, so blocklengths up to ~1e6 stay cheap.
    """
    K = int(K)
    if K < 2:
        raise ValueError(f"coin alphabet size K must be >= 2, got {K}")
    delta = float(delta)
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta must lie in [0, 1), got {delta}")
    table = TypeClassTable.build([single_letter], np.array([1.0]), n)
    log_q, mass = table.sorted_classes()
    c, kept_in, kept_total, _, _ = _kernels.class_kept_scan(log_q, mass, delta)
    c = int(c)
    kappa = kept_total
    log_kappa = math.log(kappa)
    log_k = math.log(K)
    kept_mass = mass[:c + 1].copy()
    kept_mass[c] = kept_in
    lengths = np.ceil((log_kappa - log_q[:c + 1]) / log_k - 1e-9)
    lengths = np.maximum(lengths, 0.0)
    expected_length = float(np.dot(kept_mass, lengths))
    # Kraft sum per class: atom count = class mass / per-atom probability.
    with np.errstate(divide="ignore", invalid="ignore"):
        log_atoms = np.where(kept_mass > 0.0,
                             np.log(np.where(kept_mass > 0.0, kept_mass, 1.0)) - log_q[:c + 1],
                             -np.inf)
    finite = np.isfinite(log_atoms)
    kraft = float(np.exp(log_atoms[finite] - lengths[finite] * log_k).sum())
    return FVRateReport(error_probability=max(1.0 - kappa, 0.0),
                        expected_length=expected_length,
                        rate=expected_length / n,
                        kraft_sum=kraft, kept_classes=c + 1, K=K, n=int(n))

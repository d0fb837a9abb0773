"""Exact arithmetic on explicit finite probability distributions.

Everything downstream (ball minimizers, encoders, rate formulas) works in
terms of the containers defined here: explicit probability vectors, i.i.d.
block specs, finite mixtures of those, and memoryless channels given as
stochastic matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

__all__ = [
    "InvariantError",
    "FiniteDist",
    "IIDSpec",
    "MixedSourceSpec",
    "DMC",
    "bernoulli",
    "variational_distance",
    "entropy",
    "mixture",
    "product_extension",
    "dmc_output",
]

# Inputs whose total mass is off by more than this are rejected instead of
# silently renormalized.
SUM_TOLERANCE = 1e-9

# Explicit product extensions beyond this many outcomes are refused; use the
# type-class routines for large i.i.d. blocks.
MAX_EXPLICIT_OUTCOMES = 2**24


class InvariantError(RuntimeError):
    """A numeric invariant that should hold by construction was violated."""


def _as_prob_vector(values, what: str) -> np.ndarray:
    p = np.ascontiguousarray(values, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise ValueError(f"{what} must be a non-empty 1-D vector")
    if np.any(p < -1e-12) or not np.all(np.isfinite(p)):
        raise ValueError(f"{what} must have finite non-negative entries")
    p = np.where(p < 0.0, 0.0, p)
    total = float(p.sum())
    if abs(total - 1.0) > SUM_TOLERANCE:
        raise ValueError(f"{what} must sum to 1 (got {total!r})")
    if total != 1.0:
        p = p / total
    p.setflags(write=False)
    return p


@dataclass(frozen=True)
class FiniteDist:
    """A probability vector over an indexed finite alphabet 0..N-1.

    Entries must be non-negative and sum to 1 within 1e-9; the vector is
    renormalized at construction so downstream code can rely on exact unit
    mass up to float rounding.
    """

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _as_prob_vector(self.probs, "probs"))

    @property
    def alphabet_size(self) -> int:
        return int(self.probs.size)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteDist) and np.array_equal(self.probs, other.probs)


def bernoulli(q: float) -> FiniteDist:
    """Binary distribution (q, 1-q); symbol 0 carries probability q."""
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"Bernoulli parameter must be in [0, 1], got {q}")
    return FiniteDist(np.array([q, 1.0 - q]))


@dataclass(frozen=True)
class IIDSpec:
    """An i.i.d. block source: ``blocklength`` independent draws of ``single_letter``."""

    single_letter: FiniteDist
    blocklength: int

    def __post_init__(self):
        if not isinstance(self.single_letter, FiniteDist):
            raise ValueError("single_letter must be a FiniteDist")
        if int(self.blocklength) < 1:
            raise ValueError("blocklength must be a positive integer")
        object.__setattr__(self, "blocklength", int(self.blocklength))

    @property
    def block_alphabet_size(self) -> int:
        return self.single_letter.alphabet_size**self.blocklength


def _component_block_size(component) -> int:
    if isinstance(component, FiniteDist):
        return component.alphabet_size
    if isinstance(component, IIDSpec):
        return component.block_alphabet_size
    raise ValueError(f"components must be FiniteDist or IIDSpec, got {type(component)!r}")


@dataclass(frozen=True)
class MixedSourceSpec:
    """A finite convex mixture of component sources over one common alphabet.

    Components may be explicit distributions or i.i.d. block specs; mixing
    weights are non-negative and sum to 1.
    """

    components: tuple
    weights: np.ndarray

    def __post_init__(self):
        components = tuple(self.components)
        if not components:
            raise ValueError("at least one component required")
        sizes = {_component_block_size(c) for c in components}
        if len(sizes) != 1:
            raise ValueError(f"components must share one alphabet, got sizes {sorted(sizes)}")
        weights = _as_prob_vector(self.weights, "weights")
        if weights.size != len(components):
            raise ValueError("one weight per component required")
        object.__setattr__(self, "components", components)
        object.__setattr__(self, "weights", weights)

    def materialized(self) -> list[FiniteDist]:
        """Expand every component to an explicit distribution."""
        out = []
        for c in self.components:
            out.append(c if isinstance(c, FiniteDist) else product_extension(c))
        return out


def mixed_iid(params, n: int) -> MixedSourceSpec:
    """Mixture of binary i.i.d. blocks from ``(bernoulli_q, weight)`` pairs."""
    comps = tuple(IIDSpec(bernoulli(q), n) for q, _ in params)
    weights = np.array([w for _, w in params], dtype=np.float64)
    return MixedSourceSpec(comps, weights)


@dataclass(frozen=True)
class DMC:
    """A discrete memoryless channel as a row-stochastic matrix W(y|x)."""

    rows: np.ndarray

    def __post_init__(self):
        w = np.ascontiguousarray(self.rows, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise ValueError("rows must be a non-empty 2-D matrix")
        w = np.stack([_as_prob_vector(row, "channel row") for row in w])
        w.setflags(write=False)
        object.__setattr__(self, "rows", w)

    @property
    def input_size(self) -> int:
        return int(self.rows.shape[0])

    @property
    def output_size(self) -> int:
        return int(self.rows.shape[1])


def variational_distance(p: FiniteDist, q: FiniteDist) -> float:
    """Half the L1 distance between two distributions on one alphabet."""
    if p.alphabet_size != q.alphabet_size:
        raise ValueError("distributions must share one alphabet")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


def entropy(p: FiniteDist, base: float = 2.0) -> float:
    """Shannon entropy of ``p`` in log-``base`` units (0 log 1/0 = 0)."""
    if not base > 1.0:
        raise ValueError(f"base must exceed 1, got {base}")
    probs = p.probs
    mask = probs > 0.0
    h_nats = -float(np.dot(probs[mask], np.log(probs[mask])))
    return max(h_nats, 0.0) / np.log(base)


def mixture(spec: MixedSourceSpec) -> FiniteDist:
    """Entrywise convex combination of the materialized components."""
    comps = spec.materialized()
    acc = np.zeros(comps[0].alphabet_size)
    for w, c in zip(spec.weights, comps):
        acc += w * c.probs
    return FiniteDist(acc)


def product_extension(spec: IIDSpec) -> FiniteDist:
    """Explicit i.i.d. product distribution, outcomes in lexicographic order."""
    if spec.block_alphabet_size > MAX_EXPLICIT_OUTCOMES:
        raise ValueError(
            f"explicit product would have {spec.block_alphabet_size} outcomes "
            f"(limit {MAX_EXPLICIT_OUTCOMES}); use the type-class routines instead"
        )
    single = spec.single_letter.probs
    block = reduce(lambda acc, _: np.multiply.outer(acc, single).ravel(),
                   range(spec.blocklength), np.array([1.0]))
    return FiniteDist(block)


def dmc_output(p: FiniteDist, w: DMC) -> FiniteDist:
    """Output distribution q(y) = sum_x p(x) W(y|x)."""
    if p.alphabet_size != w.input_size:
        raise ValueError("input distribution does not match channel input size")
    return FiniteDist(p.probs @ w.rows)

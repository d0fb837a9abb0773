"""Hot numeric kernels, in numba and pure-numpy variants.

Two loops dominate runtime: the class-level scan that locates the pivot atom
of the ball minimizer inside a sorted type-class table (arrays of length
n+1 for blocklengths up to 1e6), and the batch dominance/entropy check used
by the sampling oracle (up to millions of sampled distributions).

Contract shared by both backends, for ``class_kept_scan(log_q, mass, delta)``:

* ``log_q``  natural-log per-atom probability of each class, sorted
  non-increasing; ``-inf`` allowed for impossible classes.
* ``mass``   total probability mass per class (count times per-atom
  probability); zero where the product underflows.
* returns ``(pivot_class, kept_in_pivot, kept_total, trimmed_mass,
  single_atom)`` where the first ``kept_total >= 1 - delta`` of sorted mass
  is retained, ``kept_in_pivot`` of it inside the pivot class rounded up to
  whole atoms where atoms are resolvable in float, and ``trimmed_mass`` is
  the amount removed from the pivot atom itself.

``class_smooth_entropy`` turns the scan into the entropy (in bits) of the
minimizing distribution: budget added to the top atom, everything past the
pivot zeroed, ``trimmed_mass`` removed at the pivot.

``ball_dominance(samples, v_partials)`` returns the minimum entropy (bits)
over the sampled rows and the largest violation of the sorted-partial-sum
dominance of ``v_partials`` over the rows.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import BACKEND

LN2 = math.log(2.0)

# Cumulative-mass comparisons tolerate this much float drift when deciding
# whether the budget boundary has been reached.
_EDGE_TOL = 1e-12

# Atom counts inside the pivot class are rounded to integers only below this
# ratio; beyond it the rounding correction is under one part in 2^52.
_MAX_COUNT = 2.0**52


# ---------------------------------------------------------------------------
# pure-numpy fallback
# ---------------------------------------------------------------------------

def _xlog2(a: float) -> float:
    return -a * math.log(a) / LN2 if a > 0.0 else 0.0


def _kept_scan_numpy(log_q, mass, delta):
    target = 1.0 - delta
    cum = np.cumsum(mass)
    c = int(np.searchsorted(cum, target - _EDGE_TOL, side="left"))
    if c >= mass.size:
        c = int(np.flatnonzero(mass > 0.0)[-1])
    m_prev = float(cum[c - 1]) if c > 0 else 0.0
    x = min(max(target - m_prev, 0.0), float(mass[c]))
    q = math.exp(log_q[c])
    single_atom = False
    if q > 0.0 and x / q < _MAX_COUNT:
        t = math.ceil(x / q - 1e-9)
        if t < 1:
            t = 1
        kept_in = min(t * q, float(mass[c]))
        single_atom = c == 0 and t == 1
    else:
        kept_in = x
    kept_total = m_prev + kept_in
    eps = delta - (1.0 - kept_total)
    eps = min(max(eps, 0.0), q)
    return c, kept_in, kept_total, eps, single_atom


def _smooth_entropy_numpy(log_q, mass, delta):
    c, kept_in, _, eps, single_atom = _kept_scan_numpy(log_q, mass, delta)
    if single_atom:
        return 0.0
    head_m = mass[:c]
    head_lq = log_q[:c]
    pos = head_m > 0.0
    kept_bits = float(np.dot(head_m[pos], -head_lq[pos])) / LN2
    kept_bits += kept_in * (-float(log_q[c])) / LN2
    q1 = math.exp(log_q[0])
    qc = math.exp(log_q[c])
    h = kept_bits
    h -= q1 * (-log_q[0]) / LN2
    h += _xlog2(q1 + delta)
    h -= qc * (-log_q[c]) / LN2
    h += _xlog2(max(qc - eps, 0.0))
    return max(h, 0.0)


def _ball_dominance_numpy(samples, v_partials):
    srt = np.sort(samples, axis=1)[:, ::-1]
    partials = np.cumsum(srt, axis=1)
    max_gap = float(np.max(partials - v_partials))
    contrib = np.where(srt > 0.0, srt * np.log(np.where(srt > 0.0, srt, 1.0)), 0.0)
    min_h = float((-contrib.sum(axis=1)).min())
    return min_h / LN2, max_gap


# ---------------------------------------------------------------------------
# numba variant
# ---------------------------------------------------------------------------

if BACKEND == "numba":
    from numba import njit

    @njit(cache=True)
    def _kept_scan_numba(log_q, mass, delta):  # pragma: no cover - numba
        n = mass.shape[0]
        target = 1.0 - delta
        edge = target - _EDGE_TOL
        # compensated forward accumulation in descending-probability order
        acc = 0.0
        comp = 0.0
        c = -1
        m_prev = 0.0
        for i in range(n):
            before = acc
            y = mass[i] - comp
            t = acc + y
            comp = (t - acc) - y
            acc = t
            if acc >= edge:
                c = i
                m_prev = before
                break
        if c < 0:
            for i in range(n - 1, -1, -1):
                if mass[i] > 0.0:
                    c = i
                    break
            m_prev = acc - mass[c]
        x = target - m_prev
        if x < 0.0:
            x = 0.0
        if x > mass[c]:
            x = mass[c]
        q = math.exp(log_q[c])
        single_atom = False
        if q > 0.0 and x / q < _MAX_COUNT:
            t_atoms = math.ceil(x / q - 1e-9)
            if t_atoms < 1:
                t_atoms = 1
            kept_in = t_atoms * q
            if kept_in > mass[c]:
                kept_in = mass[c]
            single_atom = c == 0 and t_atoms == 1
        else:
            kept_in = x
        kept_total = m_prev + kept_in
        eps = delta - (1.0 - kept_total)
        if eps < 0.0:
            eps = 0.0
        if eps > q:
            eps = q
        return c, kept_in, kept_total, eps, single_atom

    @njit(cache=True)
    def _smooth_entropy_numba(log_q, mass, delta):  # pragma: no cover - numba
        c, kept_in, _, eps, single_atom = _kept_scan_numba(log_q, mass, delta)
        if single_atom:
            return 0.0
        acc = 0.0
        comp = 0.0
        for i in range(c):
            if mass[i] > 0.0:
                y = mass[i] * (-log_q[i]) - comp
                t = acc + y
                comp = (t - acc) - y
                acc = t
        kept_bits = acc / LN2 + kept_in * (-log_q[c]) / LN2
        q1 = math.exp(log_q[0])
        qc = math.exp(log_q[c])
        h = kept_bits
        h -= q1 * (-log_q[0]) / LN2
        a = q1 + delta
        if a > 0.0:
            h += -a * math.log(a) / LN2
        h -= qc * (-log_q[c]) / LN2
        b = qc - eps
        if b > 0.0:
            h += -b * math.log(b) / LN2
        if h < 0.0:
            h = 0.0
        return h

    @njit(cache=True)
    def _ball_dominance_numba(samples, v_partials):  # pragma: no cover - numba
        s_count, n = samples.shape
        buf = np.empty(n)
        min_h = np.inf
        max_gap = -np.inf
        for s in range(s_count):
            # descending insertion sort into a reused buffer; rows are short
            for j in range(n):
                v = samples[s, j]
                i = j
                while i > 0 and buf[i - 1] < v:
                    buf[i] = buf[i - 1]
                    i -= 1
                buf[i] = v
            acc = 0.0
            h = 0.0
            for j in range(n):
                v = buf[j]
                acc += v
                gap = acc - v_partials[j]
                if gap > max_gap:
                    max_gap = gap
                if v > 0.0:
                    h -= v * math.log(v)
            if h < min_h:
                min_h = h
        return min_h / LN2, max_gap

    class_kept_scan = _kept_scan_numba
    class_smooth_entropy = _smooth_entropy_numba
    ball_dominance = _ball_dominance_numba
else:
    class_kept_scan = _kept_scan_numpy
    class_smooth_entropy = _smooth_entropy_numpy
    ball_dominance = _ball_dominance_numpy

"""Additive energy, representation counts and the centred progression count.

``t_ordered`` is ``sum_{b in A} r_{A+A}(2b)``: ordered pairs (x, y) with
x + y = 2b, the trivial pair x = y = b included.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fq
from .progressions import _combine, _row_chunks, _width, count_3aps, rep_at, _rep_counts_conv, choose_method
from .sets import GroundSet

_DENSE_SUM_RANGE = 2 * 10**7


@dataclass(frozen=True)
class EnergyProfile:
    size: int
    energy: int
    rep_counts: dict
    t_ordered: int
    t_nontrivial_unordered: int | None

    def rep(self, s: int) -> int:
        return self.rep_counts.get(int(s), 0)


def _rep_pairs(A: GroundSet) -> dict:
    """r_{A+A} by explicit pair sums; dense bincount when the sum range allows."""
    m = A.members
    if A.is_field:
        lo_sum, span = 0, A.space.size
    else:
        lo_sum = 2 * int(m[0]) if len(m) else 0
        span = 2 * (int(m[-1]) - int(m[0])) + 1 if len(m) else 0
    if span <= _DENSE_SUM_RANGE:
        acc = np.zeros(span, dtype=np.int64)
        for lo, hi in _row_chunks(len(m), len(m), _width(A)):
            s = _combine(A, 1, m[lo:hi], 1, m).reshape(-1) - lo_sum
            acc += np.bincount(s, minlength=span)
        nz = np.flatnonzero(acc)
        return dict(zip((nz + lo_sum).tolist(), acc[nz].tolist()))
    keys, counts = [], []
    for lo, hi in _row_chunks(len(m), len(m), _width(A)):
        k, c = np.unique(_combine(A, 1, m[lo:hi], 1, m), return_counts=True)
        keys.append(k)
        counts.append(c)
    k = np.concatenate(keys)
    c = np.concatenate(counts)
    uk, inv = np.unique(k, return_inverse=True)
    return dict(zip(uk.tolist(), np.bincount(inv, weights=c).astype(np.int64).tolist()))


def _rep_conv(A: GroundSet) -> dict:
    r, offset = _rep_counts_conv(A)
    nz = np.flatnonzero(r)
    base = 0 if offset is None else offset
    return dict(zip((nz + base).tolist(), r[nz].tolist()))


def energy_profile(A: GroundSet, method: str = "auto", with_progressions: bool = True) -> EnergyProfile:
    n = len(A)
    if n > 0 and 4 * math.log2(n) > 63:
        raise OverflowError("energy may exceed 64 bits")
    if method == "auto":
        method = choose_method(A) if n else "pairs"
    reps = _rep_conv(A) if method == "conv" else _rep_pairs(A)
    energy = sum(v * v for v in reps.values())
    m = A.members
    doubled = fq.int_mul(A.space, 2, m) if A.is_field else 2 * m
    t_ordered = sum(reps.get(int(s), 0) for s in doubled.tolist())
    tnu = None
    if with_progressions and not (A.is_field and A.space.p_char < 3):
        tnu = count_3aps(A).unordered_nontrivial
    return EnergyProfile(n, energy, reps, t_ordered, tnu)


def energy_by_differences(A: GroundSet) -> int:
    """E(A) as ``sum_d r_{A-A}(d)**2``; an accumulation path independent of r_{A+A}."""
    m = A.members
    counts: dict = {}
    for lo, hi in _row_chunks(len(m), len(m), _width(A)):
        k, c = np.unique(_combine(A, 1, m[lo:hi], -1, m), return_counts=True)
        for kk, cc in zip(k.tolist(), c.tolist()):
            counts[kk] = counts.get(kk, 0) + cc
    return sum(v * v for v in counts.values())


@dataclass(frozen=True)
class CauchySchwarz:
    lhs: int
    rhs: int

    @property
    def slack_ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.nan

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs


def cauchy_schwarz_report(A: GroundSet, profile: EnergyProfile | None = None) -> CauchySchwarz:
    """``T(A)**2 <= |A| E(A)`` with T the centred, trivial-inclusive count."""
    prof = profile or energy_profile(A, with_progressions=False)
    return CauchySchwarz(prof.t_ordered**2, prof.size * prof.energy)


def energy_exponent_report(A: GroundSet, profile: EnergyProfile | None = None) -> float:
    """Empirical exponent ``log E(A) / log|A| - 2``."""
    if len(A) < 2:
        raise ValueError("need |A| >= 2")
    prof = profile or energy_profile(A, with_progressions=False)
    return math.log(prof.energy) / math.log(len(A)) - 2


def interval_energy(N: int) -> int:
    return (2 * N**3 + N) // 3

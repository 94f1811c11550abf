"""Empirical supersaturation: random sets above the extremal density, their
exact 3-AP counts, and the lower bounds those counts must respect.

Trial ``j`` at grid index ``i`` samples from the stream ``(seed, i, j)``, so
results are independent of the thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import spearmanr

from . import fq
from .constants import HSpec, compute_constants, supersat_log2_bound, varnavides_count
from .constructions import random_subset_exact
from .errors import ParameterRangeError
from .progressions import count_3aps
from .sets import Interval

FIELD_LIMIT = 10**6
CORRECTION_FLAG = 0.01


@dataclass(frozen=True)
class SupersatReport:
    params: dict
    trial: int
    size: int
    measured_count: int
    predicted_lower_bound: float
    ratio: float
    passed: bool
    expected_random: float | None = None
    ratio_random: float | None = None
    corrected_bound: float | None = None
    correction_share: float | None = None
    flagged: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def _ratio(a: float, b: float) -> float:
    return a / b if b > 0 else math.inf


def _run(jobs, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda f: f(), jobs))
    return [f() for f in jobs]


def verify_fqn_supersaturation(q: int, n: int, s_grid, trials: int, seed: int,
                               threads: int = 1) -> list[SupersatReport]:
    """Random subsets of size floor(q^{n(1-s)}) against the explicit removal-lemma bound.

    ``measured_count`` is the ordered nontrivial count (triangles x + y = 2b
    with x != y), the quantity the bound speaks about. The bound is tested
    as is; ``corrected_bound`` subtracts the |A| trivial triangles and
    ``flagged`` marks rows where that correction exceeds 1% of the bound.
    """
    space = fq.make_space(q, n)
    space.require_ap(3)
    if space.size > FIELD_LIMIT:
        raise ParameterRangeError(f"q^n = {space.size} exceeds {FIELD_LIMIT}")
    cq = compute_constants(q).c_q
    Q = space.size
    for s in s_grid:
        if not 0 <= s < cq:
            raise ParameterRangeError(f"s = {s} outside [0, c_q = {cq:.6f})")
        if math.floor(Q ** (1 - s)) < 3:
            raise ParameterRangeError(f"s = {s} leaves fewer than 3 elements")

    def job(i: int, s: float, j: int):
        def run():
            size = math.floor(Q ** (1 - s))
            A = random_subset_exact(space, size, seed, i, j)
            measured = count_3aps(A).ordered_nontrivial
            bound = 2.0 ** supersat_log2_bound(q, n, s)
            expected = size * (size - 1) * (size - 2) / (Q - 2)
            return SupersatReport(
                params={"q": q, "n": n, "s": s, "seed": seed},
                trial=j,
                size=size,
                measured_count=measured,
                predicted_lower_bound=bound,
                ratio=_ratio(measured, bound),
                passed=measured >= bound,
                expected_random=expected,
                ratio_random=_ratio(measured, expected),
                corrected_bound=bound - size,
                correction_share=size / bound,
                flagged=size > CORRECTION_FLAG * bound,
            )
        return run

    jobs = [job(i, s, j) for i, s in enumerate(s_grid) for j in range(trials)]
    return _run(jobs, threads)


def verify_varnavides(N: int, eta_grid, h: HSpec | str, trials: int, seed: int,
                      threads: int = 1) -> list[SupersatReport]:
    """Random subsets of [N] of size ceil(eta N) against the guaranteed count.

    The formula is evaluated first for every eta, so a precondition failure
    raises before any sampling.
    """
    if isinstance(h, str):
        h = HSpec.parse(h)
    bounds = [varnavides_count(N, eta, h).value for eta in eta_grid]

    def job(i: int, eta: float, j: int):
        def run():
            size = math.ceil(eta * N)
            A = random_subset_exact(Interval(N), size, seed, i, j)
            measured = count_3aps(A).unordered_nontrivial
            return SupersatReport(
                params={"N": N, "eta": eta, "h": [h.family, h.exponent, h.C], "seed": seed},
                trial=j,
                size=size,
                measured_count=measured,
                predicted_lower_bound=bounds[i],
                ratio=_ratio(measured, bounds[i]),
                passed=measured >= bounds[i],
            )
        return run

    jobs = [job(i, eta, j) for i, eta in enumerate(eta_grid) for j in range(trials)]
    return _run(jobs, threads)


def monotonicity(reports: list[SupersatReport], key: str) -> float:
    """Spearman correlation between ``params[key]`` and the measured counts."""
    x = np.array([r.params[key] for r in reports], dtype=np.float64)
    y = np.array([r.measured_count for r in reports], dtype=np.float64)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return math.nan
    return float(spearmanr(x, y).statistic)

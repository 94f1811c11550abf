"""The Ellenberg-Gijswijt constants c_q, C_q and closed-form bound evaluators.

``q**(1 - c_q) = min_{0<y<1} g(y)`` with ``g(y) = (1 + y + ... + y**(q-1)) / y**((q-1)/3)``
and ``C_q = 1 + 1/c_q``.

Every bound that can overflow a double is evaluated as a base-2 logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import fq
from .errors import ParameterRangeError, PreconditionFailed, QTooSmall

INV_PHI = (math.sqrt(5) - 1) / 2
LOG2E = math.log2(math.e)

# Container constant for r-uniform hypergraphs: c(r) <= 1000 * r * (r!)**3.
C3_CONTAINER = 1000 * 3 * math.factorial(3) ** 3
TAU_CEILING_R3 = 1 / (200 * 3 * math.factorial(3) ** 2)


def g_value(q: int, y):
    y = np.asarray(y, dtype=np.float64)
    num = sum(y**i for i in range(q))
    return num / y ** ((q - 1) / 3)


def golden_section(f, a: float, b: float, rel_tol: float = 1e-12, max_iter: int = 500):
    """Minimise a unimodal f on [a, b]. Returns ``(x, f(x), iterations)``."""
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while it < max_iter and (b - a) > rel_tol * 0.5 * (abs(a) + abs(b)):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        it += 1
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    return x, fx, it


@dataclass(frozen=True)
class QConstants:
    q: int
    y_star: float
    g_star: float
    c_q: float
    C_q: float
    bracket_validated: bool = True


def _single_valley(vals: np.ndarray) -> bool:
    s = np.sign(np.diff(vals))
    s = s[s != 0]
    return len(s) > 0 and np.count_nonzero(s[1:] != s[:-1]) <= 1 and s[0] < 0 <= s[-1]


@lru_cache(maxsize=None)
def compute_constants(q: int) -> QConstants:
    fq.factor_prime_power(q)
    if q < 3:
        raise QTooSmall("c_q is only defined for q >= 3")

    def g(y):
        return float(g_value(q, y))

    grid = np.geomspace(1e-6, 1 - 1e-6, 256)
    vals = g_value(q, grid)
    validated = _single_valley(vals)
    if not validated:
        grid = np.linspace(1e-6, 1 - 1e-6, 100_001)
        vals = g_value(q, grid)
    i = int(np.argmin(vals))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    y, gy, _ = golden_section(g, lo, hi)
    c_q = 1 - math.log(gy) / math.log(q)
    return QConstants(q=q, y_star=float(y), g_star=float(gy), c_q=c_q, C_q=1 + 1 / c_q,
                      bracket_validated=bool(validated))


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict
    log2_value: float
    metadata: dict = field(default_factory=dict)

    @property
    def value(self) -> float | None:
        if abs(self.log2_value) < 1000:
            return 2.0**self.log2_value
        return None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": self.inputs,
            "log2_value": self.log2_value,
            "value": self.value,
            "metadata": self.metadata,
        }


def eg_bound(q: int, n: int) -> BoundReport:
    """Cap-set style upper bound ``f_3(F_q^n) <= q**(n(1-c_q))``."""
    c = compute_constants(q)
    return BoundReport("eg_bound", {"q": q, "n": n}, n * (1 - c.c_q) * math.log2(q))


def r3_bounds(N: float, c_upper: float) -> tuple[BoundReport, BoundReport]:
    """Known lower/upper envelopes for r_3(N), natural logs, implied constants 1."""
    if N < 3:
        raise ParameterRangeError("r3 bounds need N >= 3")
    if c_upper <= 0:
        raise ParameterRangeError("the upper-bound exponent constant must be positive")
    L = math.log(N)
    lower = math.log2(N) + 0.25 * math.log2(L) - 2 * math.sqrt(2) * math.sqrt(L)
    upper = math.log2(N) - (1 + c_upper) * math.log2(L)
    inputs = {"N": N, "c_upper": c_upper}
    return BoundReport("r3_lower", inputs, lower), BoundReport("r3_upper", inputs, upper)


def interval_edge_floor(N: int) -> int:
    """Pairs a < b in [1, N/2] each give the 3-AP {a, b, 2b - a}."""
    h = N // 2
    return h * (h - 1) // 2


# ---- container parameters ------------------------------------------------


def _cq_pair(q: int, Cq: float | None) -> tuple[float, float]:
    if Cq is None:
        Cq = compute_constants(q).C_q
    return 1 / (Cq - 1), Cq


@dataclass(frozen=True)
class ContainerParams:
    log2_epsilon: float
    log2_tau: float
    log2_container_count_exponent: float
    iterations: int | None
    tau_below_ceiling: bool


def container_params(q: int, n: int, s: float, beta: float, Cq: float | None = None,
                     t: float | None = None) -> ContainerParams:
    """Per-step container parameters for a set of size ``q**(n(1-s))``.

    ``epsilon = q**(-beta n)``, ``tau = q**((n/2)(2 beta - 1 + s(C_q - 1)))``; the
    container count per step is ``2**(c (n log q)**2 q**E)`` with
    ``E = (n/2)(1 + s(C_q - 3) + 2 beta)`` and ``log2_container_count_exponent``
    is ``E log2 q``. With ``t`` given, also returns ``ceil(t C_q / beta + 1)``.
    """
    c_q, Cq = _cq_pair(q, Cq)
    if beta <= 0:
        raise ParameterRangeError("beta must be positive")
    if not 0 <= s <= c_q * (1 - 3 * beta):
        raise ParameterRangeError(f"s={s} outside [0, c_q(1-3 beta)] = [0, {c_q * (1 - 3 * beta)}]")
    lq = math.log2(q)
    log2_tau = (n / 2) * (2 * beta - 1 + s * (Cq - 1)) * lq
    k = math.ceil(t * Cq / beta + 1) if t is not None else None
    return ContainerParams(
        log2_epsilon=-beta * n * lq,
        log2_tau=log2_tau,
        log2_container_count_exponent=(n / 2) * (1 + s * (Cq - 3) + 2 * beta) * lq,
        iterations=k,
        tau_below_ceiling=log2_tau < math.log2(TAU_CEILING_R3),
    )


@dataclass(frozen=True)
class ContainerCheck:
    tau_ok: bool
    delta_ok: bool
    delta_value: float
    delta_ceiling: float
    log_container_bound: float


def container_hypotheses(H, tau: float, epsilon: float, c_r: float = C3_CONTAINER) -> ContainerCheck:
    """Evaluate the 3-uniform container theorem's hypotheses on a concrete H.

    Needs ``tau < 1/21600`` and ``Delta(H, tau) <= epsilon/72``; reports the
    resulting ``log|C| <= c N tau log(1/eps) log(1/tau)`` (natural logs).
    """
    from .progressions import delta_function

    if not (0 < epsilon < 0.5 and 0 < tau < 0.5):
        raise ParameterRangeError("epsilon and tau must lie in (0, 1/2)")
    dv = delta_function(H, tau)
    ceiling = epsilon / (12 * math.factorial(3))
    bound = c_r * H.vertex_count * tau * math.log(1 / epsilon) * math.log(1 / tau)
    return ContainerCheck(tau < TAU_CEILING_R3, dv <= ceiling, dv, ceiling, bound)


def log2_binom(n: float, k: float) -> float | None:
    if k < 0 or k > n:
        return None
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) * LOG2E


def p_floor_exponent(t: float, Cq: float, beta: float = 0.0) -> float:
    """Exponent e in the lower limit ``p >= q**(n e)`` for the random-subset theorem.

    ``beta=0`` gives the form in the introduction, otherwise the restated form
    with the extra ``-beta/2``.
    """
    return -0.5 + t * (Cq - 1) / 2 - beta / 2


def probability_bound(q: int, n: int, t: float, beta: float, p: float,
                      Cq: float | None = None, c_qbeta: float = 1.0) -> BoundReport:
    """Union bound on a random p-subset holding a 3-AP-free set of size m.

    ``m = p q**(n(1-t+2 beta))``; the three-factor product
    ``|C| * binom(q**(n(1-t)), m) * p**m`` collapses to ``(2e / q**(2 beta n))**m``.
    ``log2_value`` is the collapsed envelope; the metadata carries the product
    with the ``(e s / t)**t`` binomial estimate and, when ``m`` fits, with the
    exact log-binomial.
    """
    c_q, Cq = _cq_pair(q, Cq)
    if n < 1:
        raise ParameterRangeError("n must be >= 1")
    if beta <= 0 or not 0 < p <= 1:
        raise ParameterRangeError("need beta > 0 and 0 < p <= 1")
    if not 0 <= t <= c_q * (1 - 3 * beta):
        raise ParameterRangeError(f"t={t} outside [0, c_q(1-3 beta)]")
    lq = math.log2(q)
    floor_restated = p_floor_exponent(t, Cq, beta) * n * lq
    if math.log2(p) < floor_restated - 1e-12:
        raise ParameterRangeError("p below the admissible floor")
    log2_m = math.log2(p) + n * (1 - t + 2 * beta) * lq
    m = 2.0**log2_m
    log2_S = n * (1 - t) * lq
    # |C| <= 2**(n^2 c(q, beta) q**(n(1/2 + t(C_q - 3)/2 + beta)))
    log2_C = c_qbeta * n * n * 2.0 ** (n * (0.5 + t * (Cq - 3) / 2 + beta) * lq)
    envelope = m * (1 + LOG2E - 2 * beta * n * lq)
    estimate = log2_C + m * (LOG2E + log2_S - log2_m) + m * math.log2(p)
    exact_binom = log2_binom(2.0**log2_S, m) if log2_S < 1000 else None
    exact = None if exact_binom is None else log2_C + exact_binom + m * math.log2(p)
    meta = {
        "m": m,
        "log2_container_count": log2_C,
        "log2_product_estimate": estimate,
        "log2_product_exact": exact,
        "admissible_restated": True,
        "admissible_intro": t < c_q * (1 - 2 * beta)
        and math.log2(p) >= p_floor_exponent(t, Cq) * n * lq,
        "note": "introduction and proof state different (t, p) ranges; the proof's range is enforced",
    }
    inputs = {"q": q, "n": n, "t": t, "beta": beta, "p": p, "C_q": Cq, "c_qbeta": c_qbeta}
    return BoundReport("probability_bound", inputs, envelope, meta)


def supersat_log2_bound(q: int, n: int, s: float, Cq: float | None = None) -> float:
    """log2 of ``(1/(6 q**(n s)))**C_q * q**(2n)``."""
    _, Cq = _cq_pair(q, Cq)
    lq = math.log2(q)
    return -Cq * (math.log2(6) + n * s * lq) + 2 * n * lq


# ---- h-function families -------------------------------------------------


@dataclass(frozen=True)
class HSpec:
    """Invertible growth function with closed-form inverse.

    ``power``: ``h(x) = x**a / C``;  ``logpower``: ``h(x) = (log x)**(1+c) / C``.
    """

    family: str
    exponent: float
    C: float = 1.0

    def __post_init__(self):
        if self.family not in ("power", "logpower"):
            raise ValueError(f"unknown h family {self.family!r}")
        if self.exponent <= 0 or self.C <= 0:
            raise ValueError("h parameters must be positive")

    @classmethod
    def parse(cls, text: str) -> "HSpec":
        """``power:a[:C]`` or ``logpower:c[:C]``."""
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"bad h spec {text!r}")
        return cls(parts[0], float(parts[1]), float(parts[2]) if len(parts) == 3 else 1.0)

    def log_h(self, lnx):
        """ln h(x) given ln x (nan where h is undefined or non-positive)."""
        lnx = np.asarray(lnx, dtype=np.float64)
        if self.family == "power":
            return self.exponent * lnx - math.log(self.C)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(lnx > 0, (1 + self.exponent) * np.log(lnx) - math.log(self.C), np.nan)

    def log_inverse(self, lny):
        """ln h^{-1}(y) given ln y."""
        lny = np.asarray(lny, dtype=np.float64)
        if self.family == "power":
            return (math.log(self.C) + lny) / self.exponent
        return np.exp((math.log(self.C) + lny) / (1 + self.exponent))

    def __call__(self, x):
        return np.exp(self.log_h(np.log(x)))

    def inverse(self, y):
        return np.exp(self.log_inverse(np.log(y)))


def varnavides_count(N: int, eta: float, h: HSpec) -> BoundReport:
    """Guaranteed 3-AP count ``eta / (2 M**4) * N**2`` with ``M = h^{-1}(4/eta)``."""
    if not 0 < eta <= 1:
        raise ParameterRangeError("eta must lie in (0, 1]")
    lnM = float(h.log_inverse(math.log(4 / eta)))
    M = math.exp(lnM) if lnM < 700 else math.inf
    if not (1 <= math.floor(M) <= N):
        raise PreconditionFailed(f"floor(h^-1(4/eta)) = {M:.4g} not in [1, {N}]")
    log2_val = math.log2(eta / 2) - 4 * lnM * LOG2E + 2 * math.log2(N)
    return BoundReport("varnavides_count", {"N": N, "eta": eta, "h": h.__dict__.copy()},
                       log2_val, {"M": M})


@dataclass(frozen=True)
class ConditionReport:
    name: str
    all_pass: bool
    first_failure: float | None
    last_failure: float | None


@dataclass(frozen=True)
class HConditionsReport:
    conditions: list
    N0: float | None
    sweep: tuple

    @property
    def all_pass(self) -> bool:
        return all(c.all_pass for c in self.conditions)


def check_h_conditions(h: HSpec, gamma: float, N_range: tuple, points: int = 400) -> HConditionsReport:
    """Sweep N log-uniformly over ``N_range`` and test the integer-case conditions

    * ``h(x) <= x`` (on the same log grid, extended down to x = 1),
    * ``h(N**(1/5)/1000) >= 4 h(N**gamma)``,
    * ``N**(1/10) >= h(N**gamma)**(3/2) * h^{-1}(4 h(N**gamma))**2``.

    ``N0`` is the smallest swept N from which every condition holds up to the
    end of the sweep. Failures are reported, not raised.
    """
    if not 0 < gamma < 1:
        raise ParameterRangeError("gamma must lie in (0, 1)")
    lo, hi = N_range
    L = np.linspace(math.log(lo), math.log(hi), points)
    Lx = np.linspace(0.0, math.log(hi), points)

    with np.errstate(invalid="ignore"):
        ok_hx = ~(h.log_h(Lx) > Lx)  # nan (h <= 0 near x = 1) counts as h(x) <= x
        lhs1 = h.log_h(L / 5 - math.log(1000))
        rhs1 = math.log(4) + h.log_h(gamma * L)
        ok1 = np.nan_to_num(lhs1, nan=-np.inf) >= rhs1
        lhg = h.log_h(gamma * L)
        rhs2 = 1.5 * lhg + 2 * h.log_inverse(math.log(4) + lhg)
        ok2 = L / 10 >= np.nan_to_num(rhs2, nan=np.inf)

    def summarize(name, ok, grid):
        bad = np.flatnonzero(~ok)
        first = float(np.exp(grid[bad[0]])) if len(bad) else None
        last = float(np.exp(grid[bad[-1]])) if len(bad) else None
        return ConditionReport(name, not len(bad), first, last)

    reports = [
        summarize("h_le_x", ok_hx, Lx),
        summarize("technical1", ok1, L),
        summarize("technical2", ok2, L),
    ]
    both = ok1 & ok2
    N0 = None
    if reports[0].all_pass and both[-1]:
        bad = np.flatnonzero(~both)
        N0 = float(np.exp(L[bad[-1] + 1])) if len(bad) else float(lo)
    return HConditionsReport(reports, N0, (float(lo), float(hi), points))


def integer_container_params(N: float, h: HSpec, gamma: float) -> dict:
    """eta, epsilon, tau chosen for the single container application over [N]."""
    lnN = math.log(N)
    ln_eta = -float(h.log_h(gamma * lnN))
    ln_M = float(h.log_inverse(math.log(4) - ln_eta))
    ln_eps = ln_eta - 4 * ln_M
    ln_tau = math.log(100) - 0.5 * (lnN + ln_eps)
    return {
        "log_eta": ln_eta,
        "log_epsilon": ln_eps,
        "log_tau": ln_tau,
        "N_epsilon_ok": lnN + ln_eps >= 12 * math.log(10),
        "tau_ok": ln_tau < math.log(TAU_CEILING_R3),
    }


# ---- theorem exponents ---------------------------------------------------


@dataclass(frozen=True)
class ThmExponents:
    q: int
    C_q: float

    @property
    def thm11(self) -> float:
        """f_3 exponent for the 4-AP-free set: ``1 - 1/(2(C_q - 2))``."""
        return 1 - 1 / (2 * (self.C_q - 2))

    def p_floor(self, t: float, beta: float = 0.0) -> float:
        return p_floor_exponent(t, self.C_q, beta)

    def lowenergy_delta(self, eps: float) -> float:
        return eps / (2 * (self.C_q - 1))


def thm_exponents(q: int) -> ThmExponents:
    return ThmExponents(q, compute_constants(q).C_q)


@dataclass(frozen=True)
class LowEnergyParams:
    eps: float
    p_exponent: float
    size_exponent: float
    energy_exponent: float
    t: float
    beta: float
    f3_exponent: float

    @property
    def delta(self) -> float:
        return 1 - self.f3_exponent / self.size_exponent


def lowenergy_params(q: int, eps: float) -> LowEnergyParams:
    """Exponents (as multiples of n, base q) for the low-energy random construction."""
    if not 0 < eps < 2:
        raise ParameterRangeError("eps must lie in (0, 2)")
    Cq = compute_constants(q).C_q
    r = eps / (4 - 2 * eps)
    t = 2 * eps / ((4 - 2 * eps) * (Cq - 1))
    return LowEnergyParams(
        eps=eps,
        p_exponent=-0.5 + r,
        size_exponent=0.5 + r,
        energy_exponent=1 + 4 * r,
        t=t,
        beta=t / 4,
        f3_exponent=0.5 + eps * (Cq - 2) / ((4 - 2 * eps) * (Cq - 1)),
    )

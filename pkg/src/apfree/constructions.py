"""Seeded random subsets, progression deletion, the base-6 digit set and the
torus-annulus projection that carves 3-AP-free subsets out of integer sets.

Every pipeline returns a :class:`ConstructionReport`. Certificates in a report
come from exhaustive recounts on the final set. Wall-clock timings live in
``report.timings`` and are deliberately left out of ``as_dict`` so that report
JSON is byte-identical across reruns.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import fq
from .constants import lowenergy_params
from .energy import energy_exponent_report, energy_profile
from .errors import AmbientMismatch, DegenerateShell, ParameterRangeError, TooSmall
from .extremal import fk_heuristic
from .progressions import ap_edges, count_3aps, count_4aps, full_space_3aps
from .rng import GENERATOR_ID, make_rng
from .sets import GroundSet, Interval

_SAMPLE_BLOCK = 1 << 22
_FIX = 1 << 64
_HALF = 1 << 63
MIN_DELTA = 2.0**-30


@dataclass(frozen=True)
class RandomModel:
    p: float
    seed: int
    generator_id: str = GENERATOR_ID

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ParameterRangeError(f"inclusion probability must lie in (0, 1], got {self.p}")
        if self.generator_id != GENERATOR_ID:
            raise ParameterRangeError(f"unsupported generator {self.generator_id!r}")


@dataclass
class ConstructionReport:
    kind: str
    params: dict
    output: GroundSet
    certificates: dict
    deleted_count: int
    stages: list
    metrics: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def as_dict(self, with_members: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "params": self.params,
            "output_size": len(self.output),
            "certificates": self.certificates,
            "deleted_count": self.deleted_count,
            "stages": [{"name": n, "size": s} for n, s in self.stages],
            "metrics": self.metrics,
        }
        if with_members:
            out["members"] = self.output.members.tolist()
        return out


class _Clock:
    def __init__(self):
        self.timings: dict = {}
        self._t = time.perf_counter()

    def lap(self, name: str) -> None:
        now = time.perf_counter()
        self.timings[name] = now - self._t
        self._t = now


def certify(S: GroundSet) -> dict:
    """Exhaustive 3-AP and 4-AP recounts, where the ambient supports them."""
    out = {}
    char = S.space.p_char if S.is_field else None
    if char is None or char >= 3:
        c3 = count_3aps(S)
        out["is_3ap_free"] = {"value": c3.unordered_nontrivial == 0, "method": "exhaustive recount",
                              "count": c3.unordered_nontrivial}
    if char is None or char >= 5:
        c4 = count_4aps(S)
        out["is_4ap_free"] = {"value": c4.unordered_nontrivial == 0, "method": "exhaustive recount",
                              "count": c4.unordered_nontrivial}
    return out


# ---- sampling --------------------------------------------------------------


def random_subset(universe, model: RandomModel) -> GroundSet:
    """Bernoulli(p) subset; element i of the canonical order consumes the i-th draw."""
    full = GroundSet.full(universe)
    if model.p == 1:
        return full
    rng = make_rng(model.seed)
    keep = []
    m = full.members
    for lo in range(0, len(m), _SAMPLE_BLOCK):
        block = m[lo:lo + _SAMPLE_BLOCK]
        keep.append(block[rng.random(len(block)) < model.p])
    return full.subset(np.concatenate(keep))


def random_subset_exact(universe, size: int, seed: int, *stream: int) -> GroundSet:
    """Uniform subset of exactly ``size`` elements (sampling without replacement)."""
    full = GroundSet.full(universe)
    if not 0 <= size <= len(full):
        raise ParameterRangeError(f"size {size} outside [0, {len(full)}]")
    rng = make_rng(seed, *stream)
    return full.subset(rng.choice(full.members, size=size, replace=False))


# ---- progression deletion ---------------------------------------------------


def _deletions(edges: np.ndarray, strategy: str) -> np.ndarray:
    """Positions to delete so that every edge loses at least one vertex."""
    if strategy == "canonical":
        dead: set[int] = set()
        for row in edges.tolist():
            if dead.isdisjoint(row):
                dead.add(row[-1])
        return np.array(sorted(dead), dtype=np.int64)
    if strategy == "greedy":
        alive = np.ones(len(edges), dtype=bool)
        dead_list = []
        while alive.any():
            deg = np.bincount(edges[alive].reshape(-1))
            v = int(np.argmax(deg))
            dead_list.append(v)
            alive &= ~(edges == v).any(axis=1)
        return np.array(sorted(dead_list), dtype=np.int64)
    raise ValueError(f"unknown strategy {strategy!r}")


def delete_progressions(A: GroundSet, k: int, strategy: str = "canonical") -> tuple[GroundSet, int]:
    edges = ap_edges(A, k)
    dead = _deletions(edges, strategy)
    return A.without(A.members[dead]), len(dead)


def remove_4aps(A: GroundSet, strategy: str = "canonical") -> ConstructionReport:
    clock = _Clock()
    out, deleted = delete_progressions(A, 4, strategy)
    clock.lap("delete")
    cert = certify(out)
    clock.lap("certify")
    return ConstructionReport(
        kind="remove_4aps",
        params={"strategy": strategy},
        output=out,
        certificates=cert,
        deleted_count=deleted,
        stages=[("input", len(A)), ("output", len(out))],
        timings=clock.timings,
    )


# ---- random pipelines -------------------------------------------------------


def pipeline_thm11(space: fq.FieldSpace, seed: int, strategy: str = "canonical",
                   heuristic_iters: int = 20) -> ConstructionReport:
    """Sample at density q^{-n/3}/100, then break every 4-AP."""
    space.require_ap(4)
    Q = space.size
    if Q ** (2 / 3) / 100 < 50:
        raise TooSmall(f"q^(2n/3)/100 = {Q ** (2 / 3) / 100:.3g} < 50")
    clock = _Clock()
    p = Q ** (-1 / 3) / 100
    P = random_subset(space, RandomModel(p, seed))
    clock.lap("sample")
    before = count_4aps(P).unordered_nontrivial
    clock.lap("count")
    P2, deleted = delete_progressions(P, 4, strategy)
    clock.lap("delete")
    cert = certify(P2)
    clock.lap("certify")
    heur = fk_heuristic(P2, 3, iters=heuristic_iters, seed=seed)
    clock.lap("heuristic")
    mean = p * Q
    sigma = math.sqrt(Q * p * (1 - p))
    bound4 = p**4 * Q**2
    return ConstructionReport(
        kind="thm11",
        params={"q": space.q, "n": space.n, "seed": seed, "p": p, "strategy": strategy,
                "generator_id": GENERATOR_ID},
        output=P2,
        certificates=cert,
        deleted_count=deleted,
        stages=[("sample", len(P)), ("delete_4aps", len(P2))],
        metrics={
            "expected_size": mean,
            "sigma": sigma,
            "size_z": (len(P) - mean) / sigma,
            "fourap_before": before,
            "fourap_bound": bound4,
            "fourap_ratio": before / bound4,
            "f3_heuristic": heur.size,
        },
        timings=clock.timings,
    )


def pipeline_lowenergy(space: fq.FieldSpace, eps: float, seed: int) -> ConstructionReport:
    """Random set at density q^{n(-1/2 + eps/(4-2eps))} with its exact energy."""
    space.require_ap(3)
    lp = lowenergy_params(space.q, eps)
    Q = space.size
    p = Q**lp.p_exponent
    if p * Q < 50:
        raise TooSmall(f"expected size {p * Q:.3g} < 50")
    clock = _Clock()
    P = random_subset(space, RandomModel(min(1.0, p), seed))
    clock.lap("sample")
    prof = energy_profile(P, with_progressions=False)
    clock.lap("energy")
    cert = certify(P)
    clock.lap("certify")
    n = space.n
    lq = math.log(space.q)
    return ConstructionReport(
        kind="lowenergy",
        params={"q": space.q, "n": n, "eps": eps, "seed": seed, "p": p, "generator_id": GENERATOR_ID},
        output=P,
        certificates=cert,
        deleted_count=0,
        stages=[("sample", len(P))],
        metrics={
            "energy": prof.energy,
            "energy_expected": p**4 * float(Q) ** 3,
            "energy_envelope": 100 * math.exp(n * lp.energy_exponent * lq),
            "size_envelope": math.exp(n * lp.size_exponent * lq) / 100,
            "eps_hat": energy_exponent_report(P, prof) if len(P) >= 2 else None,
            "t_ordered": prof.t_ordered,
        },
        timings=clock.timings,
    )


def sparse_regime_check(q: int, n: int) -> dict:
    """At p = q^{-n/2}/2, expected 3-APs in a random set versus its expected size."""
    Q = q**n
    p = Q**-0.5 / 2
    ordered = full_space_3aps(q, n) * (6 if fq.factor_prime_power(q)[0] == 3 else 2)
    return {"p": p, "expected_3aps": p**3 * ordered, "expected_size": p * Q}


# ---- base-6 digits ----------------------------------------------------------


def digits_base6(N: int) -> GroundSet:
    """All m in [1, N] written with base-6 digits 0, 1, 2 only."""
    if N < 1:
        raise ParameterRangeError("N must be positive")
    vals = np.zeros(1, dtype=np.int64)
    w = 1
    while w <= N:
        vals = np.concatenate([vals, vals + w, vals + 2 * w])
        w *= 6
    vals = vals[(vals >= 1) & (vals <= N)]
    return GroundSet(Interval(N), vals)


def digits6_report(N: int) -> ConstructionReport:
    clock = _Clock()
    S = digits_base6(N)
    clock.lap("build")
    cert = {"is_4ap_free": certify(S)["is_4ap_free"]}
    clock.lap("certify")
    return ConstructionReport("digits6", {"N": N}, S, cert, 0, [("build", len(S))], timings=clock.timings)


def random_report(universe, p: float, seed: int) -> ConstructionReport:
    clock = _Clock()
    S = random_subset(universe, RandomModel(p, seed))
    clock.lap("sample")
    cert = certify(S)
    clock.lap("certify")
    return ConstructionReport("random", {"p": p, "seed": seed, "generator_id": GENERATOR_ID},
                              S, cert, 0, [("sample", len(S))], timings=clock.timings)


# ---- annulus projection -----------------------------------------------------


@dataclass(frozen=True)
class AnnulusParams:
    """Shell S(r) = {x in [0,1/2]^d : r - delta <= |x| <= r} and the map m -> theta*m + alpha.

    theta and alpha hold 64-bit numerators over 2**64.
    """

    d: int
    delta: float
    r: float
    theta: tuple
    alpha: tuple

    def __post_init__(self):
        if self.d < 1:
            raise ParameterRangeError("d must be positive")
        if len(self.theta) != self.d or len(self.alpha) != self.d:
            raise ParameterRangeError("theta and alpha need d coordinates")
        if not 0 < self.delta < self.r <= math.sqrt(self.d) / 2 + 1e-12:
            raise ParameterRangeError("need 0 < delta < r <= sqrt(d)/2")
        if any(not 0 <= v < _FIX for v in (*self.theta, *self.alpha)):
            raise ParameterRangeError("torus coordinates must be 64-bit numerators")

    def as_dict(self) -> dict:
        return {"d": self.d, "delta": self.delta, "r": self.r,
                "theta": [str(v) for v in self.theta], "alpha": [str(v) for v in self.alpha]}


def _psi_raw(m, theta, alpha) -> np.ndarray:
    """(m*theta + alpha) mod 2**64 as uint64, shape (len(m), d); wraps exactly."""
    m = np.asarray(m, dtype=np.int64).astype(np.uint64).reshape(-1, 1)
    th = np.array(theta, dtype=np.uint64).reshape(1, -1)
    al = np.array(alpha, dtype=np.uint64).reshape(1, -1)
    with np.errstate(over="ignore"):
        return m * th + al


def psi_map(m: int, params: AnnulusParams) -> tuple:
    """Point of T^d as floats in [0, 1)."""
    if m < 0:
        raise ParameterRangeError("m must be non-negative")
    return tuple(((m * t + a) % _FIX) / _FIX for t, a in zip(params.theta, params.alpha))


def in_shell(x, r: float, delta: float) -> np.ndarray:
    """Membership in S(r) for points given as floats, rows of shape (.., d)."""
    x = np.asarray(x, dtype=np.float64)
    nrm = np.sqrt((x * x).sum(axis=-1))
    box = ((x >= 0) & (x <= 0.5)).all(axis=-1)
    return box & (nrm >= r - delta) & (nrm <= r)


def _folded(raw: np.ndarray) -> np.ndarray:
    """Torus points from uint64 numerators, folded to [-1/2, 1/2)."""
    return raw.astype(np.int64).astype(np.float64) / _FIX


def annulus_defaults(A: GroundSet, cprime: float = 1.0) -> dict:
    """d and delta from T(A), the ordered count of nontrivial 3-APs."""
    N = A.ambient.N
    T = count_3aps(A).ordered_nontrivial
    if T == 0:
        return {"T": 0}
    t = N * N / T
    d = max(1, math.ceil(math.sqrt(2 * math.log2(max(N / t, 1.0)))))
    delta = cprime * math.sqrt(d) * (t / N) ** (2 / d)
    return {"T": T, "t": t, "d": d, "delta": delta}


def annulus_construct(A: GroundSet, seed: int, d: int | None = None, delta: float | None = None,
                      cprime: float = 1.0, strategy: str = "canonical") -> ConstructionReport:
    """Project A to the torus, keep the fullest thin shell, and break what 3-APs remain."""
    if A.is_field:
        raise AmbientMismatch("the annulus construction works in [1..N]")
    if len(A) < 10:
        raise TooSmall("need |A| >= 10")
    clock = _Clock()
    base = annulus_defaults(A, cprime)
    clock.lap("count")
    if base["T"] == 0:
        return ConstructionReport("annulus", {"seed": seed, "projected": False}, A, certify(A), 0,
                                  [("input", len(A)), ("output", len(A))], metrics={"T": 0},
                                  timings=clock.timings)
    d = d or base["d"]
    delta = delta if delta is not None else cprime * math.sqrt(d) * (base["t"] / A.ambient.N) ** (2 / d)
    if delta < MIN_DELTA:
        raise ParameterRangeError(f"delta {delta:.3g} below 2^-30")
    rmax = math.sqrt(d) / 2
    steps = math.floor(rmax / delta)
    if steps < 2:
        raise ParameterRangeError(f"delta {delta:.3g} too large for d = {d}")

    rng = make_rng(seed, 0xA11)
    theta = tuple(int(v) for v in rng.integers(0, _FIX, size=d, dtype=np.uint64))
    alpha = tuple(int(v) for v in rng.integers(0, _FIX, size=d, dtype=np.uint64))
    raw = _psi_raw(A.members, theta, alpha)
    box = (raw <= np.uint64(_HALF)).all(axis=1)
    pts = raw[box].astype(np.float64) / _FIX
    members_box = A.members[box]
    nrm = np.sqrt((pts * pts).sum(axis=1))
    clock.lap("project")

    # shell j covers [(j-1)delta, j*delta]; counts per grid radius, ties to the smaller r
    counts = [int(((nrm >= (j - 1) * delta) & (nrm <= j * delta)).sum()) for j in range(1, steps + 1)]
    best = int(np.argmax(counts))
    if counts[best] == 0:
        raise DegenerateShell("every shell preimage is empty")
    r = (best + 1) * delta
    params = AnnulusParams(d, delta, r, theta, alpha)
    shell = A.subset(members_box[in_shell(pts, r, delta)])
    clock.lap("shell")

    edges = ap_edges(shell, 3)
    diag_ok = 0
    if len(edges):
        m = shell.members
        y = m[edges[:, 2]] - m[edges[:, 1]]
        ypart = _folded(_psi_raw(y, theta, (0,) * d))
        diag_ok = int((np.sqrt((ypart**2).sum(axis=1)) <= math.sqrt(2 * delta * r) + 1e-12).sum())
    dead = _deletions(edges, strategy)
    out = shell.without(shell.members[dead])
    clock.lap("delete")
    cert = {"is_3ap_free": certify(out)["is_3ap_free"]}
    clock.lap("certify")
    N = A.ambient.N
    return ConstructionReport(
        kind="annulus",
        params={"seed": seed, "cprime": cprime, "strategy": strategy, "projected": True,
                "generator_id": GENERATOR_ID, **params.as_dict()},
        output=out,
        certificates=cert,
        deleted_count=len(dead),
        stages=[("input", len(A)), ("box", len(members_box)), ("shell", len(shell)), ("output", len(out))],
        metrics={
            "T": base["T"],
            "t": base["t"],
            "shell_counts": counts,
            "residual_3aps": int(len(edges)),
            "parallelogram_within": diag_ok,
            "behrend_scale": N * delta * 2.0**-d,
        },
        timings=clock.timings,
    )

"""Counting and enumerating 3- and 4-term progressions, triangles, and the
3-AP hypergraph H(A) with its co-degree statistics.

Conventions
-----------
*ordered* counts pairs ``(x, d)`` with ``d != 0`` and the whole progression in
the set; *unordered* counts distinct element sets. A 3-AP in F_q^n is a triple
of distinct points with ``a + c = 2b``.

Two exact kernels count 3-APs: pair iteration (O(|A|^2), the default for sparse
sets) and an integer convolution of the indicator with itself, evaluated by FFT
and rounded with an explicit error check (used when the set is dense in a
universe of at most 2**22 points).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import fq
from .errors import CharTooSmall, EmptyHypergraph, HypergraphTooLarge
from .sets import GroundSet, Interval, same_ambient

EDGE_LIMIT = 10**8
_CONV_UNIVERSE_LIMIT = 1 << 22
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class APCounts:
    k: int
    ordered_nontrivial: int
    unordered_nontrivial: int


def parametrizations(A: GroundSet, k: int) -> int:
    """How many ``(x, d)`` pairs describe one unordered k-AP in A's ambient.

    In Z and in characteristic p >= 2k-1 only ``d`` and ``-d`` do. A 3-AP in
    characteristic 3 is a full line (6 parametrizations); a 4-AP in
    characteristic 5 is a line minus one point (4 parametrizations).
    """
    if not A.is_field:
        return 2
    p = A.space.p_char
    if k == 3 and p == 3:
        return 6
    if k == 4 and p == 5:
        return 4
    return 2


def _gate(A: GroundSet, k: int) -> None:
    if A.is_field:
        A.space.require_ap(k)


def _row_chunks(rows: int, cols: int, width: int = 1):
    step = max(1, _CHUNK_CELLS // max(1, cols * width))
    for start in range(0, rows, step):
        yield start, min(rows, start + step)


def _combine(A: GroundSet, ca: int, a, cb: int, b) -> np.ndarray:
    """``ca*a + cb*b`` over the ambient group, broadcasting a (column) with b (row)."""
    if not A.is_field:
        return ca * a[:, None] + cb * b[None, :]
    sp = A.space
    p = sp.p_char
    if sp.pdigits == 1:
        return (ca * a[:, None] + cb * b[None, :]) % p
    da = fq.to_pdigits(sp, a)
    db = fq.to_pdigits(sp, b)
    return fq.from_pdigits(sp, (ca * da[:, None, :] + cb * db[None, :, :]) % p)


def _width(A: GroundSet) -> int:
    return A.space.pdigits if A.is_field else 1


# ---- 3-APs ---------------------------------------------------------------


def _ordered_3ap_pairs(A: GroundSet) -> int:
    """Ordered pairs (a, b), a != b, with the reflection 2b - a in A."""
    m = A.members
    total = 0
    for lo, hi in _row_chunks(len(m), len(m), _width(A)):
        c = _combine(A, -1, m[lo:hi], 2, m)
        hit = A.contains(c)
        idx = np.arange(lo, hi)
        hit[idx - lo, idx] = False
        total += int(hit.sum())
    return total


def _rep_counts_conv(A: GroundSet):
    """Exact r_{A+A} by FFT convolution; returns (array, offset-or-None)."""
    if A.is_field and A.space.pdigits == 1:
        # prime field: padded power-of-two linear convolution, folded mod p
        p = A.space.p_char
        size = 1 << int(2 * p - 1).bit_length()
        f = np.zeros(size, dtype=np.float64)
        f[A.members] = 1.0
        F = np.fft.rfft(f)
        lin = np.fft.irfft(F * F, n=size)
        r = lin[:p].copy()
        r[: p - 1] += lin[p: 2 * p - 1]
        offset = None
    elif A.is_field:
        sp = A.space
        f = np.zeros(sp.size, dtype=np.float64)
        f[A.members] = 1.0
        shape = (sp.p_char,) * sp.pdigits
        F = np.fft.fftn(f.reshape(shape))
        r = np.fft.ifftn(F * F).real.reshape(-1)
        offset = None
    elif not len(A):
        return np.zeros(0, dtype=np.int64), 0
    else:
        lo, hi = int(A.members[0]), int(A.members[-1])
        L = hi - lo + 1
        size = 1 << int(2 * L - 1).bit_length()
        f = np.zeros(size, dtype=np.float64)
        f[A.members - lo] = 1.0
        F = np.fft.rfft(f)
        r = np.fft.irfft(F * F, n=size)[: 2 * L - 1]
        offset = 2 * lo
    rr = np.rint(r)
    if len(r) and np.abs(r - rr).max() > 0.25:
        raise ArithmeticError("FFT rounding error too large for an exact count")
    return rr.astype(np.int64), offset


def rep_at(A: GroundSet, r: np.ndarray, offset, s: np.ndarray) -> np.ndarray:
    """Look up r_{A+A}(s) from a convolution result."""
    if offset is None:
        return r[s]
    idx = s - offset
    out = np.zeros(idx.shape, dtype=np.int64)
    ok = (idx >= 0) & (idx < len(r))
    out[ok] = r[idx[ok]]
    return out


def _ordered_3ap_conv(A: GroundSet) -> int:
    r, offset = _rep_counts_conv(A)
    m = A.members
    doubled = fq.int_mul(A.space, 2, m) if A.is_field else 2 * m
    return int(rep_at(A, r, offset, doubled).sum()) - len(A)


def _universe(A: GroundSet) -> int:
    if A.is_field:
        return A.space.size
    return int(A.members[-1] - A.members[0] + 1) if len(A) else 0


def choose_method(A: GroundSet) -> str:
    u = _universe(A)
    if u <= _CONV_UNIVERSE_LIMIT and len(A) ** 2 > 16 * u:
        return "conv"
    return "pairs"


def count_3aps(A: GroundSet, method: str = "auto") -> APCounts:
    _gate(A, 3)
    if len(A) < 3:
        return APCounts(3, 0, 0)
    if method == "auto":
        method = choose_method(A)
    if method == "pairs":
        ordered = _ordered_3ap_pairs(A)
    elif method == "conv":
        ordered = _ordered_3ap_conv(A)
    else:
        raise ValueError(f"unknown method {method!r}")
    mult = parametrizations(A, 3)
    if ordered % mult:
        raise AssertionError(f"ordered count {ordered} not divisible by {mult}")
    return APCounts(3, ordered, ordered // mult)


def ap_edges(A: GroundSet, k: int) -> np.ndarray:
    """All unordered nontrivial k-APs of A as sorted rows of member positions.

    Rows are in lexicographic order. Shape ``(E, k)``.
    """
    _gate(A, k)
    m = A.members
    n = len(m)
    if n < k:
        return np.zeros((0, k), dtype=np.int64)
    if n * n // 2 > EDGE_LIMIT:
        raise HypergraphTooLarge(f"|A|={n} may give more than {EDGE_LIMIT} edges")
    found = []
    for lo, hi in _row_chunks(n, n, _width(A) * (k - 2)):
        a = m[lo:hi]
        ia = np.arange(lo, hi)[:, None]
        ib = np.broadcast_to(np.arange(n)[None, :], (hi - lo, n))
        pts = [np.broadcast_to(ia, (hi - lo, n)), ib]
        ok = ia != ib
        if not A.is_field:
            ok &= ib > ia
        for j in range(2, k):
            c = _combine(A, -(j - 1), a, j, m)
            hit = A.contains(c)
            ok &= hit
            pos = np.searchsorted(m, np.where(hit, c, m[0]))
            pts.append(pos)
        if ok.any():
            found.append(np.stack([p[ok] for p in pts], axis=1))
    if not found:
        return np.zeros((0, k), dtype=np.int64)
    rows = np.sort(np.concatenate(found), axis=1)
    return np.unique(rows, axis=0)


def count_4aps(A: GroundSet) -> APCounts:
    """Exact 4-AP counts by pair iteration over (a, b) with d = b - a."""
    _gate(A, 4)
    m = A.members
    ordered = 0
    for lo, hi in _row_chunks(len(m), len(m), 2 * _width(A)):
        a = m[lo:hi]
        hit = A.contains(_combine(A, -1, a, 2, m))
        hit &= A.contains(_combine(A, -2, a, 3, m))
        idx = np.arange(lo, hi)
        hit[idx - lo, idx] = False
        ordered += int(hit.sum())
    mult = parametrizations(A, 4)
    if ordered % mult:
        raise AssertionError(f"ordered 4-AP count {ordered} not divisible by {mult}")
    return APCounts(4, ordered, ordered // mult)


def count_triangles(X: GroundSet, Y: GroundSet, Z: GroundSet) -> int:
    """Number of (x, y, z) in X*Y*Z with x + y + z = 0."""
    amb = same_ambient(X, Y, Z)
    if isinstance(amb, Interval):
        raise CharTooSmall("triangles are defined in F_q^n only")
    x, y = X.members, Y.members
    total = 0
    for lo, hi in _row_chunks(len(x), len(y), amb.pdigits):
        z = _combine(X, -1, x[lo:hi], -1, y)
        total += int(Z.contains(z).sum())
    return total


# ---- hypergraph ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class APHypergraph:
    vertex_count: int
    edges: np.ndarray
    degree: np.ndarray
    d_avg: Fraction
    delta2: int
    delta3: int

    @property
    def edge_count(self) -> int:
        return int(len(self.edges))


def _max_codegree(edges: np.ndarray, size: int, V: int) -> int:
    """Largest number of edges sharing a common ``size``-subset of vertices."""
    if not len(edges):
        return 0
    keys = []
    for sub in combinations(range(edges.shape[1]), size):
        key = np.zeros(len(edges), dtype=np.int64)
        for c in sub:
            key = key * V + edges[:, c]
        keys.append(key)
    _, counts = np.unique(np.concatenate(keys), return_counts=True)
    return int(counts.max())


def build_hypergraph(A: GroundSet) -> APHypergraph:
    edges = ap_edges(A, 3)
    V = len(A)
    degree = np.bincount(edges.reshape(-1), minlength=V).astype(np.int64)
    d_avg = Fraction(3 * len(edges), V) if V else Fraction(0)
    edges.flags.writeable = False
    degree.flags.writeable = False
    return APHypergraph(
        vertex_count=V,
        edges=edges,
        degree=degree,
        d_avg=d_avg,
        delta2=_max_codegree(edges, 2, V),
        delta3=_max_codegree(edges, 3, V),
    )


def delta_function(H: APHypergraph, tau: float) -> float:
    """Container control function of a 3-uniform hypergraph:
    ``4*Delta2/(d*tau) + 2*Delta3/(d*tau**2)``."""
    if H.edge_count == 0:
        raise EmptyHypergraph("Delta(H, tau) needs at least one edge")
    if not 0 < tau < 1:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    d = float(H.d_avg)
    return 4 * H.delta2 / (d * tau) + 2 * H.delta3 / (d * tau * tau)


def full_space_3aps(q: int, n: int) -> int:
    """Closed form for the unordered nontrivial 3-APs of all of F_q^n."""
    Q = q**n
    p, _ = fq.factor_prime_power(q)
    if p == 2:
        raise CharTooSmall("no 3-APs in characteristic 2")
    return Q * (Q - 1) // (6 if p == 3 else 2)


def interval_3aps(N: int) -> int:
    return sum(max(0, N - 2 * d) for d in range(1, N // 2 + 1))

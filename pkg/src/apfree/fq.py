"""Arithmetic in the vector space F_q^n over flat integer indices.

An element is an integer in ``[0, q**n)``; its little-endian base-q digits are
the coordinates. A coordinate of F_q with ``q = p**e`` is itself encoded as
``sum(c_i * p**i)`` where ``c_i`` are the coefficients of a polynomial in
F_p[x] modulo a fixed irreducible. Because of that nesting the whole index is
just a little-endian base-p digit vector of length ``n*e`` and addition is
digitwise mod p. Multiplication by field scalars acts coordinatewise.

All functions accept a Python int or an integer numpy array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import CharTooSmall, NotPrimePower, SizeOverflow

_MUL_TABLE_MAX_Q = 1024


def factor_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``, or raise NotPrimePower."""
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    p = None
    m = q
    f = 2
    while f * f <= m:
        if m % f == 0:
            p = f
            break
        f += 1
    if p is None:
        return q, 1
    e = 0
    while m % p == 0:
        m //= p
        e += 1
    if m != 1:
        raise NotPrimePower(f"{q} has at least two distinct prime factors")
    return p, e


def _poly_mulmod(a: tuple, b: tuple, mod: tuple, p: int) -> tuple:
    # coefficient tuples low -> high; mod is monic of degree e
    e = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        if c:
            for i in range(e + 1):
                prod[k - e + i] = (prod[k - e + i] - c * mod[i]) % p
    out = prod[:e] + [0] * max(0, e - len(prod))
    return tuple(out)


def _poly_divides(d: tuple, f: tuple, p: int) -> bool:
    # d monic; true iff d | f over F_p
    r = list(f)
    dd = len(d) - 1
    for k in range(len(r) - 1, dd - 1, -1):
        c = r[k]
        if c:
            for i in range(dd + 1):
                r[k - dd + i] = (r[k - dd + i] - c * d[i]) % p
    return not any(r[:dd])


def _monic(code: int, deg: int, p: int) -> tuple:
    coeffs = []
    for _ in range(deg):
        coeffs.append(code % p)
        code //= p
    return tuple(coeffs) + (1,)


@lru_cache(maxsize=None)
def irreducible_polynomial(p: int, e: int) -> tuple:
    """Least monic irreducible of degree e over F_p.

    Candidates are ``x**e + sum(c_i x**i)`` ordered by the integer
    ``sum(c_i * p**i)``; the first one with no monic factor of degree
    ``1..e//2`` is returned as a low-to-high coefficient tuple.
    """
    for code in range(p**e):
        f = _monic(code, e, p)
        if e > 1 and f[0] == 0:
            continue
        reducible = False
        for dd in range(1, e // 2 + 1):
            for dcode in range(p**dd):
                if _poly_divides(_monic(dcode, dd, p), f, p):
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            return f
    raise AssertionError(f"no irreducible polynomial of degree {e} over F_{p}")


def _index_to_poly(x: int, p: int, e: int) -> tuple:
    out = []
    for _ in range(e):
        out.append(x % p)
        x //= p
    return tuple(out)


def _poly_to_index(c: tuple, p: int) -> int:
    return sum(int(v) * p**i for i, v in enumerate(c))


@dataclass(frozen=True)
class FieldSpace:
    q: int
    p_char: int
    n: int
    degree: int = 1
    modulus: tuple | None = field(default=None, repr=False)
    mul_table: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return self.q**self.n

    @property
    def pdigits(self) -> int:
        """Number of base-p digits in an element index."""
        return self.n * self.degree

    def require_ap(self, k: int) -> None:
        """Degeneracy gate: k-APs with distinct elements need char >= k."""
        if k == 3 and self.p_char < 3:
            raise CharTooSmall(f"3-APs degenerate in characteristic {self.p_char}")
        if k == 4 and self.p_char < 5:
            raise CharTooSmall(f"4-APs degenerate in characteristic {self.p_char}")
        if k not in (3, 4):
            raise ValueError(f"unsupported progression length {k}")

    def __str__(self) -> str:
        return f"F_{self.q}^{self.n}"


def make_space(q: int, n: int) -> FieldSpace:
    p, e = factor_prime_power(q)
    if n < 1:
        raise SizeOverflow(f"dimension must be >= 1, got {n}")
    if q**n >= 2**63:
        raise SizeOverflow(f"{q}^{n} does not fit in 63 bits")
    modulus = None
    table = None
    if e > 1:
        modulus = irreducible_polynomial(p, e)
        if q <= _MUL_TABLE_MAX_Q:
            table = _build_mul_table(p, e, modulus)
    return FieldSpace(q=q, p_char=p, n=n, degree=e, modulus=modulus, mul_table=table)


def _build_mul_table(p: int, e: int, modulus: tuple) -> np.ndarray:
    q = p**e
    polys = [_index_to_poly(x, p, e) for x in range(q)]
    t = np.zeros((q, q), dtype=np.int64)
    for x in range(q):
        for y in range(x, q):
            v = _poly_to_index(_poly_mulmod(polys[x], polys[y], modulus, p), p)
            t[x, y] = t[y, x] = v
    t.flags.writeable = False
    return t


def field_mul(space: FieldSpace, x: int, y: int) -> int:
    """Product of two F_q elements given by their indices in [0, q)."""
    if space.degree == 1:
        return (x * y) % space.q
    if space.mul_table is not None:
        return int(space.mul_table[x, y])
    p, e = space.p_char, space.degree
    return _poly_to_index(
        _poly_mulmod(_index_to_poly(x, p, e), _index_to_poly(y, p, e), space.modulus, p), p
    )


# ---- digit encode/decode -------------------------------------------------


def _powers(base: int, count: int) -> np.ndarray:
    return np.array([base**i for i in range(count)], dtype=np.int64)


def to_pdigits(space: FieldSpace, a) -> np.ndarray:
    """Base-p digit matrix, shape ``(len(a), n*e)`` (or ``(n*e,)`` for a scalar)."""
    arr = np.asarray(a, dtype=np.int64)
    pw = _powers(space.p_char, space.pdigits)
    return (arr[..., None] // pw) % space.p_char


def from_pdigits(space: FieldSpace, d) -> np.ndarray:
    pw = _powers(space.p_char, space.pdigits)
    return np.asarray(d, dtype=np.int64) @ pw


def coordinates(space: FieldSpace, a: int) -> tuple[int, ...]:
    """Base-q coordinate vector of one element (little-endian)."""
    out = []
    for _ in range(space.n):
        out.append(a % space.q)
        a //= space.q
    return tuple(out)


def from_coordinates(space: FieldSpace, coords) -> int:
    if len(coords) != space.n or any(not 0 <= c < space.q for c in coords):
        raise ValueError(f"bad coordinates {coords!r} for {space}")
    return sum(int(c) * space.q**i for i, c in enumerate(coords))


# ---- group law -----------------------------------------------------------


def _check(space: FieldSpace, a) -> None:
    arr = np.asarray(a)
    if arr.size and (arr.min() < 0 or arr.max() >= space.size):
        raise IndexError(f"element index out of range for {space}")


def _wrap(result, like):
    if np.ndim(like) == 0 and not isinstance(like, np.ndarray):
        return int(result)
    return result


def _linear(space: FieldSpace, a, b, ca: int, cb: int):
    """Digitwise ``ca*a + cb*b`` with integer coefficients (reduced mod p)."""
    p = space.p_char
    if space.pdigits == 1:
        return (ca * np.asarray(a, dtype=np.int64) + cb * np.asarray(b, dtype=np.int64)) % p
    da = to_pdigits(space, a)
    db = to_pdigits(space, b)
    return from_pdigits(space, (ca * da + cb * db) % p)


def add(space: FieldSpace, a, b):
    _check(space, a)
    _check(space, b)
    return _wrap(_linear(space, a, b, 1, 1), a if np.ndim(a) else b)


def sub(space: FieldSpace, a, b):
    _check(space, a)
    _check(space, b)
    return _wrap(_linear(space, a, b, 1, -1), a if np.ndim(a) else b)


def neg(space: FieldSpace, a):
    _check(space, a)
    return _wrap(_linear(space, a, 0, -1, 0), a)


def int_mul(space: FieldSpace, k: int, a):
    """Multiply by the integer k, i.e. by the prime-field scalar ``k mod p``."""
    _check(space, a)
    return _wrap(_linear(space, a, 0, k % space.p_char, 0), a)


def scalar_mul(space: FieldSpace, c: int, a):
    """Multiply by the F_q scalar with index ``c`` (``0 <= c < q``)."""
    if not 0 <= c < space.q:
        raise IndexError(f"scalar {c} not in F_{space.q}")
    _check(space, a)
    if space.degree == 1 or c < space.p_char:
        return int_mul(space, c, a)
    arr = np.asarray(a, dtype=np.int64)
    if space.mul_table is not None:
        row = space.mul_table[c]
    else:
        row = np.array([field_mul(space, c, x) for x in range(space.q)], dtype=np.int64)
    qp = _powers(space.q, space.n)
    coords = (arr[..., None] // qp) % space.q
    return _wrap(row[coords] @ qp, a)


def inverse_two(space: FieldSpace) -> int:
    """Integer k with ``2k = 1 mod p`` (odd characteristic only)."""
    if space.p_char == 2:
        raise CharTooSmall("2 is not invertible in characteristic 2")
    return (space.p_char + 1) // 2

"""Finite ground sets inside [1..N] or F_q^n, and their text file format.

File format (line oriented, diff-able)::

    #ambient interval N=<N>        or   #ambient field q=<q> n=<n>
    <element>
    <element>
    ...

Elements are decimal integers, strictly increasing, one per line. Interval
elements are the integers themselves (1..N); field elements are flat indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from . import fq
from .errors import AmbientMismatch, ParseError

_BITSET_LIMIT = 1 << 27


@dataclass(frozen=True)
class Interval:
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"interval length must be positive, got {self.N}")

    @property
    def size(self) -> int:
        return self.N

    def __str__(self) -> str:
        return f"[1..{self.N}]"


Ambient = Union[Interval, fq.FieldSpace]


class GroundSet:
    """Sorted element array plus lazily built membership bitmap.

    Treat instances as immutable; ``members`` is flagged read-only.
    """

    __slots__ = ("ambient", "members", "_bits")

    def __init__(self, ambient: Ambient, members):
        arr = np.unique(np.asarray(members, dtype=np.int64))
        if arr.size:
            lo, hi = (1, ambient.N) if isinstance(ambient, Interval) else (0, ambient.size - 1)
            if arr[0] < lo or arr[-1] > hi:
                raise ValueError(f"elements outside {ambient}")
        arr.flags.writeable = False
        self.ambient = ambient
        self.members = arr
        self._bits = None

    @classmethod
    def full(cls, ambient: Ambient) -> "GroundSet":
        if isinstance(ambient, Interval):
            return cls(ambient, np.arange(1, ambient.N + 1))
        return cls(ambient, np.arange(ambient.size))

    @property
    def is_field(self) -> bool:
        return isinstance(self.ambient, fq.FieldSpace)

    @property
    def space(self) -> fq.FieldSpace:
        if not self.is_field:
            raise AmbientMismatch("ground set does not live in F_q^n")
        return self.ambient

    def __len__(self) -> int:
        return int(self.members.size)

    def __iter__(self):
        return (int(x) for x in self.members)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroundSet):
            return NotImplemented
        return self.ambient == other.ambient and np.array_equal(self.members, other.members)

    def __hash__(self):
        return hash((self.ambient, self.members.tobytes()))

    def __repr__(self) -> str:
        return f"GroundSet({self.ambient}, |A|={len(self)})"

    @property
    def bitset(self) -> np.ndarray:
        """Boolean membership array indexed by element (index 0 unused for intervals)."""
        if self._bits is None:
            size = self.ambient.N + 1 if isinstance(self.ambient, Interval) else self.ambient.size
            if size > _BITSET_LIMIT:
                raise MemoryError(f"universe of {size} too large for a dense bitset")
            bits = np.zeros(size, dtype=bool)
            bits[self.members] = True
            bits.flags.writeable = False
            self._bits = bits
        return self._bits

    def contains(self, values) -> np.ndarray:
        """Vectorised membership test; out-of-universe values are simply absent."""
        v = np.asarray(values, dtype=np.int64)
        size = self.ambient.N + 1 if isinstance(self.ambient, Interval) else self.ambient.size
        if size <= _BITSET_LIMIT:
            ok = (v >= 0) & (v < size)
            out = np.zeros(v.shape, dtype=bool)
            out[ok] = self.bitset[v[ok]]
            return out
        if not len(self):
            return np.zeros(v.shape, dtype=bool)
        pos = np.minimum(np.searchsorted(self.members, v), len(self) - 1)
        return self.members[pos] == v

    def subset(self, members) -> "GroundSet":
        return GroundSet(self.ambient, members)

    def without(self, drop) -> "GroundSet":
        return GroundSet(self.ambient, np.setdiff1d(self.members, np.asarray(drop, dtype=np.int64)))

    def scaled(self, c: int) -> "GroundSet":
        """The dilate ``c*A`` for an integer c (field ambients only)."""
        sp = self.space
        return GroundSet(sp, fq.int_mul(sp, c, self.members))


def same_ambient(*sets: GroundSet) -> Ambient:
    amb = sets[0].ambient
    for s in sets[1:]:
        if s.ambient != amb:
            raise AmbientMismatch(f"{s.ambient} differs from {amb}")
    return amb


# ---- serialization ------------------------------------------------------

_HDR_INTERVAL = re.compile(r"#ambient interval N=(\d+)")
_HDR_FIELD = re.compile(r"#ambient field q=(\d+) n=(\d+)")


def ambient_header(ambient: Ambient) -> str:
    if isinstance(ambient, Interval):
        return f"#ambient interval N={ambient.N}"
    return f"#ambient field q={ambient.q} n={ambient.n}"


def dumps(gs: GroundSet) -> str:
    lines = [ambient_header(gs.ambient)]
    lines.extend(str(int(x)) for x in gs.members)
    return "\n".join(lines) + "\n"


def loads(text: str) -> GroundSet:
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty ground set file")
    head = lines[0].strip()
    if m := _HDR_INTERVAL.fullmatch(head):
        N = int(m.group(1))
        if N < 1:
            raise ParseError("interval length must be positive")
        ambient: Ambient = Interval(N)
    elif m := _HDR_FIELD.fullmatch(head):
        try:
            ambient = fq.make_space(int(m.group(1)), int(m.group(2)))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    else:
        raise ParseError(f"bad header line {head!r}")
    vals = []
    for lineno, raw in enumerate(lines[1:], start=2):
        s = raw.strip()
        if not s.isdigit():
            raise ParseError(f"line {lineno}: expected a decimal element, got {raw!r}")
        vals.append(int(s))
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ParseError("elements must be strictly increasing")
    try:
        return GroundSet(ambient, np.array(vals, dtype=np.int64))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def save(gs: GroundSet, path) -> None:
    Path(path).write_text(dumps(gs))


def load(path) -> GroundSet:
    return loads(Path(path).read_text())


_SPEC_INTERVAL = re.compile(r"interval:(\d+)")
_SPEC_FIELD = re.compile(r"f(\d+)\^(\d+):full")


def resolve(spec: str) -> GroundSet:
    """Parse ``interval:N``, ``f<q>^<n>:full`` or a path to a ground set file."""
    if m := _SPEC_INTERVAL.fullmatch(spec):
        return GroundSet.full(Interval(int(m.group(1))))
    if m := _SPEC_FIELD.fullmatch(spec):
        return GroundSet.full(fq.make_space(int(m.group(1)), int(m.group(2))))
    return load(spec)

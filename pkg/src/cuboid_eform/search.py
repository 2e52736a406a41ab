"""Integer solutions of the biquadratic equation and of Heron's equation.

The biquadratic

    4*E11^2 + E10^4 + E01^4 - 2*E10^2*E01^2 - 2*L^2*E10^2 - 6*E01^2*L^2 + L^4 = 0

is even in every variable, so solutions are kept in the non-negative orthant.
"""
from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from math import gcd
from typing import Callable, Iterator

from . import _kernels

__all__ = [
    "SolutionRecord",
    "HeronRecord",
    "biquadratic_value",
    "is_solution",
    "weighted_content",
    "canonicalize",
    "search",
    "heron_search",
    "heron_value",
    "compare_heron_biquadratic",
    "default_shards",
]

SHARDS_ENV = "CUBOID_EFORM_SHARDS"


def default_shards() -> int:
    raw = os.environ.get(SHARDS_ENV, "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{SHARDS_ENV} must be a positive integer")
    return n


def biquadratic_value(e10: int, e01: int, e11: int, l: int) -> int:
    a, b, l2 = e10 * e10, e01 * e01, l * l
    return 4 * e11 * e11 + a * a + b * b - 2 * a * b - 2 * l2 * a - 6 * b * l2 + l2 * l2


def is_solution(e10: int, e01: int, e11: int, l: int) -> bool:
    return biquadratic_value(e10, e01, e11, l) == 0


def _square_part_divisor(g: int, n: int) -> int:
    """Largest ``a`` with ``a | g`` and ``a*a | n`` (``g > 0``, ``n != 0``)."""
    alpha = 1
    p = 2
    while p * p <= g:
        if g % p == 0:
            k = 0
            while g % p == 0:
                g //= p
                k += 1
            j = 0
            while j < k and n % (p ** (2 * (j + 1))) == 0:
                j += 1
            alpha *= p**j
        p += 1 if p == 2 else 2
    if g > 1 and n % (g * g) == 0:
        alpha *= g
    return alpha


def weighted_content(e10: int, e01: int, e11: int, l: int) -> int:
    """Largest ``a`` with ``a | gcd(e10, e01, l)`` and ``a^2 | e11``.

    Returns 0 when no largest one exists (``e10 = e01 = l = e11 = 0``).
    """
    g = gcd(gcd(e10, e01), l)
    if g == 0:
        # a^2 | n already forces a | n
        return 0 if e11 == 0 else _square_part_divisor(abs(e11), abs(e11))
    if e11 == 0:
        return g
    return _square_part_divisor(g, abs(e11))


@dataclass(frozen=True)
class SolutionRecord:
    e10: int
    e01: int
    e11: int
    l: int
    positive: bool
    primitive: bool

    @classmethod
    def from_values(cls, e10: int, e01: int, e11: int, l: int) -> "SolutionRecord":
        e10, e01, e11, l = int(e10), int(e01), int(e11), int(l)
        return cls(
            e10,
            e01,
            e11,
            l,
            positive=min(e10, e01, e11, l) > 0,
            primitive=weighted_content(e10, e01, e11, l) == 1,
        )

    def values(self) -> tuple[int, int, int, int]:
        return (self.e10, self.e01, self.e11, self.l)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class HeronRecord:
    a: int
    b: int
    c: int
    s: int

    def to_dict(self) -> dict:
        return asdict(self)


def canonicalize(e10: int, e01: int, e11: int, l: int, reduce: bool = False) -> SolutionRecord:
    """Non-negative representative; with ``reduce`` also divide out the weighted content."""
    if not is_solution(e10, e01, e11, l):
        raise ValueError(f"({e10}, {e01}, {e11}, {l}) is not a solution")
    e10, e01, e11, l = abs(e10), abs(e01), abs(e11), abs(l)
    if reduce:
        alpha = weighted_content(e10, e01, e11, l)
        if alpha > 1:
            e10, e01, e11, l = e10 // alpha, e01 // alpha, e11 // (alpha * alpha), l // alpha
    return SolutionRecord.from_values(e10, e01, e11, l)


def _blocks(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(hi, s + size)) for s in range(lo, hi, size)]


def _ordered_map(fn: Callable, items: list, shards: int) -> Iterator:
    """``map(fn, items)`` over ``shards`` threads, yielding in input order with bounded lookahead."""
    if shards <= 1:
        for item in items:
            yield fn(*item)
        return
    with ThreadPoolExecutor(max_workers=shards) as pool:
        pending: deque = deque()
        it = iter(items)
        for item in it:
            pending.append(pool.submit(fn, *item))
            if len(pending) >= 2 * shards:
                break
        while pending:
            yield pending.popleft().result()
            nxt = next(it, None)
            if nxt is not None:
                pending.append(pool.submit(fn, *nxt))


def _block_size(bound: int) -> int:
    # about 2^22 inner iterations per block
    return max(1, (1 << 22) // ((bound + 1) ** 2))


def search(
    bound: int,
    positive_only: bool = False,
    primitive_only: bool = False,
    shards: int | None = None,
    backend: str | None = None,
) -> Iterator[SolutionRecord]:
    """Stream every solution with ``0 <= e10, e01, l <= bound`` in ``(l, e01, e10)`` order."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    shards = default_shards() if shards is None else shards
    if shards < 1:
        raise ValueError("shards must be >= 1")
    be = _kernels.resolve_backend(backend, bound)

    def run(lo, hi):
        return _kernels.biquadratic_block(lo, hi, bound, be)

    for hits in _ordered_map(run, _blocks(0, bound + 1, _block_size(bound)), shards):
        for e10, e01, e11, l in hits:
            rec = SolutionRecord.from_values(e10, e01, e11, l)
            if positive_only and not rec.positive:
                continue
            if primitive_only and not rec.primitive:
                continue
            yield rec


def heron_value(a: int, b: int, c: int, s: int) -> int:
    """``(4s)^2 + (a^2 + b^2 - c^2)^2 - 4a^2b^2``."""
    u = a * a + b * b - c * c
    return 16 * s * s + u * u - 4 * a * a * b * b


def heron_search(bound: int, shards: int | None = None, backend: str | None = None) -> Iterator[HeronRecord]:
    """Integer triangles ``a <= b <= c <= bound`` with integer area, ordered by ``(a, b, c)``."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    shards = default_shards() if shards is None else shards
    be = _kernels.resolve_backend(backend, bound)

    def run(lo, hi):
        return _kernels.heron_block(lo, hi, bound, be)

    size = max(1, (1 << 22) // ((bound + 1) ** 2))
    for hits in _ordered_map(run, _blocks(1, bound + 1, size), shards):
        for a, b, c, s in hits:
            if 0 < s <= 2 * bound * bound:
                yield HeronRecord(int(a), int(b), int(c), int(s))


def compare_heron_biquadratic(record: SolutionRecord) -> dict:
    """Two-squares reading of a solution: ``(2e11)^2 + (e01^2 + l^2 - e10^2)^2 == 8 e01^2 l^2``."""
    e10, e01, e11, l = record.values()
    first = (2 * e11) ** 2
    second = (e01 * e01 + l * l - e10 * e10) ** 2
    rhs = 8 * e01 * e01 * l * l
    return {
        "record": record.values(),
        "two_e11_squared": first,
        "middle_squared": second,
        "rhs": rhs,
        "holds": first + second == rhs,
        "heron_analogue": "(4S)^2 + (a^2+b^2-c^2)^2 == 4a^2b^2",
    }

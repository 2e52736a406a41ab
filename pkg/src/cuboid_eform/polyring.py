"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are stored as packed integers: the exponent of variable ``i`` lives
in bits ``[16*i, 16*i + 16)``.  Multiplying two monomials is then a single
integer addition, which keeps the expansion of large substitutions tolerable
in pure Python.  Coefficients are ``gmpy2.mpq`` values, always in lowest
terms; zero coefficients are never stored.
"""
from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Iterator, Mapping

import gmpy2
from gmpy2 import mpq

__all__ = [
    "RingSignature",
    "Polynomial",
    "Permutation",
    "WeightSystem",
    "Homogeneity",
    "RingMismatchError",
    "MQL",
    "EL",
    "HERON",
    "EL_WEIGHTS",
    "to_rational",
    "render_rational",
    "add",
    "mul",
    "substitute",
    "evaluate",
    "apply_permutation",
    "weighted_degree",
]

_BITS = 16
_MASK = (1 << _BITS) - 1
_MAX_DEGREE = _MASK


class RingMismatchError(ValueError):
    """Raised when polynomials over different rings are combined."""


def to_rational(value) -> mpq:
    """Coerce an int, Fraction, mpq or ``"num/den"`` string to ``mpq``."""
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, numbers.Rational)) or type(value).__name__ in ("mpz", "mpq"):
        return mpq(value)
    if isinstance(value, str):
        return mpq(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


def render_rational(value) -> str:
    """``"n"`` for integers, ``"n/d"`` otherwise."""
    q = to_rational(value)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class RingSignature:
    """An ordered list of variable names defining ``Q[v1, ..., vn]``."""

    name: str
    variables: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError(f"duplicate variable names in ring {self.name}")
        object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.variables)})

    def __len__(self) -> int:
        return len(self.variables)

    def index(self, var: str) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise KeyError(f"variable {var!r} is not in ring {self.name}") from None

    def __contains__(self, var: str) -> bool:
        return var in self._index

    def pack(self, exponents: Iterable[int]) -> int:
        exps = tuple(exponents)
        if len(exps) != len(self.variables):
            raise ValueError(
                f"monomial has {len(exps)} exponents, ring {self.name} has {len(self.variables)} variables"
            )
        key = 0
        for i, e in enumerate(exps):
            if e < 0 or e > _MAX_DEGREE:
                raise ValueError(f"exponent {e} out of range")
            key |= e << (_BITS * i)
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (_BITS * i)) & _MASK for i in range(len(self.variables)))

    def var(self, name: str) -> "Polynomial":
        return Polynomial(self, {1 << (_BITS * self.index(name)): mpq(1)})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(v) for v in self.variables)

    def const(self, c) -> "Polynomial":
        c = to_rational(c)
        return Polynomial(self, {0: c} if c else {})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)


MQL = RingSignature("MQL", ("x1", "x2", "x3", "d1", "d2", "d3", "L"))
EL = RingSignature("EL", ("E10", "E20", "E30", "E01", "E02", "E03", "E21", "E11", "E12", "L"))
HERON = RingSignature("HERON", ("a", "b", "c", "S"))


def _grevlex_key(exps: tuple[int, ...]):
    # larger key == larger monomial
    return (sum(exps), tuple(-e for e in reversed(exps)))


class Polynomial:
    """Immutable sparse polynomial over a :class:`RingSignature`.

    Build polynomials from ring generators (``MQL.var("x1")``), from
    :meth:`from_terms`, or with the parser in :mod:`cuboid_eform.polyparse`.
    """

    __slots__ = ("ring", "_terms", "_degree", "_hash")

    def __init__(self, ring: RingSignature, terms: dict[int, mpq]):
        # terms is trusted: packed keys, nonzero mpq values; not copied
        self.ring = ring
        self._terms = terms
        self._degree = None
        self._hash = None

    @classmethod
    def from_terms(cls, ring: RingSignature, terms: Mapping[tuple[int, ...], object]) -> "Polynomial":
        out: dict[int, mpq] = {}
        for exps, c in terms.items():
            key = ring.pack(exps)
            v = out.get(key, 0) + to_rational(c)
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        return cls(ring, out)

    # -- inspection --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def terms(self) -> list[tuple[tuple[int, ...], mpq]]:
        """Terms as ``(exponents, coefficient)`` in descending grevlex order."""
        items = [(self.ring.unpack(k), c) for k, c in self._terms.items()]
        items.sort(key=lambda t: _grevlex_key(t[0]), reverse=True)
        return items

    def __iter__(self) -> Iterator[tuple[tuple[int, ...], mpq]]:
        return iter(self.terms())

    def coefficient(self, exponents: Iterable[int]) -> mpq:
        return self._terms.get(self.ring.pack(exponents), mpq(0))

    def leading_term(self) -> tuple[tuple[int, ...], mpq]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return max(
            ((self.ring.unpack(k), c) for k, c in self._terms.items()),
            key=lambda t: _grevlex_key(t[0]),
        )

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if self._degree is None:
            n = len(self.ring)
            deg = -1
            for k in self._terms:
                d = 0
                for _ in range(n):
                    d += k & _MASK
                    k >>= _BITS
                if d > deg:
                    deg = d
            self._degree = deg
        return self._degree

    def degree_in(self, var: str) -> int:
        shift = _BITS * self.ring.index(var)
        return max(((k >> shift) & _MASK for k in self._terms), default=-1)

    def variables(self) -> set[str]:
        """Names of variables that actually occur."""
        seen = 0
        for k in self._terms:
            seen |= k
        return {v for i, v in enumerate(self.ring.variables) if (seen >> (_BITS * i)) & _MASK}

    def collect(self, var: str) -> dict[int, "Polynomial"]:
        """Split ``p = sum_k var**k * c_k``; returns ``{k: c_k}``."""
        shift = _BITS * self.ring.index(var)
        groups: dict[int, dict[int, mpq]] = {}
        for key, c in self._terms.items():
            e = (key >> shift) & _MASK
            groups.setdefault(e, {})[key & ~(_MASK << shift)] = c
        return {e: Polynomial(self.ring, t) for e, t in sorted(groups.items())}

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if other.ring != self.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring.name} vs {other.ring.name}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return self.ring.const(other)

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if len(other._terms) > len(self._terms):
            big, small = other._terms, self._terms
        else:
            big, small = self._terms, other._terms
        out = dict(big)
        for k, c in small.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                del out[k]
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ring, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def scale(self, c) -> "Polynomial":
        c = to_rational(c)
        if not c:
            return Polynomial(self.ring, {})
        return Polynomial(self.ring, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        if not self._terms or not other._terms:
            return Polynomial(self.ring, {})
        if self.total_degree() + other.total_degree() > _MAX_DEGREE:
            raise OverflowError("product degree exceeds the packed exponent range")
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, mpq] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return Polynomial(self.ring, {k: c for k, c in out.items() if c})

    def __rmul__(self, other) -> "Polynomial":
        return self.__mul__(other)

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- equality / hashing ------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self._terms == other._terms
        try:
            return self == self.ring.const(other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        from .polyparse import render

        return f"Polynomial({self.ring.name}, {render(self)!r})"

    def __str__(self) -> str:
        from .polyparse import render

        return render(self)

    # -- maps --------------------------------------------------------------

    def substitute(self, images: Mapping[str, "Polynomial"]) -> "Polynomial":
        return substitute(self, images)

    def evaluate(self, point: Mapping[str, object]) -> mpq:
        return evaluate(self, point)


# -- module-level operations ----------------------------------------------


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p * q


def substitute(p: Polynomial, images: Mapping[str, Polynomial]) -> Polynomial:
    """Ring homomorphism sending each variable of ``p.ring`` to ``images[var]``.

    Every variable of the source ring needs an image, even ones absent from
    ``p``; all images must live in a single target ring.
    """
    missing = [v for v in p.ring.variables if v not in images]
    if missing:
        raise KeyError(f"no image for variable(s) {', '.join(missing)}")
    imgs = [images[v] for v in p.ring.variables]
    target = imgs[0].ring
    for img in imgs:
        if not isinstance(img, Polynomial) or img.ring != target:
            raise RingMismatchError("all images must be polynomials over one target ring")
    if not p._terms:
        return target.zero()

    # Horner-style: peel off one variable at a time so shared cofactors are
    # expanded once instead of once per term.
    return _subst_rec(p.ring, p._terms, 0, imgs, [dict() for _ in imgs], target)


def _image_power(imgs, cache, i, e):
    c = cache[i]
    if e not in c:
        if e == 0:
            c[e] = imgs[i].ring.one()
        elif e == 1:
            c[e] = imgs[i]
        else:
            half = _image_power(imgs, cache, i, e // 2)
            sq = half * half
            c[e] = sq * imgs[i] if e & 1 else sq
    return c[e]


def _subst_rec(ring, terms, i, imgs, cache, target):
    n = len(imgs)
    if i == n:
        # only the constant monomial remains
        c = terms.get(0)
        return target.const(c) if c else target.zero()
    shift = _BITS * i
    groups: dict[int, dict[int, mpq]] = {}
    for k, c in terms.items():
        groups.setdefault((k >> shift) & _MASK, {})[k & ~(_MASK << shift)] = c
    img = imgs[i]
    # fast path: image is the same variable in the same ring
    is_self = img.ring == ring and img._terms == {1 << shift: 1}
    result = target.zero()
    for e, sub in groups.items():
        inner = _subst_rec(ring, sub, i + 1, imgs, cache, target)
        if not inner:
            continue
        if e == 0:
            result = result + inner
        elif is_self:
            bump = e << shift
            result = result + Polynomial(target, {k + bump: c for k, c in inner._terms.items()})
        else:
            result = result + inner * _image_power(imgs, cache, i, e)
    return result


def evaluate(p: Polynomial, point: Mapping[str, object]) -> mpq:
    """Exact value of ``p`` at ``point`` (every ring variable must be assigned)."""
    missing = [v for v in p.ring.variables if v not in point]
    if missing:
        raise KeyError(f"no value for variable(s) {', '.join(missing)}")
    vals = [to_rational(point[v]) for v in p.ring.variables]
    powers: list[dict[int, mpq]] = [{0: mpq(1)} for _ in vals]
    total = mpq(0)
    n = len(vals)
    for key, c in p._terms.items():
        term = c
        for i in range(n):
            e = (key >> (_BITS * i)) & _MASK
            if e:
                pw = powers[i]
                if e not in pw:
                    pw[e] = vals[i] ** e
                term = term * pw[e]
        total += term
    return total


@dataclass(frozen=True)
class Permutation:
    """A permutation of ``{1, 2, 3}``; ``images[i-1]`` is the image of ``i``."""

    images: tuple[int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if sorted(self.images) != [1, 2, 3]:
            raise ValueError(f"not a permutation of 1..3: {self.images}")

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (self * other)(i) == self(other(i))
        return Permutation(tuple(self(other(i)) for i in (1, 2, 3)))

    def inverse(self) -> "Permutation":
        inv = [0, 0, 0]
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    @classmethod
    def identity(cls) -> "Permutation":
        return cls((1, 2, 3))

    @classmethod
    def all(cls) -> list["Permutation"]:
        return [cls(p) for p in permutations((1, 2, 3))]

    @classmethod
    def transposition(cls, i: int, j: int) -> "Permutation":
        imgs = [1, 2, 3]
        imgs[i - 1], imgs[j - 1] = j, i
        return cls(tuple(imgs))

    def __str__(self) -> str:
        return "".join(map(str, self.images))


def apply_permutation(p: Polynomial, sigma: Permutation) -> Polynomial:
    """Column action on ``MQL``: ``x_i -> x_sigma(i)``, ``d_i -> d_sigma(i)``, ``L`` fixed."""
    if p.ring != MQL:
        raise RingMismatchError("apply_permutation is defined on the MQL ring only")
    # position of x_i is i-1, of d_i is i+2, L stays at 6
    dest = [sigma(i) - 1 for i in (1, 2, 3)] + [sigma(i) + 2 for i in (1, 2, 3)] + [6]
    out: dict[int, mpq] = {}
    for key, c in p._terms.items():
        new = 0
        for i in range(7):
            e = (key >> (_BITS * i)) & _MASK
            if e:
                new |= e << (_BITS * dest[i])
        out[new] = c
    return Polynomial(MQL, out)


@dataclass(frozen=True)
class WeightSystem:
    """Positive integer weight per variable name."""

    weights: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))
        if any(int(w) <= 0 for w in self.weights.values()):
            raise ValueError("weights must be positive integers")

    def weight(self, var: str) -> int:
        return self.weights[var]

    def __hash__(self):
        return hash(tuple(sorted(self.weights.items())))


EL_WEIGHTS = WeightSystem(
    {
        "E10": 1, "E01": 1, "L": 1,
        "E20": 2, "E02": 2, "E11": 2,
        "E30": 3, "E03": 3, "E21": 3, "E12": 3,
    }
)


class Homogeneity(enum.Enum):
    ZERO = "zero"
    NOT_HOMOGENEOUS = "not homogeneous"


def weighted_degree(p: Polynomial, w: WeightSystem = EL_WEIGHTS):
    """Common weighted degree of all monomials of ``p``.

    Returns an ``int``, :attr:`Homogeneity.ZERO` for the zero polynomial, or
    :attr:`Homogeneity.NOT_HOMOGENEOUS`.
    """
    if not p._terms:
        return Homogeneity.ZERO
    ws = [w.weight(v) for v in p.ring.variables]
    degrees = set()
    for key in p._terms:
        d = 0
        for i, wi in enumerate(ws):
            d += wi * ((key >> (_BITS * i)) & _MASK)
        degrees.add(d)
        if len(degrees) > 1:
            return Homogeneity.NOT_HOMOGENEOUS
    return degrees.pop()


def lcm_of_denominators(values: Iterable[object]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, int(to_rational(v).denominator))
    return out


def isqrt_exact(n: int) -> int | None:
    """Integer square root if ``n`` is a perfect square, else ``None``."""
    if n < 0:
        return None
    r = int(gmpy2.isqrt(n))
    return r if r * r == n else None

"""Exact ensemble values of correlation functions, used as ground truth.

The Ledrappier test works in GF(2)[x].  Writing the configuration additively,
every site value in the upper half plane is a GF(2)-linear combination of one
determining row, and site ``(a, b)`` corresponds to ``x**a * (1 + x)**b``.  A
product of sites is a character of the compact group; its Haar integral is 1
when the character is trivial (the polynomial sum vanishes) and 0 otherwise.
:func:`ledrappier_bruteforce` checks this by plain enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .correlations import CorrelationQuery
from .lattice import LatticeVector, VectorLike, WeightLaw, as_vector, law_covariance, law_mean
from .samplers import Bernoulli, Ledrappier, RudinShapiro2D, System, Times23

MAX_BRUTEFORCE_BOX = 20
_CHUNK_BITS = 16


class Gf2Poly:
    """Polynomial over GF(2) stored as an int bitset (bit ``i`` = coefficient of ``x**i``)."""

    __slots__ = ("bits",)

    def __init__(self, bits: int = 0):
        if bits < 0:
            raise ValueError("bitset must be nonnegative")
        self.bits = int(bits)

    @classmethod
    def monomial(cls, n: int) -> Gf2Poly:
        return cls(1 << n)

    @property
    def degree(self) -> int:
        """Degree, or -1 for the zero polynomial."""
        return self.bits.bit_length() - 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def __add__(self, other: Gf2Poly) -> Gf2Poly:
        return Gf2Poly(self.bits ^ other.bits)

    __sub__ = __add__

    def __mul__(self, other: Gf2Poly) -> Gf2Poly:
        a, b = self.bits, other.bits
        if a < b:
            a, b = b, a
        c = 0
        while b:
            if b & 1:
                c ^= a
            a <<= 1
            b >>= 1
        return Gf2Poly(c)

    def __pow__(self, n: int) -> Gf2Poly:
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = Gf2Poly(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Gf2Poly) and self.bits == other.bits

    def __hash__(self) -> int:
        return hash(self.bits)

    def __repr__(self) -> str:
        if not self.bits:
            return "Gf2Poly(0)"
        terms = [("1" if i == 0 else "x" if i == 1 else f"x^{i}")
                 for i in range(self.degree, -1, -1) if (self.bits >> i) & 1]
        return f"Gf2Poly({' + '.join(terms)})"


ONE_PLUS_X = Gf2Poly(0b11)


@dataclass(frozen=True)
class OracleResult:
    value: complex
    exact: bool = True

    def __int__(self) -> int:
        return int(self.value.real)


def _odd_sites(query: CorrelationQuery) -> list[LatticeVector]:
    """Sites whose total power is odd; for signs, even powers are 1 and odd powers are w."""
    return sorted((z for z, m in query.combined().items() if m % 2), key=lambda z: (z.b, z.a))


def ledrappier_polynomial(sites) -> Gf2Poly:
    """``sum x**a (1+x)**b`` over the sites, after moving them into the quadrant."""
    sites = [as_vector(z) for z in sites]
    if not sites:
        return Gf2Poly(0)
    amin = min(z.a for z in sites)
    bmin = min(z.b for z in sites)
    total = Gf2Poly(0)
    for z in sites:
        total = total + Gf2Poly.monomial(z.a - amin) * ONE_PLUS_X ** (z.b - bmin)
    return total


def ledrappier_corr_oracle(query: CorrelationQuery) -> OracleResult:
    poly = ledrappier_polynomial(_odd_sites(query))
    return OracleResult(complex(1.0 if poly.is_zero() else 0.0))


@lru_cache(maxsize=4)
def _sign_chunk(length: int, start: int, count: int) -> np.ndarray:
    """Sign patterns ``start .. start+count-1`` of ``length`` sites, as a ``(length, count)`` array.

    Bit ``i`` of the pattern index set means site ``i`` carries -1.
    """
    idx = np.arange(start, start + count, dtype=np.int64)
    signs = (1 - 2 * ((idx[None, :] >> np.arange(length, dtype=np.int64)[:, None]) & 1)).astype(np.int8)
    signs.flags.writeable = False
    return signs


def ledrappier_bruteforce(query: CorrelationQuery, box: int) -> Fraction:
    """Exact Haar average of the query by enumerating every determining row.

    The query must sit inside ``[0, box]^2``; the determining strip then has
    ``2 * box + 1`` sites and all ``2**(2*box+1)`` sign patterns are visited.
    """
    if not 0 <= box <= MAX_BRUTEFORCE_BOX:
        raise ValueError(f"box must lie in [0, {MAX_BRUTEFORCE_BOX}], got {box}")
    for z, _ in query.terms:
        if not (0 <= z.a <= box and 0 <= z.b <= box):
            raise ValueError(f"query site {z!r} outside [0, {box}]^2")
    length = 2 * box + 1
    n_rows = 1 << length
    odd = [(z.a, z.b) for z, m in query.terms if m % 2]
    if not odd:
        return Fraction(1)
    top = max(b for _, b in odd)
    chunk = 1 << min(length, _CHUNK_BITS)
    total = 0
    for start in range(0, n_rows, chunk):
        bottom = _sign_chunk(length, start, chunk)
        rows = [bottom]
        row = bottom
        for _ in range(top):
            row = row[:-1] * row[1:]
            rows.append(row)
        prod = np.ones(chunk, dtype=np.int64)
        for a, b in odd:
            prod *= rows[b][a]
        total += int(prod.sum())
    return Fraction(total, n_rows)


def times23_sum(query: CorrelationQuery) -> int:
    """``sum m_j 2**k_j 3**l_j`` after translating the sites into the quadrant."""
    kmin = min(z.a for z, _ in query.terms)
    lmin = min(z.b for z, _ in query.terms)
    return sum(m * (3 ** (z.b - lmin) << (z.a - kmin)) for z, m in query.terms)


def times23_corr_oracle(query: CorrelationQuery) -> OracleResult:
    return OracleResult(complex(1.0 if times23_sum(query) == 0 else 0.0))


def bernoulli_corr_oracle(law: WeightLaw, query: CorrelationQuery) -> complex:
    """Product over distinct sites of the law's moment ``E[W**M]`` at the total power ``M``."""
    value = complex(1.0)
    for m in query.combined().values():
        value *= law.moment(m)
    return value


def expected_eta(system: System, z: VectorLike) -> complex:
    """Ensemble autocorrelation coefficient of a system at lag ``z``."""
    z = as_vector(z)
    at_zero = z.a == 0 and z.b == 0
    if isinstance(system, Bernoulli):
        mean_sq = abs(law_mean(system.law)) ** 2
        return complex(mean_sq + (law_covariance(system.law) if at_zero else 0.0))
    if isinstance(system, (Ledrappier, Times23, RudinShapiro2D)):
        return complex(1.0 if at_zero else 0.0)
    raise TypeError(f"unknown system {system!r}")


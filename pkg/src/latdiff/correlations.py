"""Windowed estimators of autocorrelation coefficients and n-point correlations.

Averages run over *interior* positions only: for a lag ``z`` the estimator uses
every ``x`` with both ``x`` and ``x + z`` inside the window, and divides by the
number of such pairs.  Sums are accumulated with :func:`math.fsum` (real and
imaginary parts separately), which is correctly rounded and therefore
independent of summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import scipy.fft

from .lattice import (
    Alphabet,
    ComplexWindow,
    LatticeError,
    LatticeVector,
    VectorLike,
    WeightWindow,
    as_vector,
)
from .samplers import SamplerSpec, derive_seed, sample


class NoValidPairsError(LatticeError, ValueError):
    """The window is too small for the requested lag or query."""


@dataclass(frozen=True)
class CorrelationQuery:
    """Generalized correlation ``<(z_1, m_1), ..., (z_n, m_n)>``.

    The power ``m = -1`` stands for a complex-conjugated coordinate.
    Repeated sites are allowed; their powers add up.
    """

    terms: tuple[tuple[LatticeVector, int], ...]

    def __post_init__(self):
        terms = tuple((as_vector(z), int(m)) for z, m in self.terms)
        if not terms:
            raise ValueError("a correlation query needs at least one term")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *terms) -> CorrelationQuery:
        """``CorrelationQuery.of(((0, 0), 1), ((1, 0), -1))``; a bare vector means power 1."""
        out = []
        for t in terms:
            if isinstance(t, LatticeVector) or (len(t) == 2 and not isinstance(t[0], (tuple, LatticeVector))):
                out.append((as_vector(t), 1))
            else:
                out.append((as_vector(t[0]), int(t[1])))
        return cls(tuple(out))

    @classmethod
    def points(cls, sites: Iterable[VectorLike]) -> CorrelationQuery:
        return cls(tuple((as_vector(z), 1) for z in sites))

    def combined(self) -> dict[LatticeVector, int]:
        """Total power per distinct site, zero totals dropped."""
        acc: dict[LatticeVector, int] = {}
        for z, m in self.terms:
            acc[z] = acc.get(z, 0) + m
        return {z: m for z, m in acc.items() if m != 0}

    def translated(self, t: VectorLike) -> CorrelationQuery:
        return CorrelationQuery(tuple((z + t, m) for z, m in self.terms))

    def __str__(self) -> str:
        return ",".join(f"({z.a},{z.b}):{m}" for z, m in self.terms)


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """Estimated coefficients for all lags with ``|z|_inf <= range``.

    ``values[b + R, a + R]`` holds the estimate at lag ``(a, b)`` and
    ``counts`` the number of pairs that entered it.
    """

    range: int
    values: np.ndarray
    counts: np.ndarray

    def __getitem__(self, z: VectorLike) -> complex:
        z = as_vector(z)
        if z.sup_norm() > self.range:
            raise KeyError(z)
        return complex(self.values[z.b + self.range, z.a + self.range])

    def count(self, z: VectorLike) -> int:
        z = as_vector(z)
        return int(self.counts[z.b + self.range, z.a + self.range])

    def lags(self) -> list[LatticeVector]:
        r = self.range
        return [LatticeVector(a, b) for b in range(-r, r + 1) for a in range(-r, r + 1)]

    @property
    def entries(self) -> dict[LatticeVector, complex]:
        return {z: self[z] for z in self.lags()}

    @property
    def sample_counts(self) -> dict[LatticeVector, int]:
        return {z: self.count(z) for z in self.lags()}

    def max_offcentre(self, radius: int | None = None) -> float:
        """Largest ``|eta(z)|`` over ``0 < |z|_inf <= radius``."""
        r = self.range if radius is None else radius
        best = 0.0
        for z in self.lags():
            if 0 < z.sup_norm() <= r:
                best = max(best, abs(self[z]))
        return best


def _fsum_complex(values: np.ndarray) -> complex:
    flat = np.ravel(values)
    return complex(math.fsum(flat.real.tolist()), math.fsum(flat.imag.tolist()))


def _overlap(window: ComplexWindow, z: LatticeVector) -> tuple[slice, slice, slice, slice]:
    """Slices (rows, cols) of the pair bases ``x`` and partners ``x + z`` in the data array."""
    w, h = window.width, window.height
    if abs(z.a) >= w or abs(z.b) >= h:
        raise NoValidPairsError(f"lag {z!r} leaves no pairs in a {w}x{h} window")
    base_c = slice(max(0, -z.a), w - max(0, z.a))
    part_c = slice(max(0, z.a), w - max(0, -z.a))
    base_r = slice(max(0, -z.b), h - max(0, z.b))
    part_r = slice(max(0, z.b), h - max(0, -z.b))
    return base_r, base_c, part_r, part_c


def autocorr_coefficient(window: ComplexWindow, z: VectorLike, exact: bool = False):
    """Interior-pair estimate of ``eta(z)``: mean of ``conj(w_x) * w_{x+z}``.

    With ``exact=True`` a PlusMinusOne window yields a :class:`~fractions.Fraction`.
    """
    z = as_vector(z)
    br, bc, pr, pc = _overlap(window, z)
    if isinstance(window, WeightWindow) and window.alphabet is Alphabet.PLUS_MINUS_ONE:
        s = window.signs()
        total = int(np.sum(s[br, bc].astype(np.int64) * s[pr, pc]))
        n = (br.stop - br.start) * (bc.stop - bc.start)
        value = Fraction(total, n)
        return value if exact else complex(float(value))
    if exact:
        raise ValueError("exact coefficients need a PlusMinusOne window")
    d = window.data
    prod = np.conj(d[br, bc]) * d[pr, pc]
    return _fsum_complex(prod) / prod.size


def _check_range(window: ComplexWindow, R: int) -> None:
    if R < 0:
        raise ValueError("range must be nonnegative")
    if R >= window.width or R >= window.height:
        raise NoValidPairsError(f"range {R} too large for a {window.width}x{window.height} window")


def pair_counts(width: int, height: int, R: int) -> np.ndarray:
    lags = np.arange(-R, R + 1)
    return np.outer(height - np.abs(lags), width - np.abs(lags))


def autocorr_table(window: ComplexWindow, R: int, method: str = "fft", workers: int | None = None) -> CorrelationTable:
    """Coefficients for every lag with ``|z|_inf <= R``.

    The FFT path zero-pads to twice the window size (so no lag wraps around),
    forms the self cross-correlation and divides by the per-lag pair count.
    """
    _check_range(window, R)
    counts = pair_counts(window.width, window.height, R)
    size = 2 * R + 1
    if method == "direct":
        values = np.empty((size, size), dtype=np.complex128)
        for i, b in enumerate(range(-R, R + 1)):
            for j, a in enumerate(range(-R, R + 1)):
                values[i, j] = autocorr_coefficient(window, (a, b))
    elif method == "fft":
        h, w = window.height, window.width
        shape = (scipy.fft.next_fast_len(2 * h), scipy.fft.next_fast_len(2 * w))
        spec = scipy.fft.fft2(window.data, s=shape, workers=workers)
        cyc = scipy.fft.ifft2(np.conj(spec) * spec, workers=workers)
        rows = np.arange(-R, R + 1) % shape[0]
        cols = np.arange(-R, R + 1) % shape[1]
        values = cyc[np.ix_(rows, cols)] / counts
        values[R, R] = autocorr_coefficient(window, (0, 0))
    else:
        raise ValueError(f"unknown method {method!r}")
    values.flags.writeable = False
    counts.flags.writeable = False
    return CorrelationTable(range=R, values=values, counts=counts)


def _int_power(values: np.ndarray, m: int) -> np.ndarray:
    if m < 0:
        values, m = np.conj(values), -m
    result = None
    base = values
    while m:
        if m & 1:
            result = base if result is None else result * base
        m >>= 1
        if m:
            base = base * base
    return np.ones_like(values) if result is None else result


def valid_origins(window: ComplexWindow, sites: Sequence[LatticeVector]) -> tuple[slice, slice]:
    """Index ranges (relative to the window) of positions ``x`` keeping every ``x + z`` inside."""
    amin = min(z.a for z in sites)
    amax = max(z.a for z in sites)
    bmin = min(z.b for z in sites)
    bmax = max(z.b for z in sites)
    cols = slice(-amin, window.width - amax)
    rows = slice(-bmin, window.height - bmax)
    if cols.stop <= cols.start or rows.stop <= rows.start:
        raise NoValidPairsError("no position keeps every query site inside the window")
    return rows, cols


def correlation(window: ComplexWindow, query: CorrelationQuery, exact: bool = False):
    """Window average over ``x`` of ``prod_j w_{x+z_j} ** m_j``.

    Only positions ``x`` for which every ``x + z_j`` lies inside the window count.
    For PlusMinusOne windows the result is exact (even powers drop out).
    """
    sites = [z for z, _ in query.terms]
    rows, cols = valid_origins(window, sites)
    n = (rows.stop - rows.start) * (cols.stop - cols.start)

    def block(z: LatticeVector) -> np.ndarray:
        return (slice(rows.start + z.b, rows.stop + z.b), slice(cols.start + z.a, cols.stop + z.a))

    if isinstance(window, WeightWindow) and window.alphabet is Alphabet.PLUS_MINUS_ONE:
        s = window.signs()
        prod = np.ones((rows.stop - rows.start, cols.stop - cols.start), dtype=np.int64)
        for z, m in query.terms:
            if m % 2:
                prod *= s[block(z)]
        value = Fraction(int(prod.sum()), n)
        return value if exact else complex(float(value))
    if exact:
        raise ValueError("exact correlations need a PlusMinusOne window")
    d = window.data
    prod = None
    for z, m in query.terms:
        if m == 0:
            continue
        factor = _int_power(d[block(z)], m)
        prod = factor if prod is None else prod * factor
    if prod is None:
        return complex(1.0)
    return _fsum_complex(prod) / n


def correlation_convergence(spec: SamplerSpec, query: CorrelationQuery,
                            sizes: Sequence[int]) -> list[tuple[int, complex]]:
    """Estimate ``query`` on one fresh square window per size.

    The window of side ``n`` uses the seed ``derive_seed(spec.seed, n)``.
    """
    sizes = [int(n) for n in sizes]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be strictly increasing")
    out = []
    for n in sizes:
        window = sample(spec.resized(n, n, seed=derive_seed(spec.seed, n)))
        out.append((n, complex(correlation(window, query))))
    return out

"""Periodograms, theoretical spectra, Bragg ordinates and flatness checks.

Frequencies live on the torus [0, 1)^2.  Because every comb here is supported
on Z^2 its diffraction is Z^2-periodic, so nothing is lost by folding.  The
periodogram ordinate at grid point ``(j/W, k/H)`` is stored at ``values[k, j]``
and equals ``|sum_x w_x exp(-2 pi i q.x)|^2 / (W H)`` with ``x`` measured from
the window origin.  No taper is applied, which keeps Parseval exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.fft
from scipy import stats

from .lattice import ComplexWindow, Rademacher, WeightLaw, comb_weights, law_covariance, law_mean
from .samplers import Bernoulli, Ledrappier, RudinShapiro2D, SamplerSpec, System, Times23, derive_seed, sample

FLATNESS_BINS = 16


@dataclass(frozen=True, eq=False)
class PeriodogramGrid:
    values: np.ndarray

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    def mean(self) -> float:
        return math.fsum(self.values.ravel().tolist()) / self.values.size

    def at(self, frequency: tuple[float, float]) -> float:
        """Ordinate at the grid point nearest to ``frequency`` (taken mod 1)."""
        j = int(round((frequency[0] % 1.0) * self.width)) % self.width
        k = int(round((frequency[1] % 1.0) * self.height)) % self.height
        return float(self.values[k, j])

    def frequencies(self) -> tuple[np.ndarray, np.ndarray]:
        return np.arange(self.width) / self.width, np.arange(self.height) / self.height


@dataclass(frozen=True)
class TheoreticalSpectrum:
    """Point mass on every integer frequency plus a constant Lebesgue density."""

    bragg_mass: float
    ac_density: float

    def __post_init__(self):
        if self.bragg_mass < -1e-15 or self.ac_density < -1e-15:
            raise ValueError("spectral weights must be nonnegative")


def periodogram(window: ComplexWindow, workers: int | None = None) -> PeriodogramGrid:
    spec = scipy.fft.fft2(window.data, workers=workers)
    values = (spec.real**2 + spec.imag**2) / window.size
    values.flags.writeable = False
    return PeriodogramGrid(values)


def ordinate(window: ComplexWindow, frequency: tuple[float, float]) -> float:
    """Periodogram value at an arbitrary (not necessarily grid) frequency."""
    qa, qb = frequency
    ea = np.exp(-2j * np.pi * qa * np.arange(window.width))
    eb = np.exp(-2j * np.pi * qb * np.arange(window.height))
    total = eb @ window.data @ ea
    return float(abs(total) ** 2 / window.size)


def mix_spectrum(balanced: TheoreticalSpectrum, phi_plus: complex, phi_minus: complex) -> TheoreticalSpectrum:
    """Spectrum of the comb with weights ``phi_plus``/``phi_minus`` on a balanced +-1 system."""
    a2 = abs(complex(phi_plus) + complex(phi_minus)) ** 2 / 4
    b2 = abs(complex(phi_plus) - complex(phi_minus)) ** 2 / 4
    return TheoreticalSpectrum(a2 + b2 * balanced.bragg_mass, b2 * balanced.ac_density)


def expected_spectrum(law: WeightLaw, phi_plus: complex = 1, phi_minus: complex = -1) -> TheoreticalSpectrum:
    """Almost-sure diffraction of an i.i.d. comb: ``|E W|^2`` on Z^2 plus ``cov(W)`` times Lebesgue.

    For ``(phi_plus, phi_minus) != (1, -1)`` the law must be a sign law and the
    weights are pushed forward exactly; for balanced signs this is the usual
    mixture of the trivial lattice comb with the balanced spectrum.
    """
    phi_plus, phi_minus = complex(phi_plus), complex(phi_minus)
    if (phi_plus, phi_minus) == (1, -1):
        return TheoreticalSpectrum(abs(law_mean(law)) ** 2, law_covariance(law))
    if not isinstance(law, Rademacher):
        raise ValueError("custom comb weights need a sign (Rademacher) law")
    a = (phi_plus + phi_minus) / 2
    b = (phi_plus - phi_minus) / 2
    m = law_mean(law).real
    mean = a + b * m
    second = abs(a) ** 2 + abs(b) ** 2 + 2 * (a.conjugate() * b).real * m
    bragg = abs(mean) ** 2
    return TheoreticalSpectrum(bragg, max(second - bragg, 0.0))


def system_spectrum(system: System, phi_plus: complex = 1, phi_minus: complex = -1) -> TheoreticalSpectrum:
    if isinstance(system, Bernoulli):
        return expected_spectrum(system.law, phi_plus, phi_minus)
    if isinstance(system, (Ledrappier, RudinShapiro2D)):
        return mix_spectrum(TheoreticalSpectrum(0.0, 1.0), phi_plus, phi_minus)
    if isinstance(system, Times23):
        if (complex(phi_plus), complex(phi_minus)) != (1, -1):
            raise ValueError("custom comb weights need a +-1 system")
        return TheoreticalSpectrum(0.0, 1.0)
    raise TypeError(f"unknown system {system!r}")


def bragg_estimate(spec: SamplerSpec, phi: tuple[complex, complex], frequency: tuple[float, float],
                   sizes: Sequence[int]) -> list[tuple[int, float]]:
    """Ordinate divided by the site count at ``frequency``, one square window per size.

    At an integer frequency this converges to the Bragg mass; off the lattice it
    tends to zero.  Window ``n`` uses seed ``derive_seed(spec.seed, n)``.
    """
    out = []
    for n in sizes:
        window = sample(spec.resized(n, n, seed=derive_seed(spec.seed, n)))
        if tuple(complex(p) for p in phi) != (1, -1):
            window = comb_weights(window, *phi)
        out.append((n, ordinate(window, frequency) / window.size))
    return out


@dataclass
class FlatnessReport:
    expected_density: float
    mean: float
    binned_means: list[list[float]]
    max_bin_deviation: float
    tolerance: float
    ks_statistic: float | None = None
    ks_pvalue: float | None = None
    flat: bool = field(init=False)

    def __post_init__(self):
        self.flat = bool(self.max_bin_deviation <= self.tolerance)

    def as_dict(self) -> dict:
        return {
            "expected_density": self.expected_density,
            "mean": self.mean,
            "binned_means": self.binned_means,
            "max_bin_deviation": self.max_bin_deviation,
            "tolerance": self.tolerance,
            "ks_statistic": self.ks_statistic,
            "ks_pvalue": self.ks_pvalue,
            "flat": self.flat,
        }


def _bin_index(n: int, bins: int) -> np.ndarray:
    return (np.arange(n) * bins) // n


def binned_means(values: np.ndarray, bins: int = FLATNESS_BINS, exclude_origin: bool = True) -> np.ndarray:
    """Mean ordinate in each cell of a ``bins x bins`` partition of the torus."""
    h, w = values.shape
    weight = np.ones_like(values, dtype=np.float64)
    if exclude_origin:
        weight[0, 0] = 0.0
    rows = _bin_index(h, bins)
    cols = _bin_index(w, bins)
    sums = np.zeros((bins, bins))
    counts = np.zeros((bins, bins))
    np.add.at(sums, (rows[:, None], cols[None, :]), values * weight)
    np.add.at(counts, (rows[:, None], cols[None, :]), weight)
    return sums / counts


def flatness_report(grid: PeriodogramGrid, expected_density: float, bins: int = FLATNESS_BINS,
                    tolerance: float = 0.05, ks: bool = False) -> FlatnessReport:
    """Compare bin means of the periodogram (origin excluded) with a flat density.

    With ``ks=True`` the ordinates divided by their mean are also tested against
    the unit exponential law; that is only meaningful for i.i.d. combs.
    """
    if grid.width < bins or grid.height < bins:
        raise ValueError(f"a {grid.width}x{grid.height} grid cannot fill {bins}x{bins} bins")
    if not expected_density > 0:
        raise ValueError("expected density must be positive")
    means = binned_means(grid.values, bins)
    rest = np.delete(grid.values.ravel(), 0)
    mean = math.fsum(rest.tolist()) / rest.size
    deviation = float(np.max(np.abs(means - expected_density)) / expected_density)
    ks_stat = ks_p = None
    if ks:
        if mean <= 0:
            raise ValueError("cannot run the exponential test on an all-zero grid")
        res = stats.kstest(rest / mean, "expon")
        ks_stat, ks_p = float(res.statistic), float(res.pvalue)
    return FlatnessReport(
        expected_density=float(expected_density),
        mean=mean,
        binned_means=means.tolist(),
        max_bin_deviation=deviation,
        tolerance=tolerance,
        ks_statistic=ks_stat,
        ks_pvalue=ks_p,
    )


def cyclic_autocorrelation(window: ComplexWindow) -> np.ndarray:
    """Wrap-around autocorrelation ``mean_x conj(w_x) w_{x+z mod size}`` by direct summation.

    Quadratic in the number of sites; meant for small windows.  Its DFT is the
    periodogram, unlike the interior-pair estimator in :mod:`latdiff.correlations`.
    """
    d = window.data
    h, w = d.shape
    out = np.empty((h, w), dtype=np.complex128)
    for b in range(h):
        for a in range(w):
            out[b, a] = np.mean(np.conj(d) * np.roll(d, (-b, -a), axis=(0, 1)))
    return out


"""Seeded samplers for the four lattice systems.

Every sampler returns a :class:`~latdiff.lattice.WeightWindow` anchored at the
origin.  Random draws follow a fixed stream discipline so that a window is a
pure function of ``(system, width, height, seed)``:

* Bernoulli: row ``b`` reads ``width`` uniforms from its own PCG64 stream
  ``SeedSequence(seed, spawn_key=(0, b))``, one uniform per site, left to right.
  A smaller window is therefore the lower-left corner of a larger one.
* Ledrappier: the determining bottom row reads uniforms from stream
  ``spawn_key=(1,)``; site ``i`` of that row is ``+1`` iff its uniform is < 1/2.
* (x2,x3): the anchor phase is assembled from 64-bit words of stream
  ``spawn_key=(2,)``, most significant word first.  A larger window only
  appends lower-order bits, so its corner agrees with the smaller window up to
  float rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .lattice import Alphabet, WeightLaw, WeightWindow, ZERO

SEED_BITS = 64
_BERNOULLI_STREAM = 0
_LEDRAPPIER_STREAM = 1
_TIMES23_STREAM = 2
MIN_GUARD_BITS = 64


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**SEED_BITS:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _check_size(width: int, height: int) -> None:
    if int(width) < 1 or int(height) < 1:
        raise ValueError(f"window size must be positive, got {width}x{height}")


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(_check_seed(seed), spawn_key=key)))


def derive_seed(seed: int, *salt: int) -> int:
    """Deterministic child seed, e.g. one per window size in a convergence series."""
    ss = np.random.SeedSequence(entropy=[_check_seed(seed), *[int(s) for s in salt]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# -- systems --------------------------------------------------------------------


@dataclass(frozen=True)
class Bernoulli:
    law: WeightLaw

    name = "bernoulli"


@dataclass(frozen=True)
class Ledrappier:
    name = "ledrappier"


@dataclass(frozen=True)
class Times23:
    guard_bits: int = MIN_GUARD_BITS

    name = "times23"


@dataclass(frozen=True)
class RudinShapiro2D:
    name = "rudin-shapiro"


System = Union[Bernoulli, Ledrappier, Times23, RudinShapiro2D]


@dataclass(frozen=True)
class SamplerSpec:
    system: System
    width: int
    height: int
    seed: int = 0

    def __post_init__(self):
        _check_size(self.width, self.height)
        _check_seed(self.seed)

    def resized(self, width: int, height: int | None = None, seed: int | None = None) -> SamplerSpec:
        return SamplerSpec(self.system, width, width if height is None else height,
                           self.seed if seed is None else seed)


def sample(spec: SamplerSpec) -> WeightWindow:
    system = spec.system
    if isinstance(system, Bernoulli):
        return sample_bernoulli(system.law, spec.width, spec.height, spec.seed)
    if isinstance(system, Ledrappier):
        return sample_ledrappier(spec.width, spec.height, spec.seed)
    if isinstance(system, Times23):
        return sample_times23(spec.width, spec.height, spec.seed, system.guard_bits)
    if isinstance(system, RudinShapiro2D):
        return sample_rudin_shapiro_2d(spec.width, spec.height)
    raise TypeError(f"unknown system {system!r}")


# -- Bernoulli --------------------------------------------------------------------


def sample_bernoulli(law: WeightLaw, width: int, height: int, seed: int) -> WeightWindow:
    _check_size(width, height)
    data = np.empty((height, width), dtype=np.complex128)
    for b in range(height):
        u = _stream(seed, _BERNOULLI_STREAM, b).random(width)
        data[b] = law.from_uniform(u)
    return WeightWindow(origin=ZERO, data=data, alphabet=law.alphabet)


# -- Ledrappier -------------------------------------------------------------------


def ledrappier_rows(bottom: np.ndarray, height: int) -> np.ndarray:
    """Propagate a determining row upward with ``w[x+e2] = w[x] * w[x+e1]``.

    Returns an ``(height, len(bottom))`` int8 array; row ``r`` is only defined on
    its first ``len(bottom) - r`` entries and the rest is filled with 0.
    """
    row = np.asarray(bottom, dtype=np.int8)
    if height > row.size:
        raise ValueError(f"bottom row of length {row.size} cannot determine {height} rows")
    out = np.zeros((height, row.size), dtype=np.int8)
    for r in range(height):
        out[r, : row.size] = row
        row = row[:-1] * row[1:]
    return out


def ledrappier_from_row(bottom, width: int, height: int) -> WeightWindow:
    """Window whose bottom row is ``bottom[:width]``, grown upward by the Ledrappier rule.

    ``bottom`` must have at least ``width + height - 1`` entries.
    """
    _check_size(width, height)
    bottom = np.asarray(bottom, dtype=np.int8)
    if bottom.size < width + height - 1:
        raise ValueError(f"need a bottom row of length >= {width + height - 1}, got {bottom.size}")
    rows = ledrappier_rows(bottom, height)
    return WeightWindow.from_signs(rows[:, :width])


def sample_ledrappier(width: int, height: int, seed: int) -> WeightWindow:
    _check_size(width, height)
    u = _stream(seed, _LEDRAPPIER_STREAM).random(width + height)
    bottom = np.where(u < 0.5, 1, -1).astype(np.int8)
    return ledrappier_from_row(bottom, width, height)


# -- (x2,x3) ------------------------------------------------------------------------


@dataclass(frozen=True)
class PhaseFixedPoint:
    """Exact dyadic phase ``numerator / 2**bits`` in ``[0, 1)``."""

    numerator: int
    bits: int

    def __post_init__(self):
        if self.bits < 1:
            raise ValueError("bits must be positive")
        if not 0 <= self.numerator < (1 << self.bits):
            raise ValueError("numerator out of range [0, 2**bits)")

    @property
    def _mask(self) -> int:
        return (1 << self.bits) - 1

    def doubled(self) -> PhaseFixedPoint:
        return PhaseFixedPoint((self.numerator << 1) & self._mask, self.bits)

    def tripled(self) -> PhaseFixedPoint:
        return PhaseFixedPoint((self.numerator * 3) & self._mask, self.bits)

    def scaled(self, k: int, l: int) -> PhaseFixedPoint:
        """Phase times ``2**k * 3**l`` mod 1."""
        return PhaseFixedPoint(((self.numerator * 3**l) << k) & self._mask, self.bits)

    def top64(self) -> int:
        """Leading 64 fractional bits, i.e. ``floor(phase * 2**64)``."""
        if self.bits >= 64:
            return self.numerator >> (self.bits - 64)
        return self.numerator << (64 - self.bits)

    def to_float(self) -> float:
        return self.top64() / 2.0**64

    def weight(self) -> complex:
        return complex(np.exp(2j * np.pi * self.to_float()))


def times23_precision(width: int, height: int, guard_bits: int) -> int:
    """Bit budget ``width + ceil(height * log2 3) + guard_bits``, rounded up to 64."""
    log3 = (3**height).bit_length() if height > 0 else 0
    total = width + log3 + guard_bits
    return -(-total // 64) * 64


def times23_from_anchor(anchor: PhaseFixedPoint, width: int, height: int) -> WeightWindow:
    """Window with phase ``2**k * 3**l * t`` at site ``(k, l)``, computed exactly."""
    _check_size(width, height)
    bits = anchor.bits
    low = (1 << 64) - 1
    top = np.empty((height, width), dtype=np.uint64)
    # work with at least 64 fractional bits so the leading word is a plain shift
    pad = max(0, 64 - bits)
    shift = bits + pad - 64
    mask = (1 << (bits + pad)) - 1
    row = anchor.numerator << pad
    for l in range(height):
        v = row
        line = []
        for _ in range(width):
            line.append((v >> shift) & low)
            v = (v << 1) & mask
        top[l] = line
        row = (row * 3) & mask
    phase = top.astype(np.float64) * 2.0**-64
    return WeightWindow(origin=ZERO, data=np.exp(2j * np.pi * phase), alphabet=Alphabet.CIRCLE)


def times23_anchor(width: int, height: int, seed: int, guard_bits: int = MIN_GUARD_BITS) -> PhaseFixedPoint:
    if guard_bits < MIN_GUARD_BITS:
        raise ValueError(f"guard_bits must be >= {MIN_GUARD_BITS}, got {guard_bits}")
    bits = times23_precision(width, height, guard_bits)
    words = _stream(seed, _TIMES23_STREAM).integers(0, 2**64, size=bits // 64, dtype=np.uint64)
    # most significant word first: a longer draw only appends lower-order bits
    numerator = 0
    for word in words:
        numerator = (numerator << 64) | int(word)
    return PhaseFixedPoint(numerator, bits)


def sample_times23(width: int, height: int, seed: int, guard_bits: int = MIN_GUARD_BITS) -> WeightWindow:
    anchor = times23_anchor(width, height, seed, guard_bits)
    return times23_from_anchor(anchor, width, height)


# -- Rudin-Shapiro ------------------------------------------------------------------


def rudin_shapiro_1d(n: int) -> int:
    """``(-1)**(number of possibly overlapping '11' blocks in binary n)``."""
    if n < 0:
        raise ValueError("Rudin-Shapiro index must be nonnegative")
    return -1 if bin(n & (n >> 1)).count("1") & 1 else 1


def rudin_shapiro_signs(n: int) -> np.ndarray:
    """Vector ``[r_0, ..., r_{n-1}]`` as int8."""
    idx = np.arange(n, dtype=np.uint64)
    parity = np.bitwise_count(idx & (idx >> np.uint64(1))) & 1
    return (1 - 2 * parity.astype(np.int8)).astype(np.int8)


def sample_rudin_shapiro_2d(width: int, height: int) -> WeightWindow:
    """Product comb ``w[(a, b)] = r_a * r_b`` on the positive quadrant."""
    _check_size(width, height)
    signs = np.outer(rudin_shapiro_signs(height), rudin_shapiro_signs(width))
    return WeightWindow.from_signs(signs)

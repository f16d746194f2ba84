"""Lattice positions, unit weights, finite weight windows and weight laws.

A window is a finite rectangular patch of a configuration ``w`` on Z^2.
Values are stored as a ``(height, width)`` complex array, so ``data[b, a]``
holds the weight at ``origin + (a, b)``.  The first array axis is vertical.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

UNIT_TOL = 1e-12
PROB_TOL = 1e-12

#: A unit-modulus complex number; ``{+1, -1}`` is the real special case.
UnitWeight = complex


class LatticeError(Exception):
    """Base class for errors raised by this package."""


class OutOfWindowError(LatticeError, IndexError):
    """Lookup outside the rectangle covered by a window."""


@dataclass(frozen=True, slots=True)
class LatticeVector:
    a: int
    b: int

    def __post_init__(self):
        if not (isinstance(self.a, (int, np.integer)) and isinstance(self.b, (int, np.integer))):
            raise TypeError(f"lattice coordinates must be integers, got ({self.a!r}, {self.b!r})")
        object.__setattr__(self, "a", int(self.a))
        object.__setattr__(self, "b", int(self.b))

    def __add__(self, other: VectorLike) -> LatticeVector:
        o = as_vector(other)
        return LatticeVector(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other: VectorLike) -> LatticeVector:
        o = as_vector(other)
        return LatticeVector(self.a - o.a, self.b - o.b)

    def __neg__(self) -> LatticeVector:
        return LatticeVector(-self.a, -self.b)

    def __iter__(self):
        yield self.a
        yield self.b

    def sup_norm(self) -> int:
        return max(abs(self.a), abs(self.b))

    def __repr__(self) -> str:
        return f"({self.a},{self.b})"


VectorLike = Union[LatticeVector, tuple]

ZERO = LatticeVector(0, 0)
E1 = LatticeVector(1, 0)
E2 = LatticeVector(0, 1)


def as_vector(v: VectorLike) -> LatticeVector:
    if isinstance(v, LatticeVector):
        return v
    a, b = v
    return LatticeVector(a, b)


def unit_weight(phase: float) -> UnitWeight:
    """The point ``exp(2 pi i phase)`` on the unit circle."""
    return cmath.exp(2j * math.pi * phase)


def is_unit(values, tol: float = UNIT_TOL) -> bool:
    v = np.asarray(values)
    return bool(np.all(np.abs(v.real**2 + v.imag**2 - 1.0) <= tol))


class Alphabet(enum.Enum):
    PLUS_MINUS_ONE = "pm1"
    CIRCLE = "circle"


def _frozen_array(data, dtype=np.complex128) -> np.ndarray:
    arr = np.array(data, dtype=dtype, copy=True)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"window data must be a nonempty 2D array, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class ComplexWindow:
    """Rectangular patch of arbitrary complex site values.

    This is the output kind of :func:`comb_weights`; values need not be unit
    modulus.  Only the diffraction routines consume it.
    """

    origin: LatticeVector
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", as_vector(self.origin))
        object.__setattr__(self, "data", _frozen_array(self.data))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def size(self) -> int:
        return self.data.size

    def contains(self, x: VectorLike) -> bool:
        x = as_vector(x)
        da, db = x.a - self.origin.a, x.b - self.origin.b
        return 0 <= da < self.width and 0 <= db < self.height

    def lookup(self, x: VectorLike) -> complex:
        x = as_vector(x)
        if not self.contains(x):
            raise OutOfWindowError(
                f"site {x!r} outside window at {self.origin!r} of size {self.width}x{self.height}"
            )
        return complex(self.data[x.b - self.origin.b, x.a - self.origin.a])

    def translate(self, t: VectorLike):
        return translate(self, t)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return (
            self.origin == other.origin
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
            and getattr(self, "alphabet", None) == getattr(other, "alphabet", None)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class WeightWindow(ComplexWindow):
    """Rectangular patch of unit weights, tagged with its alphabet."""

    alphabet: Alphabet = Alphabet.CIRCLE

    def __post_init__(self):
        super().__post_init__()
        d = self.data
        if self.alphabet is Alphabet.PLUS_MINUS_ONE:
            if np.any(d.imag != 0) or np.any(np.abs(d.real) != 1):
                raise ValueError("PlusMinusOne window holds a value other than +1 or -1")
        elif not is_unit(d):
            raise ValueError("Circle window holds a value off the unit circle")

    @classmethod
    def from_signs(cls, signs, origin: VectorLike = ZERO) -> WeightWindow:
        """Build a ``{+1, -1}`` window from an integer or real ``(height, width)`` array."""
        return cls(origin=as_vector(origin), data=np.asarray(signs, dtype=np.complex128),
                   alphabet=Alphabet.PLUS_MINUS_ONE)

    @classmethod
    def constant(cls, width: int, height: int, value: complex = 1.0,
                 origin: VectorLike = ZERO) -> WeightWindow:
        alphabet = Alphabet.PLUS_MINUS_ONE if value in (1, -1) else Alphabet.CIRCLE
        return cls(origin=as_vector(origin), data=np.full((height, width), value, dtype=np.complex128),
                   alphabet=alphabet)

    def signs(self) -> np.ndarray:
        """Integer ``{+1, -1}`` view of a PlusMinusOne window."""
        if self.alphabet is not Alphabet.PLUS_MINUS_ONE:
            raise ValueError("signs() needs a PlusMinusOne window")
        return self.data.real.astype(np.int8)


def lookup(window: ComplexWindow, x: VectorLike) -> complex:
    return window.lookup(x)


def translate(window: ComplexWindow, t: VectorLike):
    """Shift action on a window: ``lookup(result, x) == lookup(window, x + t)``.

    Only the origin moves (by ``-t``); the data array is shared.
    """
    t = as_vector(t)
    kwargs = {"origin": window.origin - t, "data": window.data}
    if isinstance(window, WeightWindow):
        kwargs["alphabet"] = window.alphabet
    return type(window)(**kwargs)


def centred_square(n: int) -> tuple[LatticeVector, int, int]:
    """Origin and side lengths of the closed square ``[-n, n]^2``."""
    return LatticeVector(-n, -n), 2 * n + 1, 2 * n + 1


def comb_weights(window: ComplexWindow, phi_plus: complex, phi_minus: complex) -> ComplexWindow:
    """Replace the site weights +1 and -1 by ``phi_plus`` and ``phi_minus``.

    Implemented in the affine form ``(phi_plus + phi_minus)/2 + (phi_plus - phi_minus)/2 * w``
    so that a generic complex window is mapped consistently.
    """
    if isinstance(window, WeightWindow) and window.alphabet is not Alphabet.PLUS_MINUS_ONE:
        raise ValueError("comb_weights needs a PlusMinusOne window, got a Circle window")
    mean = (complex(phi_plus) + complex(phi_minus)) / 2
    half = (complex(phi_plus) - complex(phi_minus)) / 2
    return ComplexWindow(origin=window.origin, data=mean + half * window.data)


# -- weight laws ----------------------------------------------------------------


@dataclass(frozen=True)
class Rademacher:
    """Law of a random sign: ``+1`` with probability ``p``, else ``-1``."""

    p: float = 0.5

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"probability p={self.p} outside [0, 1]")

    alphabet = Alphabet.PLUS_MINUS_ONE

    def moment(self, m: int) -> complex:
        return complex(1.0) if m % 2 == 0 else complex(2 * self.p - 1)

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        return np.where(u < self.p, 1.0, -1.0).astype(np.complex128)


@dataclass(frozen=True)
class FiniteCircle:
    """Finitely supported law on the circle, given as ``(phase, probability)`` atoms."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        atoms = tuple((float(ph), float(pr)) for ph, pr in self.atoms)
        if not atoms:
            raise ValueError("FiniteCircle needs at least one atom")
        if any(not (0.0 <= ph < 1.0) for ph, _ in atoms):
            raise ValueError("atom phases must lie in [0, 1)")
        if any(pr < 0 for _, pr in atoms):
            raise ValueError("atom probabilities must be nonnegative")
        if abs(math.fsum(pr for _, pr in atoms) - 1.0) > PROB_TOL:
            raise ValueError("atom probabilities must sum to 1")
        object.__setattr__(self, "atoms", atoms)

    alphabet = Alphabet.CIRCLE

    def moment(self, m: int) -> complex:
        re = math.fsum(pr * math.cos(2 * math.pi * m * ph) for ph, pr in self.atoms)
        im = math.fsum(pr * math.sin(2 * math.pi * m * ph) for ph, pr in self.atoms)
        return complex(re, im)

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        cum = np.cumsum([pr for _, pr in self.atoms])
        cum[-1] = 1.0
        idx = np.minimum(np.searchsorted(cum, u, side="right"), len(self.atoms) - 1)
        values = np.array([unit_weight(ph) for ph, _ in self.atoms], dtype=np.complex128)
        return values[idx]


@dataclass(frozen=True)
class UniformCircle:
    """Uniform (Haar) law on the circle."""

    alphabet = Alphabet.CIRCLE

    def moment(self, m: int) -> complex:
        return complex(1.0) if m == 0 else complex(0.0)

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        return np.exp(2j * np.pi * u)


WeightLaw = Union[Rademacher, FiniteCircle, UniformCircle]


def law_mean(law: WeightLaw) -> complex:
    return law.moment(1)


def law_covariance(law: WeightLaw) -> float:
    """``E|W|^2 - |E W|^2``; the second moment is 1 for every law on the circle."""
    return 1.0 - abs(law.moment(1)) ** 2


def iter_sites(window: ComplexWindow) -> Iterable[LatticeVector]:
    for b in range(window.height):
        for a in range(window.width):
            yield window.origin + (a, b)

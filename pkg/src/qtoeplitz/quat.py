"""Scalar quaternion arithmetic in the fixed slice C_i.

Conventions used throughout the package:

* a quaternion is ``q = q0 + q1*i + q2*j + q3*k`` with real components;
* the unit ``k`` is always handled algebraically as the product ``i*j``;
* every quaternion splits uniquely as ``q = z + w*j`` with ``z, w`` complex
  numbers in the slice ``C_i`` (``z = q0 + q1*i``, ``w = q2 + q3*i``);
* moving ``j`` past a slice scalar conjugates it: ``j*a == conj(a)*j``.

The split/join pair is exact (no rounding): it is a relabeling of the four
real components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "Quaternion",
    "SlicePair",
    "ONE",
    "I",
    "J",
    "K",
    "mul",
    "conj",
    "norm",
    "slice_split",
    "slice_join",
    "commute_j",
]

#: Relative tolerance for "is this quaternion real" checks.  The underlying
#: theory is exact; this only absorbs floating point round-off.
REAL_TOL = 1e-12


@dataclass(frozen=True)
class Quaternion:
    """A quaternion ``q0 + q1*i + q2*j + q3*k`` with float components."""

    q0: float = 0.0
    q1: float = 0.0
    q2: float = 0.0
    q3: float = 0.0

    @staticmethod
    def from_slice(z: complex, w: complex = 0j) -> "Quaternion":
        """Build ``z + w*j`` from two slice numbers."""
        z = complex(z)
        w = complex(w)
        return Quaternion(z.real, z.imag, w.real, w.imag)

    @staticmethod
    def from_complex(z: complex) -> "Quaternion":
        return Quaternion.from_slice(z, 0j)

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.q0 + other.q0,
            self.q1 + other.q1,
            self.q2 + other.q2,
            self.q3 + other.q3,
        )

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(
            self.q0 - other.q0,
            self.q1 - other.q1,
            self.q2 - other.q2,
            self.q3 - other.q3,
        )

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.q0, -self.q1, -self.q2, -self.q3)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return mul(self, other)
        if isinstance(other, (int, float)):
            s = float(other)
            return Quaternion(s * self.q0, s * self.q1, s * self.q2, s * self.q3)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self.__mul__(other)
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.q0, -self.q1, -self.q2, -self.q3)

    def norm(self) -> float:
        return math.sqrt(self.q0**2 + self.q1**2 + self.q2**2 + self.q3**2)

    @property
    def real(self) -> float:
        return self.q0

    def is_real(self, tol: float = REAL_TOL) -> bool:
        """True when the imaginary part vanishes relative to ``|q|``."""
        imag = math.sqrt(self.q1**2 + self.q2**2 + self.q3**2)
        return imag <= tol * max(1.0, self.norm())

    def isclose(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol * max(1.0, self.norm(), other.norm())


ONE = Quaternion(1.0, 0.0, 0.0, 0.0)
I = Quaternion(0.0, 1.0, 0.0, 0.0)
J = Quaternion(0.0, 0.0, 1.0, 0.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class SlicePair:
    """The unique pair ``(z, w)`` in ``C_i`` with ``q = z + w*j``."""

    z: complex
    w: complex


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p*q`` (associative, non-commutative)."""
    return Quaternion(
        p.q0 * q.q0 - p.q1 * q.q1 - p.q2 * q.q2 - p.q3 * q.q3,
        p.q0 * q.q1 + p.q1 * q.q0 + p.q2 * q.q3 - p.q3 * q.q2,
        p.q0 * q.q2 - p.q1 * q.q3 + p.q2 * q.q0 + p.q3 * q.q1,
        p.q0 * q.q3 + p.q1 * q.q2 - p.q2 * q.q1 + p.q3 * q.q0,
    )


def conj(q: Quaternion) -> Quaternion:
    """Quaternion conjugate: flips the sign of the i, j, k components."""
    return q.conj()


def norm(q: Quaternion) -> float:
    """Modulus ``|q| = sqrt(q * conj(q))``; multiplicative."""
    return q.norm()


def slice_split(q: Quaternion) -> SlicePair:
    """Split ``q = z + w*j`` into its slice pair (exact)."""
    return SlicePair(complex(q.q0, q.q1), complex(q.q2, q.q3))


def slice_join(z: complex, w: complex) -> Quaternion:
    """Inverse of :func:`slice_split` (exact)."""
    return Quaternion.from_slice(z, w)


def commute_j(alpha: complex) -> complex:
    """Return the slice scalar ``a'`` with ``j*alpha == a'*j``, i.e. ``conj(alpha)``."""
    return complex(alpha).conjugate()

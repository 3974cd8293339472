"""Spherical special functions and the orthonormal spherical-harmonic basis.

Conventions used throughout the package
---------------------------------------
* Complex spherical harmonics Y_nm are fully normalized and include the
  Condon-Shortley phase (scipy's convention), so that

      integral( Y_nm * conj(Y_n'm') dOmega ) = delta_nn' delta_mm'

  and Y_{n,-m} = (-1)^m conj(Y_{n,m}).
* Colatitude theta is measured from the +z axis (0..pi), azimuth phi from
  the +x axis (0..2pi).
* Time convention is exp(+j w t); outgoing radiation uses the spherical
  Hankel function of the second kind, and a delay tau contributes a phase
  exp(-j w tau).
* Coefficients are stored in a flat vector ordered by index n^2 + n + m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

SPEED_OF_SOUND = 343.0
# Air density; not used numerically (the pressure/velocity coherence is
# invariant to the 1/(rho*c) velocity scaling), kept for documentation.
AIR_DENSITY = 1.204

DEFAULT_MAX_ORDER = 4


@dataclass(frozen=True)
class Direction:
    """Point on the unit sphere: colatitude ``theta`` and azimuth ``phi`` in rad.

    ``phi`` is normalized into [0, 2pi); ``theta`` must lie in [0, pi].
    """

    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"colatitude out of range [0, pi]: {self.theta}")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))
        object.__setattr__(self, "theta", float(self.theta))

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float) -> "Direction":
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    @classmethod
    def folded(cls, theta: float, phi: float) -> "Direction":
        """Construct a direction, folding an out-of-range colatitude across
        the pole (theta -> -theta or 2pi - theta, with phi -> phi + pi)."""
        theta = float(theta) % (2.0 * math.pi)
        if theta > math.pi:
            theta = 2.0 * math.pi - theta
            phi = phi + math.pi
        return cls(theta, phi)

    @classmethod
    def from_unit_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise ValueError("zero vector has no direction")
        v = v / norm
        return cls(math.acos(np.clip(v[2], -1.0, 1.0)), math.atan2(v[1], v[0]))

    def unit_vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array(
            [st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)]
        )

    def antipode(self) -> "Direction":
        return Direction(math.pi - self.theta, self.phi + math.pi)

    @property
    def degrees(self) -> tuple[float, float]:
        return math.degrees(self.theta), math.degrees(self.phi)


def wavenumber(freq_hz: float, c: float = SPEED_OF_SOUND) -> float:
    """k = 2 pi f / c, rad/m. Positive frequencies only."""
    if freq_hz <= 0.0:
        raise ValueError(f"frequency must be positive, got {freq_hz}")
    return 2.0 * math.pi * freq_hz / c


def num_coeffs(max_order: int) -> int:
    return (max_order + 1) ** 2


def sh_index(n: int, m: int) -> int:
    """Flat index of (order n, degree m): n^2 + n + m.

    Bijective from {(n, m): |m| <= n} onto 0..(N+1)^2-1.
    """
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    if abs(m) > n:
        raise ValueError(f"degree out of range: |{m}| > {n}")
    return n * n + n + m


def sh_index_inverse(idx: int) -> tuple[int, int]:
    if idx < 0:
        raise ValueError(f"index must be >= 0, got {idx}")
    n = int(math.isqrt(idx))
    return n, idx - n * n - n


def sh_orders(max_order: int) -> tuple[np.ndarray, np.ndarray]:
    """Arrays of (n, m) for every coefficient in flat-index order."""
    n = np.concatenate([np.full(2 * k + 1, k) for k in range(max_order + 1)])
    m = np.concatenate([np.arange(-k, k + 1) for k in range(max_order + 1)])
    return n, m


def spherical_bessel_j(n: int, x) -> np.ndarray | float:
    """Spherical Bessel function j_n(x); j_n(0) = delta_n0 (no 0/0)."""
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    return special.spherical_jn(n, x)


def spherical_bessel_y(n: int, x) -> np.ndarray | float:
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    return special.spherical_yn(n, x)


def _check_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("argument must be > 0 (singular at the origin)")
    return x


def spherical_hankel2(n: int, x) -> np.ndarray | complex:
    """Spherical Hankel function of the second kind, h_n^(2) = j_n - i y_n."""
    x = _check_positive(x)
    out = special.spherical_jn(n, x) - 1j * special.spherical_yn(n, x)
    return out if out.ndim else complex(out)


def spherical_bessel_j_deriv(n: int, x) -> np.ndarray | float:
    """d/dx j_n(x) via j_{n-1}(x) - (n+1)/x * j_n(x) (and j_0' = -j_1)."""
    x = np.asarray(x, dtype=float)
    if n == 0:
        out = -special.spherical_jn(1, x)
    else:
        out = special.spherical_jn(n - 1, x) - (n + 1) / x * special.spherical_jn(n, x)
    return out if out.ndim else float(out)


def spherical_bessel_y_deriv(n: int, x) -> np.ndarray | float:
    x = np.asarray(x, dtype=float)
    if n == 0:
        out = -special.spherical_yn(1, x)
    else:
        out = special.spherical_yn(n - 1, x) - (n + 1) / x * special.spherical_yn(n, x)
    return out if out.ndim else float(out)


def spherical_hankel2_deriv(n: int, x) -> np.ndarray | complex:
    x = _check_positive(x)
    out = spherical_bessel_j_deriv(n, x) - 1j * spherical_bessel_y_deriv(n, x)
    out = np.asarray(out)
    return out if out.ndim else complex(out)


def mode_strength(n: int, kR) -> np.ndarray | complex:
    """Rigid-sphere mode strength b_n(kR) = j_n - j_n'/h_n^(2)' * h_n^(2).

    Combines the incident and scattered wave on the sphere surface; the
    denominator h_n^(2)'(x) has no real zeros, so the expression is finite
    for every kR > 0.
    """
    if n < 0:
        raise ValueError(f"order must be >= 0, got {n}")
    x = _check_positive(kR)
    jn = special.spherical_jn(n, x)
    out = jn - spherical_bessel_j_deriv(n, x) / spherical_hankel2_deriv(n, x) * (
        special.spherical_jn(n, x) - 1j * special.spherical_yn(n, x)
    )
    out = np.asarray(out)
    return out if out.ndim else complex(out)


def mode_strength_vector(max_order: int, kR) -> np.ndarray:
    """b_n(kR) for n = 0..max_order; shape (max_order+1,) + shape(kR)."""
    x = np.asarray(kR, dtype=float)
    return np.stack([np.asarray(mode_strength(n, x)) for n in range(max_order + 1)])


def spherical_harmonic(n: int, m: int, theta, phi) -> np.ndarray | complex:
    """Orthonormal complex spherical harmonic Y_nm(theta, phi).

    Includes the Condon-Shortley phase; satisfies the conjugation symmetry
    Y_{n,-m} = (-1)^m conj(Y_{n,m}).
    """
    sh_index(n, m)  # validates (n, m)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    out = np.asarray(special.sph_harm_y(n, m, theta, phi))
    return out if out.ndim else complex(out)


def spherical_harmonic_matrix(max_order: int, theta, phi) -> np.ndarray:
    """Y_nm for all (n, m) up to max_order, stacked on the last axis.

    Returns shape broadcast(theta, phi).shape + ((max_order+1)^2,), columns
    in flat-index order.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    cols = [
        np.broadcast_to(special.sph_harm_y(n, m, theta, phi), np.broadcast_shapes(theta.shape, phi.shape))
        for n in range(max_order + 1)
        for m in range(-n, n + 1)
    ]
    return np.stack(cols, axis=-1)


def angle_between(a: Direction, b: Direction) -> float:
    """Great-circle angle between two directions, in [0, pi]."""
    dot = math.sin(a.theta) * math.sin(b.theta) * math.cos(a.phi - b.phi) + math.cos(
        a.theta
    ) * math.cos(b.theta)
    return math.acos(min(1.0, max(-1.0, dot)))

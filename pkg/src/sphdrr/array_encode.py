"""32-capsule rigid-sphere array model and spherical-harmonic encoding.

Capsule pressures at one frequency bin are converted to coefficients by the
discrete quadrature

    alpha_nm = sum_i W_i P_i conj(Y_nm(theta_i, phi_i)) / b_n(kR)

with a soft-knee regularized inverse of the mode strength b_n (see
``regularized_inverse_mode_strength``): unregularized division explodes
sensor noise at low kR where |b_n| for n >= 2 is tiny.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import sh_core
from .sh_core import Direction

# Amplitude gain cap of the regularized 1/b_n: +20 dB white-noise gain.
MAX_INVERSION_GAIN = 10.0
REGULARIZATION_LAMBDA = 1.0 / (2.0 * MAX_INVERSION_GAIN)

# Built-in 32-capsule layout of the commercial rigid-sphere array
# (radius 42 mm), as (colatitude, azimuth) in degrees, channel order 1..32.
_EM32_CAPSULES_DEG = [
    (69, 0), (90, 32), (111, 0), (90, 328),
    (32, 0), (55, 45), (90, 69), (125, 45),
    (148, 0), (125, 315), (90, 291), (55, 315),
    (21, 91), (58, 90), (121, 90), (159, 89),
    (69, 180), (90, 212), (111, 180), (90, 148),
    (32, 180), (55, 225), (90, 249), (125, 225),
    (148, 180), (125, 135), (90, 111), (55, 135),
    (21, 269), (58, 270), (122, 270), (159, 271),
]

EIGENMIKE_RADIUS_M = 0.042
NUM_CAPSULES = 32


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class ArrayGeometry:
    """Sphere radius, capsule directions and quadrature weights W_i.

    Weights are in steradians and must sum to 4 pi; WAV channel i maps to
    capsule i in list order.
    """

    radius_m: float
    capsules: tuple[Direction, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.radius_m <= 0.0:
            raise GeometryError(f"radius_m must be > 0, got {self.radius_m}")
        if len(self.capsules) != len(self.weights):
            raise GeometryError("capsules and weights must have equal length")
        total = sum(self.weights)
        if abs(total - 4.0 * math.pi) > 1e-6:
            raise GeometryError(
                f"quadrature weights must sum to 4*pi, got {total:.8f}"
            )

    @property
    def num_capsules(self) -> int:
        return len(self.capsules)

    def thetas(self) -> np.ndarray:
        return np.array([d.theta for d in self.capsules])

    def phis(self) -> np.ndarray:
        return np.array([d.phi for d in self.capsules])

    def weight_array(self) -> np.ndarray:
        return np.array(self.weights)


@dataclass
class ShFrame:
    """Spherical-harmonic coefficients of one (time frame, frequency bin).

    ``coeffs`` is ordered by flat index n^2+n+m; ``suppressed`` marks
    coefficients whose mode-strength inversion was gain-limited by the
    regularizer (low confidence, not failure).
    """

    coeffs: np.ndarray
    k: float
    frame_index: int = 0
    suppressed: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.suppressed is None:
            self.suppressed = np.zeros(self.coeffs.shape, dtype=bool)

    @property
    def max_order(self) -> int:
        return int(math.isqrt(self.coeffs.shape[-1])) - 1


def builtin_eigenmike_geometry() -> ArrayGeometry:
    """The published 32-direction layout with uniform weights 4 pi / 32."""
    capsules = tuple(Direction.from_degrees(t, p) for t, p in _EM32_CAPSULES_DEG)
    w = 4.0 * math.pi / NUM_CAPSULES
    return ArrayGeometry(EIGENMIKE_RADIUS_M, capsules, (w,) * NUM_CAPSULES)


def load_geometry(path) -> ArrayGeometry:
    """Load an array geometry from its JSON description.

    Schema: {"radius_m": r, "capsules": [{"theta_deg": t, "phi_deg": p,
    "weight": w}, ...]}.
    """
    with open(path) as f:
        doc = json.load(f)
    try:
        radius = float(doc["radius_m"])
        entries = doc["capsules"]
        capsules = tuple(
            Direction.from_degrees(float(e["theta_deg"]), float(e["phi_deg"]))
            for e in entries
        )
        weights = tuple(float(e["weight"]) for e in entries)
    except (KeyError, TypeError) as exc:
        raise GeometryError(f"malformed geometry file {path}: {exc}") from exc
    return ArrayGeometry(radius, capsules, weights)


def save_geometry(geometry: ArrayGeometry, path) -> None:
    doc = {
        "radius_m": geometry.radius_m,
        "capsules": [
            {
                "theta_deg": math.degrees(d.theta),
                "phi_deg": math.degrees(d.phi),
                "weight": w,
            }
            for d, w in zip(geometry.capsules, geometry.weights)
        ],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)


def regularized_inverse_mode_strength(
    max_order: int, kR, lam: float = REGULARIZATION_LAMBDA
) -> tuple[np.ndarray, np.ndarray]:
    """Soft-knee inverse conj(b_n)/(|b_n|^2 + lam^2) for n = 0..max_order.

    Returns (inverse, suppressed); ``suppressed[n]`` is set where the
    effective gain fell more than 10% below exact inversion.
    """
    b = sh_core.mode_strength_vector(max_order, kR)
    mag2 = np.abs(b) ** 2
    inv = np.conj(b) / (mag2 + lam * lam)
    suppressed = mag2 / (mag2 + lam * lam) < 0.9
    return inv, suppressed


def _quadrature_matrix(geometry: ArrayGeometry, max_order: int) -> np.ndarray:
    """(ncoef, ncaps) matrix of W_i conj(Y_nm(theta_i, phi_i))."""
    ymat = sh_core.spherical_harmonic_matrix(
        max_order, geometry.thetas(), geometry.phis()
    )  # (ncaps, ncoef)
    return (geometry.weight_array()[:, None] * np.conj(ymat)).T


def encode(
    capsule_pressures,
    geometry: ArrayGeometry,
    k: float,
    max_order: int = sh_core.DEFAULT_MAX_ORDER,
    frame_index: int = 0,
) -> ShFrame:
    """Encode one bin of capsule pressures into an ShFrame.

    Pure and deterministic; linear in the pressures.
    """
    p = np.asarray(capsule_pressures, dtype=complex)
    if p.shape != (geometry.num_capsules,):
        raise ValueError(
            f"expected {geometry.num_capsules} capsule pressures, got shape {p.shape}"
        )
    if k <= 0.0:
        raise ValueError(f"wavenumber must be > 0, got {k}")
    if max_order > sh_core.DEFAULT_MAX_ORDER:
        raise ValueError(
            f"max_order {max_order} exceeds the array limit {sh_core.DEFAULT_MAX_ORDER}"
        )
    quad = _quadrature_matrix(geometry, max_order)
    inv, supp_n = regularized_inverse_mode_strength(max_order, k * geometry.radius_m)
    n_idx, _ = sh_core.sh_orders(max_order)
    coeffs = (quad @ p) * inv[n_idx]
    return ShFrame(coeffs, k=k, frame_index=frame_index, suppressed=supp_n[n_idx])


def encode_stack(
    capsule_spectra: np.ndarray,
    geometry: ArrayGeometry,
    freqs_hz: np.ndarray,
    max_order: int = sh_core.DEFAULT_MAX_ORDER,
    c: float = sh_core.SPEED_OF_SOUND,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized encode of (frames, bins, ncaps) spectra.

    Returns (coeffs, suppressed): coeffs has shape (frames, bins, ncoef),
    suppressed has shape (bins, ncoef). Equivalent to calling ``encode``
    per (frame, bin).
    """
    x = np.asarray(capsule_spectra, dtype=complex)
    freqs = np.asarray(freqs_hz, dtype=float)
    if x.ndim != 3 or x.shape[2] != geometry.num_capsules:
        raise ValueError(
            f"expected (frames, bins, {geometry.num_capsules}) spectra, got {x.shape}"
        )
    if x.shape[1] != freqs.shape[0]:
        raise ValueError("bin count does not match freqs_hz")
    if np.any(freqs <= 0.0):
        raise ValueError("all bin frequencies must be > 0")
    quad = _quadrature_matrix(geometry, max_order)
    kR = 2.0 * math.pi * freqs / c * geometry.radius_m
    inv, supp_n = regularized_inverse_mode_strength(max_order, kR)  # (N+1, bins)
    n_idx, _ = sh_core.sh_orders(max_order)
    coeffs = np.einsum("fbc,nc->fbn", x, quad) * inv[n_idx].T[None, :, :]
    return coeffs, supp_n[n_idx].T

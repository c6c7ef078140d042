"""Closed-form mean spin and entanglement of one qubit in a CP graph state.

Everything here depends on the graph only through the vertex degree.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ValidationError


def _check_degree(n_l: int) -> int:
    if int(n_l) != n_l or n_l < 0:
        raise ValidationError(f"degree must be a nonnegative integer, got {n_l!r}")
    return int(n_l)


def z_factor(n_l: int, phi: float, alpha: float, theta: float) -> complex:
    """e^{-i(alpha + phi n_l / 2)} (cos(phi/2) + i sin(phi/2) cos(theta))^{n_l}"""
    n_l = _check_degree(n_l)
    base = complex(math.cos(phi / 2), math.sin(phi / 2) * math.cos(theta))
    power = 1 + 0j
    # repeated multiplication keeps base == 0 exact
    for _ in range(n_l):
        power *= base
    return cmath.exp(-1j * (alpha + phi * n_l / 2)) * power


def analytic_pauli_means(n_l: int, phi: float, alpha: float, theta: float) -> tuple[float, float, float]:
    z = z_factor(n_l, phi, alpha, theta)
    s = math.sin(theta)
    return s * z.real, -s * z.imag, math.cos(theta)


def analytic_entanglement(n_l: int, phi: float, theta: float) -> float:
    """Geometric measure of entanglement of a degree-``n_l`` vertex.

    There is deliberately no ``alpha`` argument: the value is independent of it.
    """
    n_l = _check_degree(n_l)
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    base = math.cos(phi / 2) ** 2 + math.sin(phi / 2) ** 2 * cos_t**2
    # sin^2 base^n + cos^2 rewritten so that base^n == 1 gives exactly 1
    radicand = 1.0 - sin_t**2 * (1.0 - base**n_l)
    value = 0.5 - 0.5 * math.sqrt(min(max(radicand, 0.0), 1.0))
    return min(max(value, 0.0), 0.5)


@dataclass(frozen=True)
class AnalyticRecord:
    degree: int
    phi: float
    alpha: float
    theta: float
    z: complex
    sx: float
    sy: float
    sz: float
    mean_spin_norm: float
    entanglement: float

    @classmethod
    def compute(cls, degree: int, phi: float, alpha: float, theta: float) -> AnalyticRecord:
        z = z_factor(degree, phi, alpha, theta)
        sin_t = math.sin(theta)
        sx, sy, sz = sin_t * z.real, -sin_t * z.imag, math.cos(theta)
        norm = math.sqrt(sx * sx + sy * sy + sz * sz)
        return cls(degree, phi, alpha, theta, z, sx, sy, sz, norm, 0.5 * (1.0 - norm))

"""Residual evaluators for the Dirac system and its separated equations.

Every evaluator takes sampled values and derivatives instead of callables, so
the same code checks analytic jets and finite-difference data alike.  A
residual that vanishes means the sampled functions solve the equation at the
sampled points.

Spinor basis: ``gamma^0 = [[0, I], [I, 0]]`` and
``gamma^k = [[0, -sigma_k], [sigma_k, 0]]``.  With this choice the rows of the
matrix operator, multiplied by ``ROW_PHASES``, are exactly the four component
equations evaluated by :func:`first_order_residual`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import geometry
from .errors import DomainError, SingularPointError, check_twice_m
from .field import gauge_at, mu

_I2 = np.eye(2, dtype=complex)
_Z2 = np.zeros((2, 2), dtype=complex)
SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
GAMMA = np.array(
    [np.block([[_Z2, _I2], [_I2, _Z2]])]
    + [np.block([[_Z2, -s], [s, _Z2]]) for s in SIGMA]
)
ROW_PHASES = np.array([1j, 1j, -1j, -1j])


@dataclass(frozen=True)
class BranchChoice:
    """Sign selecting ``A = (eps + sign p) / M``; ``sign = -1`` is the ``p -> -p`` system."""

    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError(f"branch sign must be +1 or -1, got {self.sign}")

    @property
    def p_flip(self) -> bool:
        return self.sign < 0


class OdeSample(NamedTuple):
    value: complex
    d1: complex
    d2: complex


def branch_coefficient(eps, M, sign):
    """``A = (eps + sign * p) / M`` with ``p = +sqrt(eps^2 - M^2)``."""
    if M <= 0:
        raise DomainError(f"M must be > 0, got {M}")
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign}")
    if abs(eps) < M:
        raise DomainError(f"|eps|={abs(eps)} < M={M}: evanescent, p would be imaginary")
    p = np.sqrt(eps * eps - M * M)
    return (eps + sign * p) / M


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= np.pi / 2):
        raise SingularPointError("cos z = 0: z must lie strictly inside (-pi/2, pi/2)")
    return z


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= np.pi):
        raise SingularPointError("sin r = 0: r must lie strictly inside (0, pi)")
    return r


def z_ode_residual(s: OdeSample, z, p, lam):
    """``Z'' - tan z Z' + (p^2 - i p tan z - lam^2 / cos^2 z) Z``."""
    z = _check_z(z)
    t = np.tan(z)
    return s.d2 - t * s.d1 + (p * p - 1j * p * t - lam * lam / np.cos(z) ** 2) * s.value


def radial_potential(r, twice_m, B):
    """``V(r)`` such that the radial equation reads ``-R'' + V R = lam^2 R``."""
    m = check_twice_m(twice_m) / 2
    r = _check_r(r)
    c, s2 = np.cos(r), np.sin(r) ** 2
    b = B * (c - 1.0)
    return ((m + b) ** 2 - m * c + b) / s2


def radial_ode_residual(s: OdeSample, r, twice_m, B, lam):
    """Return ``(R'' + (lam^2 - V) R, V)``."""
    v = radial_potential(r, twice_m, B)
    return s.d2 + (lam * lam - v) * s.value, v


def z_system_residual(z1, dz1, z2, dz2, z, p, lam):
    """Residuals of the first-order z pair coupling ``Z1`` and ``Z2`` through ``lam``."""
    cz = np.cos(_check_z(z))
    return (
        cz * (dz1 + 1j * p * z1) - lam * z2,
        cz * (dz2 - 1j * p * z2) - lam * z1,
    )


def radial_system_residual(r1, dr1, r2, dr2, r, twice_m, B, lam):
    """Residuals of the first-order radial pair."""
    u = mu(_check_r(r), twice_m, B)
    return dr2 + u * r2 + lam * r1, dr1 - u * r1 - lam * r2


def two_channel_residual(f1, f1_r, f1_z, f2, f2_r, f2_z, r, z, p, twice_m, B, flip=False):
    """Residuals of the two-channel system left after ``f3 = A f1, f4 = A f2``.

    ``flip=True`` evaluates the ``A = (eps - p)/M`` system, i.e. ``p -> -p``.
    """
    if flip:
        p = -p
    u = mu(_check_r(r), twice_m, B)
    cz = np.cos(_check_z(z))
    return (
        f2_r + u * f2 + cz * (f1_z + 1j * p * f1),
        f1_r - u * f1 - cz * (f2_z - 1j * p * f2),
    )


def first_order_residual(sample, eps, twice_m, B, M):
    """The four component equations, evaluated on ``sample.f``, ``sample.df_dr``, ``sample.df_dz``.

    ``sample`` also provides ``r`` and ``z``; arrays broadcast over the trailing axes.
    """
    u = mu(_check_r(sample.r), twice_m, B)
    cz = np.cos(_check_z(sample.z))
    f1, f2, f3, f4 = sample.f
    r1, r2, r3, r4 = sample.df_dr
    z1, z2, z3, z4 = sample.df_dz
    return np.array([
        r4 + u * f4 + cz * z3 + 1j * cz * (eps * f3 - M * f1),
        r3 - u * f3 - cz * z4 + 1j * cz * (eps * f4 - M * f2),
        r2 + u * f2 + cz * z1 - 1j * cz * (eps * f1 - M * f3),
        r1 - u * f1 - cz * z2 - 1j * cz * (eps * f2 - M * f4),
    ])


@dataclass(frozen=True)
class SpinorField:
    """A four-component field and its coordinate partials at points ``(t, r, z, phi)``."""

    t: np.ndarray
    r: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    value: np.ndarray
    d_t: np.ndarray
    d_r: np.ndarray
    d_z: np.ndarray
    d_phi: np.ndarray


def _apply(g, v):
    return np.tensordot(g, v, axes=(1, 0))


def _strip_phase(out, field_: SpinorField, eps, twice_m):
    m = check_twice_m(twice_m) / 2
    return ROW_PHASES.reshape((4,) + (1,) * (out.ndim - 1)) * out * np.exp(
        1j * eps * field_.t - 1j * m * field_.phi
    )


def matrix_dirac_residual(phi: SpinorField, eps, twice_m, B, M):
    """Apply the reduced matrix operator to ``phi``, then remove the
    ``exp(-i eps t + i m phi)`` phase and apply ``ROW_PHASES``.

    On fields of the form ``exp(-i eps t + i m phi) f(r, z)`` this equals
    :func:`first_order_residual` of ``f`` componentwise.
    """
    r = _check_r(phi.r)
    z = _check_z(phi.z)
    cz, s = np.cos(z), np.sin(r)
    out = (
        1j * _apply(GAMMA[1], phi.d_r)
        + _apply(GAMMA[2], 1j * phi.d_phi - B * (np.cos(r) - 1.0) * phi.value) / s
        + cz * (1j * _apply(GAMMA[0], phi.d_t) + 1j * _apply(GAMMA[3], phi.d_z) - M * phi.value)
    )
    return _strip_phase(out, phi, eps, twice_m)


def covariant_dirac_residual(psi: SpinorField, eps, twice_m, B, M):
    """Tetrad-form Dirac operator on the unsubstituted ``Psi``.

    Built from the tetrad, spin connection and gauge potential of the
    geometry and field modules; scaled by ``sqrt(sin r) cos^2 z`` and
    phase-stripped like :func:`matrix_dirac_residual`, to which it is then equal.
    """
    r = _check_r(psi.r)
    z = _check_z(psi.z)
    cz, sr = np.cos(z), np.sin(r)
    e = geometry.tetrad_diagonal(r, z)
    conn = geometry.spin_connection(r, z)
    a_phi = gauge_at(r, B)[0] if B > 0 else np.zeros_like(r)
    parts = (
        psi.d_t,
        psi.d_r,
        psi.d_phi + 1j * a_phi * psi.value,
        psi.d_z,
    )
    out = -M * psi.value
    for c in range(4):
        out = out + 1j * _apply(GAMMA[c], e[c] * parts[c] + conn[c] * psi.value)
    return _strip_phase(out * np.sqrt(sr) * cz**2, psi, eps, twice_m)

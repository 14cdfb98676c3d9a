"""Magnetic potential on S^3 and the azimuthal coupling it induces.

All quantities are dimensionless with unit curvature radius; ``B`` already
absorbs the charge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularPointError, check_twice_m


@dataclass(frozen=True)
class FieldParams:
    """Dimensionless field strength ``B`` and mass ``M`` (both > 0)."""

    B: float
    M: float

    def __post_init__(self):
        if not np.isfinite(self.B) or self.B <= 0:
            raise DomainError(f"B must be > 0, got {self.B}")
        if not np.isfinite(self.M) or self.M <= 0:
            raise DomainError(f"M must be > 0 (massless case unsupported), got {self.M}")


def _check_r(r, *, open_interval: bool):
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > np.pi):
        raise DomainError("r must lie in [0, pi]")
    if open_interval and np.any(np.minimum(r, np.pi - r) < 1e-12):
        raise SingularPointError("sin r = 0: r must lie strictly inside (0, pi)")
    return r


def gauge_at(r, B):
    """Return ``(A_phi, F_r_phi)`` with ``A_phi = B (cos r - 1)``."""
    if B <= 0:
        raise DomainError(f"B must be > 0, got {B}")
    r = _check_r(r, open_interval=False)
    a_phi = -2.0 * B * np.sin(r / 2) ** 2
    return a_phi, -B * np.sin(r)


def mu(r, twice_m, B):
    """Azimuthal coupling ``[m + B (cos r - 1)] / sin r``.

    This is the coefficient multiplying ``-gamma^2`` once ``i d/dphi`` acts on
    ``exp(i m phi)``; it is the sign for which ``mu^2 + mu'`` reproduces the
    radial potential.
    """
    m = check_twice_m(twice_m) / 2
    r = _check_r(r, open_interval=True)
    return (m - 2.0 * B * np.sin(r / 2) ** 2) / np.sin(r)


def mu_prime(r, twice_m, B):
    """Derivative of :func:`mu` with respect to ``r``."""
    m = check_twice_m(twice_m) / 2
    r = _check_r(r, open_interval=True)
    c, s = np.cos(r), np.sin(r)
    return (B * (c - 1.0) - m * c) / s**2

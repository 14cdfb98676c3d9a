"""Closed-form profiles ``Z1, Z2, R1, R2`` and the assembled four-component state.

Profiles are returned as analytic jets: every derivative is computed from the
polynomial and its prefactor, never by differencing, and never by using the
equation being checked.  All functions broadcast over array arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import field
from .errors import (
    AdmissibilityError,
    DegenerateSeparationError,
    DomainError,
    SingularPointError,
    check_twice_m,
)
from .hyp2f1 import TerminatingSeries
from .separation import SpinorField, branch_coefficient


# -- z direction --------------------------------------------------------------

@dataclass(frozen=True)
class ZVariant:
    """Exponent choice ``Z1 = y^A (1-y)^C F(y)`` with ``y = (1 + i tan z)/2``.

    Variants 1 and 2 quantize ``lambda`` instead of ``p`` and are kept only for
    inspection (``rejected``).
    """

    index: int

    def __post_init__(self):
        if self.index not in (1, 2, 3, 4):
            raise DomainError(f"z-variant must be 1..4, got {self.index}")

    @property
    def rejected(self) -> bool:
        return self.index in (1, 2)

    def exponents(self, p):
        return {
            1: ((p + 1) / 2, (1 - p) / 2),
            2: (-p / 2, p / 2),
            3: ((p + 1) / 2, p / 2),
            4: (-p / 2, (1 - p) / 2),
        }[self.index]

    def parameters(self, lam, p, N):
        """``(alpha, beta, gamma)`` with the terminating slot pinned to ``-N``."""
        a, c = self.exponents(p)
        alpha, beta, gamma = lam + a + c, -lam + a + c, 2 * a + 0.5
        if self.index == 4:
            alpha = -N
        else:
            beta = -N
        return alpha, beta, gamma


def hypergeometric_argument(z):
    """``exp(iz) / (2 cos z)``, identical to ``(1 + i tan z)/2``."""
    return np.exp(1j * z) / (2 * np.cos(z))


class ZProfile(NamedTuple):
    z1: np.ndarray
    z2: np.ndarray
    dz1: np.ndarray
    dz2: np.ndarray


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= np.pi / 2):
        raise SingularPointError("|z| = pi/2 is a boundary point of the z profile")
    return z


def z_jet(variant: ZVariant, lam, p, N, z):
    """``(Z1, Z1', Z1'')`` at ``z``."""
    z = _check_z(z)
    a, c = variant.exponents(p)
    series = TerminatingSeries.build(*variant.parameters(lam, p, N))
    cz, tz = np.cos(z), np.tan(z)
    pre = np.exp(1j * (a - c) * z) * cz ** (-(a + c))
    log_d = 1j * (a - c) + (a + c) * tz
    pre_d = pre * log_d
    pre_dd = pre * (log_d**2 + (a + c) / cz**2)
    y = hypergeometric_argument(z)
    y_d = 0.5j / cz**2
    y_dd = 1j * tz / cz**2
    f, f1, f2 = series.evaluate(y, order=2)
    z1 = pre * f
    dz1 = pre_d * f + pre * f1 * y_d
    ddz1 = pre_dd * f + 2 * pre_d * f1 * y_d + pre * (f2 * y_d**2 + f1 * y_dd)
    return z1, dz1, ddz1


def z_profile(variant: ZVariant, lam, p, N, z) -> ZProfile:
    """``Z1``, ``Z2 = cos z (Z1' + i p Z1) / lam`` and their first derivatives."""
    if lam <= 0:
        raise DegenerateSeparationError(f"lambda={lam} <= 0: Z2 cannot be reconstructed")
    z1, dz1, ddz1 = z_jet(variant, lam, p, N, z)
    cz, sz = np.cos(z), np.sin(z)
    g = dz1 + 1j * p * z1
    z2 = cz * g / lam
    dz2 = (-sz * g + cz * (ddz1 + 1j * p * dz1)) / lam
    return ZProfile(z1, z2, dz1, dz2)


# -- r direction --------------------------------------------------------------

_R_INEQUALITIES = {
    1: (("0 < m", lambda m, B: 0 < m), ("m < 2B", lambda m, B: m < 2 * B)),
    2: (("m > 0", lambda m, B: m > 0), ("m > 2B - 1", lambda m, B: m > 2 * B - 1)),
    3: (
        ("m < 1", lambda m, B: m < 1),
        ("m > 2B - 1", lambda m, B: m > 2 * B - 1),
        ("0 < B < 1", lambda m, B: 0 < B < 1),
    ),
    4: (
        ("m < 1", lambda m, B: m < 1),
        ("m < 2B", lambda m, B: m < 2 * B),
        ("m < B + 1/2", lambda m, B: m < B + 0.5),
    ),
}


@dataclass(frozen=True)
class RVariant:
    """Exponent choice ``R1 = (1 + cos r)^A (1 - cos r)^C F((1 + cos r)/2)``."""

    index: int

    def __post_init__(self):
        if self.index not in (1, 2, 3, 4):
            raise DomainError(f"r-variant must be 1..4, got {self.index}")

    def exponents(self, twice_m, B):
        m = check_twice_m(twice_m) / 2
        a = (2 * B - m) / 2 if self.index in (1, 4) else (m + 1 - 2 * B) / 2
        c = m / 2 if self.index in (1, 2) else (1 - m) / 2
        return a, c

    def violations(self, twice_m, B) -> tuple:
        """Admissibility inequalities that fail for ``(m, B)``; empty when admissible."""
        m = check_twice_m(twice_m) / 2
        return tuple(text for text, ok in _R_INEQUALITIES[self.index] if not ok(m, B))

    def parameters(self, twice_m, B, lam, n):
        a, c = self.exponents(twice_m, B)
        root = np.sqrt(B * B + lam * lam)
        return -n, a + c + root, 2 * a + 0.5


class RProfile(NamedTuple):
    r1: np.ndarray
    r2: np.ndarray
    dr1: np.ndarray
    dr2: np.ndarray


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0) or np.any(r >= np.pi):
        raise SingularPointError("r must lie strictly inside (0, pi)")
    return r


def radial_jet(variant: RVariant, twice_m, B, lam, n, r, *, check=True):
    """``(R1, R1', R1'')`` at ``r``."""
    if check:
        bad = variant.violations(twice_m, B)
        if bad:
            raise AdmissibilityError(
                f"radial variant {variant.index} inadmissible for m={twice_m}/2, B={B}: "
                f"violates {', '.join(bad)}"
            )
    r = _check_r(r)
    a, c = variant.exponents(twice_m, B)
    series = TerminatingSeries.build(*variant.parameters(twice_m, B, lam, n))
    cr, sr = np.cos(r), np.sin(r)
    pre = (1 + cr) ** a * (1 - cr) ** c
    log_d = -a * sr / (1 + cr) + c * sr / (1 - cr)
    pre_d = pre * log_d
    pre_dd = pre * (log_d**2 - a / (1 + cr) - c / (1 - cr))
    y = (1 + cr) / 2
    y_d, y_dd = -sr / 2, -cr / 2
    f, f1, f2 = series.evaluate(y, order=2)
    r1 = pre * f
    dr1 = pre_d * f + pre * f1 * y_d
    ddr1 = pre_dd * f + 2 * pre_d * f1 * y_d + pre * (f2 * y_d**2 + f1 * y_dd)
    return r1, dr1, ddr1


def radial_profile(variant: RVariant, twice_m, B, lam, n, r) -> RProfile:
    """``R1``, ``R2 = (R1' - mu R1) / lam`` and their first derivatives."""
    if lam <= 0:
        raise DegenerateSeparationError(f"lambda={lam} <= 0: R2 cannot be reconstructed")
    r1, dr1, ddr1 = radial_jet(variant, twice_m, B, lam, n, r)
    u = field.mu(r, twice_m, B)
    du = field.mu_prime(r, twice_m, B)
    r2 = (dr1 - u * r1) / lam
    dr2 = (ddr1 - du * r1 - u * dr1) / lam
    return RProfile(r1, r2, dr1, dr2)


# -- assembled state ----------------------------------------------------------

@dataclass(frozen=True)
class SpinorSample:
    """Components ``f1..f4`` with partials, and ``Psi`` itself, at ``(t, r, z, phi)``.

    Leading axis of ``f``, ``df_dr``, ``df_dz`` and ``psi`` is the component index.
    """

    t: np.ndarray
    r: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    eps: float
    twice_m: int
    f: np.ndarray
    df_dr: np.ndarray
    df_dz: np.ndarray

    @property
    def phase(self):
        return np.exp(-1j * self.eps * self.t + 0.5j * self.twice_m * self.phi)

    @property
    def weight(self):
        """``1 / (sqrt(sin r) cos z)``."""
        return 1.0 / (np.sqrt(np.sin(self.r)) * np.cos(self.z))

    @property
    def psi(self):
        return self.phase * self.f * self.weight

    def phi_field(self) -> SpinorField:
        """The substituted spinor ``exp(-i eps t + i m phi) f`` with all partials."""
        ph = self.phase
        value = ph * self.f
        return SpinorField(
            t=self.t, r=self.r, z=self.z, phi=self.phi,
            value=value,
            d_t=-1j * self.eps * value,
            d_r=ph * self.df_dr,
            d_z=ph * self.df_dz,
            d_phi=0.5j * self.twice_m * value,
        )

    def psi_field(self) -> SpinorField:
        """The unsubstituted ``Psi`` with all partials."""
        phi = self.phi_field()
        w = self.weight
        cot, tz = 1.0 / np.tan(self.r), np.tan(self.z)
        return SpinorField(
            t=self.t, r=self.r, z=self.z, phi=self.phi,
            value=phi.value * w,
            d_t=phi.d_t * w,
            d_r=(phi.d_r - 0.5 * cot * phi.value) * w,
            d_z=(phi.d_z + tz * phi.value) * w,
            d_phi=phi.d_phi * w,
        )


def _channels(rec, r, z):
    """Return the two factor pairs ``(Za, Za', Zb, Zb')`` and ``(R1, R1', R2, R2')``.

    The ``A = (eps - p)/M`` branch solves the same z pair with ``Z1`` and ``Z2``
    exchanged.
    """
    zp = z_profile(ZVariant(rec.z_variant), rec.lam, rec.p, rec.qn.N, z)
    rp = radial_profile(RVariant(rec.r_variant), rec.qn.twice_m, rec.B, rec.lam, rec.qn.n, r)
    if rec.qn.branch > 0:
        zs = (zp.z1, zp.dz1, zp.z2, zp.dz2)
    else:
        zs = (zp.z2, zp.dz2, zp.z1, zp.dz1)
    return zs, (rp.r1, rp.dr1, rp.r2, rp.dr2)


def assemble_spinor(rec, t, r, z, phi, energy_sign: int = 1) -> SpinorSample:
    """Evaluate the exact state described by a spectrum record.

    ``r`` and ``z`` may be arrays; they are broadcast against each other, so a
    grid is obtained from ``r[:, None]`` and ``z[None, :]``.
    """
    if energy_sign not in (1, -1):
        raise DomainError("energy_sign must be +1 or -1")
    r = np.asarray(r, dtype=float)
    z = np.asarray(z, dtype=float)
    (za, dza, zb, dzb), (r1, dr1, r2, dr2) = _channels(rec, r, z)
    eps = energy_sign * rec.eps
    a = branch_coefficient(eps, rec.M, rec.qn.branch)
    f1, f2 = za * r1, zb * r2
    f1_r, f2_r = za * dr1, zb * dr2
    f1_z, f2_z = dza * r1, dzb * r2
    t, r, z, phi = np.broadcast_arrays(np.asarray(t, float), r, z, np.asarray(phi, float))
    return SpinorSample(
        t=t, r=r, z=z, phi=phi, eps=eps, twice_m=rec.qn.twice_m,
        f=np.array([f1, f2, a * f1, a * f2]),
        df_dr=np.array([f1_r, f2_r, a * f1_r, a * f2_r]),
        df_dz=np.array([f1_z, f2_z, a * f1_z, a * f2_z]),
    )


# -- normalizability ------------------------------------------------------------

def midpoint_nodes(lower, upper, points):
    h = (upper - lower) / points
    return lower + h * (np.arange(points) + 0.5), h


def ladder(integrand, lower, upper, points, levels):
    """Midpoint-rule values of ``integrand`` on ``points * 2**k`` cells, ``k < levels``."""
    out = []
    for k in range(levels):
        x, h = midpoint_nodes(lower, upper, points * 2**k)
        out.append(h * np.sum(integrand(x), axis=-1))
    return np.array(out)


class NormResult(NamedTuple):
    value: float
    finite: bool
    ladder: tuple


def norm_integral(rec, points: int = 256, levels: int = 4, rtol: float = 0.01) -> NormResult:
    """``int int sum_a |f_a|^2 dr dz`` over the open coordinate box.

    The substitution weight cancels the volume element, so this is the norm of
    ``Psi``.  The integrand factorizes channel by channel, which reduces the 2-D
    product midpoint rule to 1-D ladders.  ``finite`` is decided by the last two
    ladder values agreeing within ``rtol``; divergence is reported, not raised.
    """
    if levels < 3:
        raise DomainError("the refinement ladder needs at least 3 levels")
    if points < 8:
        raise DomainError("points must be >= 8")

    def z_parts(z):
        zs, _ = _channels(rec, np.array([np.pi / 2]), z)
        return np.array([np.abs(zs[0]) ** 2, np.abs(zs[2]) ** 2])

    def r_parts(r):
        _, rs = _channels(rec, r, np.array([0.0]))
        return np.array([rs[0] ** 2, rs[2] ** 2])

    zl = ladder(z_parts, -np.pi / 2, np.pi / 2, points, levels)
    rl = ladder(r_parts, 0.0, np.pi, points, levels)
    a = branch_coefficient(rec.eps, rec.M, rec.qn.branch)
    values = (1 + a * a) * (zl[:, 0] * rl[:, 0] + zl[:, 1] * rl[:, 1])
    finite = bool(
        np.all(np.isfinite(values[-2:]))
        and abs(values[-1] - values[-2]) <= rtol * abs(values[-1])
    )
    return NormResult(float(values[-1]), finite, tuple(float(v) for v in values))

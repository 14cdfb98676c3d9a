"""Cylindric coordinates on the unit 3-sphere: embedding, metric, tetrad and
connection coefficients.

Coordinate order everywhere is ``(t, r, phi, z)``; spatial index triples use
``(r, phi, z)``.  The curvature radius is 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularPointError

COORDS = ("t", "r", "phi", "z")
ETA = np.diag([1.0, -1.0, -1.0, -1.0])

# closeness (in radians) to r in {0, pi} or z = +-pi/2 that counts as boundary
_BOUNDARY_EPS = 1e-12


@dataclass(frozen=True)
class Point:
    r: float
    z: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.r <= math.pi):
            raise DomainError(f"r={self.r} outside [0, pi]")
        if not (-math.pi / 2 <= self.z <= math.pi / 2):
            raise DomainError(f"z={self.z} outside [-pi/2, pi/2]")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise DomainError(f"phi={self.phi} outside [0, 2 pi)")

    @property
    def is_boundary(self) -> bool:
        return (
            self.r < _BOUNDARY_EPS
            or math.pi - self.r < _BOUNDARY_EPS
            or math.pi / 2 - abs(self.z) < _BOUNDARY_EPS
        )


@dataclass(frozen=True)
class FrameData:
    """Metric, tetrad and connection data at one interior point.

    ``christoffel`` maps ``(upper, lower, lower)`` coordinate-name triples to
    values; only the nonzero entries are stored.  ``ricci_rot`` maps frame
    index triples ``(a, b, c)`` to ``gamma_abc``.
    """

    point: Point
    metric: np.ndarray
    tetrad: np.ndarray
    christoffel: dict = field(repr=False)
    ricci_rot: dict = field(repr=False)

    def orthonormality_error(self) -> float:
        gram = self.tetrad @ self.metric @ self.tetrad.T
        return float(np.max(np.abs(gram - ETA)))


def embed(p: Point):
    """Map to the unit sphere in four dimensions, returned as ``(u0, u1, u2, u3)``."""
    cz = math.cos(p.z)
    return (
        cz * math.cos(p.r),
        cz * math.sin(p.r) * math.cos(p.phi),
        cz * math.sin(p.r) * math.sin(p.phi),
        math.sin(p.z),
    )


def metric(r, z) -> np.ndarray:
    """Diagonal metric ``dt^2 - cos^2 z (dr^2 + sin^2 r dphi^2) - dz^2`` as a 4x4 array."""
    cz2 = math.cos(z) ** 2
    return np.diag([1.0, -cz2, -cz2 * math.sin(r) ** 2, -1.0])


def tetrad(r, z) -> np.ndarray:
    """Tetrad ``e_(a)^beta``: row ``a`` is the frame index, column the coordinate."""
    cz, sr = math.cos(z), math.sin(r)
    if abs(sr) < _BOUNDARY_EPS:
        raise SingularPointError("sin r = 0: tetrad component e_(2)^phi diverges")
    if abs(cz) < _BOUNDARY_EPS:
        raise SingularPointError("cos z = 0: tetrad components e_(1)^r, e_(2)^phi diverge")
    return np.diag([1.0, 1.0 / cz, 1.0 / (cz * sr), 1.0])


def christoffel(r, z) -> dict:
    tz = math.tan(z)
    sr, cr = math.sin(r), math.cos(r)
    sz, cz = math.sin(z), math.cos(z)
    cot = cr / sr
    return {
        ("r", "r", "z"): -tz,
        ("r", "z", "r"): -tz,
        ("r", "phi", "phi"): -sr * cr,
        ("phi", "r", "phi"): cot,
        ("phi", "phi", "r"): cot,
        ("phi", "phi", "z"): -tz,
        ("phi", "z", "phi"): -tz,
        ("z", "r", "r"): sz * cz,
        ("z", "phi", "phi"): sz * cz * sr**2,
    }


def christoffel_array(r, z) -> np.ndarray:
    """Dense ``Gamma[i, j, k]`` over ``(t, r, phi, z)`` built from :func:`christoffel`."""
    out = np.zeros((4, 4, 4))
    for (i, j, k), v in christoffel(r, z).items():
        out[COORDS.index(i), COORDS.index(j), COORDS.index(k)] = v
    return out


def tetrad_diagonal(r, z):
    """Diagonal entries of :func:`tetrad`, broadcasting over array inputs."""
    cz = np.cos(z)
    one = np.ones_like(np.asarray(r * cz, dtype=float))
    return one, 1.0 / cz * one, 1.0 / (cz * np.sin(r)), one


def ricci_rotation(r, z) -> dict:
    """The independent nonzero ``gamma_abc`` (antisymmetric in ``a, b``).

    Sign convention: ``gamma_abc = -(nabla_alpha e_(a)beta) e_(b)^beta e_(c)^alpha``.
    Broadcasts over array inputs.
    """
    tz = np.tan(z)
    return {
        (1, 2, 2): 1.0 / (np.cos(z) * np.tan(r)),
        (3, 1, 1): -tz,
        (3, 2, 2): -tz,
    }


def ricci_rotation_array(r, z) -> np.ndarray:
    out = np.zeros((4, 4, 4))
    for (a, b, c), v in ricci_rotation(r, z).items():
        out[a, b, c] = v
        out[b, a, c] = -v
    return out


def frame_at(p: Point) -> FrameData:
    if math.sin(p.r) == 0.0 or p.r < _BOUNDARY_EPS or math.pi - p.r < _BOUNDARY_EPS:
        raise SingularPointError(f"sin r vanishes at r={p.r}; frame is singular")
    if math.pi / 2 - abs(p.z) < _BOUNDARY_EPS:
        raise SingularPointError(f"cos z vanishes at z={p.z}; frame is singular")
    return FrameData(
        point=p,
        metric=metric(p.r, p.z),
        tetrad=tetrad(p.r, p.z),
        christoffel=christoffel(p.r, p.z),
        ricci_rot=ricci_rotation(p.r, p.z),
    )


# -- finite-difference oracles ------------------------------------------------

def _coords(r, z):
    return np.array([0.0, r, 0.0, z])


def _metric_at(x):
    return metric(x[1], x[3])


def fd_christoffel(r, z, h=1e-5) -> np.ndarray:
    """Christoffel symbols from centered differences of the metric alone."""
    x = _coords(r, z)
    dg = np.zeros((4, 4, 4))
    for l in range(4):
        step = np.zeros(4)
        step[l] = h
        dg[l] = (_metric_at(x + step) - _metric_at(x - step)) / (2 * h)
    ginv = np.linalg.inv(_metric_at(x))
    # dg[l, a, b] = d_l g_ab
    term = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    return 0.5 * np.einsum("il,ljk->ijk", ginv, term)


def fd_ricci_rotation(r, z, h=1e-5) -> np.ndarray:
    """``gamma_abc`` from differences of the lowered tetrad and FD Christoffels."""
    x = _coords(r, z)

    def lowered(y):
        return tetrad(y[1], y[3]) @ _metric_at(y)

    de = np.zeros((4, 4, 4))
    for al in range(4):
        step = np.zeros(4)
        step[al] = h
        de[al] = (lowered(x + step) - lowered(x - step)) / (2 * h)
    gam = fd_christoffel(r, z, h)
    e_low = lowered(x)
    e_up = tetrad(r, z)
    # nabla_alpha e_(a)beta = d_alpha e_(a)beta - Gamma^s_(alpha beta) e_(a)s
    nab = de.transpose(1, 2, 0) - np.einsum("sab,ks->kba", gam, e_low)
    return -np.einsum("aBA,bB,cA->abc", nab, e_up, e_up)


def spin_connection(r, z):
    """Frame components ``(1/2) sum_b gamma_cbb`` entering the covariant Dirac operator."""
    rot = ricci_rotation(r, z)
    return tuple(
        0.5 * sum((v for (a, b, c), v in rot.items() if a == k and b == c), 0.0 * rot[(3, 1, 1)])
        for k in range(4)
    )

"""Quantization rules, admissibility, state enumeration and the flat limit.

Everything here is closed-form: ``lambda`` comes from the radial variant, ``p``
from the z-variant, and ``eps = +-sqrt(M^2 + p^2)``.  No root finding.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple, Optional

from .errors import (
    AdmissibilityError,
    DegenerateSeparationError,
    DomainError,
    PositivityError,
    RejectedVariantError,
    check_twice_m,
)
from .field import FieldParams
from .wavefunctions import RVariant, ZVariant, norm_integral

# lambda^2 closer to zero than this is treated as the degenerate lambda = 0
_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class QuantumNumbers:
    twice_m: int
    n: int
    N: int
    branch: int = 1

    def __post_init__(self):
        check_twice_m(self.twice_m)
        for name in ("n", "N"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or v < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.branch not in (1, -1):
            raise DomainError(f"branch must be +1 or -1, got {self.branch}")

    @property
    def m(self) -> float:
        return self.twice_m / 2


@dataclass(frozen=True)
class SpectrumRecord:
    r_variant: int
    z_variant: int
    qn: QuantumNumbers
    B: float
    M: float
    lam: float
    p: float
    eps: float
    admissible: bool = True
    normalizable: Optional[bool] = None
    rejected_variant: bool = False

    def to_dict(self) -> dict:
        return {
            "r_variant": self.r_variant,
            "z_variant": self.z_variant,
            "twice_m": self.qn.twice_m,
            "n": self.qn.n,
            "N": self.qn.N,
            "branch": self.qn.branch,
            "B": self.B,
            "M": self.M,
            "lambda": self.lam,
            "p": self.p,
            "eps": self.eps,
            "admissible": self.admissible,
            "normalizable": self.normalizable,
            "rejected_variant": self.rejected_variant,
        }

    def sort_key(self):
        return (self.eps, self.r_variant, self.z_variant, self.qn.n, self.qn.N,
                self.qn.twice_m, -self.qn.branch)


class Admissibility(NamedTuple):
    ok: bool
    violated: tuple

    def __bool__(self):
        return self.ok


def admissible(r_variant: int, twice_m, B) -> Admissibility:
    """Check the exponent-positivity inequalities of a radial variant."""
    if B <= 0:
        raise DomainError(f"B must be > 0, got {B}")
    bad = RVariant(r_variant).violations(twice_m, B)
    return Admissibility(not bad, bad)


def lambda_squared(r_variant: int, twice_m, B, n) -> float:
    """Raw ``lambda^2 = (A + C + n)^2 - B^2`` without any positivity check."""
    a, c = RVariant(r_variant).exponents(twice_m, B)
    return (a + c + n) ** 2 - B * B


_POSITIVITY = {2: "n + m + 1/2 > 2B", 3: "n+1 > 2B"}


def lambda_of(r_variant: int, twice_m, B, n) -> float:
    m = check_twice_m(twice_m) / 2
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n}")
    adm = admissible(r_variant, twice_m, B)
    if not adm:
        raise AdmissibilityError(
            f"radial variant {r_variant} inadmissible for m={m}, B={B}: "
            f"violates {', '.join(adm.violated)}"
        )
    if r_variant == 1:
        lam2 = 2 * B * n + n * n
    elif r_variant == 2:
        x = n + m + 0.5
        lam2 = x * x - 2 * B * x
    elif r_variant == 3:
        lam2 = (n + 1) ** 2 - 2 * B * (n + 1)
    else:
        x = n - m + 0.5
        lam2 = x * x + 2 * B * x
    if abs(lam2) <= _ZERO_TOL:
        raise DegenerateSeparationError(
            f"lambda = 0 for radial variant {r_variant}, n={n}: the separated channels decouple"
        )
    if lam2 < 0:
        raise PositivityError(
            f"lambda^2 = {lam2} < 0 for radial variant {r_variant}, n={n}: "
            f"requires {_POSITIVITY[r_variant]}"
        )
    return math.sqrt(lam2)


def p_of(z_variant: int, lam, N) -> float:
    if z_variant in (1, 2):
        raise RejectedVariantError(f"z-variant {z_variant} quantizes lambda, not p")
    if z_variant not in (3, 4):
        raise DomainError(f"z-variant must be 1..4, got {z_variant}")
    if lam <= 0:
        raise DegenerateSeparationError(f"lambda={lam} must be > 0")
    if N < 0 or int(N) != N:
        raise DomainError(f"N must be a nonnegative integer, got {N}")
    if z_variant == 4:
        return lam + (N + 0.5)
    p = lam - (N + 0.5)
    if p <= 0:
        raise PositivityError(
            f"p = lambda - (N + 1/2) = {p} <= 0: N={N} is above the top of the tower"
        )
    return p


class RejectedSpectrum(NamedTuple):
    lam: float
    rejected: bool
    degenerate: bool


def rejected_z_spectra(z_variant: int, N) -> RejectedSpectrum:
    """``lambda`` values forced by z-variants 1 (``1 + N``) and 2 (``N``)."""
    if N < 0 or int(N) != N:
        raise DomainError(f"N must be a nonnegative integer, got {N}")
    if z_variant == 1:
        lam = 1.0 + N
    elif z_variant == 2:
        lam = float(N)
    else:
        raise DomainError(f"only z-variants 1 and 2 are rejected, got {z_variant}")
    return RejectedSpectrum(lam, True, lam == 0)


def energy(p, M):
    """``(+eps, -eps)`` with ``eps = sqrt(M^2 + p^2)``."""
    if M <= 0:
        raise DomainError(f"M must be > 0 (massless case unsupported), got {M}")
    if p <= 0:
        raise DomainError(f"p must be > 0, got {p}")
    e = math.hypot(M, p)
    return e, -e


def _states_for_m(params: FieldParams, twice_m, n_max, N_max, r_variants, z_variants,
                  branches, classify):
    out = []
    for rv in r_variants:
        if not admissible(rv, twice_m, params.B):
            continue
        for n in range(n_max + 1):
            try:
                lam = lambda_of(rv, twice_m, params.B, n)
            except (DegenerateSeparationError, PositivityError):
                continue
            for zv in z_variants:
                for N in range(N_max + 1):
                    try:
                        p = p_of(zv, lam, N)
                    except PositivityError:
                        break
                    eps = energy(p, params.M)[0]
                    for br in branches:
                        rec = SpectrumRecord(
                            r_variant=rv, z_variant=zv,
                            qn=QuantumNumbers(twice_m, n, N, br),
                            B=params.B, M=params.M, lam=lam, p=p, eps=eps,
                        )
                        if classify:
                            rec = _with_norm_flag(rec)
                        out.append(rec)
    return out


def _with_norm_flag(rec: SpectrumRecord) -> SpectrumRecord:
    from dataclasses import replace

    return replace(rec, normalizable=norm_integral(rec).finite)


def enumerate_states(params: FieldParams, twice_m_values, n_max: int, N_max: int, *,
                     r_variants=(1, 2, 3, 4), z_variants=(3, 4), expand_branches=False,
                     classify=True, workers: Optional[int] = None) -> list:
    """All admissible states up to ``n_max`` / ``N_max``, canonically ordered.

    The two branch signs give the same spectrum; by default one record per
    state is emitted with ``branch=+1``.  ``classify`` runs the quadrature
    normalizability check for every record (otherwise ``normalizable`` is None).
    """
    ms = sorted({check_twice_m(t) for t in twice_m_values})
    if not ms:
        raise DomainError("at least one twice_m value is required")
    if n_max < 0 or N_max < 0:
        raise DomainError("n_max and N_max must be >= 0")
    for zv in z_variants:
        if zv not in (3, 4):
            raise RejectedVariantError(f"z-variant {zv} is not enumerated (use 3 or 4)")
    branches = (1, -1) if expand_branches else (1,)
    args = (n_max, N_max, tuple(r_variants), tuple(z_variants), branches, classify)
    if workers and workers > 1 and len(ms) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda t: _states_for_m(params, t, *args), ms))
    else:
        chunks = [_states_for_m(params, t, *args) for t in ms]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=SpectrumRecord.sort_key)
    return records


def resolve_state(params: FieldParams, twice_m, r_variant, z_variant, n, N, branch=1,
                  classify=False) -> SpectrumRecord:
    """Single record from its quantum numbers; raises on any failed constraint."""
    lam = lambda_of(r_variant, twice_m, params.B, n)
    p = p_of(z_variant, lam, N)
    rec = SpectrumRecord(
        r_variant=r_variant, z_variant=z_variant,
        qn=QuantumNumbers(twice_m, n, N, branch),
        B=params.B, M=params.M, lam=lam, p=p, eps=energy(p, params.M)[0],
    )
    return _with_norm_flag(rec) if classify else rec


# -- flat limit -------------------------------------------------------------------

class FlatLimitEntry(NamedTuple):
    rho: float
    B: float
    value: Optional[float]
    error: Optional[str]


def flat_limit_scan(b, twice_m, r_variant, z_variant, n, N, rho_list) -> list:
    """``p^2 / rho^2`` at each curvature radius, with ``B = b rho^2``.

    Entries where the configuration is not valid carry the reason instead of a value.
    """
    check_twice_m(twice_m)
    out = []
    for rho in rho_list:
        if rho <= 0:
            raise DomainError(f"rho must be > 0, got {rho}")
        B = b * rho * rho
        try:
            lam = lambda_of(r_variant, twice_m, B, n)
            p = p_of(z_variant, lam, N)
        except DomainError as exc:
            out.append(FlatLimitEntry(rho, B, None, str(exc)))
            continue
        out.append(FlatLimitEntry(rho, B, p * p / (rho * rho), None))
    return out


def flat_limit_leading(b, twice_m, r_variant, n) -> float:
    """Limit of ``p^2 / rho^2`` as ``rho -> inf`` with ``B = b rho^2``.

    For variants 1 and 4, ``A + C = B + x`` with ``x`` independent of ``B``, so
    ``lambda^2 = 2 B x + x^2`` and ``p^2 / rho^2 -> 2 b x``.  Variants 2 and 3
    lose admissibility as ``B`` grows.
    """
    if r_variant not in (1, 4):
        raise DomainError(f"radial variant {r_variant} does not survive the flat limit")
    a, c = RVariant(r_variant).exponents(twice_m, 0.0)
    return 2 * b * (a + c + n)


def surviving_variants(twice_m, B) -> tuple:
    """Radial variants admissible at ``(m, B)``."""
    return tuple(v for v in (1, 2, 3, 4) if admissible(v, twice_m, B))

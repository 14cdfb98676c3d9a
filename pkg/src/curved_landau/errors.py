"""Exception hierarchy shared by every module."""


class CurvedLandauError(Exception):
    """Base class for all library errors."""


class DomainError(CurvedLandauError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularPointError(DomainError):
    """Evaluation requested at a coordinate singularity."""


class AdmissibilityError(DomainError):
    """A radial variant is used where its exponent inequalities fail."""


class PositivityError(DomainError):
    """A closed-form lambda^2 or p came out non-positive."""


class DegenerateSeparationError(DomainError):
    """lambda = 0: the second channel cannot be reconstructed."""


class RejectedVariantError(DomainError):
    """z-variants 1 and 2 quantize lambda, not p."""


class UnsupportedSeriesError(DomainError):
    """A 2F1 series that does not terminate."""


class ConvergenceError(CurvedLandauError, RuntimeError):
    """A numerical oracle failed to produce the requested values."""


def check_twice_m(twice_m) -> int:
    """Validate the doubled azimuthal number and return it as ``int``.

    ``m`` must be half-integer (``+-1/2, +-3/2, ...``), so ``twice_m`` must be odd.
    """
    if isinstance(twice_m, bool) or int(twice_m) != twice_m:
        raise DomainError(f"twice_m must be an integer, got {twice_m!r}")
    twice_m = int(twice_m)
    if twice_m % 2 == 0:
        raise DomainError(
            f"m must be half-integer (m = +-1/2, +-3/2, ...); twice_m={twice_m} is even"
        )
    return twice_m

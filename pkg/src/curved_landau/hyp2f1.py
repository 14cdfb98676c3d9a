"""Terminating Gauss hypergeometric series.

Only the polynomial case is supported: one upper parameter must be a
nonpositive integer ``-N``.  Coefficients come from the forward recurrence
``c[k+1] = c[k] (a+k)(b+k) / ((g+k)(k+1))`` and evaluation is Horner's rule, so
the result is exact up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError, UnsupportedSeriesError

INTEGER_TOL = 1e-9


def _nonpositive_integer(x: float):
    k = round(x)
    if abs(x - k) <= INTEGER_TOL and k <= 0:
        return int(k)
    return None


@dataclass(frozen=True)
class TerminatingSeries:
    alpha: float
    beta: float
    gamma: float
    coefficients: tuple

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @classmethod
    def build(cls, alpha, beta, gamma) -> "TerminatingSeries":
        ka, kb = _nonpositive_integer(alpha), _nonpositive_integer(beta)
        if ka is None and kb is None:
            raise UnsupportedSeriesError(
                f"F({alpha}, {beta}; {gamma}; x) does not terminate: "
                "neither upper parameter is a nonpositive integer"
            )
        if ka is not None:
            alpha = float(ka)
        if kb is not None:
            beta = float(kb)
        degree = -max(k for k in (ka, kb) if k is not None)
        coeffs = [1.0]
        for k in range(degree):
            den = (gamma + k) * (k + 1)
            if abs(gamma + k) <= INTEGER_TOL:
                raise DomainError(
                    f"gamma={gamma} hits the pole gamma+{k}=0 before the series terminates"
                )
            coeffs.append(coeffs[-1] * (alpha + k) * (beta + k) / den)
        return cls(alpha, beta, gamma, tuple(coeffs))

    def evaluate(self, x, order: int = 1):
        """Return ``(F, F', ..., F^(order))`` at ``x`` (scalar or array, real or complex)."""
        c = np.asarray(self.coefficients)
        out = [P.polyval(x, c)]
        for _ in range(order):
            c = P.polyder(c) if len(c) > 1 else np.zeros(1)
            out.append(P.polyval(x, c))
        return tuple(out)

    def __call__(self, x):
        return self.evaluate(x, order=0)[0]


def poly_2f1(alpha, beta, gamma, x):
    """Value and first derivative of a terminating ``2F1(alpha, beta; gamma; x)``."""
    return TerminatingSeries.build(alpha, beta, gamma).evaluate(x, order=1)


def hypergeometric_ode_residual(series: TerminatingSeries, x):
    """``x(1-x)F'' + [gamma - (alpha+beta+1)x]F' - alpha beta F``."""
    f, d1, d2 = series.evaluate(x, order=2)
    a, b, g = series.alpha, series.beta, series.gamma
    return x * (1 - x) * d2 + (g - (a + b + 1) * x) * d1 - a * b * f

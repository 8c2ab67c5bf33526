"""Jointly Gaussian source / private-information model and its second-order algebra.

The source X and the private information theta are zero-mean jointly Gaussian
with covariance sigma_x2 * [[1, rho], [rho, r]].  Everything downstream
(equilibrium solvers, curve sweeps, Monte Carlo, brute-force oracle) consumes
the validated ``SourceModel`` defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

#: Tolerance for boundary checks on normalized quantities (e.g. rho^2 <= r).
BOUNDARY_EPS = 1e-12


class ModelError(ValueError):
    """Base class for invalid source-model parameters."""


class NonPositiveVarianceError(ModelError):
    """sigma_x2 must be strictly positive."""


class NegativeCorrelationError(ModelError):
    """rho is taken nonnegative by convention."""


class CorrelationBoundError(ModelError):
    """rho^2 > r violates positive semidefiniteness of the covariance."""


@dataclass(frozen=True)
class SourceModel:
    """Second-order statistics of (X, theta).

    Attributes
    ----------
    sigma_x2 : variance of X, strictly positive.
    rho : normalized cross-correlation, Cov(X, theta) = sigma_x2 * rho.
    r : normalized private-information variance, Var(theta) = sigma_x2 * r.
    """

    sigma_x2: float
    rho: float
    r: float

    def __post_init__(self) -> None:
        if not (self.sigma_x2 > 0.0) or not math.isfinite(self.sigma_x2):
            raise NonPositiveVarianceError(
                f"sigma_x2 must be positive, got {self.sigma_x2}"
            )
        if not math.isfinite(self.rho) or self.rho < 0.0:
            raise NegativeCorrelationError(f"rho must be >= 0, got {self.rho}")
        if not math.isfinite(self.r) or self.rho**2 > self.r * (1.0 + BOUNDARY_EPS):
            raise CorrelationBoundError(
                f"need rho^2 <= r, got rho^2={self.rho**2} > r={self.r}"
            )


@dataclass(frozen=True)
class PrivacyBounds:
    """Range of achievable privacy MMSE for theta.

    dp_min is the MMSE of theta given X itself (the least privacy any encoder
    can provide once Y reveals X perfectly); dp_max is Var(theta), attained
    when Y is made independent of theta.
    """

    dp_min: float
    dp_max: float


def validate_model(sigma_x2: float, rho: float, r: float) -> SourceModel:
    """Validate raw parameters and return an immutable :class:`SourceModel`.

    Raises a distinct :class:`ModelError` subclass per violated constraint;
    never clamps silently.
    """
    return SourceModel(float(sigma_x2), float(rho), float(r))


def privacy_bounds(model: SourceModel) -> PrivacyBounds:
    """Return (dp_min, dp_max) = (sigma_x2*(r - rho^2), sigma_x2*r)."""
    dp_min = model.sigma_x2 * (model.r - model.rho**2)
    return PrivacyBounds(dp_min=max(dp_min, 0.0), dp_max=model.sigma_x2 * model.r)


def gaussian_conditional_entropy(mmse: float) -> float:
    """Differential entropy (nats) of a Gaussian with variance ``mmse``.

    Bridges the MMSE privacy view and the conditional-entropy view:
    H = 0.5 * ln(2*pi*e*mmse), strictly increasing in mmse.
    """
    if not (mmse > 0.0):
        raise ValueError(f"mmse must be positive, got {mmse}")
    return 0.5 * math.log(2.0 * math.pi * math.e * mmse)

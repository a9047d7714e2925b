"""Reductions of few-body flux problems to the one-body Aharonov-Bohm problem.

Two particles in the plane (relative coordinate xi1 = r1 - r2) and three
particles on a line (Jacobi pair (xi1, xi2) rescaled to isotropic polar
coordinates) both lead to the same radial equation as one charge around a
flux tube.  Units: hbar = 1, masses in arbitrary units; the effective
radial problem is written with kinetic coefficient 1, so physical energies
are E = k^2 / (2 mu_ref).
"""

import math
from dataclasses import dataclass

import numpy as np

from .abscatter import flux_config, flux_config_from_g

__all__ = [
    "ReductionResult",
    "ThreeBodyMasses",
    "TwoBodyMasses",
    "effective_channel",
    "reduce_three_body",
    "reduce_two_body",
    "winding_phase",
]


def _positive(**masses):
    for name, m in masses.items():
        if not (m > 0 and math.isfinite(m)):
            raise ValueError(f"{name} must be a finite positive mass, got {m!r}")


@dataclass(frozen=True)
class TwoBodyMasses:
    m1: float
    m2: float

    def __post_init__(self):
        _positive(m1=self.m1, m2=self.m2)


@dataclass(frozen=True)
class ThreeBodyMasses:
    m1: float
    m2: float
    m3: float
    mu0: float | None = None  # reference mass; None means mu1

    def __post_init__(self):
        _positive(m1=self.m1, m2=self.m2, m3=self.m3)
        if self.mu0 is not None:
            _positive(mu0=self.mu0)


@dataclass(frozen=True)
class ReductionResult:
    """Jacobi maps act on particle indices: xi = jacobi_forward @ x.

    kinetic_prefactor multiplies the Laplacian of the reduced relative
    problem, -prefactor * Laplacian; mu_ref = 1 / (2 * kinetic_prefactor).
    polar_scaling is the diagonal of (xi1, xi2) = diag(s) (r cos t, r sin t)
    for three bodies and None for two.
    """

    reduced_masses: tuple
    jacobi_forward: np.ndarray
    jacobi_backward: np.ndarray
    kinetic_prefactor: float
    mu_ref: float
    mu0_defaulted: bool = False
    polar_scaling: tuple | None = None

    @property
    def energy_scale(self):
        # E_physical = energy_scale * k^2 for the dimensionless radial problem
        return self.kinetic_prefactor


def reduce_two_body(m):
    """Relative / centre-of-mass split of two particles in the plane."""
    m1, m2 = float(m.m1), float(m.m2)
    mt = m1 + m2
    fwd = np.array([[1.0, -1.0], [m1 / mt, m2 / mt]])
    bwd = np.array([[m2 / mt, 1.0], [-m1 / mt, 1.0]])
    mu1 = 1.0 / (1.0 / m1 + 1.0 / m2)
    return ReductionResult((mu1, mt), fwd, bwd, 1.0 / (2.0 * mu1), mu1)


def reduce_three_body(m):
    """Jacobi coordinates of three particles on a line plus the isotropic polar rescaling."""
    m1, m2, m3 = float(m.m1), float(m.m2), float(m.m3)
    m12 = m1 + m2
    mt = m12 + m3
    fwd = np.array(
        [
            [1.0, -1.0, 0.0],
            [m1 / m12, m2 / m12, -1.0],
            [m1 / mt, m2 / mt, m3 / mt],
        ]
    )
    # x1 = xi3 + (m3/mt) xi2 + (m2/m12) xi1, etc.
    bwd = np.array(
        [
            [m2 / m12, m3 / mt, 1.0],
            [-m1 / m12, m3 / mt, 1.0],
            [0.0, -m12 / mt, 1.0],
        ]
    )
    mu1 = 1.0 / (1.0 / m1 + 1.0 / m2)
    mu2 = 1.0 / (1.0 / m12 + 1.0 / m3)
    mu0 = mu1 if m.mu0 is None else float(m.mu0)
    scaling = (math.sqrt(mu0 / mu1), math.sqrt(mu0 / mu2))
    return ReductionResult(
        (mu1, mu2, mt), fwd, bwd, 1.0 / (2.0 * mu0), mu0, m.mu0 is None, scaling
    )


def winding_phase(n_wind, alpha):
    """Twist exp(2 pi i n alpha) picked up after n windings around the excluded point."""
    return complex(np.exp(2j * math.pi * int(n_wind) * alpha))


def effective_channel(masses, alpha, g=None, kappa=1.0, sgn_g=1):
    """Return (FluxConfig, ReductionResult) for the relative motion.

    The anomalous channels depend on alpha only; g (or kappa, sgn_g) are the
    dimensionless boundary parameters of the reduced radial problem, so the
    configuration is the one-body one for any masses.
    """
    if isinstance(masses, TwoBodyMasses):
        red = reduce_two_body(masses)
    elif isinstance(masses, ThreeBodyMasses):
        red = reduce_three_body(masses)
    else:
        raise TypeError("masses must be TwoBodyMasses or ThreeBodyMasses")
    cfg = flux_config_from_g(alpha, g) if g is not None else flux_config(alpha, kappa, sgn_g)
    return cfg, red

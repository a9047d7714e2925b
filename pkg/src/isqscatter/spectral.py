"""Eigenfunctions of the window problem and numerical checks of their spectral identities.

Bound state (g > 0):  psi(r) = N f_nu(i k0 r),  N = sqrt(k0 sin(nu pi) / nu).
Scattering state:     psi_k(r) = f_nu(-k r) + S(k) f_nu(k r),
with f_nu(-x) = conj(f_nu(x)) for real x, so psi_k -> exp(-ikr) + S exp(ikr).

Integrals use composite Gauss-Legendre rules graded geometrically toward
r = 0, where the integrands behave like r^(1 - 2 nu).  Continuum identities
(delta normalisation, completeness) are tested in the weak sense: against
Gaussian wave packets in k and a smooth test function in r.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .smatrix import IntermediateChannel, s_eval
from .specfun import check_order, jost_f, jost_f_derivative

__all__ = [
    "BoundState",
    "CompletenessReport",
    "OrthogonalityReport",
    "OrthonormalityReport",
    "QuadratureGrid",
    "ScatteringState",
    "boundary_residual",
    "bound_norm_quadrature",
    "norm_constant",
    "psi_bound",
    "psi_scatt",
    "verify_completeness",
    "verify_orthogonality_bound_scatt",
    "verify_scatt_orthonormality",
]


def norm_constant(nu, kappa):
    """|N_kappa| = sqrt(kappa sin(nu pi) / nu)."""
    nu = check_order(nu)
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    return math.sqrt(kappa * math.sin(nu * math.pi) / nu)


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("radial coordinate must be > 0")
    return r


class BoundState:
    """Normalised bound state of a g > 0 channel; callable in r."""

    def __init__(self, channel: IntermediateChannel):
        if channel.sgn_g != 1:
            raise ValueError("a bound state exists only for g > 0")
        self.channel = channel
        self.norm = norm_constant(channel.nu, channel.kappa0)

    def __call__(self, r):
        r = _check_r(r)
        ch = self.channel
        return self.norm * jost_f(ch.nu, "imag", ch.kappa0 * r)

    def derivative(self, r):
        r = _check_r(r)
        ch = self.channel
        return self.norm * ch.kappa0 * jost_f_derivative(ch.nu, "imag", ch.kappa0 * r)


class ScatteringState:
    """psi_k for real k > 0; callable in r."""

    def __init__(self, channel: IntermediateChannel, k: float):
        if not k > 0:
            raise ValueError("scattering momentum must be > 0")
        self.channel = channel
        self.k = float(k)
        self.s = s_eval(channel, self.k)

    def __call__(self, r):
        r = _check_r(r)
        f = jost_f(self.channel.nu, "real", self.k * r)
        return np.conj(f) + self.s * f

    def derivative(self, r):
        r = _check_r(r)
        df = jost_f_derivative(self.channel.nu, "real", self.k * r)
        return self.k * (np.conj(df) + self.s * df)


def psi_bound(b, r):
    return b(r)


def psi_scatt(s, r):
    return s(r)


def boundary_residual(psi, g, nu, r):
    """psi/r^(1/2-nu) + g r^(1-2nu) d/dr[psi/r^(1/2-nu)], which must vanish as r -> 0.

    `psi` is any evaluator exposing __call__ and derivative.
    """
    nu = check_order(nu)
    r = _check_r(r)
    p = psi(r)
    dp = psi.derivative(r)
    u = p * r ** (nu - 0.5)
    # r^(1-2nu) u' = r^(1/2-nu) psi' - (1/2-nu) r^(-1/2-nu) psi
    w = r ** (0.5 - nu) * dp - (0.5 - nu) * r ** (-0.5 - nu) * p
    return u + g * w


@lru_cache(maxsize=None)
def _legendre(n):
    return np.polynomial.legendre.leggauss(n)


def composite_rule(breaks, nodes_per_panel):
    """Gauss-Legendre nodes and weights on consecutive intervals of `breaks`."""
    x, w = _legendre(nodes_per_panel)
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1, None], breaks[1:, None]
    half = 0.5 * (b - a)
    return (a + half * (x + 1.0)).ravel(), (half * w).ravel()


@dataclass(frozen=True)
class QuadratureGrid:
    """Panels graded geometrically on [r_min, r_split], uniform on [r_split, r_max]."""

    r_min: float
    r_max: float
    panels: int
    nodes_per_panel: int = 64
    r_split: float = 1.0
    grading: float = 0.15

    def __post_init__(self):
        if not 0 < self.r_min < self.r_split < self.r_max:
            raise ValueError("need 0 < r_min < r_split < r_max")
        if self.panels < 1 or self.nodes_per_panel < 1:
            raise ValueError("panels and nodes_per_panel must be positive")

    def breakpoints(self):
        graded = [self.r_split]
        while graded[-1] * self.grading > self.r_min:
            graded.append(graded[-1] * self.grading)
        graded.append(self.r_min)
        uniform = np.linspace(self.r_split, self.r_max, self.panels + 1)
        return np.concatenate([graded[::-1], uniform[1:]])

    def nodes_weights(self):
        return composite_rule(self.breakpoints(), self.nodes_per_panel)


def _bound_grid(kappa0):
    # r_max = 40/k0; below 1e-30/k0 the r^(1-2nu) head is negligible
    return QuadratureGrid(1e-30 / kappa0, 40.0 / kappa0, 78, 64, 1.0 / kappa0)


def bound_norm_quadrature(b, grid=None):
    """Integral of |psi|^2 over (0, inf): quadrature to r_max plus the exp(-2 k0 r) tail."""
    grid = grid or _bound_grid(b.channel.kappa0)
    r, w = grid.nodes_weights()
    body = float(np.sum(w * np.abs(b(r)) ** 2))
    k0 = b.channel.kappa0
    tail = b.norm**2 * math.exp(-2.0 * k0 * grid.r_max) / (2.0 * k0)
    return body + tail


def _scatt_matrix(channel, ks, rs):
    # rows: momenta, columns: radii
    ks = np.asarray(ks, dtype=float)
    f = jost_f(channel.nu, "real", np.multiply.outer(ks, rs))
    s = s_eval(channel, ks)
    return np.conj(f) + s[:, None] * f


@dataclass
class OrthogonalityReport:
    overlaps: dict
    max_abs: float
    tolerance: float

    @property
    def passed(self):
        return self.max_abs <= self.tolerance


def verify_orthogonality_bound_scatt(channel, k_factors=(0.3, 1.0, 3.0), scatt_channel=None, tolerance=1e-6):
    """Overlaps <psi_k0, psi_k> at k = factor * k0.

    `scatt_channel` builds the scattering states from a different channel
    (a negative control: states of different boundary conditions are not
    orthogonal).
    """
    b = BoundState(channel)
    sc = scatt_channel or channel
    k0 = channel.kappa0
    grid = _bound_grid(k0)
    r, w = grid.nodes_weights()
    ks = np.asarray(k_factors, dtype=float) * k0
    psi_b = b(r)
    mat = _scatt_matrix(sc, ks, r)
    body = mat @ (w * psi_b)
    # beyond r_max both states are in their asymptotic form
    R = grid.r_max
    s = s_eval(sc, ks)
    tail = b.norm * (
        np.exp(-(k0 + 1j * ks) * R) / (k0 + 1j * ks) + s * np.exp(-(k0 - 1j * ks) * R) / (k0 - 1j * ks)
    )
    over = body + tail
    overlaps = {float(k): complex(v) for k, v in zip(ks, over)}
    return OrthogonalityReport(overlaps, float(np.max(np.abs(over))), tolerance)


@dataclass
class OrthonormalityReport:
    k1: float
    k2: float
    width: float
    overlap: complex
    expected: complex
    diagonal: float
    ratio: float | None
    relative_offdiagonal: float | None
    notes: list = field(default_factory=list)


def _packet(channel, k0, width, rs, nodes=48):
    ks, wk = composite_rule([k0 - 8 * width, k0, k0 + 8 * width], nodes)
    amp = np.exp(-0.5 * ((ks - k0) / width) ** 2)
    return (wk * amp) @ _scatt_matrix(channel, ks, rs)


def verify_scatt_orthonormality(channel, k1, k2, packet_width=0.05):
    """Delta-normalisation <psi_k, psi_k'> = 2 pi delta(k - k') tested on Gaussian packets.

    phi_i(r) = int dk w_i(k) psi_k(r), w_i(k) = exp(-(k - k_i)^2 / (2 width^2)).
    Then <phi_1, phi_2> must equal 2 pi int w_1 w_2 dk
    = 2 pi sqrt(pi) width exp(-(k1 - k2)^2 / (4 width^2)).  No delta(k + k')
    contribution is possible because the packets live on k > 0.
    """
    notes = []
    for kc in (k1, k2):
        if kc - 8 * packet_width <= 0:
            raise ValueError("wave packets must be supported on k > 0")
    if packet_width < 1e-3 * max(k1, k2):
        notes.append("packet width small relative to momentum; r-range grows as 1/width")
    k_top = max(k1, k2) + 8 * packet_width
    r_max = 12.0 / packet_width
    step = min(1.0, 2.0 / k_top)
    grid = QuadratureGrid(1e-30, r_max, int(math.ceil((r_max - 1.0) / step)), 24, 1.0)
    r, w = grid.nodes_weights()
    p1 = _packet(channel, k1, packet_width, r)
    p2 = p1 if k2 == k1 else _packet(channel, k2, packet_width, r)
    overlap = complex(np.sum(w * np.conj(p1) * p2))
    diag = float(np.sum(w * np.abs(p1) ** 2).real)
    expected = 2 * math.pi * math.sqrt(math.pi) * packet_width * math.exp(-((k1 - k2) ** 2) / (4 * packet_width**2))
    diag_expected = 2 * math.pi * math.sqrt(math.pi) * packet_width
    ratio = diag / diag_expected
    rel_off = None if k1 == k2 else abs(overlap) / diag
    return OrthonormalityReport(k1, k2, packet_width, overlap, expected, diag, ratio, rel_off, notes)


@dataclass
class CompletenessReport:
    error: float
    bound_coefficient: complex | None
    tail_estimate: float
    k_max: float


def _k_grid(k_max, kappa0, nodes):
    k_split = min(kappa0, 0.5 * k_max)
    breaks = [k_split]
    while breaks[-1] > 1e-12 * kappa0:
        breaks.append(breaks[-1] * 0.15)
    n_uniform = int(math.ceil((k_max - k_split) / 0.5))
    uniform = np.linspace(k_split, k_max, n_uniform + 1)
    return composite_rule(np.concatenate([breaks[::-1], uniform[1:]]), nodes)


def verify_completeness(channel, test_fn, k_max, grid, include_bound=True, k_nodes=24):
    """Relative L2 error of reconstructing test_fn from the eigenfunction expansion.

    f_hat(r) = psi_b(r) <psi_b, f> + int_0^k_max dk/2pi <psi_k, f> psi_k(r),
    the bound term present only for g > 0 (and include_bound).  `grid` must
    cover the support of test_fn.  tail_estimate is the relative weight of the
    coefficients in the last unit of k below k_max.
    """
    r, w = grid.nodes_weights()
    f = np.asarray(test_fn(r), dtype=complex)
    norm = math.sqrt(float(np.sum(w * np.abs(f) ** 2)))
    ks, wk = _k_grid(k_max, channel.kappa0, k_nodes)
    psi = _scatt_matrix(channel, ks, r)
    c = np.conj(psi) @ (w * f)
    recon = ((wk * c) @ psi) / (2.0 * math.pi)
    bound_coef = None
    if channel.sgn_g > 0 and include_bound:
        b = BoundState(channel)
        pb = b(r)
        bound_coef = complex(np.sum(w * pb * f))
        recon = recon + bound_coef * pb
    err = math.sqrt(float(np.sum(w * np.abs(f - recon) ** 2))) / norm
    last = ks > k_max - 1.0
    tail = math.sqrt(float(np.sum(wk[last] * np.abs(c[last]) ** 2)) / (2 * math.pi)) / norm
    return CompletenessReport(err, bound_coef, tail, float(k_max))

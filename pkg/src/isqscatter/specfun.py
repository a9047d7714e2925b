"""Real-order Bessel-type functions on the two rays the inverse-square problem needs.

The Jost-like solution of order nu in (0, 1) is

    f_nu(z) = sqrt(pi*i*z/2) * exp(i*nu*pi/2) * H1_nu(z),

normalised so that f_nu(z) -> exp(i*z) for large |z|.  It is evaluated on the
positive real ray (scattering states) and on the positive imaginary ray
(bound states).  On the imaginary ray f_nu(i*t) = sqrt(2*t/pi) * K_nu(t), which
is real, positive and decays like exp(-t).

Everything here accepts scalars or numpy arrays for the radial argument.
"""

import math
import warnings
from typing import NamedTuple

import numpy as np

__all__ = [
    "CROSSOVER",
    "T_MAX",
    "BoundaryCoeffs",
    "FlushedToZero",
    "bessel_j",
    "check_order",
    "coeffs",
    "gamma_real",
    "jost_f",
    "jost_f_derivative",
]

# |z| above which the Hankel asymptotic expansion replaces the power series
CROSSOVER = 12.0
# exp(-t) underflow guard on the imaginary ray
T_MAX = 700.0
# imaginary ray: integral representation below this, asymptotic series above
_K_ASYMPTOTIC = 20.0

_SERIES_TERMS = 70
_ASYMPTOTIC_TERMS = 40


class FlushedToZero(RuntimeWarning):
    """Imaginary-ray values beyond T_MAX were returned as exact zeros."""


class BoundaryCoeffs(NamedTuple):
    """Coefficients of the two near-origin powers of f_nu."""

    a_nu: float
    b_nu: float


def check_order(nu):
    """Validate an order inside the intermediate window and return it as float."""
    nu = float(nu)
    if not 0.0 < nu < 1.0:
        raise ValueError(f"order nu must lie strictly inside (0, 1), got {nu!r}")
    return nu


def gamma_real(x):
    """Gamma function for real x > 0."""
    x = float(x)
    if not x > 0.0:
        raise ValueError(f"gamma_real is defined for x > 0 only, got {x!r}")
    return math.gamma(x)


def coeffs(nu):
    """Return (A_nu, B_nu), the weights of (-iz)^(1/2 -+ nu) in f_nu near z = 0."""
    nu = check_order(nu)
    s = math.sin(nu * math.pi)
    sqrt_pi = math.sqrt(math.pi)
    a = sqrt_pi / (2.0 ** (0.5 - nu) * gamma_real(1.0 - nu) * s)
    b = sqrt_pi / (2.0 ** (0.5 + nu) * gamma_real(1.0 + nu) * s)
    return BoundaryCoeffs(a, b)


def _series_j(mu, x, derivative=False):
    # ascending series of J_mu, valid for any real mu > -1
    x = np.asarray(x, dtype=float)
    half = 0.5 * x
    term = half**mu / gamma_real(mu + 1.0)
    q = -half * half
    total = np.zeros_like(x)
    dtotal = np.zeros_like(x)
    for k in range(_SERIES_TERMS):
        total = total + term
        if derivative:
            dtotal = dtotal + (2 * k + mu) * term
        term = term * q / ((k + 1) * (k + 1 + mu))
    if derivative:
        return total, dtotal / x
    return total


def _asymptotic_coefficients(mu, n):
    # a_k(mu) = prod_{j<=k} (4 mu^2 - (2j-1)^2) / (k! 8^k)
    m = 4.0 * mu * mu
    a = np.empty(n)
    a[0] = 1.0
    for k in range(1, n):
        a[k] = a[k - 1] * (m - (2 * k - 1) ** 2) / (8.0 * k)
    return a


def _hankel_sum(mu, x, phase, derivative=False):
    """Optimally truncated sum_k phase^k a_k / x^k (and its x-derivative).

    phase = 1j gives the Hankel expansion on the real ray, phase = 1 the
    exponentially decaying expansion on the imaginary ray.
    """
    x = np.asarray(x, dtype=float)
    a = _asymptotic_coefficients(mu, _ASYMPTOTIC_TERMS)
    total = np.zeros(x.shape, dtype=complex)
    dtotal = np.zeros(x.shape, dtype=complex)
    live = np.ones(x.shape, dtype=bool)
    prev = np.full(x.shape, np.inf)
    for k in range(_ASYMPTOTIC_TERMS):
        term = (phase**k) * a[k] / x**k
        size = np.abs(term)
        # stop at the smallest term; the series is divergent beyond it
        live &= size < prev
        if not live.any():
            break
        total = np.where(live, total + term, total)
        if derivative:
            dtotal = np.where(live, dtotal - k * term / x, dtotal)
        prev = np.where(live, size, prev)
        live &= size > 1e-17 * np.abs(total)
    if derivative:
        return total, dtotal
    return total


def _bessel_j_asymptotic(mu, x):
    x = np.asarray(x, dtype=float)
    h = np.sqrt(2.0 / (np.pi * x)) * np.exp(1j * (x - 0.5 * mu * np.pi - 0.25 * np.pi))
    return (h * _hankel_sum(mu, x, 1j)).real


def bessel_j(nu, x):
    """Bessel function of the first kind J_nu(x) for real nu >= 0 and x > 0.

    Ascending series below CROSSOVER.  Above it the Hankel expansion supplies
    the two lowest orders frac(nu), frac(nu) + 1; higher orders follow by
    forward recurrence while the order stays below x and by a normalised
    backward (Miller) recurrence otherwise.
    """
    nu = float(nu)
    if nu < 0.0:
        raise ValueError("bessel_j requires nu >= 0")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0):
        raise ValueError("bessel_j requires x > 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)

    small = x < CROSSOVER
    if small.any():
        out[small] = _series_j(nu, x[small])
    big = ~small
    if big.any():
        out[big] = [_j_large(nu, xi) for xi in x[big]]
    return out[0] if scalar else out


def _j_large(nu, x):
    base = nu - math.floor(nu)
    steps = int(round(nu - base))
    if steps <= 1:
        return float(_bessel_j_asymptotic(base + steps, x))
    j_lo = float(_bessel_j_asymptotic(base, x))
    j_hi = float(_bessel_j_asymptotic(base + 1.0, x))
    # forward recurrence is stable while the order is below x
    forward = min(steps, max(1, int(math.floor(x - base))))
    order = base + 1.0
    for _ in range(forward - 1):
        j_lo, j_hi = j_hi, 2.0 * order / x * j_hi - j_lo
        order += 1.0
    if forward == steps:
        return j_hi
    # Miller: recur downward from well above nu, normalise at `order`
    top = steps + int(2 * math.sqrt(40.0 * nu)) + 40
    upper, current = 0.0, 1e-300
    at_nu = None
    for m in range(top, forward, -1):
        o = base + m
        upper, current = current, 2.0 * o / x * current - upper
        if m - 1 == steps:
            at_nu = current
        if abs(current) > 1e250:
            upper *= 1e-250
            current *= 1e-250
            if at_nu is not None:
                at_nu *= 1e-250
    return at_nu * j_hi / current


def _check_ray(ray):
    if ray not in ("real", "imag"):
        raise ValueError(f"ray must be 'real' or 'imag', got {ray!r}")


def _k_scaled(nu, t, derivative=False):
    """exp(t) K_nu(t) via the trapezoidal rule on the cosh integral.

    The integrand exp(-t (cosh u - 1)) cosh(nu u) is entire and decays doubly
    exponentially, so the trapezoidal rule converges geometrically in 1/h.
    """
    t = np.asarray(t, dtype=float)
    h = 0.1
    t_min = float(t.min())
    u_max = math.acosh(1.0 + 80.0 / t_min) + 2.0
    u = np.arange(0.0, u_max + h, h)
    w = np.full(u.shape, h)
    w[0] = 0.5 * h
    cu = np.cosh(u) - 1.0
    cnu = np.cosh(nu * u)
    e = np.exp(-np.multiply.outer(t, cu)) * cnu
    val = e @ w
    if derivative:
        return val, -(e * cu) @ w
    return val


def _jost_imag(nu, t, derivative=False):
    out = np.zeros(t.shape)
    dout = np.zeros(t.shape)
    near = t < _K_ASYMPTOTIC
    far = (~near) & (t <= T_MAX)
    if near.any():
        tn = t[near]
        ks, dks = _k_scaled(nu, tn, derivative=True)
        pref = np.sqrt(2.0 * tn / np.pi) * np.exp(-tn)
        out[near] = pref * ks
        dout[near] = pref * (ks / (2.0 * tn) - ks + dks)
    if far.any():
        tf = t[far]
        s, ds = _hankel_sum(nu, tf, 1.0, derivative=True)
        e = np.exp(-tf)
        out[far] = e * s.real
        dout[far] = e * (ds.real - s.real)
    if np.any(t > T_MAX):
        warnings.warn(
            f"f_nu(i t) flushed to zero for t > {T_MAX}", FlushedToZero, stacklevel=3
        )
    return (out, dout) if derivative else out


def _jost_real(nu, t, derivative=False):
    out = np.empty(t.shape, dtype=complex)
    dout = np.empty(t.shape, dtype=complex)
    near = t < CROSSOVER
    if near.any():
        tn = t[near]
        jm, djm = _series_j(-nu, tn, derivative=True)
        jp, djp = _series_j(nu, tn, derivative=True)
        denom = 1j * math.sin(nu * math.pi)
        rot = np.exp(-1j * nu * math.pi)
        h = (jm - rot * jp) / denom
        dh = (djm - rot * djp) / denom
        c = math.sqrt(math.pi / 2.0) * np.exp(1j * (0.25 + 0.5 * nu) * math.pi)
        st = np.sqrt(tn)
        out[near] = c * st * h
        dout[near] = c * (h / (2.0 * st) + st * dh)
    far = ~near
    if far.any():
        tf = t[far]
        s, ds = _hankel_sum(nu, tf, 1j, derivative=True)
        e = np.exp(1j * tf)
        out[far] = e * s
        dout[far] = e * (1j * s + ds)
    return (out, dout) if derivative else out


def _jost(nu, ray, t, derivative):
    nu = check_order(nu)
    _check_ray(ray)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ValueError("jost_f requires t > 0")
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    res = (_jost_real if ray == "real" else _jost_imag)(nu, t, derivative=True)
    val = res[1] if derivative else res[0]
    return val[0] if scalar else val


def jost_f(nu, ray, t):
    """f_nu(t) for ray='real' or f_nu(i t) for ray='imag', with t > 0.

    The imaginary-ray values are real.  Beyond T_MAX they underflow and are
    returned as 0 with a FlushedToZero warning.
    """
    return _jost(nu, ray, t, derivative=False)


def jost_f_derivative(nu, ray, t):
    """d/dt of jost_f(nu, ray, t), i.e. f'(t) on the real ray, d/dt f(i t) on the imaginary one."""
    return _jost(nu, ray, t, derivative=True)

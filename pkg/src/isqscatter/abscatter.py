"""Aharonov-Bohm scattering with two window channels.

For flux alpha (non-integer) the partial waves n = -floor(alpha) and
n = -floor(alpha) - 1 have |n + alpha| in (0, 1) and carry the window S-matrix
with their own (sgn g, k_n).  Every other partial wave has the regular-solution
phase S_n = -i exp(-i |n + alpha| pi).  Partial amplitudes are

    f_n(k) = (S_n(k) exp(i (|n| + 1/2) pi) - 1) / (i sqrt(k)),

and f(k, theta) = sum_n f_n(k) exp(i n theta) / sqrt(2 pi).
"""

import math
from dataclasses import dataclass

import numpy as np

from .riemann import SheetPoint, mv_pow
from .smatrix import IntermediateChannel, kappa0_from_g, norm_squared, pole_location, s_eval

__all__ = [
    "FluxConfig",
    "PartialWaveTable",
    "PoleCandidate",
    "ResonancePeak",
    "anomalous_channels",
    "background_amplitude",
    "channel_smatrix",
    "cross_section",
    "flux_config",
    "flux_config_from_g",
    "partial_amp",
    "partial_wave_table",
    "resonance_candidates",
    "resonance_scan",
    "total_amplitude",
    "trivial_partial_amp",
]


def anomalous_channels(alpha):
    """The two (n, |n + alpha|) pairs with |n + alpha| in (0, 1)."""
    alpha = float(alpha)
    if alpha == math.floor(alpha):
        raise ValueError(
            f"alpha = {alpha} is an integer: every |n + alpha| is an integer, no channel lies in (0, 1)"
        )
    n1 = -math.floor(alpha)
    n2 = n1 - 1
    return (n1, abs(n1 + alpha)), (n2, abs(n2 + alpha))


def _pair(x):
    if np.ndim(x) == 0:
        return (x, x)
    if len(x) != 2:
        raise ValueError("expected a scalar or a pair (one value per anomalous channel)")
    return tuple(x)


@dataclass(frozen=True)
class FluxConfig:
    alpha: float
    channels: tuple  # ((n, IntermediateChannel), (n, IntermediateChannel))

    def __post_init__(self):
        expected = anomalous_channels(self.alpha)
        if len(self.channels) != 2:
            raise ValueError("a flux configuration has exactly two anomalous channels")
        for (n, ch), (n_exp, nu_exp) in zip(self.channels, expected):
            if n != n_exp or abs(ch.nu - nu_exp) > 1e-12:
                raise ValueError(f"channel n={n} nu={ch.nu} does not match flux alpha={self.alpha}")

    @property
    def anomalous(self):
        return tuple(n for n, _ in self.channels)

    def channel(self, n):
        for m, ch in self.channels:
            if m == n:
                return ch
        return None


def flux_config(alpha, kappa=1.0, sgn_g=1):
    """FluxConfig with per-channel scales k_n and signs (scalars apply to both)."""
    chans = anomalous_channels(alpha)
    kap = _pair(kappa)
    sg = _pair(sgn_g)
    return FluxConfig(
        float(alpha),
        tuple((n, IntermediateChannel(nu, int(s), float(kp))) for (n, nu), kp, s in zip(chans, kap, sg)),
    )


def flux_config_from_g(alpha, g):
    """FluxConfig whose channel scales follow from boundary parameters g (scalar or pair)."""
    chans = anomalous_channels(alpha)
    return FluxConfig(float(alpha), tuple((n, kappa0_from_g(nu, gi)) for (n, nu), gi in zip(chans, _pair(g))))


def _point(k):
    if isinstance(k, SheetPoint):
        return k
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0):
        raise ValueError("k must be > 0")
    return SheetPoint(float(k) if k.ndim == 0 else k, 0.0 if k.ndim == 0 else np.zeros_like(k))


def channel_smatrix(cfg, n, k):
    """S-matrix of partial wave n at k (real > 0 or SheetPoint)."""
    ch = cfg.channel(n)
    if ch is not None:
        return s_eval(ch, k)
    kp = _point(k)
    val = -1j * np.exp(-1j * abs(n + cfg.alpha) * math.pi)
    return val * np.ones_like(np.asarray(kp.modulus), dtype=complex) if np.ndim(kp.modulus) else complex(val)


def partial_amp(cfg, n, k):
    """f_n(k) = (S_n exp(i(|n|+1/2) pi) - 1) / (i sqrt k); sqrt k follows the sheet of k."""
    kp = _point(k)
    s = channel_smatrix(cfg, n, kp)
    return (s * np.exp(1j * (abs(n) + 0.5) * math.pi) - 1.0) / (1j * mv_pow(kp, 0.5))


def trivial_partial_amp(alpha, n, k):
    """f_n with the regular-solution phase, for any n: (exp(i pi(|n| - |n+alpha|)) - 1)/(i sqrt k)."""
    return (np.exp(1j * math.pi * (abs(n) - abs(n + alpha))) - 1.0) / (1j * np.sqrt(k))


@dataclass(frozen=True)
class PartialWaveTable:
    k: float
    rows: tuple  # (n, S_n, f_n) per partial wave


def partial_wave_table(cfg, k, n_min=-10, n_max=10):
    """S_n and f_n at one real momentum for n_min <= n <= n_max."""
    if not k > 0:
        raise ValueError("k must be > 0")
    rows = tuple(
        (n, complex(channel_smatrix(cfg, n, k)), complex(partial_amp(cfg, n, k))) for n in range(n_min, n_max + 1)
    )
    return PartialWaveTable(float(k), rows)


def _check_theta(theta):
    theta = np.asarray(theta, dtype=float)
    if np.any(np.isclose(np.mod(theta + math.pi, 2 * math.pi) - math.pi, 0.0, atol=1e-12)):
        raise ValueError("forward direction theta = 0 (mod 2 pi) is excluded")
    return theta


def background_amplitude(alpha, k, theta):
    """Abel sum over all n of the regular-phase amplitudes f_n exp(i n theta)/sqrt(2 pi).

    With N = floor(alpha), the phase exp(i pi(|n| - |n+alpha|)) equals
    exp(-i pi alpha) for n >= -N and exp(+i pi alpha) for n <= -N - 1, so the
    series splits into two geometric tails.  Their Abel sums give

        sum_n exp(i pi(|n|-|n+alpha|)) e^{i n theta}
            = sin(pi alpha) exp(-i (N + 1/2) theta) / sin(theta/2),

    while the "-1" part sums to 2 pi delta(theta), absent for theta != 0.
    """
    theta = _check_theta(theta)
    k = np.asarray(k, dtype=float)
    big_n = math.floor(alpha)
    s = math.sin(math.pi * alpha) * np.exp(-1j * (big_n + 0.5) * theta) / np.sin(0.5 * theta)
    return s / (1j * np.sqrt(2 * math.pi * k))


def total_amplitude(cfg, k, theta):
    """Background plus the two anomalous corrections (f_n - f_n^regular) e^{i n theta}/sqrt(2 pi)."""
    theta = _check_theta(theta)
    out = background_amplitude(cfg.alpha, k, theta)
    for n, _ in cfg.channels:
        delta = partial_amp(cfg, n, k) - trivial_partial_amp(cfg.alpha, n, k)
        out = out + delta * np.exp(1j * n * theta) / math.sqrt(2 * math.pi)
    return out


def cross_section(cfg, k, theta):
    """Differential cross section |f(k, theta)|^2."""
    return np.abs(total_amplitude(cfg, k, theta)) ** 2


@dataclass(frozen=True)
class PoleCandidate:
    n: int
    ell: int
    nu: float
    location: SheetPoint
    k_projection: float
    width: float
    residue_abs: float


def resonance_candidates(cfg, threshold=0.2, sheet_aware=True, ell_range=(-3, 3)):
    """Ladder poles close to the positive real k axis.

    A pole at k = k_n exp(i a) projects onto k_n cos(a) with width
    k_n |sin(a)|.  It is a candidate if cos(a) > 0 and |sin(a)| < threshold.
    With sheet_aware the argument a itself must lie in (-pi/2, pi/2), i.e. on
    the physical sheet next to the real axis; otherwise only its direction is
    tested, modulo 2 pi.
    """
    out = []
    for n, ch in cfg.channels:
        if sheet_aware:
            # arguments pi/2 + (ell + shift) pi/nu inside (-pi/2, pi/2)
            shift = 0.0 if ch.sgn_g > 0 else 0.5
            lo = math.ceil(-ch.nu - shift)
            hi = math.floor(-shift)
            ells = range(lo, hi + 1)
        else:
            ells = range(ell_range[0], ell_range[1] + 1)
        for ell in ells:
            p = pole_location(ch, ell)
            a = p.argument
            if sheet_aware and not -0.5 * math.pi < a < 0.5 * math.pi:
                continue
            if math.cos(a) <= 0 or abs(math.sin(a)) >= threshold:
                continue
            out.append(
                PoleCandidate(
                    n, ell, ch.nu, p, ch.kappa0 * math.cos(a), ch.kappa0 * abs(math.sin(a)),
                    norm_squared(ch.nu, ch.kappa0) / math.sqrt(ch.kappa0),
                )
            )
    return out


@dataclass(frozen=True)
class ResonancePeak:
    k_peak: float
    height: float
    half_width: float | None
    matched_pole: tuple  # (n, ell)
    predicted_k: float
    predicted_width: float
    match_radius: float


def _half_width(k, y, i):
    half = 0.5 * y[i]

    def cross(step):
        j = i
        while 0 <= j + step < len(y) and y[j + step] > half:
            j += step
        if not 0 <= j + step < len(y):
            return None
        y0, y1 = y[j], y[j + step]
        return k[j] + (k[j + step] - k[j]) * (y0 - half) / (y0 - y1)

    left, right = cross(-1), cross(1)
    if left is None or right is None:
        return None
    return 0.5 * (right - left)


def resonance_scan(cfg, k_range, samples, threshold=0.2, sheet_aware=True):
    """Local maxima of sum over anomalous n of |f_n(k)|^2, matched to candidate poles.

    Returns one ResonancePeak per candidate pole whose projection lies in
    k_range, paired with the nearest local maximum; empty if there are none.
    """
    k_lo, k_hi = k_range
    if not 0 < k_lo < k_hi:
        raise ValueError("k_range must be positive and increasing")
    cands = [c for c in resonance_candidates(cfg, threshold, sheet_aware) if k_lo <= c.k_projection <= k_hi]
    if not cands:
        return []
    k = np.linspace(k_lo, k_hi, samples)
    y = sum(np.abs(partial_amp(cfg, n, k)) ** 2 for n in cfg.anomalous)
    peaks = np.flatnonzero((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:])) + 1
    out = []
    for c in cands:
        if peaks.size == 0:
            break
        i = int(peaks[np.argmin(np.abs(k[peaks] - c.k_projection))])
        out.append(
            ResonancePeak(
                float(k[i]), float(y[i]), _half_width(k, y, i), (c.n, c.ell),
                c.k_projection, c.width, float(abs(k[i] - c.k_projection)),
            )
        )
    return out

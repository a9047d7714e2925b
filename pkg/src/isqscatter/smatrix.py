"""Exact S-matrix of -d^2/dr^2 + lambda/r^2 on the half line, -1/4 < lambda < 3/4.

With nu = sqrt(lambda + 1/4) and the one-parameter boundary condition
labelled by g, the reflection amplitude is

    S(k) = -[(ik/k0)^(1/2-nu) - sgn(g) (ik/k0)^(1/2+nu)]
           / [(-ik/k0)^(1/2-nu) - sgn(g) (-ik/k0)^(1/2+nu)]

where k0 is fixed by |g|.  S is multivalued in k; here +-ik is the SheetPoint
k rotated by +-pi/2 with its argument carried along, so S(k exp(i pi/nu)) = S(k)
holds identically.
"""

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .riemann import SheetPoint, mv_pow, rotate, sheet_of
from .specfun import check_order, coeffs

__all__ = [
    "LAMBDA_LOWER",
    "LAMBDA_UPPER",
    "ConvergenceError",
    "IntermediateChannel",
    "Phase",
    "PhaseClass",
    "PoleEntry",
    "PoleLadder",
    "analytic_residue",
    "classify",
    "e_plane_ladder",
    "find_pole_numeric",
    "kappa0_from_g",
    "norm_squared",
    "pole_ladder_E",
    "pole_ladder_k",
    "pole_location",
    "residue_numeric",
    "s_eval",
    "s_eval_checked",
    "s_eval_trig_form",
]

LAMBDA_LOWER = Fraction(-1, 4)
LAMBDA_UPPER = Fraction(3, 4)
POLE_HIT = 1e-300


class Phase(enum.Enum):
    CSI = "CSI"
    DPI = "DPI"
    DSI = "DSI"
    CRITICAL_LOWER = "CRITICAL_LOWER"
    CRITICAL_UPPER = "CRITICAL_UPPER"


@dataclass(frozen=True)
class PhaseClass:
    tag: Phase
    exponent: float | None = None


def classify(lam):
    """Scale-symmetry phase of the coupling lambda.

    DPI carries nu = sqrt(lambda + 1/4) in (0, 1); DSI carries sqrt(-1/4 - lambda).
    """
    q = Fraction(lam)
    if q == LAMBDA_LOWER:
        return PhaseClass(Phase.CRITICAL_LOWER)
    if q == LAMBDA_UPPER:
        return PhaseClass(Phase.CRITICAL_UPPER)
    if q > LAMBDA_UPPER:
        return PhaseClass(Phase.CSI)
    if q > LAMBDA_LOWER:
        return PhaseClass(Phase.DPI, math.sqrt(float(q - LAMBDA_LOWER)))
    return PhaseClass(Phase.DSI, math.sqrt(float(LAMBDA_LOWER - q)))


@dataclass(frozen=True)
class IntermediateChannel:
    """One window channel: order nu, sign of g, and the scale k0 > 0."""

    nu: float
    sgn_g: int
    kappa0: float

    def __post_init__(self):
        check_order(self.nu)
        if self.sgn_g not in (1, -1):
            raise ValueError("sgn_g must be +1 or -1")
        if not (self.kappa0 > 0.0 and math.isfinite(self.kappa0)):
            raise ValueError("kappa0 must be a finite positive number")


def kappa0_from_g(nu, g):
    """Channel for boundary parameter g: k0 = (A_nu / (2 nu B_nu |g|))^(1/(2 nu))."""
    nu = check_order(nu)
    g = float(g)
    if g == 0.0:
        raise ValueError("g = 0 is the Dirichlet-type limit outside the parametrised family")
    a, b = coeffs(nu)
    kappa0 = (a / (2.0 * nu * b * abs(g))) ** (1.0 / (2.0 * nu))
    return IntermediateChannel(nu, 1 if g > 0 else -1, kappa0)


def _as_point(k):
    if isinstance(k, SheetPoint):
        return k
    k = np.asarray(k, dtype=float)
    if np.any(k <= 0.0):
        raise ValueError("real momenta must be > 0; pass a SheetPoint for other directions")
    return SheetPoint(float(k) if k.ndim == 0 else k, 0.0 if k.ndim == 0 else np.zeros_like(k))


def _bracket(ch, w):
    # w^(1/2-nu) - sgn(g) w^(1/2+nu)
    return mv_pow(w, 0.5 - ch.nu) - ch.sgn_g * mv_pow(w, 0.5 + ch.nu)


def _plus_minus(ch, k, branch):
    k = _as_point(k).scaled(1.0 / ch.kappa0)
    wp = rotate(k, 0.5 * np.pi)
    wm = rotate(k, -0.5 * np.pi)
    if branch == "physical":
        # each of +-ik/k0 pulled back onto sheet 0 of its own power
        wp = rotate(wp, -2.0 * np.pi * sheet_of(wp))
        wm = rotate(wm, -2.0 * np.pi * sheet_of(wm))
    elif branch != "continued":
        raise ValueError("branch must be 'continued' or 'physical'")
    return wp, wm


def s_eval_checked(ch, k, branch="continued"):
    """Return (S, pole_hit).  Where pole_hit is True the value is nan.

    branch='continued' carries the argument of k through +-ik (analytic
    continuation, used for poles and the phase symmetry).  branch='physical'
    reduces +-ik/k0 separately onto the physical sheet; on the real line both
    agree for k > 0, and the physical branch realises conj(S(k)) = S(-k).
    """
    wp, wm = _plus_minus(ch, k, branch)
    num = _bracket(ch, wp)
    den = _bracket(ch, wm)
    hit = np.abs(den) < POLE_HIT
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(hit, complex(np.nan, np.nan), -num / np.where(hit, 1.0, den))
    if np.ndim(s) == 0:
        return complex(s), bool(hit)
    return s, hit


def s_eval(ch, k, branch="continued"):
    """S-matrix at k (positive real float/array, or SheetPoint)."""
    return s_eval_checked(ch, k, branch)[0]


def s_eval_trig_form(ch, k, branch="continued"):
    """Same S written with sin (g > 0) or cos (g < 0) of i nu log(+-ik/k0)."""
    wp, wm = _plus_minus(ch, k, branch)
    trig = np.sin if ch.sgn_g > 0 else np.cos
    num = mv_pow(wp, 0.5) * trig(1j * ch.nu * wp.log)
    den = mv_pow(wm, 0.5) * trig(1j * ch.nu * wm.log)
    out = -num / den
    return complex(out) if np.ndim(out) == 0 else out


def norm_squared(nu, kappa):
    """|N_kappa|^2 = kappa sin(nu pi) / nu."""
    return kappa * math.sin(nu * math.pi) / nu


def pole_location(ch, n):
    """k-plane pole n: argument pi/2 + n pi/nu (g > 0) or pi/2 + (n + 1/2) pi/nu (g < 0)."""
    shift = n if ch.sgn_g > 0 else n + 0.5
    return SheetPoint(ch.kappa0, 0.5 * math.pi + shift * math.pi / ch.nu)


def analytic_residue(ch, n):
    """Residue of S at pole n: i |N_k0|^2 exp(i theta_n) = |N_k0|^2 k_n / k0."""
    k = pole_location(ch, n)
    return complex(norm_squared(ch.nu, ch.kappa0) * k.to_complex() / ch.kappa0)


@dataclass(frozen=True)
class PoleEntry:
    n: int
    location: SheetPoint
    residue: complex | None
    sheet: int


@dataclass
class PoleLadder:
    plane: str
    entries: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def pole_ladder_k(ch, n_min, n_max):
    """Circular ladder of simple poles |k| = k0 with their residues and sheets."""
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    out = PoleLadder("k")
    for n in range(n_min, n_max + 1):
        k = pole_location(ch, n)
        out.entries.append(PoleEntry(n, k, analytic_residue(ch, n), sheet_of(k)))
    return out


def _e_sheet(argument):
    # E = k^2 doubles the k-plane bands: sheet 0 is -pi <= arg E < 3 pi
    return int(math.floor((argument + math.pi) / (4.0 * math.pi)))


def pole_ladder_E(phase, E0, n_min, n_max):
    """Energy-plane ladder: geometric (DSI) or circular (DPI) around E0.

    DSI: E_n = E0 exp(-2 n pi / sqrt(-1/4 - lambda)), all on the principal sheet.
    DPI: E_n = E0 exp(2 i n pi / nu), the argument accumulating across sheets.
    """
    if phase.tag not in (Phase.DSI, Phase.DPI):
        raise ValueError(f"no energy scale, hence no pole ladder, in phase {phase.tag.value}")
    if E0 == 0:
        raise ValueError("E0 must be nonzero")
    if n_min > n_max:
        raise ValueError("n_min must not exceed n_max")
    E0 = complex(E0)
    base = SheetPoint.from_complex(E0)
    arg0 = float(np.angle(E0))
    out = PoleLadder("E")
    for n in range(n_min, n_max + 1):
        if phase.tag is Phase.DSI:
            loc = SheetPoint(base.modulus * math.exp(-2.0 * n * math.pi / phase.exponent), arg0)
        else:
            loc = SheetPoint(base.modulus, arg0 + 2.0 * n * math.pi / phase.exponent)
        out.entries.append(PoleEntry(n, loc, None, _e_sheet(loc.argument)))
    return out


def e_plane_ladder(ch, n_min, n_max):
    """Energy images E_n = k_n^2 of the k ladder; residues map as Res_E = 2 k_n Res_k."""
    out = PoleLadder("E")
    for e in pole_ladder_k(ch, n_min, n_max):
        loc = SheetPoint(e.location.modulus**2, 2.0 * e.location.argument)
        res = 2.0 * e.location.to_complex() * e.residue
        out.entries.append(PoleEntry(e.n, loc, complex(res), _e_sheet(loc.argument)))
    return out


class ConvergenceError(RuntimeError):
    def __init__(self, message, last):
        super().__init__(message)
        self.last = last


def find_pole_numeric(ch, seed, tol=1e-13, max_iter=60):
    """Newton iteration on the denominator of S, starting from a SheetPoint seed.

    Each step is lifted continuously from the previous iterate, so the
    result stays on the sheet the seed started on.  Converges from
    |seed - pole| < 0.3 k0.
    """
    k = seed
    for _ in range(max_iter):
        w = rotate(k, -0.5 * np.pi).scaled(1.0 / ch.kappa0)
        lo = mv_pow(w, 0.5 - ch.nu)
        hi = ch.sgn_g * mv_pow(w, 0.5 + ch.nu)
        d = lo - hi
        dd = ((0.5 - ch.nu) * lo - (0.5 + ch.nu) * hi) / k.to_complex()
        step = d / dd
        kc = k.to_complex() - step
        if kc == 0:
            break
        k = SheetPoint.near(kc, k)
        if abs(step) <= tol * ch.kappa0:
            return k
    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations", k)


def residue_numeric(ch, pole, radius=1e-3, nodes=256):
    """(1/2 pi i) times the contour integral of S around the pole.

    Trapezoidal rule on a circle of radius `radius * k0`.  Contour points
    are lifted relative to the pole, so the circle never crosses a cut.
    """
    rho = radius * ch.kappa0
    phi = 2.0 * np.pi * np.arange(nodes) / nodes
    ring = rho * np.exp(1j * phi)
    pts = SheetPoint.near(pole.to_complex() + ring, pole)
    s = s_eval(ch, pts)
    return complex(np.mean(s * ring))

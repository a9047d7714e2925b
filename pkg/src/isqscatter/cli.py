"""Command-line interface: every computation as reproducible JSON or CSV.

    isq-scatter classify --lambda -1/4
    isq-scatter smatrix --nu 0.3 --g 1 --k-min 0.1 --k-max 10 --k-steps 50
    isq-scatter poles --nu 0.7071067811865476 --g 1 --n-min -3 --n-max 3 --plane k
    isq-scatter spectrum-verify --nu 0.3 --g 1
    isq-scatter ab-amplitude --alpha 0.3 --kappa 1 --kappa 2 --k 1 --theta-steps 90
    isq-scatter ab-cross-section --alpha 0.3 --k-min 0.5 --k-max 2 --k-steps 4
    isq-scatter resonance-scan --alpha 0.01 --g -1 --k-min 0.5 --k-max 1.5
    isq-scatter reduce --masses 1 1 1 --alpha 0.3

JSON output is {"command", "params", "rows", "checks"}; each check carries
name, value, tolerance and pass.  The exit status is 0 when every check
passes, 10 + i for the first failing check i, and 2 for bad input.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from . import abscatter, fewbody, smatrix, spectral
from .riemann import SheetPoint

__all__ = ["build_parser", "main", "run"]

THETA_CLAMP = 1e-3
CSV_DIGITS = 12

DEFAULTS = {
    "nu": None,
    "g": None,
    "lambda": None,
    "alpha": None,
    "kappa": None,
    "k": None,
    "k_min": 0.1,
    "k_max": 10.0,
    "k_steps": 50,
    "theta_steps": 90,
    "sheet": 0,
    "n_min": -3,
    "n_max": 3,
    "plane": "k",
    "format": "json",
    "out": None,
    "masses": None,
    "mu0": None,
    "control_g": None,
}


class UsageError(ValueError):
    pass


def _threads():
    raw = os.environ.get("ISQ_SCATTER_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"ISQ_SCATTER_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _pmap(fn, items):
    """Map over items with at most ISQ_SCATTER_THREADS workers, keeping input order."""
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _chunks(arr, n):
    return np.array_split(np.asarray(arr), max(1, min(n, len(arr))))


def _grid_eval(fn, grid):
    # evaluate a vectorised fn on chunks; concatenation restores input order
    parts = _pmap(fn, _chunks(grid, _threads()))
    return np.concatenate(parts)


# ---------------------------------------------------------------- parameters


def _nu(p):
    if p["nu"] is not None:
        return float(p["nu"])
    if p["lambda"] is not None:
        cls = smatrix.classify(Fraction(str(p["lambda"])))
        if cls.tag is not smatrix.Phase.DPI:
            raise UsageError(f"lambda = {p['lambda']} is in phase {cls.tag.value}, not the intermediate window")
        return cls.exponent
    raise UsageError("--nu (or --lambda) is required")


def _channel(p, nu, g=None, kappa=None):
    g = p["g"][0] if g is None and p["g"] else g
    kappa = p["kappa"][0] if kappa is None and p["kappa"] else kappa
    if kappa is not None:
        sgn = 1 if g is None or g > 0 else -1
        return smatrix.IntermediateChannel(nu, sgn, float(kappa))
    return smatrix.kappa0_from_g(nu, 1.0 if g is None else g)


def _pair_param(values, name):
    if not values:
        return None
    if len(values) > 2:
        raise UsageError(f"--{name} takes at most two values (one per anomalous channel)")
    return values if len(values) == 2 else values * 2


def _flux(p):
    if p["alpha"] is None:
        raise UsageError("--alpha is required")
    alpha = float(p["alpha"])
    gs = _pair_param(p["g"], "g")
    ks = _pair_param(p["kappa"], "kappa")
    if ks is None:
        if gs is None:
            return abscatter.flux_config(alpha)
        return abscatter.flux_config_from_g(alpha, gs)
    sg = [1, 1] if gs is None else [1 if g > 0 else -1 for g in gs]
    return abscatter.flux_config(alpha, ks, sg)


def _k_grid(p):
    if p["k"] is not None:
        return np.array([float(p["k"])])
    lo, hi, n = float(p["k_min"]), float(p["k_max"]), int(p["k_steps"])
    if not 0 < lo <= hi or n < 1:
        raise UsageError("need 0 < k-min <= k-max and k-steps >= 1")
    return np.geomspace(lo, hi, n) if n > 1 else np.array([lo])


def _theta_grid(p):
    n = int(p["theta_steps"])
    if n < 1:
        raise UsageError("--theta-steps must be >= 1")
    th = np.linspace(0.0, 2.0 * math.pi, n + 2)[1:-1] if n > 1 else np.array([math.pi])
    return np.clip(th, THETA_CLAMP, 2.0 * math.pi - THETA_CLAMP)


def _channel_params(ch):
    return {"nu": ch.nu, "sgn_g": ch.sgn_g, "kappa0": ch.kappa0}


def _flux_params(cfg):
    return {
        "alpha": cfg.alpha,
        "anomalous": [dict(n=n, **_channel_params(ch)) for n, ch in cfg.channels],
    }


def _check(name, value, tolerance, passed=None):
    if passed is None:
        passed = bool(value <= tolerance)
    return {"name": name, "value": value, "tolerance": tolerance, "pass": bool(passed)}


# ---------------------------------------------------------------- commands


def cmd_classify(p):
    if p["lambda"] is None:
        raise UsageError("--lambda is required")
    lam = Fraction(str(p["lambda"]))
    cls = smatrix.classify(lam)
    row = {"lambda": str(lam), "phase": cls.tag.value, "exponent": cls.exponent}
    return {"lambda": str(lam)}, [row], []


def cmd_smatrix(p):
    nu = _nu(p)
    ch = _channel(p, nu)
    ks = _k_grid(p)
    sheet = int(p["sheet"])

    def block(kb):
        pt = SheetPoint(kb, np.full(kb.shape, 2.0 * math.pi * sheet))
        s, hit = smatrix.s_eval_checked(ch, pt)
        return np.stack([s, hit.astype(complex)], axis=1)

    res = _grid_eval(block, ks)
    rows = []
    for k, (s, hit) in zip(ks, res):
        rows.append(
            {
                "k": float(k),
                "re_S": s.real,
                "im_S": s.imag,
                "abs_S": abs(s),
                "arg_S": math.atan2(s.imag, s.real),
                "pole_hit": bool(hit.real),
            }
        )
    checks = []
    if sheet == 0:
        dev = max(abs(abs(r["abs_S"]) - 1.0) for r in rows if not r["pole_hit"])
        checks.append(_check("unitarity", dev, 1e-11))
    params = {"sheet": sheet, **_channel_params(ch)}
    return params, rows, checks


def cmd_poles(p):
    nu = _nu(p)
    ch = _channel(p, nu)
    n_min, n_max = int(p["n_min"]), int(p["n_max"])
    plane = p["plane"]
    if plane not in ("k", "E"):
        raise UsageError("--plane must be k or E")
    ladder = smatrix.pole_ladder_k(ch, n_min, n_max)
    e_ladder = smatrix.e_plane_ladder(ch, n_min, n_max) if plane == "E" else None

    def refine(entry):
        root = smatrix.find_pole_numeric(ch, entry.location)
        res = smatrix.residue_numeric(ch, root)
        return root, res

    refined = _pmap(refine, list(ladder))
    rows = []
    pos_err = res_err = 0.0
    for i, (entry, (root, res)) in enumerate(zip(ladder, refined)):
        pos_err = max(pos_err, abs(root.to_complex() - entry.location.to_complex()) / ch.kappa0)
        res_err = max(res_err, abs(res - entry.residue) / abs(entry.residue))
        e = e_ladder.entries[i] if e_ladder is not None else entry
        z = e.location.to_complex()
        rows.append(
            {
                "n": entry.n,
                "modulus": e.location.modulus,
                "argument": e.location.argument,
                "argument_over_pi": e.location.argument / math.pi,
                "re": z.real,
                "im": z.imag,
                "residue_re": e.residue.real,
                "residue_im": e.residue.imag,
                "sheet": e.sheet,
            }
        )
    checks = [
        _check("newton_vs_analytic_pole", pos_err, 1e-10),
        _check("contour_vs_analytic_residue", res_err, 1e-6),
    ]
    return {"plane": plane, **_channel_params(ch)}, rows, checks


def cmd_spectrum_verify(p):
    nu = _nu(p)
    ch = _channel(p, nu)
    checks = []
    rows = []
    if ch.sgn_g > 0:
        b = spectral.BoundState(ch)
        norm = spectral.bound_norm_quadrature(b)
        checks.append(_check("bound_norm", abs(norm - 1.0), 1e-6))
        scatt = ch if p["control_g"] is None else smatrix.kappa0_from_g(nu, float(p["control_g"]))
        orth = spectral.verify_orthogonality_bound_scatt(ch, scatt_channel=scatt)
        for k, ov in orth.overlaps.items():
            rows.append({"test": "orthogonality", "k_over_kappa0": k / ch.kappa0, "value": abs(ov)})
        checks.append(_check("orthogonality_bound_scatt", orth.max_abs, orth.tolerance))
    on = spectral.verify_scatt_orthonormality(ch, 1.0 * ch.kappa0, 1.3 * ch.kappa0)
    rows.append({"test": "packet_diagonal_ratio", "k_over_kappa0": 1.0, "value": on.ratio})
    rows.append({"test": "packet_offdiagonal", "k_over_kappa0": 1.3, "value": on.relative_offdiagonal})
    checks.append(_check("packet_diagonal_ratio", abs(on.ratio - 1.0), 1e-4))
    checks.append(_check("packet_offdiagonal", on.relative_offdiagonal, 1e-6))

    r0, width = 3.0 / ch.kappa0, 0.5 / ch.kappa0

    def gauss(r):
        return np.exp(-0.5 * ((r - r0) / width) ** 2)

    grid = spectral.QuadratureGrid(1e-12 / ch.kappa0, 7.0 / ch.kappa0, 28, 24, 0.5 / ch.kappa0)
    k_maxes = (5.0, 10.0, 20.0)
    errs = _pmap(
        lambda km: spectral.verify_completeness(ch, gauss, km * ch.kappa0, grid).error, k_maxes
    )
    for km, e in zip(k_maxes, errs):
        rows.append({"test": "completeness", "k_over_kappa0": km, "value": e})
    checks.append(_check("completeness_error", errs[-1], 1e-4))
    checks.append(_check("completeness_monotone", float(np.max(np.diff(errs))), 0.0, bool(np.all(np.diff(errs) < 0))))
    params = _channel_params(ch)
    if p["control_g"] is not None:
        params["control_g"] = float(p["control_g"])
    return params, rows, checks


def _amplitude_rows(cfg, ks, thetas, cross):
    def one(k):
        f = abscatter.total_amplitude(cfg, k, thetas)
        out = []
        for t, fv in zip(thetas, f):
            row = {"k": float(k), "theta": float(t)}
            if cross:
                row["dsigma"] = abs(fv) ** 2
            else:
                row.update(re_f=fv.real, im_f=fv.imag, abs_f=abs(fv))
            out.append(row)
        return out

    return [r for block in _pmap(one, ks) for r in block]


def _channel_unitarity(cfg, ks):
    dev = 0.0
    for n in cfg.anomalous:
        dev = max(dev, float(np.max(np.abs(np.abs(abscatter.channel_smatrix(cfg, n, ks)) - 1.0))))
    return _check("anomalous_unitarity", dev, 1e-11)


def cmd_ab_amplitude(p):
    cfg = _flux(p)
    ks = _k_grid(p)
    th = _theta_grid(p)
    rows = _amplitude_rows(cfg, ks, th, cross=False)
    params = {**_flux_params(cfg), "theta_clamp": THETA_CLAMP}
    return params, rows, [_channel_unitarity(cfg, ks)]


def cmd_ab_cross_section(p):
    cfg = _flux(p)
    ks = _k_grid(p)
    th = _theta_grid(p)
    rows = _amplitude_rows(cfg, ks, th, cross=True)
    params = {**_flux_params(cfg), "theta_clamp": THETA_CLAMP}
    neg = min(r["dsigma"] for r in rows)
    return params, rows, [_channel_unitarity(cfg, ks), _check("nonnegative", -neg, 0.0)]


def cmd_resonance_scan(p):
    cfg = _flux(p)
    lo, hi = float(p["k_min"]), float(p["k_max"])
    samples = max(int(p["k_steps"]), 2001)
    peaks = abscatter.resonance_scan(cfg, (lo, hi), samples)
    rows = []
    checks = []
    for pk in peaks:
        rows.append(
            {
                "n": pk.matched_pole[0],
                "ell": pk.matched_pole[1],
                "k_peak": pk.k_peak,
                "height": pk.height,
                "half_width": pk.half_width,
                "predicted_k": pk.predicted_k,
                "predicted_width": pk.predicted_width,
                "match_radius": pk.match_radius,
            }
        )
        checks.append(
            _check(f"peak_location_n{pk.matched_pole[0]}_l{pk.matched_pole[1]}", pk.match_radius / pk.predicted_k, 0.02)
        )
    params = {**_flux_params(cfg), "k_min": lo, "k_max": hi, "samples": samples}
    return params, rows, checks


def cmd_reduce(p):
    masses = p["masses"]
    if not masses or len(masses) not in (2, 3):
        raise UsageError("--masses takes two or three positive values")
    if len(masses) == 2:
        m = fewbody.TwoBodyMasses(*masses)
        red = fewbody.reduce_two_body(m)
    else:
        m = fewbody.ThreeBodyMasses(*masses, mu0=p["mu0"])
        red = fewbody.reduce_three_body(m)
    fwd, bwd = red.jacobi_forward, red.jacobi_backward
    eye = np.eye(len(fwd))
    round_trip = float(max(np.abs(fwd @ bwd - eye).max(), np.abs(bwd @ fwd - eye).max()))
    congr = fwd @ np.diag(1.0 / np.asarray(masses, dtype=float)) @ fwd.T
    congr_err = float(np.abs(congr - np.diag(1.0 / np.asarray(red.reduced_masses))).max())
    row = {
        "bodies": len(masses),
        "reduced_masses": list(red.reduced_masses),
        "kinetic_prefactor": red.kinetic_prefactor,
        "mu_ref": red.mu_ref,
        "mu0_defaulted": red.mu0_defaulted,
        "polar_scaling": None if red.polar_scaling is None else list(red.polar_scaling),
        "jacobi_forward": fwd.tolist(),
        "jacobi_backward": bwd.tolist(),
    }
    checks = [_check("jacobi_round_trip", round_trip, 1e-14), _check("kinetic_congruence", congr_err, 1e-14)]
    if red.polar_scaling is not None:
        s_inv = np.diag(1.0 / np.asarray(red.polar_scaling))
        iso = s_inv @ np.diag(1.0 / np.asarray(red.reduced_masses[:2])) @ s_inv.T
        checks.append(_check("polar_isotropy", float(np.abs(iso * red.mu_ref - np.eye(2)).max()), 1e-14))
    params = {"masses": list(masses), "mu0": red.mu_ref if len(masses) == 3 else None}
    if p["alpha"] is not None:
        cfg, _ = fewbody.effective_channel(m, float(p["alpha"]))
        same = cfg == abscatter.flux_config(float(p["alpha"]))
        row["effective"] = _flux_params(cfg)
        checks.append(_check("effective_equals_one_body", 0.0 if same else 1.0, 0.0, same))
    return params, [row], checks


COMMANDS = {
    "classify": cmd_classify,
    "smatrix": cmd_smatrix,
    "poles": cmd_poles,
    "spectrum-verify": cmd_spectrum_verify,
    "ab-amplitude": cmd_ab_amplitude,
    "ab-cross-section": cmd_ab_cross_section,
    "resonance-scan": cmd_resonance_scan,
    "reduce": cmd_reduce,
}


# ---------------------------------------------------------------- output


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def render_json(doc):
    return json.dumps(_clean(doc), indent=2) + "\n"


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return format(v, f".{CSV_DIGITS}g")
    if isinstance(v, (list, dict)):
        return json.dumps(v)
    return str(v)


def render_csv(doc):
    rows = _clean(doc["rows"])
    buf = io.StringIO()
    if rows:
        header = list(rows[0])
        for r in rows[1:]:
            header += [k for k in r if k not in header]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_csv_cell(r.get(k)) for k in header])
    return buf.getvalue()


# ---------------------------------------------------------------- driver


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nu", type=float)
    common.add_argument("--g", type=float, action="append", help="boundary parameter; repeat for two AB channels")
    common.add_argument("--lambda", dest="lambda", help="coupling, exact fractions such as -1/4 allowed")
    common.add_argument("--alpha", type=float)
    common.add_argument("--kappa", type=float, action="append", help="channel scale; repeat for two AB channels")
    common.add_argument("--k", type=float)
    common.add_argument("--k-min", type=float)
    common.add_argument("--k-max", type=float)
    common.add_argument("--k-steps", type=int)
    common.add_argument("--theta-steps", type=int)
    common.add_argument("--sheet", type=int)
    common.add_argument("--n-min", type=int)
    common.add_argument("--n-max", type=int)
    common.add_argument("--plane", choices=["k", "E"])
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out")
    common.add_argument("--config", help="JSON file of parameters; flags override it")
    common.add_argument("--masses", type=float, nargs="+")
    common.add_argument("--mu0", type=float)
    common.add_argument("--control-g", type=float, help="mismatched g for the negative control")

    parser = argparse.ArgumentParser(prog="isq-scatter", description="Inverse-square scattering toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _merge(args):
    p = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        for key, val in cfg.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {key!r}")
            if key in ("g", "kappa") and val is not None and not isinstance(val, list):
                val = [val]
            p[key] = val
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            p[key] = val
    return p


_VALUE_FLAGS = ("--lambda", "--nu", "--g", "--alpha", "--kappa", "--k", "--control-g")


def _glue_negative(argv):
    # "--lambda -1/4" would otherwise be read as an unknown option
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and len(nxt) > 1 and (nxt[1].isdigit() or nxt[1] == "."):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
        else:
            out.append(tok)
    return out


def run(argv):
    """Run one command; returns (text, output path or None, exit code)."""
    args = build_parser().parse_args(_glue_negative(list(argv)))
    p = _merge(args)
    params, rows, checks = COMMANDS[args.command](p)
    doc = {"command": args.command, "params": params, "rows": rows, "checks": checks}
    text = render_csv(doc) if p["format"] == "csv" else render_json(doc)
    code = 0
    for i, c in enumerate(checks):
        if not c["pass"]:
            code = 10 + i
            break
    return text, p["out"], code


def main(argv=None):
    try:
        text, out, code = run(sys.argv[1:] if argv is None else argv)
    except (UsageError, ValueError, OSError) as exc:
        print(f"isq-scatter: error: {exc}", file=sys.stderr)
        return 2
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Single-point reports, spectra tables and two-parameter sweeps.

Outputs are deterministic: floats are written as their shortest
round-trip representation and cells are always emitted in row-major
order, whatever the number of worker processes.
"""

import csv
import io
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import covariance as cov_mod
from .config import SPECTRUM_QUANTITIES
from .covariance import conditional_state, covariance_appendix, covariance_main, covariance_quadrature
from .entanglement import gie_point
from .errors import ConfigError, OptoFilterError, UnreachableTarget
from .filter import frequency_grid, spectrum_conditional, spectrum_unconditional
from .params import HBAR, K_B, derive, measurement_coeffs, filter_params
from .squeezing import condition_factor, optimal_angle, squeeze_report


def fmt(x):
    return repr(float(x))


def dumps(doc):
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def error_status(exc):
    if isinstance(exc, OptoFilterError):
        return f"{exc.status}:{exc.code}"
    return "undefined:invalid_params"


# --- parameter assignment -------------------------------------------------


def solve_power_for_xi(p, xi):
    """P_in giving measurement strength ``xi`` with everything else fixed."""
    denom = p.kappa - xi * p.Delta
    if xi <= 0 or denom <= 0:
        raise UnreachableTarget(f"xi = {xi:g} is unreachable (needs xi > 0 and xi Delta < kappa)")
    k2 = p.kappa**2 + 4.0 * p.Delta**2
    spring = xi * p.Omega_bare**2 / denom  # 16 g^2 Omega / (kappa^2 + 4 Delta^2)
    g2 = spring * k2 / (16.0 * p.Omega_bare)
    return g2 * p.m * p.Omega_bare * p.ell**2 * k2 / (p.omega_c * p.kappa)


def solve_temperature_for_noise(p, thermal_noise):
    """T giving 2 gamma_m (2 n_th + 1) / omega_m = ``thermal_noise``."""
    d = derive(p, warn=False)
    n_th = 0.5 * (thermal_noise * d.omega_m / (2.0 * p.gamma_m) - 1.0)
    if n_th < 0:
        raise UnreachableTarget(
            f"thermal noise {thermal_noise:g} is below the zero-temperature floor {2 * p.gamma_m / d.omega_m:g}"
        )
    return n_th * HBAR * d.omega_m * p.gamma_m / (K_B * p.Gamma_bare)


def apply_assignments(base, assignments, theta_opt=False):
    """Set sweep values (SI units) on ``base``; derived targets are solved for last."""
    direct = {k: v for k, v in assignments.items() if k not in ("Delta_over_kappa", "xi", "thermal_noise", "theta")}
    p = base.replace(**direct) if direct else base
    if "Delta_over_kappa" in assignments:
        p = p.replace(Delta=assignments["Delta_over_kappa"] * p.kappa)
    if "xi" in assignments:
        p = p.replace(P_in=solve_power_for_xi(p, assignments["xi"]))
    if "thermal_noise" in assignments:
        p = p.replace(T=solve_temperature_for_noise(p, assignments["thermal_noise"]))
    if "theta" in assignments:
        p = p.replace(theta=assignments["theta"])
    elif theta_opt:
        d = derive(p, warn=False)
        p = p.replace(theta=optimal_angle(d.zeta, d.alpha))
    return p


# --- point evaluation -----------------------------------------------------


def evaluate_point(p, outputs, delta=None, frame="mirror"):
    """Evaluate each requested quantity at ``p``; returns {name: (value or None, status)}."""
    cache = {}

    def state():
        if "state" not in cache:
            cache["state"] = conditional_state(p)
        return cache["state"]

    def negativity():
        if "neg" not in cache:
            cache["neg"] = gie_point(p, delta, frame=frame)
        return cache["neg"]

    getters = {
        "Vqq": lambda: state().cov.V_qq,
        "Vqp": lambda: state().cov.V_qp,
        "Vpp": lambda: state().cov.V_pp,
        "purity": lambda: cov_mod.purity(state().cov),
        "omega_theta": lambda: state().filter.omega_theta,
        "gamma_theta": lambda: state().filter.gamma_theta,
        "omega_ratio": lambda: state().filter.omega_theta / state().derived.omega_m,
        "theta_opt": lambda: optimal_angle(*(lambda d: (d.zeta, d.alpha))(derive(p, warn=False))),
        "EN": lambda: negativity().E_N,
        "nu_minus": lambda: negativity().nu_minus,
        "condition_factor": lambda: condition_factor(p),
    }
    result = {}
    for q in outputs:
        try:
            value = float(getters[q]())
        except (OptoFilterError, ValueError, ZeroDivisionError) as exc:
            result[q] = (None, error_status(exc))
            continue
        if not math.isfinite(value):
            result[q] = (None, "undefined:non_finite")
        else:
            result[q] = (value, "ok")
    return result


# --- sweeps ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepGrid:
    axis1: object
    axis2: object
    values1: tuple
    values2: tuple
    outputs: tuple
    cells: tuple  # row-major; each cell maps quantity -> (value, status)
    overlay: tuple = ()  # (axis value, theta_opt or None, status)

    def cell(self, i, j):
        return self.cells[i * len(self.values2) + j]

    def array(self, quantity):
        """(count1, count2) array of a quantity with NaN at non-ok cells."""
        out = np.full((len(self.values1), len(self.values2)), np.nan)
        for k, cell in enumerate(self.cells):
            value, status = cell[quantity]
            if status == "ok":
                out[divmod(k, len(self.values2))] = value
        return out

    def status(self, quantity):
        return np.array([cell[quantity][1] for cell in self.cells]).reshape(len(self.values1), len(self.values2))


def _validate_point_outputs(cfg, outputs):
    bad = [q for q in outputs if q in SPECTRUM_QUANTITIES]
    if bad:
        raise ConfigError(f"spectral quantities {', '.join(bad)} are not available in this mode")
    if any(q in ("EN", "nu_minus") for q in outputs) and cfg.delta is None:
        raise ConfigError("EN / nu_minus need the gravitational coupling 'delta'")


def _sweep_row(args):
    base, theta_opt, name1, v1, name2, values2, outputs, delta, frame = args
    row = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for v2 in values2:
            try:
                p = apply_assignments(base, {name1: v1, name2: v2}, theta_opt)
            except (OptoFilterError, ValueError) as exc:
                status = error_status(exc)
                row.append({q: (None, status) for q in outputs})
                continue
            row.append(evaluate_point(p, outputs, delta, frame))
    return row


def _overlay(cfg):
    axes = cfg.axes
    if not cfg.overlay or not any(a.name == "theta" for a in axes):
        return ()
    other = axes[0] if axes[1].name == "theta" else axes[1]
    series = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for v in other.values():
            try:
                p = apply_assignments(cfg.params, {other.name: cfg.axis_to_si(other.name, float(v))})
                d = derive(p, warn=False)
                series.append((float(v), optimal_angle(d.zeta, d.alpha), "ok"))
            except (OptoFilterError, ValueError) as exc:
                series.append((float(v), None, error_status(exc)))
    return tuple(series)


def run_sweep2d(cfg, threads=1):
    if len(cfg.axes) != 2:
        raise ConfigError("sweep2d needs two sweep axes (axis1, axis2)")
    outputs = cfg.outputs or ("Vpp",)
    _validate_point_outputs(cfg, outputs)
    a1, a2 = cfg.axes
    values1 = tuple(float(v) for v in a1.values())
    values2 = tuple(float(v) for v in a2.values())
    si2 = tuple(cfg.axis_to_si(a2.name, v) for v in values2)
    jobs = [
        (cfg.params, cfg.theta_opt, a1.name, cfg.axis_to_si(a1.name, v1), a2.name, si2, outputs, cfg.delta, cfg.frame)
        for v1 in values1
    ]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(job) for job in jobs]
    cells = tuple(cell for row in rows for cell in row)
    return SweepGrid(a1, a2, values1, values2, outputs, cells, _overlay(cfg))


def sweep_csv(grid):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([grid.axis1.name, grid.axis2.name, "quantity", "value", "status"])
    n2 = len(grid.values2)
    for k, cell in enumerate(grid.cells):
        i, j = divmod(k, n2)
        for q in grid.outputs:
            value, status = cell[q]
            w.writerow([fmt(grid.values1[i]), fmt(grid.values2[j]), q, "" if value is None else fmt(value), status])
    return buf.getvalue()


def overlay_csv(grid):
    other = grid.axis1 if grid.axis2.name == "theta" else grid.axis2
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([other.name, "theta_opt", "status"])
    for v, theta, status in grid.overlay:
        w.writerow([fmt(v), "" if theta is None else fmt(theta), status])
    return buf.getvalue()


def sweep_json(grid):
    doc = {
        "axes": [
            {"name": a.name, "scale": a.scale, "values": list(vals)}
            for a, vals in ((grid.axis1, grid.values1), (grid.axis2, grid.values2))
        ],
        "quantities": list(grid.outputs),
        "cells": [],
    }
    n2 = len(grid.values2)
    for k, cell in enumerate(grid.cells):
        i, j = divmod(k, n2)
        doc["cells"].append(
            {
                grid.axis1.name: grid.values1[i],
                grid.axis2.name: grid.values2[j],
                "values": {q: cell[q][0] for q in grid.outputs},
                "status": {q: cell[q][1] for q in grid.outputs},
            }
        )
    if grid.overlay:
        doc["overlay"] = [{"axis_value": v, "theta_opt": t, "status": s} for v, t, s in grid.overlay]
    return dumps(doc)


# --- spectra --------------------------------------------------------------

SPECTRUM_COLUMNS = ("omega", "Sqq", "Spp", "Sqq_cond", "Spp_cond", "status")


def resolved_params(cfg):
    p = cfg.params
    if cfg.theta_opt:
        d = derive(p, warn=False)
        p = p.replace(theta=optimal_angle(d.zeta, d.alpha))
    return p


def run_spectrum(cfg):
    """Unconditional and conditional spectra on the configured frequency grid.

    Returns the list of rows (tuples matching SPECTRUM_COLUMNS); values that
    could not be computed are None and the status column says why.
    """
    p = resolved_params(cfg)
    d = derive(p)
    lo = cfg.omega_min if cfg.omega_min is not None else 1e-3 * d.omega_m
    hi = cfg.omega_max if cfg.omega_max is not None else 1e2 * d.omega_m
    omega = frequency_grid(lo, hi, cfg.omega_count, cfg.omega_linear)
    S_qq, S_pp = spectrum_unconditional(d, omega)
    cond_status = "ok"
    try:
        mc = measurement_coeffs(d, p.theta)
        fp = filter_params(d, mc)
        cond = spectrum_conditional(fp, d, mc, omega)
        Sq_c, Sp_c = cond.S_qq, cond.S_pp
    except OptoFilterError as exc:
        cond_status = error_status(exc)
        Sq_c = Sp_c = [None] * len(omega)
    rows = []
    for k, w in enumerate(omega):
        vals = [S_qq[k], S_pp[k], Sq_c[k], Sp_c[k]]
        status = cond_status
        if status == "ok" and not all(math.isfinite(v) for v in vals):
            status = "undefined:non_finite"
            vals = [v if math.isfinite(v) else None for v in vals]
        rows.append((float(w), *[None if v is None else float(v) for v in vals], status))
    return rows


def spectrum_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SPECTRUM_COLUMNS)
    for row in rows:
        w.writerow([(x if isinstance(x, str) else ("" if x is None else fmt(x))) for x in row])
    return buf.getvalue()


def spectrum_json(rows):
    return dumps({"columns": list(SPECTRUM_COLUMNS), "rows": [list(r) for r in rows]})


# --- single-point report --------------------------------------------------


def _max_rel_diff(a, b):
    return max(abs(x - y) / max(abs(x), abs(y)) for x, y in zip(a, b))


def run_report(cfg):
    """Everything known about one parameter point as a JSON-ready dict."""
    p = resolved_params(cfg)
    d = derive(p, warn=False)
    mc = measurement_coeffs(d, p.theta)
    fp = filter_params(d, mc)
    main = covariance_main(fp, d, mc)
    appendix = covariance_appendix(fp, d, mc)
    quad = covariance_quadrature(fp, d, mc, tol=cfg.tol)
    closed = (main.V_qq, main.V_qp, main.V_pp)
    numeric = (quad.V_qq, quad.V_qp, quad.V_pp)
    diff = _max_rel_diff(closed, numeric)
    sq = squeeze_report(p)
    doc = {
        "params": asdict(p),
        "derived": {k: v for k, v in asdict(d).items() if k not in ("gamma_m", "kappa", "Delta")},
        "adiabatic": d.adiabatic,
        "measurement": asdict(mc),
        "filter": {"omega_theta": fp.omega_theta, "gamma_theta": fp.gamma_theta,
                   "omega_ratio": fp.omega_theta / d.omega_m},
        "covariance": {"main": asdict(main), "appendix": asdict(appendix), "quadrature": asdict(quad)},
        "heisenberg_det": main.det,
        "purity": cov_mod.purity(main),
        "self_check": {"tol": cfg.tol, "max_rel_diff": diff, "agree": diff <= cfg.tol},
        "squeeze": asdict(sq),
    }
    if cfg.delta:
        neg = gie_point(p, cfg.delta, frame=cfg.frame)
        doc["entanglement"] = {"delta": cfg.delta, "frame": cfg.frame, "nu_minus": neg.nu_minus, "E_N": neg.E_N}
    return doc


def derive_doc(cfg):
    d = derive(resolved_params(cfg), warn=False)
    doc = asdict(d)
    doc["adiabatic"] = d.adiabatic
    doc["xi_cooperativity_form"] = d.xi_from_cooperativity()
    return doc


"""Command-line experiment runner.

A run is described by a JSON config

    {"schema": "orthoasym-config/1", "command": "verify-universal",
     "parameters": {...}, "output_dir": "out", "seed": 0}

and writes ``report.json`` plus command-specific CSV files.  Exit status is
0 on success, 1 on input errors and 2 when a verdict fails.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from ._io import dumps_json, write_csv, write_json
from .asymfit import fit_model, plancherel_rotach_check, verify_universal
from .catalog import builtin_table, closed_form
from .evolution import (PacketModel, WavePacketSpec, check_theorem_ev, dispersionless_check, evolve,
                        riemann_limit_check, suggested_N)
from .jacobi import (JacobiCoefficients, carleman_report, eval_polynomials, jost_solve, load_coefficients_csv,
                     polynomial_solution, solve_recurrence, wronskian_limit_check, wronskian_profile)
from .opnorm import (boundedness_verdict, compactness_check, gaussian_trials, load_operator_spec,
                     sobolev_verify)
from .oscillatory import PhaseSpec, batch_eval, batch_to_csv, bump, smooth_bump
from .spectral import diagonalize_truncation, estimate_density

SCHEMA = "orthoasym-config/1"
CONFIG_KEYS = {"schema", "command", "parameters", "output_dir", "seed"}


class ConfigError(ValueError):
    pass


FAMILY_KEYS = {"family": "hermite", "alpha": None, "ell": None, "csv": None}

DEFAULT_GRIDS = {
    "hermite": (0.2, 1.0),
    "laguerre": (0.5, 2.0),
    "chebyshev_u": (-0.8, 0.8),
}


def _coeffs(p: dict) -> JacobiCoefficients:
    fam = p["family"]
    if fam == "hermite":
        return JacobiCoefficients.hermite()
    if fam == "laguerre":
        return JacobiCoefficients.laguerre(0.0 if p["alpha"] is None else float(p["alpha"]))
    if fam == "chebyshev_u":
        return JacobiCoefficients.chebyshev_u()
    if fam == "power":
        if p["alpha"] is None or p["ell"] is None:
            raise ConfigError("power family needs alpha and ell")
        return JacobiCoefficients.power_model(float(p["alpha"]), float(p["ell"]))
    if fam == "custom":
        if not p["csv"]:
            raise ConfigError("custom family needs csv")
        return load_coefficients_csv(p["csv"])
    raise ConfigError(f"unknown family {fam!r}")


def _grid(p: dict, fam: str) -> np.ndarray:
    if p.get("lambdas") is not None:
        return np.asarray(p["lambdas"], dtype=float)
    if fam not in DEFAULT_GRIDS:
        raise ConfigError(f"family {fam!r} needs an explicit lambdas list")
    return np.linspace(*DEFAULT_GRIDS[fam], int(p.get("n_lambdas", 9)))


# each command returns (results, verdict or None, paper_refs, tolerances)


def cmd_family(p, rng, out):
    c = _coeffs(p)
    N = int(p["N"])
    n = np.arange(N)
    a, b = c.arrays(N)
    write_csv(out / "coefficients.csv", ["n", "a_n", "b_n"], zip(n, a, b))
    cr = carleman_report(c, max(N, 10))
    return ({"label": c.label(), "carleman_partial_sum": cr.partial_sum, "carleman": cr.verdict},
            None, ["Carleman condition (sum of 1/a_n diverges)"], {})


def cmd_eval(p, rng, out):
    c = _coeffs(p)
    N = int(p["N"])
    rows, worst = [], 0.0
    for lam in p["lambdas"]:
        t = eval_polynomials(c, float(lam), N)
        res = t.residuals()
        scale = np.maximum(1.0, np.abs(t.values[:-1]))
        worst = max(worst, float(np.max(np.abs(res) / scale[: len(res)])))
        rows += [[k, lam, v] for k, v in enumerate(t.values)]
    write_csv(out / "polynomials.csv", ["n", "lambda", "P_n"], rows)
    tol = float(p["residual_tol"])
    return ({"max_relative_residual": worst}, worst <= tol,
            ["three-term recurrence with P_0 = 1"], {"residual_tol": tol})


def _fit(p):
    c = _coeffs(p)
    lams = _grid(p, p["family"])
    model = fit_model(c, lams, N=int(p["N"]), family=p["x_family"])
    return c, lams, model


def cmd_fit_asym(p, rng, out):
    c, lams, m = _fit(p)
    write_csv(out / "fit.csv", ["lambda", "kappa", "omega", "omega_prime"],
              zip(lams, m.kappa, m.omega, m.omega_prime))
    res = {"r": m.r, "s": m.s, "x_model": m.x_model.kind, "v_model": m.v_model.kind,
           "delta_remainder": m.delta_remainder, "window": list(m.window) if m.window else None}
    return res, None, ["oscillatory asymptotics P_n ~ 2 kappa v_n cos(omega x_n + Phi_n)"], {}


def cmd_verify_universal(p, rng, out):
    c, lams, m = _fit(p)
    sd = diagonalize_truncation(c, int(p["N_density"]))
    dens = estimate_density(sd, lams)
    rep = verify_universal(m, dens)
    rep.to_csv(out / "relation2.csv")
    t1, t2 = float(p["tol_relation1"]), float(p["tol_relation2"])
    return (rep.to_dict(), rep.passed(t1, t2),
            ["universal relation 2r + s = 1", "universal relation 2 pi tau kappa^2 = s omega'"],
            {"relation1": t1, "relation2": t2})


def cmd_plancherel_rotach(p, rng, out):
    c = JacobiCoefficients.power_model(float(p["alpha"]), float(p["ell"]))
    lams = np.asarray(p["lambdas"], dtype=float)
    rep = plancherel_rotach_check(c, lams, N=int(p["N"]))
    d = rep.to_dict()
    tol = float(p["tol"])
    ok = abs(rep.r_fit - rep.r_expected) <= tol and abs(rep.s_fit - rep.s_expected) <= tol
    if rep.universal is not None and rep.universal.log_conditions is not None:
        ok = ok and all(rep.universal.log_conditions.values())
    return d, bool(ok), ["Plancherel-Rotach exponents r = ell/2, s = 1 - ell",
                         "universal relation 2 pi tau kappa^2 = s omega'"], {"exponent_tol": tol}


_WRONSKIAN_FAMILIES = {
    "hermite": (lambda: JacobiCoefficients.hermite(), (-3.0, 3.0)),
    "laguerre": (lambda: JacobiCoefficients.laguerre(0.0), (0.2, 5.0)),
    "chebyshev_u": (lambda: JacobiCoefficients.chebyshev_u(), (-0.95, 0.95)),
    "power(1/2)": (lambda: JacobiCoefficients.power_model(1.0, 0.5), (-3.0, 3.0)),
    "power(1)": (lambda: JacobiCoefficients.power_model(1.0, 1.0), (-3.0, 3.0)),
}


def _rel_variation(W: np.ndarray) -> float:
    return float(np.max(np.abs(W - W[0])) / abs(W[0]))


def wronskian_survey(rng: np.random.Generator, n_samples: int = 20, N: int = 10 ** 4) -> dict:
    """Relative Wronskian variation of ``(P_n, Q_n)`` pairs at random real lambdas."""
    out = {}
    for name, (make, (lo, hi)) in _WRONSKIAN_FAMILIES.items():
        c = make()
        worst = 0.0
        for lam in rng.uniform(lo, hi, n_samples):
            P = polynomial_solution(c, float(lam), N)
            Q = solve_recurrence(c, float(lam), 0, 0.0, 1.0, N)
            _, W = wronskian_profile(P, Q)
            worst = max(worst, _rel_variation(W))
        out[name] = worst
    return out


def jost_survey(rng: np.random.Generator, alpha: float = 1.0, ell: float = 1.5, n_samples: int = 20,
                N_anchor: int = 10 ** 4) -> dict:
    """Wronskian constancy and amplitude-product drift of Jost pairs at random complex z."""
    c = JacobiCoefficients.power_model(alpha, ell)
    worst_w, worst_drift = 0.0, 0.0
    for _ in range(n_samples):
        z = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        fp, fm = jost_solve(c, z, N_anchor)
        _, W = wronskian_profile(fp, fm)
        worst_w = max(worst_w, _rel_variation(W))
        rep = wronskian_limit_check(c, fp, fm)
        worst_drift = max(worst_drift, rep.amplitude_product_drift)
    return {"wronskian_rel_variation": worst_w, "amplitude_product_drift": worst_drift}


def cmd_jost(p, rng, out):
    tol_w, tol_d = float(p["wronskian_tol"]), float(p["drift_tol"])
    ws = wronskian_survey(rng, int(p["n_samples"]), int(p["N"]))
    js = jost_survey(rng, float(p["alpha"]), float(p["ell"]), int(p["n_samples"]), int(p["N"]))
    write_csv(out / "wronskian.csv", ["family", "max_rel_variation"], sorted(ws.items()))
    ok = max(ws.values()) <= tol_w and js["wronskian_rel_variation"] <= tol_w and js["amplitude_product_drift"] <= tol_d
    return ({"polynomial_pairs": ws, "jost": js}, bool(ok),
            ["Wronskian constancy", "Jost amplitude product a_n |f+_n| |f-_n| -> 1"],
            {"wronskian": tol_w, "amplitude_drift": tol_d})


def _theta_fns(kind: str):
    if kind == "quadratic":
        return (lambda m: np.asarray(m) ** 2 / 2), (lambda m: np.asarray(m, dtype=float)), \
            (lambda m: np.ones_like(np.asarray(m, dtype=float)))
    if kind == "exp":
        return np.exp, np.exp, np.exp
    raise ConfigError(f"unknown theta {kind!r}")


def cmd_stationary_phase(p, rng, out):
    th, thp, thpp = _theta_fns(p["theta"])
    c, w = float(p["center"]), float(p["half_width"])
    d = tuple(map(float, p["delta"]))
    spec = PhaseSpec(th, thp, d, bump(c, w), theta_pp=thpp, support=(c - w, c + w))
    ts = [float(t) for t in p["t_values"]]
    xi_in, xi_out = float(p["x_over_t"]), float(p["x_over_t_out"])
    rows = []
    for t in ts:
        rows += batch_eval(spec, [0], [xi_in * t], [t])
        rows += batch_eval(spec, [0], [xi_out * t], [t])
    batch_to_csv(rows, out / "stationary_phase.csv")
    gaps = [r.rel_err for r in rows if r.in_window]
    outs = [abs(r.oracle) for r in rows if not r.in_window]
    tol_ratio, tol_decay = float(p["gap_ratio"]), float(p["out_decay"])
    ratio = gaps[-1] / gaps[-2] if len(gaps) >= 2 else math.nan
    decay = [outs[i + 1] / outs[i] for i in range(len(outs) - 1)]
    ok = ratio <= tol_ratio and all(q <= tol_decay for q in decay)
    return ({"t": ts, "relative_gap": gaps, "gap_ratio_last": ratio, "out_of_window_abs": outs,
             "out_of_window_ratios": decay}, bool(ok),
            ["stationary-phase leading term", "rapid decay outside theta'(Delta)"],
            {"gap_ratio": tol_ratio, "out_decay": tol_decay})


def _packet(p) -> WavePacketSpec:
    c = _coeffs(p)
    model = PacketModel.from_closed_form(closed_form(c))
    cen, hw = float(p["center"]), float(p["half_width"])
    sup = (cen - hw, cen + hw)
    pad = float(p["pad"])
    lc = (sup[0] - pad, sup[1] + pad)
    mode = p.get("mode", "factorized")
    if mode == "factorized":
        th, thp, thpp = _theta_fns(p["theta"])
        return WavePacketSpec(c, smooth_bump(cen, hw), sup, lc, model, theta=th, theta_p=thp, theta_pp=thpp)
    return WavePacketSpec(c, smooth_bump(cen, hw), sup, lc, model, mode=mode)


def cmd_evolve(p, rng, out):
    spec = _packet(p)
    ts = [float(t) for t in p["t_values"]]
    N = int(p["N"]) if p["N"] else suggested_N(spec, max(ts))
    res = evolve(spec, N, ts)
    rep = check_theorem_ev(spec, res)
    rep.traces_to_csv(out / "traces.csv")
    d = rep.to_dict()
    d["N"] = N
    tn, tm = float(p["norm_tol"]), float(p["mass_tol"])
    ok = max(rep.norm_errors) <= tn and rep.mass_decreasing and rep.out_window_mass[-1] <= tm
    return d, bool(ok), ["wave packet asymptotics with stationary phase", "unitarity of exp(-i Theta(J) t)"], \
        {"norm": tn, "out_window_mass": tm}


def cmd_riemann_check(p, rng, out):
    spec = _packet(p)
    rep = riemann_limit_check(spec, [float(t) for t in p["t_values"]])
    d = rep.to_dict()
    ts, ss = float(p["sum_tol"]), float(p["sigma_tol"])
    ok = rep.rel_err[-1] <= ts
    if rep.sigma_expected is not None:
        ok = ok and abs(rep.sigma_implied / rep.sigma_expected - 1) <= ss
    write_csv(out / "riemann.csv", ["t", "riemann_sum", "rel_err"], zip(rep.times, rep.sums, rep.rel_err))
    return d, bool(ok), ["Riemann-sum limit of the packet norm", "sigma identity 2 pi sigma tau kappa^2 = omega'"], \
        {"sum": ts, "sigma": ss}


def cmd_dispersionless(p, rng, out):
    q = dict(p)
    q["mode"] = "omega"
    spec = _packet(q)
    ts = [float(t) for t in p["t_values"]]
    N = int(p["N"]) if p["N"] else int(math.ceil(float(spec.model.x_inverse(2 * max(ts) + 20))))
    rep = dispersionless_check(spec, N, ts)
    d = rep.to_dict()
    d["N"] = N
    ps, bs = float(p["peak_spacings"]), float(p["sum_tol"])
    ok = max(rep.peak_offset_spacings) <= ps and rep.b2_rel_err[-1] <= bs
    return d, bool(ok), ["dispersionless translation along x_n", "norm identity with the Fourier transform of F"], \
        {"peak_spacings": ps, "sum": bs}


def cmd_opnorm(p, rng, out):
    spec = load_operator_spec(p["operator"])
    est = boundedness_verdict(spec, [int(n) for n in p["ladder"]])
    est.to_csv(out / "norms.csv")
    d = est.to_dict()
    if p["compactness"]:
        d["compactness"] = compactness_check(spec, int(max(p["ladder"]))).to_dict()
    ok = est.consistent is not False and (p["expect"] is None or est.verdict == p["expect"])
    return d, bool(ok), ["window-sum condition for boundedness", "sigma_n criterion for boundedness"], \
        {"plateau": 0.05, "growing": 0.30}


def _sobolev_sequence(tag: str, n_max: int):
    if tag == "sqrt_n":
        n = np.arange(0, n_max)
        return np.sqrt(n), np.where(n > 0, np.maximum(n, 1) ** -0.5, 1.0)
    if tag == "ln_n":
        n = np.arange(1, n_max)
        return np.log(n), 1.0 / n
    raise ConfigError(f"unknown sobolev sequence {tag!r}")


def cmd_sobolev(p, rng, out):
    x, lw = _sobolev_sequence(p["sequence"], int(p["n_max"]))
    trials = gaussian_trials(rng, int(p["trials"]), p["center_range"], p["width_range"])
    rep = sobolev_verify(x, trials, literal_weights=lw if p["literal"] else None)
    write_csv(out / "sobolev.csv", ["trial", "ratio"], enumerate(rep.ratios))
    return rep.to_dict(), rep.holds, ["sampling inequality in H^1 with c0 = (sqrt(5)+1)/2"], \
        {"bound": rep.bound}


_F = FAMILY_KEYS
COMMANDS: dict[str, tuple[dict, Callable]] = {
    "family": ({**_F, "N": 20}, cmd_family),
    "eval": ({**_F, "N": 100, "lambdas": [0.5], "residual_tol": 1e-12}, cmd_eval),
    "fit-asym": ({**_F, "N": 20000, "lambdas": None, "n_lambdas": 9, "x_family": "power"}, cmd_fit_asym),
    "verify-universal": ({**_F, "N": 20000, "lambdas": None, "n_lambdas": 9, "x_family": "power",
                          "N_density": 2000, "tol_relation1": 0.03, "tol_relation2": 0.05},
                         cmd_verify_universal),
    "plancherel-rotach": ({"alpha": 0.7071067811865476, "ell": 0.5, "lambdas": [-1.0, -0.5, 0.0, 0.5, 1.0],
                           "N": 20000, "tol": 0.02}, cmd_plancherel_rotach),
    "jost": ({"alpha": 1.0, "ell": 1.5, "n_samples": 20, "N": 10000, "wronskian_tol": 1e-10,
              "drift_tol": 0.02}, cmd_jost),
    "stationary-phase": ({"theta": "quadratic", "center": 2.0, "half_width": 1.0, "delta": [0.5, 3.5],
                          "x_over_t": 2.0, "x_over_t_out": 5.0, "t_values": [100, 400, 1600],
                          "gap_ratio": 0.7, "out_decay": 0.1}, cmd_stationary_phase),
    "evolve": ({**_F, "center": 0.55, "half_width": 0.25, "pad": 0.05, "theta": "quadratic",
                "t_values": [50, 100, 200], "N": None, "norm_tol": 1e-10, "mass_tol": 0.05}, cmd_evolve),
    "riemann-check": ({**_F, "center": 0.55, "half_width": 0.25, "pad": 0.05, "theta": "quadratic",
                       "t_values": [100, 200, 400], "sum_tol": 0.03, "sigma_tol": 0.05}, cmd_riemann_check),
    "dispersionless": ({**_F, "center": 0.0, "half_width": 0.6, "pad": 0.05, "t_values": [20, 40],
                        "N": None, "peak_spacings": 2.0, "sum_tol": 0.03}, cmd_dispersionless),
    "opnorm": ({"operator": {"x": "sqrt_n", "v": {"tag": "n^p", "p": -0.25}, "w": {"indicator": [-1, 1]}},
                "ladder": [512, 1024, 2048, 4096], "compactness": False, "expect": None}, cmd_opnorm),
    "sobolev": ({"sequence": "sqrt_n", "n_max": 40000, "trials": 100, "center_range": [5.0, 150.0],
                 "width_range": [1.0, 30.0], "literal": True}, cmd_sobolev),
}


def resolve_parameters(command: str, params: dict) -> dict:
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {sorted(COMMANDS)}")
    defaults = COMMANDS[command][0]
    unknown = sorted(set(params) - set(defaults))
    if unknown:
        raise ConfigError(f"unknown parameter key(s) for {command}: {', '.join(unknown)}")
    return {**defaults, **params}


def load_config(path) -> dict:
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(cfg) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    if cfg.get("schema", SCHEMA) != SCHEMA:
        raise ConfigError(f"unsupported schema {cfg.get('schema')!r}; expected {SCHEMA!r}")
    return cfg


def run(command: str, parameters: dict, output_dir, seed: int = 0) -> int:
    """Run one experiment and write ``report.json``; returns the exit status."""
    params = resolve_parameters(command, parameters)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    results, verdict, refs, tols = COMMANDS[command][1](params, rng, out)
    report = {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "parameters": params,
        "seed": seed,
        "results": results,
        "verdict": "n/a" if verdict is None else ("pass" if verdict else "fail"),
        "paper_refs": refs,
        "tolerances_used": tols,
    }
    write_json(out / "report.json", report)
    return 2 if verdict is False else 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="orthoasym", description=__doc__.splitlines()[0])
    ap.add_argument("command", nargs="?", help=f"one of {', '.join(sorted(COMMANDS))} or list-builtin")
    ap.add_argument("--config", help="JSON experiment config")
    ap.add_argument("--out", help="output directory (overrides the config)")
    ap.add_argument("--seed", type=int, help="seed for randomized trials (overrides the config)")
    ap.add_argument("--threads", type=int, help="worker threads for compiled kernels")
    args = ap.parse_args(argv)
    try:
        if args.threads:
            import numba
            numba.set_num_threads(max(1, min(args.threads, numba.config.NUMBA_NUM_THREADS)))
        if args.command == "list-builtin":
            sys.stdout.write(dumps_json(builtin_table()) + "\n")
            return 0
        cfg = load_config(args.config) if args.config else {}
        command = args.command or cfg.get("command")
        if command is None:
            raise ConfigError("no command given")
        if args.command and cfg.get("command") and cfg["command"] != args.command:
            raise ConfigError(f"command {args.command!r} conflicts with config command {cfg['command']!r}")
        params = cfg.get("parameters", {})
        if not isinstance(params, dict):
            raise ConfigError("parameters must be a JSON object")
        out = args.out or cfg.get("output_dir") or "."
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        return run(command, params, out, seed)
    except (ConfigError, KeyError, FileNotFoundError, json.JSONDecodeError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"orthoasym: input error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

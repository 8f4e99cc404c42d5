"""Command-line front end: verification suites, evolution runs, spectrum tables.

Scenarios come from a flat JSON document whose keys match the long option
names (dashes become underscores); flags given on the command line win. A
``"scenarios"`` list in the document turns the call into a sweep, one output
directory per entry, run ``--jobs`` at a time.

Exit codes: 0 ok, 1 tolerance failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import analytic as an
from .analytic import PoleError
from .evolution import EvolutionConfig, EvolutionError, evolve, run_grid
from .params import ELECTRON_MASS, ModelParams
from .spectrum import (
    SpectrumError,
    new_line,
    omega_creat,
    omega_crit,
    omega_crit_hz,
    subrelativistic_line,
)
from .verification import convergence_order, ehrenfest, ehrenfest_corrections

EXIT_OK, EXIT_TOL, EXIT_CONFIG = 0, 1, 2
FAMILIES = ("coherent", "packet", "soliton", "oscillator_soliton", "plane_wave")
TRACE_COLUMNS = ("t", "norm", "mean_x", "mean_p", "width", "energy")

ORDER_TARGET, ORDER_TOL = 2.0, 0.3
# time-difference round-off alone produces ~1e-9 residuals at dt_fd = 1e-6
EXACT_RESIDUAL = 1e-8
CORRECTION_TOL = 1e-8
STANDARD_TOL = 1e-6
NORM_DRIFT_TOL = 1e-6
ENERGY_DRIFT_TOL = 1e-4

DEFAULTS = {
    "preset": "natural",
    "hbar": None, "m": None, "c": None, "C": None,
    "family": "soliton",
    "v": 0.0, "k": 0.0, "t0": 1.0, "omega": 1.0, "alpha": 1.0, "delta": 0.0,
    "sign": 1, "x_c": 0.0, "length": 2.0 * math.pi,
    "t": 0.0, "dx_list": "1/32,1/64,1/128", "dx": 1.0 / 32.0, "widths": 10.0,
    "t_end": 1.0, "dt": "auto", "save_every": 100,
    "q": None, "eta_list": "0.25,0.5,1", "omega_list": None, "t_list": "0",
    "out": ".",
}


class ConfigError(Exception):
    pass


# --- serialization -----------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return "%.17g" % x


def _json(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json(v, indent + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + _json(v, indent + 1) for v in obj) + "\n" + "  " * indent + "]"
    if obj is None:
        return "null"
    if isinstance(obj, float) and not math.isfinite(obj):
        return "null"
    if isinstance(obj, (bool, int, float)):
        return fmt(obj)
    return json.dumps(str(obj))


def write_json(path: str, obj) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_json(obj) + "\n")


def write_csv(path: str, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (int, float)) else v for v in row])


# --- scenario assembly -------------------------------------------------------

def parse_number(text) -> float:
    if isinstance(text, (int, float)):
        return float(text)
    try:
        return float(Fraction(str(text).strip()))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def parse_list(text) -> list[float]:
    if text is None:
        return []
    if isinstance(text, (list, tuple)):
        return [parse_number(v) for v in text]
    return [parse_number(v) for v in str(text).split(",") if v.strip()]


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def merge(config: dict, cli: dict) -> dict:
    sc = dict(DEFAULTS)
    sc.update({k: v for k, v in config.items() if k != "scenarios"})
    sc.update({k: v for k, v in cli.items() if v is not None})
    return sc


def build_params(sc: dict) -> ModelParams:
    try:
        p = ModelParams.preset(sc["preset"])
        over = {k: parse_number(sc[k]) for k in ("hbar", "m", "c") if sc.get(k) is not None}
        if over:
            p = ModelParams(**{**p.__dict__, **over})
        if sc.get("C") is not None:
            p = p.with_coupling(parse_number(sc["C"]))
        elif sc.get("q") is not None and sc.get("family") in ("soliton", "oscillator_soliton"):
            p = p.with_compton_quotient(parse_number(sc["q"]), -1)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return p


def build_family(sc: dict, p: ModelParams):
    name = sc["family"]
    num = lambda key: parse_number(sc[key])
    try:
        if name == "coherent":
            return an.CoherentState(p, num("omega"), num("alpha"), num("delta"))
        if name == "packet":
            return an.ModifiedPacket(p, num("t0"))
        if name == "soliton":
            return an.FreeSoliton(p, num("v"), int(sc["sign"]), num("x_c"))
        if name == "oscillator_soliton":
            return an.OscillatorSoliton(p, num("v"), int(sc["sign"]), num("x_c"), num("k"))
        if name == "plane_wave":
            return an.PlaneWave.commensurate(p, num("v"), num("length"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown family {name!r}; expected one of {', '.join(FAMILIES)}")


def _plane_wave_dx(family, dx: float) -> float:
    # the periodic window must hold a whole number of cells
    n = max(16, round(family.length / dx))
    return family.length / n


# --- commands ----------------------------------------------------------------

def cmd_verify(sc: dict, out: str) -> int:
    p = build_params(sc)
    fam = build_family(sc, p)
    t = parse_number(sc["t"])
    dxs = parse_list(sc["dx_list"])
    if len(dxs) < 3:
        raise ConfigError("dx_list needs at least three spacings")
    if fam.name == "plane_wave":
        grids = [fam.default_grid(t, _plane_wave_dx(fam, d)) for d in dxs]
    else:
        grids = [fam.default_grid(t, d) for d in dxs]
    try:
        conv = convergence_order(fam, t, grids, p)
    except PoleError as exc:
        raise ConfigError(str(exc)) from exc

    rows, ehr = [], []
    for g, rep in zip(grids, conv.reports):
        if fam.normalizable:
            e = ehrenfest(fam, t, g, p)
            ehr.append(e)
            rows.append([rep.dx, rep.res3_max, rep.res3_l2, rep.res4_max, rep.res4_l2,
                         e.correction1, e.correction2, e.standard_defect1, e.standard_defect2])
        else:
            rho, S = fam.fields(g.x, t)
            c1, c2 = ehrenfest_corrections(rho, S, g, p)
            ehr.append((c1, c2))
            rows.append([rep.dx, rep.res3_max, rep.res3_l2, rep.res4_max, rep.res4_l2,
                         c1, c2, math.nan, math.nan])
    write_csv(os.path.join(out, "residuals.csv"),
              ["dx", "res3_max", "res3_l2", "res4_max", "res4_l2",
               "correction1", "correction2", "standard_defect1", "standard_defect2"], rows)

    def order_ok(est, errors) -> bool:
        # residuals at round-off on every grid mean the stencils are exact for this family
        if est.noise_floor:
            return max(errors) < EXACT_RESIDUAL
        return abs(est.order - ORDER_TARGET) <= ORDER_TOL

    corr_ok = all(abs(r[5]) < CORRECTION_TOL and abs(r[6]) < CORRECTION_TOL for r in rows)
    std_ok = all(abs(r[7]) < STANDARD_TOL and abs(r[8]) < STANDARD_TOL
                 for r in rows) if fam.normalizable else True
    checks = {
        "order_continuity": order_ok(conv.order3, [r.res3_max for r in conv.reports]),
        "order_phase": order_ok(conv.order4, [r.res4_max for r in conv.reports]),
        "corrections": corr_ok,
        "standard_relations": std_ok,
    }
    report = {
        "family": fam.name, "t": t, "params": p.__dict__,
        "order_continuity": conv.order3.order, "order_phase": conv.order4.order,
        "order_message": [conv.order3.message, conv.order4.message],
        "checks": checks, "passed": all(checks.values()),
    }
    write_json(os.path.join(out, "verify.json"), report)
    print(f"family={fam.name} order3={conv.order3.order:.4f} order4={conv.order4.order:.4f}")
    for r in rows:
        print(f"  dx={r[0]:.6g} res3={r[1]:.3e} res4={r[3]:.3e} corr1={r[5]:.2e} corr2={r[6]:.2e}")
    for k, ok in checks.items():
        print(f"  {k}: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if report["passed"] else EXIT_TOL


def cmd_evolve(sc: dict, out: str) -> int:
    p = build_params(sc)
    fam = build_family(sc, p)
    t = parse_number(sc["t"])
    t_end = parse_number(sc["t_end"])
    dx = parse_number(sc["dx"])
    dt = sc["dt"] if sc["dt"] == "auto" else parse_number(sc["dt"])
    try:
        fam.check_time(t, t + t_end)
        if fam.name == "plane_wave":
            grid = fam.default_grid(t, _plane_wave_dx(fam, dx))
            boundary = "periodic"
        else:
            grid = run_grid(fam, t, t + t_end, dx, parse_number(sc["widths"]))
            boundary = "clamp"
        cfg = EvolutionConfig(grid, t_end, dt, int(sc["save_every"]), boundary=boundary)
    except (ValueError, PoleError) as exc:
        raise ConfigError(str(exc)) from exc

    status, message = EXIT_OK, "completed"
    try:
        trace = evolve(fam.state(grid, t), fam.potential, cfg, p)
    except EvolutionError as exc:
        trace, status, message = exc.trace, EXIT_TOL, str(exc)
    records = trace.records if trace is not None else []
    write_csv(os.path.join(out, "trace.csv"), TRACE_COLUMNS,
              [[getattr(r, c) for c in TRACE_COLUMNS] for r in records])

    summary = {"family": fam.name, "status": message, "dt": trace.dt if trace else math.nan,
               "steps": trace.steps if trace else 0, "n": grid.n, "dx": grid.dx}
    if status == EXIT_OK and records:
        norm_drift = max(abs(r.norm - records[0].norm) for r in records)
        summary["norm_drift"] = norm_drift
        checks = {"norm": norm_drift < NORM_DRIFT_TOL}
        if fam.potential.static and fam.normalizable:
            e0 = records[0].energy
            summary["energy_drift_rel"] = max(abs(r.energy - e0) for r in records) / abs(e0)
            checks["energy"] = summary["energy_drift_rel"] < ENERGY_DRIFT_TOL
        if fam.normalizable:
            last = records[-1]
            summary["width_final"] = last.width
            summary["width_reference"] = fam.width(last.t)
            summary["mean_x_final"] = last.mean_x
            summary["mean_x_reference"] = fam.center(last.t)
        summary["checks"] = checks
        if not all(checks.values()):
            status = EXIT_TOL
    write_json(os.path.join(out, "evolve.json"), summary)
    print(f"family={fam.name} steps={summary['steps']} status={message}")
    for key in ("norm_drift", "energy_drift_rel", "width_final", "width_reference"):
        if key in summary:
            print(f"  {key}={summary[key]:.6e}")
    return status


def cmd_spectrum(sc: dict, out: str) -> int:
    p = build_params(sc)
    if sc.get("C") is None:
        if sc.get("q") is not None:
            p = p.with_compton_quotient(parse_number(sc["q"]), -1)
        else:
            raise ConfigError("spectrum needs a negative coupling (--C or --q)")
    try:
        w_c = omega_crit(p)
        omegas = parse_list(sc["omega_list"]) or [eta * w_c for eta in parse_list(sc["eta_list"])]
        lines = [new_line(w, p) for w in omegas]
    except SpectrumError as exc:
        raise ConfigError(str(exc)) from exc
    write_csv(os.path.join(out, "spectrum.csv"),
              ["omega", "eta", "Q_h", "E_st", "delta_E_new", "ratio"],
              [[ln.omega, ln.eta, ln.Q_h, ln.E_st, ln.delta_E_new, ln.ratio] for ln in lines])
    q = parse_number(sc["q"]) if sc.get("q") is not None else 1.0
    si = ModelParams.si()
    summary = {
        "omega_crit": w_c,
        "nu_crit_electron_hz": omega_crit_hz(ELECTRON_MASS, q, si),
        "q": q,
        "omega_creat": omega_creat(p),
    }
    write_json(os.path.join(out, "spectrum.json"), summary)
    print(f"omega_crit={w_c:.6e} nu_crit(electron, q={q:g})={summary['nu_crit_electron_hz']:.6e} Hz")
    for ln in lines:
        print(f"  omega={ln.omega:.6e} eta={ln.eta:.6g} ratio={ln.ratio:.17g} dE={ln.delta_E_new:.6e}")
    return EXIT_OK


def cmd_packet(sc: dict, out: str) -> int:
    p = build_params(sc)
    t0 = parse_number(sc["t0"])
    try:
        fam = an.ModifiedPacket(p, t0)
        rows = []
        for t in parse_list(sc["t_list"]):
            rows.append({
                "t": t, "f": an.packet_f(t, t0, p), "g": an.packet_g(t, t0, p),
                "A": an.packet_potential_A(t, t0, p), "h": an.packet_h(t, t0, p),
                "energy": an.packet_energy(t, t0, p), "width": fam.width(t),
            })
    except (ValueError, PoleError) as exc:
        raise ConfigError(str(exc)) from exc
    cr1, cr2 = an.packet_critical_t0(p)
    block = {"t0": t0, "B2": an.packet_B2(t0, p), "t0_pole": cr1, "t0_zero_energy": cr2,
             "mean_p2": an.packet_mean_p2(t0, p), "times": rows}
    write_json(os.path.join(out, "packet.json"), block)
    print(_json(block))
    return EXIT_OK


def cmd_soliton(sc: dict, out: str) -> int:
    p = build_params(sc)
    k = parse_number(sc["k"])
    sc = {**sc, "family": "oscillator_soliton" if k > 0 else "soliton"}
    fam = build_family(sc, p)
    block = {"family": fam.name, "s": fam.s, "a": fam.a, "b": fam.b, "L": fam.L,
             "physical_size": fam.physical_size, "phase_rate": fam.phase_rate,
             "stationary_energy": fam.stationary_energy(), "energy": fam.energy(),
             "k_crit": an.critical_strength(p), "v": fam.v}
    if p.c > 0:
        try:
            w = parse_number(sc["omega"])
            E_sub, w_creat = subrelativistic_line(w, p)
            block["subrelativistic_energy"] = E_sub
            block["omega_creat"] = w_creat
        except SpectrumError:
            block["omega_creat"] = omega_creat(p)
    write_json(os.path.join(out, "soliton.json"), block)
    print(_json(block))
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "evolve": cmd_evolve,
    "spectrum": cmd_spectrum,
    "packet": cmd_packet,
    "soliton": cmd_soliton,
}


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file")
    common.add_argument("--preset", choices=("natural", "si"))
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, default=1, help="parallel scenarios in sweep mode")
    for name in ("hbar", "m", "c"):
        common.add_argument(f"--{name}")
    common.add_argument("--C", dest="C", help="nonlinear coupling")
    common.add_argument("--q", help="Compton quotient L^2/lambda_c^2 (sets C < 0)")
    common.add_argument("--family", choices=FAMILIES)
    for name in ("v", "k", "t0", "omega", "alpha", "delta", "x-c", "length", "t", "dx", "widths",
                 "t-end", "dt"):
        common.add_argument(f"--{name}")
    common.add_argument("--sign", type=int, choices=(-1, 1))
    common.add_argument("--save-every", type=int)
    common.add_argument("--dx-list", help="comma list, fractions allowed: 1/32,1/64,1/128")
    common.add_argument("--eta-list")
    common.add_argument("--omega-list")
    common.add_argument("--t-list")

    ap = argparse.ArgumentParser(prog="smpe", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return ap


def _cli_overrides(ns: argparse.Namespace) -> dict:
    skip = {"command", "config", "jobs"}
    return {k: v for k, v in vars(ns).items() if k not in skip}


def run_scenario(command: str, sc: dict) -> int:
    out = str(sc["out"])
    os.makedirs(out, exist_ok=True)
    try:
        return COMMANDS[command](sc, out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _sweep_worker(args) -> int:
    return run_scenario(*args)


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        config = load_config(ns.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cli = _cli_overrides(ns)
    sweep = config.get("scenarios")
    if not sweep:
        return run_scenario(ns.command, merge(config, cli))

    base_out = cli.get("out") or config.get("out") or DEFAULTS["out"]
    jobs = []
    for i, entry in enumerate(sweep):
        entry = {k.replace("-", "_"): v for k, v in entry.items()}
        sc = merge({**config, **entry}, {**cli, "out": None})
        sc["out"] = os.path.join(base_out, str(entry.get("name", f"scenario_{i:03d}")))
        jobs.append((ns.command, sc))
    if ns.jobs > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            codes = list(pool.map(_sweep_worker, jobs))
    else:
        codes = [_sweep_worker(j) for j in jobs]
    return max(codes)


if __name__ == "__main__":
    sys.exit(main())

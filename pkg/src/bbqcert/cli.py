"""Command-line front end.

Subcommands: chsh, selftest, gatetest, diqkd, certify, qbox, sweep.
Exit codes: 0 success, 1 malformed config, 2 numerical failure,
3 certification FAIL.  BBQCERT_THREADS caps sweep workers.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .chsh import chsh_value, optimize_s, s_max_two_qubit
from .config import ConfigError, build_experiment, load_config, set_by_path
from .diqkd import KeyRateInput, TailBoundInput, key_rate, tail_bound
from .quaternion import nonlocal_box_run
from .report import Report, digest_of
from .selftest import ext_my_check, gate_test, my_check_experiment, swap_isometry
from .statecert import certify
from .reference import (build_gate_test_experiments, ctrl_z_gate,
                        hadamard_gate, rotation_gate)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_FAIL = 3


def _report(command: str, config, seed: int, results: dict, flags: dict) -> Report:
    return Report(command=command, inputs_digest=digest_of(config), seed=seed,
                  version=__version__, results=results, flags=flags)


def cmd_chsh(args) -> Report:
    config = load_config(args.config, default="reference")
    exp = build_experiment(config)
    val = chsh_value(exp)
    results = {"s": val.s, "p": val.p}
    if exp.dims == (2, 2):
        results["s_max"] = s_max_two_qubit(exp.state)
        opt, angles = optimize_s(exp.state, restarts=8, seed=args.seed)
        results["s_optimized"] = opt.s
        for name in ("theta_a0", "phi_a0", "theta_a1", "phi_a1",
                     "theta_b0", "phi_b0", "theta_b1", "phi_b1"):
            results[f"angle_{name}"] = getattr(angles, name)
    return _report("chsh", config, args.seed, results, {})


def cmd_selftest(args) -> Report:
    extended = getattr(args, "extended", False)
    default = "reference-extended" if extended else "reference-my"
    config = load_config(args.config, default=default)
    exp = build_experiment(config)
    tol = args.tol if args.tol is not None else 1e-6
    results: dict = {}
    flags: dict = {}
    if extended:
        rep = ext_my_check(exp, tol=tol)
        for i, sub in enumerate(rep.base_reports):
            results[f"subtest{i}_max_residual"] = sub.max_residual()
        if rep.conj_params is not None:
            results["conj_a"] = rep.conj_params.a
            results["conj_c_abs"] = abs(rep.conj_params.c)
        flags["ext_my_pass"] = rep.passed
    else:
        rep = my_check_experiment(exp, tol=tol)
        for name, value in sorted(rep.residuals.items()):
            results[f"residual_{name}"] = value
        results["anticommutator_a"] = rep.anticommutator_a
        results["anticommutator_b"] = rep.anticommutator_b
        flags["my_pass"] = rep.passed
        iso = swap_isometry(exp)
        results["fidelity_epr"] = iso.fidelity_epr
    return _report("selftest", config, args.seed, results, flags)


def _gate_by_name(name: str) -> np.ndarray:
    if name == "hadamard":
        return hadamard_gate()
    if name == "ctrlz":
        return ctrl_z_gate()
    if name.startswith("rot:"):
        return rotation_gate(float(name.split(":", 1)[1]))
    raise ConfigError(f"unknown gate {name!r} (use hadamard, ctrlz, rot:<angle>)")


def cmd_gatetest(args) -> Report:
    config = load_config(args.config, default="reference") if args.config else {}
    section = dict(config.get("gatetest", {}))
    if getattr(args, "gate", None):
        section["gate"] = args.gate
    gate = _gate_by_name(section.get("gate", "hadamard"))
    corruption = float(section.get("corruption", 0.0))
    exps = build_gate_test_experiments(gate, corruption=corruption)
    tol = args.tol if args.tol is not None else 1e-9
    rep = gate_test(*exps, gate, tol=tol)
    results = {
        "residual_exp1": rep.sim_residuals[0],
        "residual_exp2": rep.sim_residuals[1],
        "residual_exp3": rep.sim_residuals[2],
        "choi_distance": rep.choi_distance,
    }
    return _report("gatetest", {"gatetest": section}, args.seed, results,
                   {"gate_pass": rep.passed})


def cmd_diqkd(args) -> Report:
    config = load_config(args.config, default="reference") if args.config else {}
    section = dict(config.get("diqkd", {}))
    s = getattr(args, "s", None)
    s = s if s is not None else section.get("s")
    q = getattr(args, "q", None)
    q = q if q is not None else section.get("q", 0.0)
    if s is None:
        raise ConfigError("diqkd needs --s or a [diqkd] s entry")
    kr = key_rate(KeyRateInput(float(s), float(q)))
    results = {"s": float(s), "q": float(q), "hye_bound": kr.hye,
               "key_rate_raw": kr.raw, "key_rate": kr.clamped}
    rows = section.get("tail", [[1000, 100, 0, float(s) / 8 + 0.05]])
    for i, row in enumerate(rows):
        try:
            n, m, r, mu = int(row[0]), int(row[1]), int(row[2]), float(row[3])
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"bad tail row {row!r}: {exc}") from exc
        p = (float(s) + 4.0) / 8.0
        results[f"tail_bound_{i}_n{n}_m{m}_r{r}"] = tail_bound(
            TailBoundInput(n=n, m=m, r=r, p=min(p, 1.0), mu=mu))
    return _report("diqkd", {"diqkd": section, "s": s, "q": q}, args.seed,
                   results, {})


def cmd_certify(args) -> Report:
    config = load_config(args.config, default="reference")
    exp = build_experiment(config)
    rep = certify(exp, restarts=8, seed=args.seed)
    results = {"s": rep.chsh.s, "p": rep.chsh.p, "s_used": rep.s_used}
    if rep.s_max is not None:
        results["s_max"] = rep.s_max
    for k, v in rep.bounds.items():
        results[f"bound_{k}"] = v
    for k, v in rep.achieved.items():
        results[f"achieved_{k}"] = v
    return _report("certify", config, args.seed, results, dict(rep.flags))


def cmd_qbox(args) -> Report:
    rng = np.random.default_rng(args.seed)
    samples = getattr(args, "samples", 2500)
    results: dict = {}
    wins_total = 0
    for a in (0, 1):
        for b in (0, 1):
            wins = sum(int(t.x ^ t.y == a & b)
                       for t in (nonlocal_box_run(a, b, rng) for _ in range(samples)))
            results[f"win_rate_{a}{b}"] = wins / samples
            wins_total += wins
    p = wins_total / (4 * samples)
    results["p"] = p
    results["s_box"] = 8.0 * p - 4.0
    return _report("qbox", {"samples": samples}, args.seed, results,
                   {"all_wins": wins_total == 4 * samples})


COMMANDS = {
    "chsh": cmd_chsh,
    "selftest": cmd_selftest,
    "gatetest": cmd_gatetest,
    "diqkd": cmd_diqkd,
    "certify": cmd_certify,
    "qbox": cmd_qbox,
}


def cmd_sweep(args) -> int:
    base = load_config(args.config, default="reference") if args.config else {}
    lo, hi = (float(x) for x in args.range.split(":"))
    values = np.linspace(lo, hi, args.steps)
    if args.command not in COMMANDS:
        raise ConfigError(f"sweep cannot run unknown command {args.command!r}")

    import copy
    import tempfile

    def run_point(idx_value):
        idx, value = idx_value
        from .report import canonical_float
        value = canonical_float(value)  # the CSV reprints exactly this number
        cfg = copy.deepcopy(base)
        set_by_path(cfg, args.param, float(value))
        sub_args = argparse.Namespace(**vars(args))
        # Route the modified config through a temp file so the subcommand
        # takes the same path as a user-supplied one.
        with tempfile.NamedTemporaryFile("w", suffix=".toml", delete=False) as fh:
            fh.write(_to_toml(cfg))
            path = fh.name
        try:
            sub_args.config = path
            report = COMMANDS[args.command](sub_args)
        finally:
            os.unlink(path)
        return idx, float(value), report

    workers = int(os.environ.get("BBQCERT_THREADS", "1"))
    points = list(enumerate(values))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_point, points))
    else:
        rows = [run_point(p) for p in points]
    rows.sort(key=lambda r: r[0])

    keys = sorted(rows[0][2].results)
    lines = [",".join([args.param] + keys)]
    for _, value, report in rows:
        cells = [f"{value:.11e}"]
        for k in keys:
            v = report.results[k]
            cells.append(f"{v:.11e}" if isinstance(v, float) else str(v))
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _to_toml(config: dict) -> str:
    """Serialize the restricted config dict shape back to TOML."""
    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, (int, float)):
            return repr(v)
        if isinstance(v, str):
            return f'"{v}"'
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        raise ConfigError(f"cannot serialize config value {v!r}")

    top = [f"{k} = {fmt(v)}" for k, v in config.items() if not isinstance(v, dict)]
    sections = []
    for name, body in config.items():
        if not isinstance(body, dict):
            continue
        sections.append(f"[{name}]")
        for k, v in body.items():
            sections.append(f"{k} = {fmt(v)}")
    return "\n".join(top + sections) + "\n"


def _emit(report: Report, args) -> None:
    if args.format == "json":
        text = report.to_json() + "\n"
    elif args.format == "csv":
        text = report.to_csv()
    else:
        text = report.to_text() + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bbqcert",
        description="Black-box quantum device simulation and certification")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", default=None,
                       help="TOML config path or builtin name")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "csv", "text"),
                       default="text")

    for name in ("chsh", "certify"):
        common(sub.add_parser(name))
    p = sub.add_parser("selftest")
    common(p)
    p.add_argument("--extended", action="store_true")
    p = sub.add_parser("gatetest")
    common(p)
    p.add_argument("--gate", default=None,
                   help="hadamard | ctrlz | rot:<angle>")
    p = sub.add_parser("diqkd")
    common(p)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p = sub.add_parser("qbox")
    common(p)
    p.add_argument("--samples", type=int, default=2500)
    p = sub.add_parser("sweep")
    common(p)
    p.add_argument("--command", required=True)
    p.add_argument("--param", required=True,
                   help="dotted config path, e.g. diqkd.s or state.theta")
    p.add_argument("--range", required=True, help="lo:hi")
    p.add_argument("--steps", type=int, required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.subcommand == "sweep":
            return cmd_sweep(args)
        report = COMMANDS[args.subcommand](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(report, args)
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

One executable wires all modules: deterministic seeded experiments in,
CSV/JSON/SVG artifacts out.  Every output embeds the tool version, the
resolved configuration, the seeds, and the wall-clock duration, so a
result file is its own provenance record.  Numeric payloads are
reproduced bit for bit when config and seeds are fixed; the duration
line is the one declared exception.

Exit codes: 0 success, 1 validation or usage error, 2 numeric failure,
3 failed check suite.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .cache import MomentCache
from .chaos import sample_total_masses
from .checks import modular_partition_ratio, run_checks
from .config import FieldResolution, MonteCarloConfig
from .errors import NumericError, SchemaMismatch, TorusLQGError, ValidationError
from .gff import RngStream, evaluate_on_grid, sample_gff
from .green import GreenEvalConfig, green
from .lqft import InsertionSet, LQFTParams, partition_function
from .lqg import (
    MatterCFT,
    build_density_table,
    joint_law_sampler,
    params_from_matter,
    sample_modulus,
    template_from_matter,
)
from .modular import reduce_to_fundamental
from .special import dedekind_eta, theta1, theta_aux
from .svg import render_heatmap, render_line


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 (not argparse's default 2) per the CLI contract."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _tau(text: str) -> complex:
    try:
        re, im = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM pair, got {text!r}")
    return complex(re, im)


def _point(text: str) -> tuple[float, float]:
    try:
        a, b = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X1,X2 pair, got {text!r}")
    return a, b


def _insertions(text: str) -> tuple:
    out = []
    for chunk in text.split(";"):
        parts = chunk.split(",")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                f"expected X1,X2,ALPHA triples joined by ';', got {chunk!r}"
            )
        out.append(tuple(float(p) for p in parts))
    return tuple(out)


def _matter(text: str) -> MatterCFT:
    if text == "pure":
        return MatterCFT.pure_gravity()
    if text == "ising":
        return MatterCFT.ising()
    if text.startswith("ffpower:"):
        return MatterCFT.free_field_power(float(text.split(":", 1)[1]))
    raise argparse.ArgumentTypeError(
        f"matter must be pure, ising, or ffpower:<c_m>, got {text!r}"
    )


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(","))


def _json_safe(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (tuple, list)):
        return [_json_safe(x) for x in v]
    if isinstance(v, MatterCFT):
        return {"kind": v.kind, "central_charge": v.central_charge}
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return str(v)


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    return str(v)


_SKIP_IN_CONFIG = {"group", "cmd", "config", "out", "data", "func"}


def _resolved_config(args) -> dict:
    return {
        k: _json_safe(v)
        for k, v in sorted(vars(args).items())
        if k not in _SKIP_IN_CONFIG and not k.startswith("_")
    }


def _header_lines(argv, args, t0: float) -> list[str]:
    cfg = _resolved_config(args)
    seed = cfg.get("seed", "-")
    return [
        f"torus-lqg {__version__}",
        "command: " + " ".join(argv),
        "config: " + json.dumps(cfg, sort_keys=True),
        f"seed: {seed}",
        f"duration_s: {time.time() - t0:.3f}",
    ]


def _write_csv(path: str, header: list[str], columns: list[str], rows) -> None:
    lines = [f"# {h}" for h in header]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _emit_json(args, payload: dict, header: list[str]) -> None:
    meta = {
        "version": __version__,
        "command": header[1].removeprefix("command: "),
        "config": _resolved_config(args),
        "seed": _resolved_config(args).get("seed", "-"),
        "duration_s": float(header[-1].split(": ")[1]),
    }
    text = json.dumps({"meta": meta, **payload}, sort_keys=True, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- handlers


def _cmd_special_eval(args, emit):
    tau = args.tau
    if args.fn == "eta":
        val = dedekind_eta(tau)
    elif args.fn == "theta1":
        if args.z is None:
            raise ValidationError("theta1 needs --z RE,IM")
        val = complex(theta1(complex(*args.z), tau))
    elif args.fn in ("theta2", "theta3", "theta4"):
        val = theta_aux(int(args.fn[-1]), tau)
    else:
        raise ValidationError(f"unknown function {args.fn!r}")
    emit({"fn": args.fn, "tau": _json_safe(tau), "value": _json_safe(complex(val))})
    return 0


def _cmd_modular_reduce(args, emit):
    red = reduce_to_fundamental(args.tau)
    w = red.witness
    emit(
        {
            "tau": _json_safe(args.tau),
            "reduced": _json_safe(red.tau),
            "witness": {"a": w.a, "b": w.b, "c": w.c, "d": w.d},
        }
    )
    return 0


def _cmd_green_eval(args, emit):
    cfg = GreenEvalConfig(
        mode=args.mode, eigen_cutoff=args.eigen_cutoff, tolerance=args.tolerance
    )
    val = green(args.tau, args.x, cfg)
    emit({"tau": _json_safe(args.tau), "x": list(args.x), "green": float(val)})
    return 0


def _cmd_green_table(args, finish_csv):
    g = args.grid
    u = (np.arange(g) + 0.5) / g
    x1, x2 = np.meshgrid(u, u, indexing="ij")
    vals = green(args.tau, (x1, x2))
    rows = [
        (float(x1[i, j]), float(x2[i, j]), float(vals[i, j]))
        for i in range(g)
        for j in range(g)
    ]
    finish_csv(["x1", "x2", "green"], rows)
    return 0


def _cmd_gff_sample(args, finish_csv):
    fld = sample_gff(args.tau, args.cutoff, RngStream(args.seed, args.stream))
    vals = evaluate_on_grid(fld, args.grid)
    g = vals.shape[0]
    rows = [
        (i, j, i / g, j / g, float(vals[i, j])) for i in range(g) for j in range(g)
    ]
    finish_csv(["i", "j", "x1", "x2", "value"], rows)
    return 0


def _cmd_gmc_sample(args, finish_csv):
    gamma = 2.0 if args.critical else args.gamma
    q = 2.0 / gamma + gamma / 2.0
    res = FieldResolution(args.cutoff, args.grid_factor, eps=args.eps)
    mc = MonteCarloConfig(replicas=args.replicas, seed=args.seed)
    masses = sample_total_masses(args.tau, gamma, q, mc, res, critical=args.critical)
    finish_csv(
        ["replica", "total_mass"], [(r, float(m)) for r, m in enumerate(masses)]
    )
    return 0


def _cmd_lqft_partition(args, emit):
    params = LQFTParams(gamma=args.gamma, mu=args.mu)
    ins = InsertionSet(args.insertions)
    mc = MonteCarloConfig(replicas=args.replicas, seed=args.seed)
    res = FieldResolution(args.cutoff, args.grid_factor)
    est = partition_function(params, args.tau, ins, mc, res)
    emit(
        {
            "value": est.value,
            "std_error": est.std_error,
            "replicas": est.replicas,
            "diagnostic": est.diagnostic,
        }
    )
    return 0


def _cmd_lqft_check_kpz(args, emit):
    ins = InsertionSet(args.insertions)
    mc = MonteCarloConfig(replicas=args.replicas, seed=args.seed)
    res = FieldResolution(args.cutoff, args.grid_factor)
    base = partition_function(LQFTParams(args.gamma, 1.0), args.tau, ins, mc, res)
    p = ins.alpha_sum / args.gamma
    residuals = {}
    for mu in args.mu_list:
        est = partition_function(LQFTParams(args.gamma, mu), args.tau, ins, mc, res)
        residuals[str(mu)] = abs(est.value / base.value - mu ** (-p))
    worst = max(residuals.values())
    passed = worst <= 1e-12
    emit(
        {
            "residuals": residuals,
            "max_residual": worst,
            "tolerance": 1e-12,
            "passed": passed,
        }
    )
    return 0 if passed else 3


def _cmd_lqft_check_modular(args, emit):
    mc = MonteCarloConfig(replicas=args.replicas, seed=args.seed)
    res = FieldResolution(args.cutoff, args.grid_factor)
    ratio, se = modular_partition_ratio(args.tau, args.gamma, args.alpha, mc, res)
    dev = abs(ratio - 1.0) / se
    passed = dev <= 3.0
    emit(
        {
            "ratio": ratio,
            "std_error": se,
            "deviation_se": dev,
            "passed": passed,
        }
    )
    return 0 if passed else 3


def _build_table(args):
    matter = args.matter
    params = params_from_matter(matter, mu=args.mu)
    pts = [(k / args.n, k / args.n) for k in range(args.n)]
    ins = template_from_matter(matter, params, pts)
    mc = MonteCarloConfig(replicas=args.replicas, seed=args.seed)
    res = FieldResolution(args.cutoff, args.grid_factor)
    cache = None if args.no_cache else MomentCache()
    return params, ins, build_density_table(
        matter,
        params,
        ins,
        mc,
        res,
        re_cells=args.re_cells,
        im_cells=args.im_cells,
        t_max=args.t_max,
        tail_tol=args.tail_tol,
        cache=cache,
        threads=args.threads,
    )


def _cmd_lqg_density(args, finish_csv):
    _, _, table = _build_table(args)
    rows = []
    re_c, im_c = table.re_centers, table.im_centers
    for a in range(len(re_c)):
        for b in range(len(im_c)):
            if table.density[a, b] > 0:
                rows.append(
                    (
                        float(re_c[a]),
                        float(im_c[b]),
                        float(table.density[a, b]),
                        float(table.std_error[a, b]),
                    )
                )
    finish_csv(["re_tau", "im_tau", "density", "std_error"], rows)
    return 0


def _cmd_lqg_sample_joint(args, finish_csv):
    matter = args.matter
    params, ins, table = _build_table(args)
    rows = []
    sampler = joint_law_sampler(
        matter, params, ins, table, args.samples, RngStream(args.seed, 1)
    )
    for k, smp in enumerate(sampler):
        rows.append((k, smp.tau.real, smp.tau.imag, smp.volume))
    finish_csv(["sample", "re_tau", "im_tau", "volume"], rows)
    return 0


def _read_csv(path: str) -> tuple[list[str], list[list[float]]]:
    columns: list[str] = []
    rows: list[list[float]] = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}")
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if not columns:
            columns = [c.strip() for c in ln.split(",")]
            continue
        try:
            rows.append([float(p) for p in ln.split(",")])
        except ValueError:
            raise SchemaMismatch(f"non-numeric data row in {path}: {ln!r}")
    return columns, rows


def _cmd_lqg_plot(args, finish_svg):
    columns, rows = _read_csv(args.data)
    title = Path(args.data).stem
    if args.kind == "heatmap":
        needed = ("re_tau", "im_tau", "density")
        if not all(c in columns for c in needed):
            raise SchemaMismatch(
                f"heatmap needs columns {needed}, file has {tuple(columns)}"
            )
        if not rows:
            raise SchemaMismatch("no data rows to plot")
        ix = [columns.index(c) for c in needed]
        finish_svg(
            lambda header: render_heatmap(
                [r[ix[0]] for r in rows],
                [r[ix[1]] for r in rows],
                [r[ix[2]] for r in rows],
                title,
                header,
            )
        )
    else:
        if len(columns) != 2:
            raise SchemaMismatch(
                f"line plot needs exactly two columns, file has {tuple(columns)}"
            )
        if not rows:
            raise SchemaMismatch("no data rows to plot")
        finish_svg(
            lambda header: render_line(
                [r[0] for r in rows], [r[1] for r in rows], title, header
            )
        )
    return 0


def _cmd_check(args, _emit):
    results = run_checks(quick=args.quick)
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"[{mark}] {r.name:24s} {r.detail}  ({r.seconds:.2f}s)")
    failed = [r for r in results if not r.passed]
    scope = "quick" if args.quick else "full"
    print(f"{len(results) - len(failed)}/{len(results)} {scope} checks passed")
    return 0 if not failed else 3


# ---------------------------------------------------------------- parser


def _add_mc_flags(p, replicas=1000):
    p.add_argument("--replicas", type=int, default=replicas)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cutoff", type=int, default=16)
    p.add_argument("--grid-factor", type=int, default=4, dest="grid_factor")


def build_parser() -> tuple[_Parser, dict]:
    parser = _Parser(prog="torus-lqg", description=__doc__)
    parser.add_argument("--version", action="version", version=f"torus-lqg {__version__}")
    parser.add_argument("--config", help="key = value defaults, overridden by flags")
    parser.add_argument("--threads", type=int, default=1)
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    registry: dict[tuple[str, str], argparse.ArgumentParser] = {}

    def sub(group, name, handler, kind):
        p = group_subs[group].add_parser(name)
        p.set_defaults(func=handler, _kind=kind, cmd=name)
        registry[(group_names[group], name)] = p
        return p

    group_subs, group_names = {}, {}
    for gname in ("special-fn", "modular", "green", "gff", "gmc", "lqft", "lqg", "check"):
        g = groups.add_parser(gname)
        if gname != "check":
            group_subs[g] = g.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
            group_names[g] = gname
        else:
            g.add_argument("scope", choices=["all"])
            g.add_argument("--quick", action="store_true")
            g.set_defaults(func=_cmd_check, _kind="none", cmd="all", group="check")
            registry[("check", "all")] = g
        if gname == "special-fn":
            p = sub(g, "eval", _cmd_special_eval, "json")
            p.add_argument("--fn", required=True,
                           choices=["eta", "theta1", "theta2", "theta3", "theta4"])
            p.add_argument("--tau", type=_tau, required=True)
            p.add_argument("--z", type=_point, default=None)
            p.add_argument("--out")
        elif gname == "modular":
            p = sub(g, "reduce", _cmd_modular_reduce, "json")
            p.add_argument("--tau", type=_tau, required=True)
            p.add_argument("--out")
        elif gname == "green":
            p = sub(g, "eval", _cmd_green_eval, "json")
            p.add_argument("--tau", type=_tau, required=True)
            p.add_argument("--x", type=_point, required=True)
            p.add_argument("--mode", choices=["closed", "eigen", "appendix"],
                           default="closed")
            p.add_argument("--eigen-cutoff", type=int, default=200, dest="eigen_cutoff")
            p.add_argument("--tolerance", type=float, default=1e-2)
            p.add_argument("--out")
            p = sub(g, "table", _cmd_green_table, "csv")
            p.add_argument("--tau", type=_tau, required=True)
            p.add_argument("--grid", type=int, default=64)
            p.add_argument("--out", required=True)
        elif gname == "gff":
            p = sub(g, "sample", _cmd_gff_sample, "csv")
            p.add_argument("--tau", type=_tau, required=True)
            p.add_argument("--cutoff", type=int, default=32)
            p.add_argument("--grid", type=int, default=None)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--stream", type=int, default=0)
            p.add_argument("--out", required=True)
        elif gname == "gmc":
            p = sub(g, "sample", _cmd_gmc_sample, "csv")
            p.add_argument("--tau", type=_tau, required=True)
            p.add_argument("--gamma", type=float, default=1.0)
            p.add_argument("--critical", action="store_true")
            p.add_argument("--eps", type=float, default=None)
            _add_mc_flags(p)
            p.add_argument("--out", required=True)
        elif gname == "lqft":
            p = sub(g, "partition", _cmd_lqft_partition, "json")
            p.add_argument("--tau", type=_tau, required=True)
            p.add_argument("--gamma", type=float, required=True)
            p.add_argument("--mu", type=float, default=1.0)
            p.add_argument("--insertions", type=_insertions, required=True)
            _add_mc_flags(p)
            p.add_argument("--out")
            p = sub(g, "check-kpz", _cmd_lqft_check_kpz, "json")
            p.add_argument("--tau", type=_tau, default=complex(0.2, 1.3))
            p.add_argument("--gamma", type=float, default=1.0)
            p.add_argument("--insertions", type=_insertions,
                           default=((0.1, 0.3, 0.9), (0.6, 0.1, 0.4)))
            p.add_argument("--mu-list", type=_float_list, default=(0.5, 2.0, 10.0),
                           dest="mu_list")
            _add_mc_flags(p, replicas=256)
            p.add_argument("--out")
            p = sub(g, "check-modular", _cmd_lqft_check_modular, "json")
            p.add_argument("--tau", type=_tau, default=complex(0.0, 2.0))
            p.add_argument("--gamma", type=float, default=1.0)
            p.add_argument("--alpha", type=float, default=1.0)
            _add_mc_flags(p, replicas=2000)
            p.add_argument("--out")
        elif gname == "lqg":
            for name, handler in (
                ("modulus-density", _cmd_lqg_density),
                ("sample-joint", _cmd_lqg_sample_joint),
            ):
                p = sub(g, name, handler, "csv")
                p.add_argument("--matter", type=_matter, required=True)
                p.add_argument("--mu", type=float, default=1.0)
                p.add_argument("--n", type=int, default=1)
                p.add_argument("--re-cells", type=int, default=12, dest="re_cells")
                p.add_argument("--im-cells", type=int, default=12, dest="im_cells")
                p.add_argument("--t-max", type=float, default=8.0, dest="t_max")
                p.add_argument("--tail-tol", type=float, default=1e-3, dest="tail_tol")
                p.add_argument("--no-cache", action="store_true", dest="no_cache")
                _add_mc_flags(p, replicas=256)
                if name == "sample-joint":
                    p.add_argument("--samples", type=int, default=1000)
                p.add_argument("--out", required=True)
            p = sub(g, "plot", _cmd_lqg_plot, "svg")
            p.add_argument("data")
            p.add_argument("--kind", choices=["heatmap", "line"], default="heatmap")
            p.add_argument("--out", required=True)
    return parser, registry


def _apply_config(args, registry, argv, config_path):
    cfg = {}
    try:
        text = Path(config_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {config_path}: {exc}")
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if "=" not in ln:
            raise ValidationError(f"config line is not KEY = VALUE: {ln!r}")
        k, v = ln.split("=", 1)
        cfg[k.strip()] = v.strip()
    key = (args.group, getattr(args, "cmd", ""))
    parser = registry.get(key)
    if parser is None:
        return
    for action in parser._actions:
        if not action.option_strings or action.dest in ("help",):
            continue
        given = any(
            tok == opt or tok.startswith(opt + "=")
            for tok in argv
            for opt in action.option_strings
        )
        if given:
            continue
        for candidate in (f"{key[0]}.{key[1]}.{action.dest}",
                          f"{key[1]}.{action.dest}", action.dest):
            if candidate in cfg:
                raw = cfg[candidate]
                if isinstance(action, argparse._StoreTrueAction):
                    val = raw.lower() in ("1", "true", "yes", "on")
                elif action.type is not None:
                    val = action.type(raw)
                else:
                    val = raw
                setattr(args, action.dest, val)
                break


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, registry = build_parser()
    args = parser.parse_args(argv)
    t0 = time.time()
    try:
        if args.config:
            _apply_config(args, registry, argv, args.config)
        kind = getattr(args, "_kind", "none")
        if kind == "json":

            def emit(payload):
                _emit_json(args, payload, _header_lines(argv, args, t0))

            return args.func(args, emit)
        if kind == "csv":

            def finish_csv(columns, rows):
                _write_csv(args.out, _header_lines(argv, args, t0), columns, rows)

            return args.func(args, finish_csv)
        if kind == "svg":

            def finish_svg(build):
                Path(args.out).write_text(
                    build(_header_lines(argv, args, t0)), encoding="utf-8"
                )

            return args.func(args, finish_svg)
        return args.func(args, None)
    except ValidationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except NumericError as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return 2
    except TorusLQGError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())

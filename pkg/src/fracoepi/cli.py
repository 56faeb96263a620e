"""Command-line front end.

Subcommands: simulate, report, equilibria, sweep, reproduce, verify.
Exit codes: 0 success, 1 validation/check failure, 2 solver divergence,
3 reproduction line-item failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import (
    DEFAULT_ALPHAS,
    MODEL_KEYS,
    ConfigError,
    RunConfig,
    config_from_entries,
    parse_config_text,
)
from .model import (
    EquilibriumKind,
    ModelParams,
    State,
    ValidationError,
    equilibria,
    thresholds,
)
from .reproduce import EXAMPLE_IDS, reproduce
from .runs import cached_solve, solve_many
from .solver import DivergenceError
from .stability import classify_equilibrium
from .trajectory_io import format_float, save_trajectory_csv
from .verification import (
    boundedness_certificate,
    check_nonnegativity,
    convergence_check,
    empirical_lipschitz_ratio,
    lipschitz_bound,
    lyapunov_monotonicity,
)

REPORT_ALPHAS = (0.6, 2.0 / 3.0, 0.85, 0.95, 1.0)


def _parse_alpha_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValidationError(f"bad --alpha list {text!r}: {exc}") from None
    if not values:
        raise ValidationError("--alpha list is empty")
    for v in values:
        if not (0.0 < v <= 1.0):
            raise ValidationError(f"order must lie in (0,1], got {v}")
    return values


def _add_common(parser: argparse.ArgumentParser, with_solver: bool = True) -> None:
    parser.add_argument("--preset", help="built-in parameter set name")
    parser.add_argument("--config", help="path to a key-value config file")
    parser.add_argument("--alpha", help="comma-separated fractional orders in (0,1]")
    if with_solver:
        parser.add_argument("--step", type=float, help="uniform grid spacing")
        parser.add_argument("--t-end", dest="t_end", type=float, help="end time")
        parser.add_argument("--out", help="output directory")
        parser.add_argument("--format", dest="fmt", choices=["csv"], help="output format")


def _resolve_config(args) -> RunConfig:
    entries: dict = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        entries = parse_config_text(path.read_text(encoding="utf-8"))
    if args.preset:
        entries["model.preset"] = args.preset
    if "model.preset" not in entries and not any(
        k.startswith("model.") for k in entries
    ):
        raise ConfigError("no model given: use --preset or a config file")
    if args.alpha:
        entries["solver.alpha"] = list(_parse_alpha_list(args.alpha))
    if getattr(args, "step", None) is not None:
        entries["solver.step"] = args.step
    if getattr(args, "t_end", None) is not None:
        entries["solver.t_end"] = args.t_end
    if getattr(args, "out", None):
        entries["output.directory"] = args.out
    if getattr(args, "fmt", None):
        entries["output.format"] = args.fmt
    return config_from_entries(entries)


def _state_tag(x0: State) -> str:
    return f"({x0.susceptible:g},{x0.infected:g},{x0.predator:g})"


def _alpha_tag(alpha: float) -> str:
    return format(alpha, "g").replace(".", "p")


def cmd_simulate(args) -> int:
    cfg = _resolve_config(args)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [
        (cfg.params, alpha, x0, cfg.step, cfg.t_end, cfg.corrector_iterations)
        for alpha in cfg.alphas
        for x0 in cfg.initial_states
    ]
    trajectories = solve_many(jobs)
    eta = 0.5 * min(cfg.params.infected_death_rate, cfg.params.predator_death_rate)
    summary = [f"model: {cfg.preset_name or 'custom'}"]
    idx = 0
    for alpha in cfg.alphas:
        for j, x0 in enumerate(cfg.initial_states):
            traj = trajectories[idx]
            idx += 1
            name = f"traj_alpha{_alpha_tag(alpha)}_x{j}.csv"
            save_trajectory_csv(traj, cfg.out_dir / name)
            nn = check_nonnegativity(traj)
            bc = boundedness_certificate(cfg.params, traj, eta)
            final = ",".join(format_float(v) for v in traj.final_state)
            summary.append(
                f"alpha={alpha:g} x0={_state_tag(x0)} file={name} "
                f"final=({final}) nonnegative={'pass' if nn.passed else 'fail'} "
                f"bounded={'pass' if bc.passed else 'fail'} "
                f"(max V {bc.worst_value:.6g}, bound {bc.bound:.6g})"
            )
    (cfg.out_dir / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    print("\n".join(summary))
    print(f"wrote {len(jobs)} trajectory file(s) to {cfg.out_dir}")
    return 0


def _equilibria_lines(params: ModelParams) -> list[str]:
    lines = []
    for eq in equilibria(params):
        if eq.state is None:
            coords = "undefined"
        else:
            coords = (
                f"({eq.state.susceptible:.6g}, {eq.state.infected:.6g}, "
                f"{eq.state.predator:.6g})"
            )
        conds = "; ".join(
            f"{c.name}: {'yes' if c.satisfied else 'no'}"
            + (f" (margin {c.margin:.4g})" if c.margin is not None else "")
            for c in eq.conditions
        )
        lines.append(
            f"{eq.kind.value:3s} {coords} exists={'yes' if eq.exists else 'no'}"
            + (f" [{conds}]" if conds else "")
        )
    return lines


def _fmt_opt(value) -> str:
    return "n/a" if value is None else f"{value:.6g}"


def cmd_report(args) -> int:
    cfg = _resolve_config(args)
    params = cfg.params
    alphas = _parse_alpha_list(args.alpha) if args.alpha else REPORT_ALPHAS
    th = thresholds(params)
    lines = [f"model: {cfg.preset_name or 'custom'}"]
    lines.append("thresholds:")
    lines.append(f"  R0 (infection invasion)      = {th.reproduction_number:.6g}")
    lines.append(f"  d1 (E2 local stability)      = {_fmt_opt(th.predator_death_local)}")
    lines.append(f"  d2 (E2 global stability)     = {_fmt_opt(th.predator_death_global)}")
    lines.append(f"  theta1 (E* existence)        = {_fmt_opt(th.conversion_existence)}")
    lines.append(
        f"  theta2 (E* global, S* at theta={params.conversion_efficiency:g}) "
        f"= {_fmt_opt(th.conversion_global)}"
    )
    if args.theta2_reference is not None:
        ref_params = params.replace(conversion_efficiency=args.theta2_reference)
        ref_eq = next(
            e for e in equilibria(ref_params) if e.kind is EquilibriumKind.COEXISTENCE
        )
        if ref_eq.state is not None:
            th_ref = thresholds(params, theta2_reference=ref_eq.state)
            lines.append(
                f"  theta2 (S* at theta={args.theta2_reference:g})      "
                f"= {_fmt_opt(th_ref.conversion_global)}"
            )
    lines.append(f"  1 + r/4 (node/focus boundary as R0 value) = {th.focus_boundary:.6g}")
    for note in th.not_applicable:
        lines.append(f"  note: {note}")
    lines.append("equilibria:")
    lines += ["  " + line for line in _equilibria_lines(params)]
    lines.append("stability (rows: equilibrium, columns: order):")
    header = "  {:4s} ".format("") + " ".join(f"{a:>18.4g}" for a in alphas)
    lines.append(header)
    for eq in equilibria(params):
        if not eq.exists or eq.state is None:
            lines.append(f"  {eq.kind.value:4s} " + " ".join(["{:>18s}".format("-")] * len(alphas)))
            continue
        cells = []
        for alpha in alphas:
            verdict = classify_equilibrium(params, eq, alpha)
            tag = verdict.label + (f"({verdict.case})" if verdict.case else "")
            cells.append(f"{tag:>18s}")
        lines.append(f"  {eq.kind.value:4s} " + " ".join(cells))
    print("\n".join(lines))
    return 0


def cmd_equilibria(args) -> int:
    cfg = _resolve_config(args)
    print("\n".join(_equilibria_lines(cfg.params)))
    return 0


def _parse_grid(text: str) -> tuple[str, np.ndarray]:
    try:
        name, _, grid_text = text.partition("=")
        start_s, stop_s, count_s = grid_text.split(":")
        start, stop, count = float(start_s), float(stop_s), int(count_s)
    except ValueError:
        raise ValidationError(
            f"bad --vary {text!r}; expected name=start:stop:count"
        ) from None
    if count < 0:
        raise ValidationError("grid count must be non-negative")
    return name.strip(), np.linspace(start, stop, count) if count else np.array([])


_SWEEP_FIELDS = ("exists", "S", "I", "P", "label", "margin", "critical_order")


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    alphas = _parse_alpha_list(args.alpha) if args.alpha else DEFAULT_ALPHAS
    name, grid = _parse_grid(args.vary)
    field = MODEL_KEYS.get(name.lower())
    if field is None:
        raise ValidationError(f"unknown model parameter {name!r}")

    out_path = Path(args.out) if args.out else Path("sweep.csv")
    if out_path.is_dir() or (args.out and args.out.endswith("/")):
        out_path.mkdir(parents=True, exist_ok=True)
        out_path = out_path / "sweep.csv"
    out_path.parent.mkdir(parents=True, exist_ok=True)

    kinds = [k.value for k in EquilibriumKind]
    header = ["parameter", "value", "alpha"] + [
        f"{kind}_{f}" for kind in kinds for f in _SWEEP_FIELDS
    ]
    rows = []
    for value in grid:
        try:
            params = cfg.params.replace(**{field: float(value)})
        except ValidationError as exc:
            raise ValidationError(
                f"grid value {value:g} leaves the valid region: {exc}"
            ) from None
        for alpha in alphas:
            cells = [name, format_float(value), format_float(alpha)]
            for eq in equilibria(params):
                if not eq.exists or eq.state is None:
                    coords = eq.state
                    cells += [
                        "0",
                        *(
                            [format_float(c) for c in coords.as_array()]
                            if coords is not None
                            else ["nan", "nan", "nan"]
                        ),
                        "-",
                        "nan",
                        "nan",
                    ]
                    continue
                verdict = classify_equilibrium(params, eq, alpha)
                cells += [
                    "1",
                    *(format_float(c) for c in eq.state.as_array()),
                    verdict.label,
                    format_float(verdict.margin),
                    format_float(verdict.critical_order),
                ]
            rows.append(",".join(cells))
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(row + "\n")
    print(f"wrote {len(rows)} sweep row(s) to {out_path}")
    return 0


def cmd_reproduce(args) -> int:
    report = reproduce(args.example, out_dir=args.out or "out")
    print(report.render())
    return 3 if report.failed else 0


def cmd_verify(args) -> int:
    cfg = _resolve_config(args)
    params = cfg.params
    tol = args.tolerance if args.tolerance is not None else 0.05
    eta = 0.5 * min(params.infected_death_rate, params.predator_death_rate)
    all_ok = True
    lines = []
    for alpha in cfg.alphas:
        for x0 in cfg.initial_states:
            traj = cached_solve(
                params, alpha, x0, cfg.step, cfg.t_end, cfg.corrector_iterations
            )
            nn = check_nonnegativity(traj)
            bc = boundedness_certificate(params, traj, eta)
            lines.append(
                f"alpha={alpha:g} x0={_state_tag(x0)}: "
                f"nonnegativity {'pass' if nn.passed else 'fail'} "
                f"(worst undershoot {nn.worst_undershoot.max():.3g}); "
                f"boundedness {'pass' if bc.passed else 'fail'} "
                f"(max V {bc.worst_value:.6g} vs bound {bc.bound:.6g}, eta={eta:g})"
            )
            all_ok &= nn.passed and bc.passed

            stable_target = None
            for eq in equilibria(params):
                if not eq.exists or eq.state is None:
                    continue
                verdict = classify_equilibrium(params, eq, alpha)
                if verdict.stable:
                    stable_target = eq
                    break
            if stable_target is not None:
                conv = convergence_check(traj, stable_target.state, tol=tol)
                lines.append(
                    f"  convergence to {stable_target.kind.value}: "
                    f"{'pass' if conv.converged else 'fail'} "
                    f"(max tail distance {conv.max_tail_distance:.4g}, tol {tol:g})"
                )
                all_ok &= conv.converged
                if stable_target.kind is not EquilibriumKind.EXTINCTION:
                    ly = lyapunov_monotonicity(params, stable_target, traj)
                    lines.append(
                        f"  Lyapunov decrease toward {stable_target.kind.value}: "
                        f"{'pass' if ly.monotone else 'fail'} "
                        f"(max increase {ly.max_increase:.3g}, slack {ly.slack:g}; "
                        f"hypothesis {ly.hypothesis.description}: {ly.hypothesis.satisfied}, "
                        f"{ly.hypothesis.detail})"
                    )
                    all_ok &= ly.monotone
            else:
                lines.append("  no stable equilibrium at this order; convergence skipped")

    radius = 1.2 * max(
        60.0,
        max(
            float(
                np.abs(
                    cached_solve(
                        params, alpha, x0, cfg.step, cfg.t_end, cfg.corrector_iterations
                    ).states
                ).max()
            )
            for alpha in cfg.alphas
            for x0 in cfg.initial_states
        ),
    )
    bound = lipschitz_bound(params, radius)
    observed = empirical_lipschitz_ratio(params, radius, pairs=2000)
    ok = observed <= bound
    lines.append(
        f"Lipschitz bound on [0,{radius:.4g}]^3: {'pass' if ok else 'fail'} "
        f"(bound {bound:.6g}, observed {observed:.6g})"
    )
    all_ok &= ok
    print("\n".join(lines))
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracoepi",
        description=(
            "fractional-order eco-epidemiological toolkit: simulation, "
            "stability reports, parameter sweeps, verification"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate and write trajectory CSVs")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="thresholds, equilibria and stability table")
    _add_common(p, with_solver=False)
    p.add_argument(
        "--theta2-reference",
        type=float,
        help="also report theta2 with S* evaluated at this conversion efficiency",
    )
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("equilibria", help="list the four equilibria")
    _add_common(p, with_solver=False)
    p.set_defaults(func=cmd_equilibria)

    p = sub.add_parser("sweep", help="classification grid over one parameter")
    _add_common(p)
    p.add_argument("--vary", required=True, help="name=start:stop:count")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="run a bundled scenario against references")
    p.add_argument("example", choices=list(EXAMPLE_IDS))
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("verify", help="run the verification battery on a run")
    _add_common(p)
    p.add_argument("--tolerance", type=float, help="convergence tolerance")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits: keep usage errors on code 1
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ConfigError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"solver divergence: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

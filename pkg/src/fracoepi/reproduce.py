"""Bundled example scenarios with recorded reference values.

Each scenario re-runs a named parameter set end to end (thresholds,
equilibria, characteristic coefficients, stability verdicts, trajectory
convergence), compares every computed quantity against its recorded
reference value at a stated tolerance, and emits the matching data bundle
(trajectory/phase CSVs plus a plot script).

Line-item statuses are ``pass``, ``fail`` and ``known-discrepancy``; the
last marks the one recorded value that disagrees with its own defining
formula (the d - d1 gap of the low-conversion scenario, where the sign and
hence the stability conclusion agree but the magnitude does not).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .model import (
    EquilibriumKind,
    ModelParams,
    State,
    equilibria,
    preset,
    thresholds,
)
from .runs import cached_solve, solve_many
from .solver import Trajectory
from .stability import characteristic_cubic, classify_equilibrium
from .trajectory_io import save_trajectory_csv
from .verification import convergence_check

__all__ = [
    "EXAMPLE_IDS",
    "GLOBAL_SCENARIOS",
    "GlobalScenario",
    "ReproItem",
    "ReproReport",
    "reproduce",
]

PASS = "pass"
FAIL = "fail"
KNOWN = "known-discrepancy"

COEFF_TOL = 5e-4   # references printed to 4 decimals
COORD_TOL = 5e-3   # references printed to 2 decimals
DISC_TOL = 0.05    # the large negative discriminant reference

FIGURE_SPAN = 500.0          # time window written to figure CSVs
UNSTABLE_SPAN = 1000.0       # long enough to show the growing oscillations
SCENARIO_SPAN = 2000.0       # global-stability convergence runs
SCENARIO_STEP = 0.05
SCENARIO_ALPHAS = (0.85, 0.95)
SCENARIO_TOL = 1e-2


@dataclass(frozen=True)
class ReproItem:
    name: str
    computed: Optional[float]
    reference: Optional[float]
    tolerance: Optional[float]
    status: str
    note: str = ""

    def render(self) -> str:
        parts = [f"[{self.status}] {self.name}"]
        if self.computed is not None:
            parts.append(f"computed {self.computed:.6g}")
        if self.reference is not None:
            parts.append(f"reference {self.reference:.6g}")
        if self.tolerance is not None and self.computed is not None and self.reference is not None:
            parts.append(f"|diff| {abs(self.computed - self.reference):.2g} (tol {self.tolerance:g})")
        line = ": ".join([parts[0], ", ".join(parts[1:])]) if len(parts) > 1 else parts[0]
        if self.note:
            line += f" -- {self.note}"
        return line


@dataclass(frozen=True)
class ReproReport:
    example_id: str
    items: tuple[ReproItem, ...]
    files: tuple[Path, ...] = ()

    @property
    def failed(self) -> bool:
        return any(item.status == FAIL for item in self.items)

    def render(self) -> str:
        lines = [f"reproduction report: {self.example_id}"]
        lines += [" " + item.render() for item in self.items]
        counts = {}
        for item in self.items:
            counts[item.status] = counts.get(item.status, 0) + 1
        summary = ", ".join(f"{v} {k}" for k, v in sorted(counts.items()))
        lines.append(f" summary: {summary}")
        if self.files:
            lines.append(" files:")
            lines += [f"  {p}" for p in self.files]
        return "\n".join(lines)


def _value_item(name, computed, reference, tol, note="") -> ReproItem:
    ok = abs(computed - reference) <= tol
    return ReproItem(name, float(computed), float(reference), tol, PASS if ok else FAIL, note)


def _flag_item(name, ok, note="") -> ReproItem:
    return ReproItem(name, None, None, None, PASS if ok else FAIL, note)


@dataclass(frozen=True)
class GlobalScenario:
    """One global-stability demonstration at desk scale.

    The initial points are artifact choices: distinct, positive, and with
    deviations moderate enough that the algebraically slow fractional decay
    reaches the convergence tolerance within the configured span.
    """

    name: str
    preset_name: str
    target_kind: EquilibriumKind
    alphas: tuple[float, ...] = SCENARIO_ALPHAS
    step: float = SCENARIO_STEP
    t_end: float = SCENARIO_SPAN
    tol: float = SCENARIO_TOL

    @property
    def params(self) -> ModelParams:
        return preset(self.preset_name).params

    @property
    def initial_states(self) -> tuple[State, ...]:
        return preset(self.preset_name).initial_states

    @property
    def target_state(self) -> State:
        for eq in equilibria(self.params):
            if eq.kind is self.target_kind:
                return eq.state
        raise ValueError(f"no {self.target_kind} equilibrium")

    def jobs(self) -> list[tuple]:
        return [
            (self.params, alpha, x0, self.step, self.t_end)
            for alpha in self.alphas
            for x0 in self.initial_states
        ]


GLOBAL_SCENARIOS: dict[str, GlobalScenario] = {
    s.name: s
    for s in [
        GlobalScenario("prey-only", "example3", EquilibriumKind.PREY_ONLY),
        GlobalScenario("predator-free", "example2", EquilibriumKind.PREDATOR_FREE),
        GlobalScenario("coexistence", "example1-global", EquilibriumKind.COEXISTENCE),
    ]
}


def _interior_state(params: ModelParams) -> State:
    for eq in equilibria(params):
        if eq.kind is EquilibriumKind.COEXISTENCE:
            if eq.state is None:
                raise ValueError("interior equilibrium undefined")
            return eq.state
    raise AssertionError


def _truncate(traj: Trajectory, t_max: float) -> Trajectory:
    keep = int(np.searchsorted(traj.times, t_max, side="right"))
    return Trajectory(
        times=traj.times[:keep].copy(),
        states=traj.states[:keep].copy(),
        order=traj.order,
        metadata=dict(traj.metadata, truncated_to=t_max),
    )


def _write_plot_script(out_dir: Path, stem: str, csv_names: Sequence[str], title: str) -> Path:
    """Companion matplotlib script per figure; data stays in the CSVs."""
    lines = [
        '"""Plot script for the %s bundle (auto-generated, deterministic)."""' % stem,
        "import csv",
        "from pathlib import Path",
        "",
        "import matplotlib.pyplot as plt",
        "",
        "HERE = Path(__file__).resolve().parent",
        f"FILES = {list(csv_names)!r}",
        "",
        "fig, axes = plt.subplots(1, 3, figsize=(13, 3.5))",
        "for name in FILES:",
        "    with open(HERE / name) as fh:",
        "        rows = list(csv.reader(fh))",
        "    header, data = rows[0], [[float(x) for x in row] for row in rows[1:]]",
        "    cols = list(zip(*data))",
        "    for k, ax in enumerate(axes):",
        "        ax.plot(cols[0], cols[k + 1], label=name)",
        "        ax.set_xlabel('t')",
        "        ax.set_ylabel(header[k + 1])",
        "axes[0].legend(fontsize=6)",
        f"fig.suptitle({title!r})",
        "fig.tight_layout()",
        f"fig.savefig(HERE / '{stem}.png', dpi=150)",
        "print('wrote', HERE / '{0}.png')".format(stem),
        "",
    ]
    path = out_dir / f"{stem}_plot.py"
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def _alpha_tag(alpha: float) -> str:
    return format(alpha, "g").replace(".", "p")


def _coefficient_items(params: ModelParams, refs: dict, tol_d: float) -> list[ReproItem]:
    cubic = characteristic_cubic(params, _interior_state(params))
    items = []
    if "A1" in refs:
        items.append(_value_item("A1", cubic.a1, refs["A1"], COEFF_TOL))
    if "A2" in refs:
        items.append(_value_item("A2", cubic.a2, refs["A2"], COEFF_TOL))
    if "A3" in refs:
        items.append(_value_item("A3", cubic.a3, refs["A3"], COEFF_TOL))
    if "routh" in refs:
        items.append(_value_item("A1*A2 - A3", cubic.routh_product, refs["routh"], COEFF_TOL))
    if "D" in refs:
        items.append(_value_item("D(F)", cubic.discriminant, refs["D"], tol_d))
    return items


def _coordinate_items(name: str, computed: State, reference: tuple, tol: float) -> list[ReproItem]:
    comps = ("S", "I", "P")
    values = computed.as_array()
    return [
        _value_item(f"{name}.{comps[k]}", values[k], reference[k], tol)
        for k in range(3)
    ]


def _convergence_items(scenario: GlobalScenario, target: State) -> list[ReproItem]:
    solve_many(scenario.jobs())
    items = []
    for alpha in scenario.alphas:
        for x0 in scenario.initial_states:
            traj = cached_solve(scenario.params, alpha, x0, scenario.step, scenario.t_end)
            res = convergence_check(traj, target, tol=scenario.tol)
            items.append(
                _flag_item(
                    f"{scenario.name}: ({x0.susceptible:g},{x0.infected:g},"
                    f"{x0.predator:g}) -> {scenario.target_kind} at alpha={alpha:g}",
                    res.converged,
                    f"max tail distance {res.max_tail_distance:.3g} (tol {scenario.tol:g})",
                )
            )
    return items


def _scenario_bundle(
    scenario: GlobalScenario, out_dir: Path, stem: str, title: str
) -> list[Path]:
    files = []
    names = []
    for alpha in scenario.alphas:
        for idx, x0 in enumerate(scenario.initial_states):
            traj = cached_solve(scenario.params, alpha, x0, scenario.step, scenario.t_end)
            name = f"{stem}_alpha{_alpha_tag(alpha)}_x{idx}.csv"
            files.append(save_trajectory_csv(_truncate(traj, FIGURE_SPAN), out_dir / name))
            names.append(name)
    files.append(_write_plot_script(out_dir, stem, names, title))
    return files


def _ex1(out_dir: Path) -> tuple[list[ReproItem], list[Path]]:
    params = preset("example1").params
    items = _coefficient_items(
        params, {"A1": 1.0879, "A3": 0.0028, "routh": 0.2909, "D": 0.0077}, COEFF_TOL
    )
    th = thresholds(params)
    items.append(_value_item("R0", th.reproduction_number, 2.1428, COEFF_TOL))
    items.append(_value_item("theta1", th.conversion_existence, 0.1723, COEFF_TOL))
    items.append(
        _value_item(
            "theta2", th.conversion_global, 0.8044, COEFF_TOL,
            note="interior susceptible level evaluated at the base conversion efficiency",
        )
    )
    interior = next(e for e in equilibria(params) if e.kind is EquilibriumKind.COEXISTENCE)
    for alpha in (0.6, 0.85, 0.95, 1.0):
        verdict = classify_equilibrium(params, interior, alpha)
        items.append(
            _flag_item(
                f"E* stable at alpha={alpha:g}",
                verdict.stable is True and verdict.case == "i",
                f"label {verdict.label}, case {verdict.case}",
            )
        )

    # time-series bundle across orders (single initial point)
    files = []
    names = []
    x0 = State(30.0, 5.0, 10.0)
    for alpha in (0.75, 0.85, 0.95, 1.0):
        traj = cached_solve(params, alpha, x0, SCENARIO_STEP, FIGURE_SPAN)
        name = f"fig1_alpha{_alpha_tag(alpha)}.csv"
        files.append(save_trajectory_csv(traj, out_dir / name))
        names.append(name)
    files.append(
        _write_plot_script(
            out_dir, "fig1", names, "stable coexistence across fractional orders"
        )
    )
    return items, files


def _fig2(out_dir: Path, with_bundle: bool = True) -> tuple[list[ReproItem], list[Path]]:
    scenario = GLOBAL_SCENARIOS["coexistence"]
    target = scenario.target_state
    items = _coordinate_items("E*(theta=0.5)", target, (35.7195, 3.2927, 8.9983), COORD_TOL)
    items += _convergence_items(scenario, target)
    files = (
        _scenario_bundle(scenario, out_dir, "fig2", "globally stable coexistence (theta = 0.5)")
        if with_bundle
        else []
    )
    return items, files


def _ex1_unstable(out_dir: Path) -> tuple[list[ReproItem], list[Path]]:
    params = preset("example1-unstable").params
    items = _coefficient_items(
        params, {"A1": -0.9276, "A2": -0.5775, "D": -463.8995}, DISC_TOL
    )
    interior = next(e for e in equilibria(params) if e.kind is EquilibriumKind.COEXISTENCE)
    verdict = classify_equilibrium(params, interior, 0.85)
    items.append(
        _flag_item(
            "E* unstable at alpha=0.85 (case iii)",
            verdict.stable is False and verdict.case == "iii",
            f"label {verdict.label}, critical order {verdict.critical_order:.4g}",
        )
    )
    # hypothesis sets are evaluated below 2/3 as well: none of the stability
    # cases applies there (A1 < 0 and A2 < 0), so the eigenvalue criterion
    # alone decides and is reported
    low = classify_equilibrium(params, interior, 0.6)
    cubic = low.cubic
    case_ii = (
        cubic.discriminant < 0 and cubic.a1 >= 0 and cubic.a2 >= 0 and cubic.a3 > 0
    )
    items.append(
        _flag_item(
            "case (ii) hypotheses evaluated at alpha=0.6",
            low.case in (None, "ii") ,
            f"case (ii) satisfied: {case_ii} (A1 = {cubic.a1:.4g}, A2 = {cubic.a2:.4g}); "
            f"eigenvalue verdict: {low.label}, critical order {low.critical_order:.4g}",
        )
    )

    x0 = State(30.0, 5.0, 10.0)
    traj = cached_solve(params, 0.85, x0, SCENARIO_STEP, UNSTABLE_SPAN)
    res = convergence_check(traj, interior.state, tol=0.05)
    items.append(
        _flag_item(
            "trajectory does not settle at E* (alpha=0.85)",
            not res.converged,
            f"max tail distance {res.max_tail_distance:.3g}",
        )
    )
    name = "fig3_alpha0p85.csv"
    files = [save_trajectory_csv(traj, out_dir / name)]
    files.append(
        _write_plot_script(out_dir, "fig3", [name], "unstable coexistence oscillations")
    )
    return items, files


def _ex2(out_dir: Path, with_bundle: bool = True) -> tuple[list[ReproItem], list[Path]]:
    params = preset("example2").params
    th = thresholds(params)
    items = [_value_item("R0", th.reproduction_number, 2.1428, COEFF_TOL)]
    scenario = GLOBAL_SCENARIOS["predator-free"]
    target = scenario.target_state
    items += _coordinate_items("E2", target, (18.67, 16.41, 0.0), COORD_TOL)
    items.append(_value_item("d2", th.predator_death_global, 0.0875, COEFF_TOL))
    d_gap = params.predator_death_rate - th.predator_death_local
    items.append(
        ReproItem(
            "d - d1",
            float(d_gap),
            0.0025,
            None,
            KNOWN,
            "recorded reference 0.0025 disagrees with its own defining formula, "
            "which gives ~0.0482; the sign (and the stability conclusion) agrees",
        )
    )
    items.append(
        _flag_item(
            "d exceeds the global threshold d2",
            params.predator_death_rate > th.predator_death_global,
            f"d = {params.predator_death_rate:g}, d2 = {th.predator_death_global:.6g}",
        )
    )
    items += _convergence_items(scenario, target)
    files = (
        _scenario_bundle(scenario, out_dir, "fig4", "globally stable predator-free state")
        if with_bundle
        else []
    )
    return items, files


def _ex3(out_dir: Path, with_bundle: bool = True) -> tuple[list[ReproItem], list[Path]]:
    params = preset("example3").params
    th = thresholds(params)
    items = [_value_item("R0", th.reproduction_number, 0.7143, COEFF_TOL)]
    scenario = GLOBAL_SCENARIOS["prey-only"]
    target = scenario.target_state
    prey_only = next(e for e in equilibria(params) if e.kind is EquilibriumKind.PREY_ONLY)
    for alpha in (0.85, 0.95):
        verdict = classify_equilibrium(params, prey_only, alpha)
        items.append(
            _flag_item(
                f"E1 stable at alpha={alpha:g}",
                verdict.stable is True,
                f"label {verdict.label}",
            )
        )
    items += _convergence_items(scenario, target)
    files = (
        _scenario_bundle(scenario, out_dir, "fig5", "globally stable prey-only state")
        if with_bundle
        else []
    )
    return items, files


EXAMPLE_IDS = (
    "ex1",
    "ex1-unstable",
    "ex2",
    "ex3",
    "fig1",
    "fig2",
    "fig3",
    "fig4",
    "fig5",
)


def reproduce(example_id: str, out_dir: Path | str = "out") -> ReproReport:
    """Run one bundled scenario and compare against its recorded references."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if example_id in ("ex1", "fig1"):
        items, files = _ex1(out)
        if example_id == "ex1":
            more_items, more_files = _fig2(out)
            items += more_items
            files += more_files
    elif example_id == "fig2":
        items, files = _fig2(out)
    elif example_id in ("ex1-unstable", "fig3"):
        items, files = _ex1_unstable(out)
    elif example_id in ("ex2", "fig4"):
        items, files = _ex2(out)
    elif example_id in ("ex3", "fig5"):
        items, files = _ex3(out)
    else:
        known = ", ".join(EXAMPLE_IDS)
        raise ValueError(f"unknown example id {example_id!r}; known ids: {known}")
    return ReproReport(example_id=example_id, items=tuple(items), files=tuple(files))

"""Parameter grids, figure recipes and deterministic CSV output."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analytic
from .core import Truncation
from .errors import IoFailure, PhononBlockadeError, SpecError
from .liouville import converge_truncation, solve
from .model import SystemParams
from .observables import measure

OUTPUTS = ("g2_numeric", "g2_analytic", "fidelity", "mean_phonons", "mean_photons", "residual")
SPACINGS = ("linear", "log", "values")
SWEEP_START = Truncation(3, 4)


@dataclass(frozen=True)
class Axis:
    name: str
    min: float = 0.0
    max: float = 0.0
    points: int = 2
    spacing: str = "linear"
    # explicit grid, used when spacing == "values"
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.name not in SystemParams.field_names():
            raise SpecError(f"axis {self.name!r} is not a parameter; choose from {SystemParams.field_names()}")
        if self.spacing not in SPACINGS:
            raise SpecError(f"axis spacing {self.spacing!r} not in {SPACINGS}")
        if self.spacing == "values":
            vals = tuple(float(v) for v in self.values)
            if len(vals) < 2:
                raise SpecError(f"axis {self.name!r} needs at least 2 values")
            object.__setattr__(self, "values", vals)
            object.__setattr__(self, "points", len(vals))
            object.__setattr__(self, "min", min(vals))
            object.__setattr__(self, "max", max(vals))
            return
        if int(self.points) != self.points or self.points < 2:
            raise SpecError(f"axis {self.name!r} needs points >= 2, got {self.points}")
        if self.spacing == "log" and not (self.min > 0 and self.max > 0):
            raise SpecError(f"log axis {self.name!r} needs positive bounds")

    def grid(self) -> np.ndarray:
        if self.spacing == "values":
            return np.array(self.values, dtype=float)
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, int(self.points))
        return np.linspace(self.min, self.max, int(self.points))


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axes: tuple[Axis, ...]
    outputs: tuple[str, ...] = ("g2_numeric", "g2_analytic")
    start: Truncation = SWEEP_START
    tol: float = 1e-4
    steady_tol: float = 1e-10
    adaptive: bool = True
    cavity_detuning: float | None = None
    name: str = "sweep"

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if not 1 <= len(self.axes) <= 2:
            raise SpecError(f"a sweep has 1 or 2 axes, got {len(self.axes)}")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise SpecError(f"duplicate axis names {names}")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise SpecError(f"unknown outputs {bad}; choose from {OUTPUTS}")

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes) + self.outputs + ("error",)


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    # (axis values..., outputs (None when unavailable)..., error code or "")
    rows: list = field(default_factory=list)

    def column(self, name: str) -> list:
        i = self.spec.columns.index(name)
        return [r[i] for r in self.rows]


def _solve_point(spec: SweepSpec, values: Sequence[float]) -> tuple:
    outputs: dict[str, float | None] = dict.fromkeys(spec.outputs)
    errors: list[str] = []
    try:
        sp = replace(spec.base, **{a.name: float(v) for a, v in zip(spec.axes, values)})
    except PhononBlockadeError as exc:
        return tuple(values) + tuple(outputs.values()) + (exc.code,)

    if "g2_analytic" in outputs:
        try:
            outputs["g2_analytic"] = analytic.g2_analytic(sp)
        except PhononBlockadeError as exc:
            errors.append(exc.code)

    numeric = [o for o in spec.outputs if o != "g2_analytic"]
    if numeric:
        try:
            if spec.adaptive:
                _, rep = converge_truncation(
                    sp, spec.start, spec.tol, steady_tol=spec.steady_tol, cavity_detuning=spec.cavity_detuning
                )
            else:
                rep = solve(sp, spec.start, spec.steady_tol, spec.cavity_detuning)
            obs = measure(rep.rho)
            found = {
                "g2_numeric": obs.g2,
                "fidelity": obs.fidelity_F,
                "mean_phonons": obs.mean_phonons,
                "mean_photons": obs.mean_photons,
                "residual": rep.residual,
            }
            for o in numeric:
                outputs[o] = found[o]
            if "g2_numeric" in outputs and obs.g2 is None:
                errors.append("InsufficientOccupation")
        except PhononBlockadeError as exc:
            errors.append(exc.code)
    return tuple(values) + tuple(outputs.values()) + (errors[0] if errors else "",)


def _solve_chunk(args):
    spec, chunk = args
    return [_solve_point(spec, v) for v in chunk]


def grid_points(spec: SweepSpec) -> list[tuple[float, ...]]:
    """Grid in row-major axis order (first axis outermost)."""
    return [tuple(float(x) for x in p) for p in product(*(a.grid() for a in spec.axes))]


def run_sweep(spec: SweepSpec, jobs: int = 1) -> SweepResult:
    """Solve every grid point independently; rows come back in axis-index order."""
    points = grid_points(spec)
    if jobs <= 1 or len(points) < 2:
        return SweepResult(spec, [_solve_point(spec, p) for p in points])
    size = max(1, math.ceil(len(points) / (4 * jobs)))
    chunks = [points[i:i + size] for i in range(0, len(points), size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        parts = list(pool.map(_solve_chunk, [(spec, c) for c in chunks]))
    return SweepResult(spec, [row for part in parts for row in part])


FIG6_N_TH = (0.0, 0.01, 0.1, 0.5, 1.0, 2.0)


def figure_recipe(which: str | int, *, points: int | None = None, n_th_values: Sequence[float] | None = None) -> SweepSpec:
    """Parameter set and grid reproducing one figure (``fig2`` ... ``fig6``).

    ``points`` overrides the per-axis resolution (101 for 1-D, 61 for 2-D).
    """
    key = str(which).lower().removeprefix("fig")
    p1 = points or 101
    p2 = points or 61
    if key == "2":
        base = SystemParams(g=2.0, gamma=0.01, epsilon=0.1, delta_p=0.0, n_th=0.0)
        axes = (Axis("delta_p", -4.0, 4.0, p2), Axis("g", 0.5, 4.0, p2))
        return SweepSpec(base, axes, ("g2_numeric", "g2_analytic"), name="fig2")
    if key == "3":
        base = SystemParams(g=2.0, gamma=0.01, delta_p=0.0, n_th=0.0)
        axes = (Axis("epsilon", 0.0, 1.0, p1),)
        return SweepSpec(base, axes, ("fidelity", "g2_numeric", "mean_phonons", "residual"), name="fig3")
    if key == "4":
        base = SystemParams(g=2.0, gamma=0.01, epsilon=0.1, n_th=0.0)
        axes = (Axis("delta_p", -4.0, 4.0, p1),)
        return SweepSpec(base, axes, ("g2_numeric", "g2_analytic", "mean_phonons", "residual"), name="fig4")
    if key == "5":
        base = SystemParams(g=2.0, epsilon=0.1, delta_p=0.0, n_th=0.0)
        axes = (Axis("kappa", 0.01, 10.0, p2, "log"), Axis("gamma", 0.01, 10.0, p2, "log"))
        return SweepSpec(base, axes, ("g2_numeric", "g2_analytic"), name="fig5")
    if key == "6":
        base = SystemParams(g=2.0, gamma=0.01, epsilon=0.1, n_th=0.0)
        nth = FIG6_N_TH if n_th_values is None else tuple(n_th_values)
        axes = (Axis("n_th", spacing="values", values=nth), Axis("delta_p", -4.0, 4.0, p1))
        return SweepSpec(base, axes, ("g2_numeric", "mean_phonons", "residual"), name="fig6")
    raise SpecError(f"no recipe for figure {which!r}; choose 2, 3, 4, 5 or 6")


def format_float(x: float) -> str:
    """Shortest scientific-notation string that parses back to ``x`` exactly."""
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    for digits in range(17):
        s = f"{x:.{digits}e}"
        if float(s) == x:
            return s
    return f"{x:.16e}"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return format_float(v)


def csv_text(result: SweepResult) -> str:
    lines = [",".join(result.spec.columns)]
    lines += [",".join(_cell(v) for v in row) for row in result.rows]
    return "\n".join(lines) + "\n"


def write_csv(result: SweepResult, path: str | Path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(csv_text(result))
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_csv(path: str | Path) -> tuple[list[str], list[list[float | str | None]]]:
    """Parse a sweep CSV back into a header and typed rows."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        cells = line.split(",")
        row: list = [None if c == "" else float(c) for c in cells[:-1]]
        row.append(cells[-1])
        rows.append(row)
    return header, rows


def parse_spec_file(path: str | Path, base: SystemParams | None = None) -> SweepSpec:
    """Read a ``key = value`` sweep description.

    Keys: any SystemParams field, ``axis`` (repeatable; ``name, min, max,
    points[, linear|log]`` or ``name, values, v1, v2, ...``), ``outputs``
    (comma separated), ``na``, ``nb``, ``tol``, ``adaptive``, ``name``.
    """
    from .cli import read_key_values

    pairs = read_key_values(path)
    params = {}
    axes = []
    kwargs: dict = {}
    na, nb = SWEEP_START.n_a, SWEEP_START.n_b
    for key, value in pairs:
        if key in SystemParams.field_names():
            params[key] = _number(key, value)
        elif key == "axis":
            axes.append(_parse_axis(value))
        elif key == "outputs":
            kwargs["outputs"] = tuple(v.strip() for v in value.split(",") if v.strip())
        elif key == "na":
            na = int(_number(key, value))
        elif key == "nb":
            nb = int(_number(key, value))
        elif key == "tol":
            kwargs["tol"] = _number(key, value)
        elif key == "adaptive":
            kwargs["adaptive"] = value.strip().lower() in ("1", "true", "yes", "on")
        elif key == "name":
            kwargs["name"] = value.strip()
        else:
            raise SpecError(f"unknown key {key!r} in {path}")
    try:
        sp = replace(base or SystemParams(), **params)
        start = Truncation(na, nb)
    except PhononBlockadeError as exc:
        raise SpecError(str(exc)) from exc
    return SweepSpec(sp, tuple(axes), start=start, **kwargs)


def _number(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise SpecError(f"{key}: expected a number, got {value!r}") from None


def _parse_axis(value: str) -> Axis:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) >= 2 and parts[1] == "values":
        return Axis(parts[0], spacing="values", values=tuple(_number("axis", v) for v in parts[2:]))
    if len(parts) not in (4, 5):
        raise SpecError(f"axis expects 'name, min, max, points[, spacing]', got {value!r}")
    spacing = parts[4] if len(parts) == 5 else "linear"
    return Axis(parts[0], _number("axis", parts[1]), _number("axis", parts[2]), int(_number("axis", parts[3])), spacing)

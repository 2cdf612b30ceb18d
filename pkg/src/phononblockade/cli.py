"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 numerical failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analytic
from .core import Truncation, eig_hermitian
from .errors import (
    InsufficientOccupation,
    InvalidParameter,
    IoFailure,
    NumericalError,
    PhononBlockadeError,
    SpecError,
)
from .liouville import (
    DEFAULT_TOL,
    DEFAULT_TRUNCATION,
    converge_truncation,
    evolve,
    liouvillian_for,
    steady_state,
    top_populations,
)
from .model import (
    DEVICE_PRESET,
    SystemParams,
    build_heff,
    check_rwa,
    excitation_number,
    linearize,
    device_preset_physical,
    two_phonon_block,
)
from .observables import g2_zero, measure
from .core import vacuum

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VALIDATION = 0, 1, 2, 3
COMMANDS = ("solve", "sweep", "figure", "analytic", "validate")
PRESETS = ("paper-sec4",)

# config-file key -> RunConfig attribute
CONFIG_KEYS = {
    "g": "g",
    "kappa": "kappa",
    "gamma": "gamma",
    "epsilon": "epsilon",
    "delta_p": "delta_p",
    "n_th": "n_th",
    "na": "na",
    "nb": "nb",
    "tol": "tol",
    "outdir": "outdir",
    "units": "units",
    "jobs": "jobs",
    "preset": "preset",
    "cavity_detuning": "cavity_detuning",
}
RATE_KEYS = ("g", "kappa", "gamma", "epsilon", "delta_p", "cavity_detuning")


class UsageError(PhononBlockadeError):
    code = "UsageError"


@dataclass
class RunConfig:
    command: str = "solve"
    target: str | None = None
    g: float = 2.0
    kappa: float = 1.0
    gamma: float = 0.01
    epsilon: float = 0.1
    delta_p: float = 0.0
    n_th: float = 0.0
    na: int = DEFAULT_TRUNCATION.n_a
    nb: int = DEFAULT_TRUNCATION.n_b
    tol: float = DEFAULT_TOL
    outdir: str = "."
    units: str = "kappa-units"
    jobs: int = 1
    preset: str | None = None
    cavity_detuning: float | None = None
    explicit: set = field(default_factory=set)

    @property
    def truncation(self) -> Truncation:
        try:
            return Truncation(self.na, self.nb)
        except PhononBlockadeError as exc:
            raise UsageError(str(exc)) from exc


def read_key_values(path: str | Path) -> list[tuple[str, str]]:
    """``key = value`` lines; ``#`` starts a comment; keys normalised to snake_case."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        pairs.append((key.replace("-", "_"), value))
    return pairs


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common_flags() -> argparse.ArgumentParser:
    p = _Parser(add_help=False, argument_default=argparse.SUPPRESS)
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--g", type=float, help="two-phonon coupling g")
    p.add_argument("--kappa", type=float, help="cavity decay rate")
    p.add_argument("--gamma", type=float, help="mechanical decay rate")
    p.add_argument("--epsilon", type=float, help="mechanical pump amplitude")
    p.add_argument("--delta-p", dest="delta_p", type=float, help="pump detuning omega_m - omega_p")
    p.add_argument("--n-th", dest="n_th", type=float, help="thermal phonon number of the bath")
    p.add_argument("--na", type=int, help="cavity Fock levels (start of truncation search)")
    p.add_argument("--nb", type=int, help="mechanical Fock levels (start of truncation search)")
    p.add_argument("--tol", type=float, help="steady-state residual tolerance")
    p.add_argument("--outdir", help="directory for CSV/SVG output")
    p.add_argument("--units", choices=("kappa-units", "hertz"), help="unit system of rate flags")
    p.add_argument("--jobs", type=int, help="worker processes for sweeps")
    p.add_argument("--preset", choices=PRESETS, help="load a device parameter preset")
    p.add_argument("--cavity-detuning", dest="cavity_detuning", type=float,
                   help="override the photon detuning otherwise fixed at 2*delta_p")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = _Parser(prog="phononblockade", description="Phonon blockade steady states and figure sweeps.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="solve one parameter point")
    sp = sub.add_parser("sweep", parents=[common], help="run a sweep described by a spec file")
    sp.add_argument("target", metavar="specfile")
    fp = sub.add_parser("figure", parents=[common], help="reproduce one figure's data")
    fp.add_argument("target", metavar="N", choices=("2", "3", "4", "5", "6"))
    sub.add_parser("analytic", parents=[common], help="print closed-form results")
    sub.add_parser("validate", parents=[common], help="run the invariant checks")
    return parser


def _coerce(key: str, value: str):
    attr = CONFIG_KEYS[key]
    try:
        if attr in ("na", "nb", "jobs"):
            return int(value)
        if attr in ("outdir", "units", "preset"):
            return value
        return float(value)
    except ValueError:
        raise UsageError(f"{key}: invalid value {value!r}") from None


def parse_config(argv: Sequence[str] | None = None, config_file: str | Path | None = None) -> RunConfig:
    """Defaults, then config-file values, then command-line flags."""
    argv = list(sys.argv[1:] if argv is None else argv)
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError(f"missing command; choose one of {', '.join(COMMANDS)}")
    flags = vars(ns)
    cfg = RunConfig(command=flags.pop("command"), target=flags.pop("target", None))
    path = flags.pop("config", None) or config_file
    if path is not None:
        for key, value in read_key_values(path):
            if key not in CONFIG_KEYS:
                raise UsageError(f"unknown configuration key {key!r} in {path}")
            setattr(cfg, CONFIG_KEYS[key], _coerce(key, value))
            cfg.explicit.add(CONFIG_KEYS[key])
    for key, value in flags.items():
        setattr(cfg, key, value)
        cfg.explicit.add(key)
    if cfg.units not in ("kappa-units", "hertz"):
        raise UsageError(f"units must be 'kappa-units' or 'hertz', got {cfg.units!r}")
    if cfg.preset is not None and cfg.preset not in PRESETS:
        raise UsageError(f"unknown preset {cfg.preset!r}")
    if cfg.jobs < 1:
        raise UsageError("jobs must be >= 1")
    return cfg


@dataclass
class Resolved:
    params: SystemParams
    cavity_detuning: float | None
    preset_report: list = field(default_factory=list)


def resolve_params(cfg: RunConfig) -> Resolved:
    """SystemParams in kappa units from the config, running the preset pipeline if asked."""
    values = {k: getattr(cfg, k) for k in ("g", "kappa", "gamma", "epsilon", "delta_p", "n_th")}
    report: list[tuple[str, object]] = []
    cav = cfg.cavity_detuning
    scale = cfg.kappa if cfg.units == "hertz" else 1.0
    if cfg.preset == "paper-sec4":
        phys = device_preset_physical()
        alpha, g_eff = linearize(phys)
        n_th = analytic.thermal_occupation(phys.omega_m, DEVICE_PRESET["temperature"])
        rwa = check_rwa(phys, g_eff)
        report += [
            ("preset", "paper-sec4"),
            ("g0_hz", DEVICE_PRESET["g0"]),
            ("alpha_abs", abs(alpha)),
            ("g_eff_hz", g_eff),
            ("omega_m_hz", phys.omega_m),
            ("kappa_hz", phys.kappa),
            ("gamma_hz", DEVICE_PRESET["gamma"]),
            ("temperature_k", DEVICE_PRESET["temperature"]),
            ("n_th", n_th),
            ("rwa_ratio", g_eff / phys.omega_m),
            ("rwa", rwa),
        ]
        scale = phys.kappa
        values["kappa"] = phys.kappa
        for key, val in (("g", g_eff), ("gamma", DEVICE_PRESET["gamma"]), ("n_th", n_th)):
            if key not in cfg.explicit:
                values[key] = val
        if cfg.units != "hertz":
            # remaining rate flags were given in units of kappa
            for key in ("epsilon", "delta_p"):
                values[key] *= scale
            if cav is not None:
                cav *= scale
    if cfg.units == "hertz" or cfg.preset:
        for key in ("g", "kappa", "gamma", "epsilon", "delta_p"):
            values[key] = values[key] / scale
        if cav is not None:
            cav = cav / scale
    try:
        sp = SystemParams(**values)
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from exc
    if cfg.preset:
        report.append(("cooperativity", analytic.cooperativity(sp)))
    return Resolved(sp, cav, report)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, complex):
        return f"{v.real!r}{v.imag:+}j"
    return str(v)


def emit(pairs, out=None) -> None:
    out = out or sys.stdout
    for k, v in pairs:
        print(f"{k} = {_fmt(v)}", file=out)


def parse_report(text: str) -> dict[str, str]:
    """Inverse of :func:`emit` for line-oriented reports."""
    result = {}
    for line in text.splitlines():
        if " = " in line:
            k, v = line.split(" = ", 1)
            result[k.strip()] = v.strip()
    return result


def _param_pairs(sp: SystemParams):
    return [(k, getattr(sp, k)) for k in SystemParams.field_names()]


def cmd_solve(cfg: RunConfig) -> int:
    res = resolve_params(cfg)
    sp = res.params
    emit(res.preset_report)
    emit(_param_pairs(sp))
    dims, rep = converge_truncation(sp, cfg.truncation, steady_tol=cfg.tol, cavity_detuning=res.cavity_detuning)
    obs = measure(rep.rho)
    emit([
        ("n_a", dims.n_a),
        ("n_b", dims.n_b),
        ("method", rep.method),
        ("residual", rep.residual),
        ("truncation_converged", rep.truncation_converged),
        ("top_level_population", rep.top_level_population),
        ("fidelity", obs.fidelity_F),
        ("mean_photons", obs.mean_photons),
        ("mean_phonons", obs.mean_phonons),
        ("g2_analytic", analytic.g2_analytic(sp)),
        ("cooperativity", analytic.cooperativity(sp)),
    ])
    if obs.g2 is None:
        raise InsufficientOccupation(f"mean phonon number {obs.mean_phonons:.3e} is too small: g2(0) undefined")
    emit([("g2_numeric", obs.g2)])
    return EXIT_OK


def cmd_analytic(cfg: RunConfig) -> int:
    res = resolve_params(cfg)
    sp = res.params
    emit(res.preset_report)
    emit(_param_pairs(sp))
    amps = analytic.steady_amplitudes(sp)
    pairs = [
        ("cooperativity", analytic.cooperativity(sp)),
        ("g2_analytic", analytic.g2_analytic(sp)),
        ("g2_resonant", analytic.g2_resonant(sp)),
    ]
    try:
        pairs.append(("g2_two_phonon_resonance", analytic.g2_two_phonon_resonance(sp)))
    except NumericalError as exc:
        pairs.append(("g2_two_phonon_resonance", exc.code))
    pairs += [("c00", amps.c00), ("c01", amps.c01), ("c02", amps.c02), ("c10", amps.c10)]
    emit(pairs)
    return EXIT_OK


def _write_outputs(result, outdir: str, stem: str) -> list[tuple[str, object]]:
    from .svg import render_svg
    from .sweep import write_csv

    out = Path(outdir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out}: {exc}") from exc
    csv_path, svg_path = out / f"{stem}.csv", out / f"{stem}.svg"
    write_csv(result, csv_path)
    render_svg(result, svg_path)
    failed = sum(1 for r in result.rows if r[-1])
    return [("rows", len(result.rows)), ("failed_rows", failed), ("csv", csv_path), ("svg", svg_path)]


def cmd_figure(cfg: RunConfig, which: str | None = None) -> int:
    from .sweep import figure_recipe, run_sweep

    which = which or cfg.target
    try:
        spec = figure_recipe(which)
    except SpecError as exc:
        raise UsageError(str(exc)) from exc
    result = run_sweep(spec, jobs=cfg.jobs)
    emit(_write_outputs(result, cfg.outdir, f"fig{which}"))
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    from .sweep import parse_spec_file, run_sweep

    res = resolve_params(cfg)
    try:
        spec = parse_spec_file(cfg.target, base=res.params)
    except SpecError as exc:
        raise UsageError(str(exc)) from exc
    if res.cavity_detuning is not None:
        spec = replace(spec, cavity_detuning=res.cavity_detuning)
    result = run_sweep(spec, jobs=cfg.jobs)
    emit(_write_outputs(result, cfg.outdir, spec.name))
    return EXIT_OK


def _random_hermitian(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return x + x.conj().T


def validation_checks(cfg: RunConfig) -> list[tuple[str, bool, str]]:
    """Invariant checks at the configured parameter point and truncation."""
    res = resolve_params(cfg)
    sp = res.params
    dims = cfg.truncation
    results: list[tuple[str, bool, str]] = []

    def check(name, fn):
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))

    L = liouvillian_for(sp, dims, res.cavity_detuning)
    state: dict = {}

    def steady():
        state["rep"] = steady_state(L, cfg.tol)
        return True, state["rep"].method

    check("steady_state_solved", steady)
    rho = state["rep"].rho.data if "rep" in state else None

    def need_rho():
        if rho is None:
            raise NumericalError("no steady state")
        return rho

    check("state_hermitian", lambda: ((e := float(np.max(np.abs(need_rho() - need_rho().conj().T)))) <= 1e-10, f"{e:.2e}"))
    check("state_trace", lambda: ((e := abs(np.trace(need_rho()) - 1)) <= 1e-12, f"{e:.2e}"))
    check("state_positive", lambda: ((e := float(np.linalg.eigvalsh(need_rho())[0])) >= -1e-8, f"{e:.2e}"))
    check("liouvillian_residual", lambda: ((e := L.residual(need_rho())) <= cfg.tol, f"{e:.2e}"))

    def trace_and_hermiticity():
        rng = np.random.default_rng(7)
        worst_tr = worst_h = 0.0
        for _ in range(20):
            x = _random_hermitian(rng, dims.dim)
            x /= np.trace(x).real if abs(np.trace(x)) > 1e-3 else 1.0
            y = L.apply(x)
            worst_tr = max(worst_tr, abs(np.trace(y)))
            worst_h = max(worst_h, float(np.max(np.abs(y - y.conj().T))))
        scale = max(1.0, L.max_abs())
        return worst_tr <= 1e-10 * scale and worst_h <= 1e-10 * scale, f"trace {worst_tr:.2e}, herm {worst_h:.2e}"

    check("liouvillian_trace_and_hermiticity", trace_and_hermiticity)
    check("heff_hermitian", lambda: ((e := build_heff(sp, dims, res.cavity_detuning).hermiticity_error()) <= 1e-12, f"{e:.2e}"))

    def conservation():
        h = build_heff(replace(sp, epsilon=0.0), dims).data
        n = excitation_number(dims).data
        e = float(np.max(np.abs(h @ n - n @ h)))
        return e <= 1e-12, f"{e:.2e}"

    check("excitation_number_conserved", conservation)

    def spectrum():
        vals, _ = eig_hermitian(two_phonon_block(replace(sp, delta_p=0.0)))
        target = np.array([-math.sqrt(2) * sp.g, math.sqrt(2) * sp.g])
        e = float(np.max(np.abs(vals - target)))
        return e <= 1e-10, f"{e:.2e}"

    check("two_phonon_spectrum", spectrum)

    def truncation():
        cav, ph = top_populations(need_rho(), dims)
        bigger = Truncation(dims.n_a, dims.n_b + max(2, dims.n_b // 4))
        other = steady_state(liouvillian_for(sp, bigger, res.cavity_detuning), cfg.tol).rho
        mine = measure(state["rep"].rho)
        theirs = measure(other)
        ok = max(cav, ph) < 1e-8
        for a, b in ((mine.g2, theirs.g2), (mine.mean_phonons, theirs.mean_phonons)):
            if a is None or b is None:
                ok = ok and a is None and b is None
            else:
                ok = ok and abs(a - b) <= 1e-6 * max(abs(a), abs(b), 1e-300)
        return ok, f"top population {max(cav, ph):.2e}"

    check("truncation_converged", truncation)

    def methods_agree():
        t = 50.0 / min(sp.kappa, sp.gamma)
        ev = evolve(L, vacuum(dims), t)
        e = float(np.max(np.abs(ev.data - need_rho())))
        return e <= 1e-6, f"{e:.2e}"

    check("nullspace_vs_evolution", methods_agree)

    def identities():
        rng = np.random.default_rng(11)
        worst = 0.0
        for _ in range(100):
            p = SystemParams(g=rng.uniform(0, 5), kappa=rng.uniform(0.5, 2), gamma=rng.uniform(0.001, 1),
                             epsilon=rng.uniform(0.001, 0.5), delta_p=rng.uniform(-5, 5))
            a = analytic.g2_from_amplitudes(analytic.steady_amplitudes(p))
            b = analytic.g2_analytic(p)
            worst = max(worst, abs(a - b) / b)
            r0 = replace(p, delta_p=0.0)
            worst = max(worst, abs(analytic.g2_analytic(r0) - analytic.g2_resonant(r0)) / analytic.g2_resonant(r0))
            for s in (1, -1):
                r2 = replace(p, delta_p=s * math.sqrt(2) * p.g / 2)
                ref = analytic.g2_two_phonon_resonance(r2)
                worst = max(worst, abs(analytic.g2_analytic(r2) - ref) / ref)
        return worst <= 1e-12, f"{worst:.2e}"

    check("analytic_identities", identities)

    def weak_drive():
        # weak enough that the single-phonon amplitude is 0.01
        eps = 0.01 * abs(complex(sp.gamma / 2, 0))
        worst = 0.0
        for dp in (0.0, math.sqrt(2) * sp.g / 2):
            p = replace(sp, epsilon=eps, delta_p=dp, n_th=0.0)
            _, rep = converge_truncation(p, Truncation(3, 4))
            num, ana = g2_zero(rep.rho), analytic.g2_analytic(p)
            worst = max(worst, abs(num - ana) / ana)
        return worst <= 0.05, f"max relative deviation {worst:.2e}"

    check("weak_drive_numeric_vs_analytic", weak_drive)

    def known_states():
        _, coh = converge_truncation(SystemParams(g=0.0, gamma=0.1, epsilon=0.001), Truncation(1, 4))
        _, th = converge_truncation(SystemParams(g=0.0, epsilon=0.0, n_th=0.5), Truncation(1, 4))
        e1 = abs(g2_zero(coh.rho) - 1.0)
        e2 = abs(g2_zero(th.rho) - 2.0)
        return max(e1, e2) <= 1e-6, f"coherent {e1:.1e}, thermal {e2:.1e}"

    check("known_states", known_states)
    return results


def cmd_validate(cfg: RunConfig) -> int:
    results = validation_checks(cfg)
    for name, ok, detail in results:
        print(f"{name} = {'pass' if ok else 'fail'}  # {detail}")
    failed = [n for n, ok, _ in results if not ok]
    print(f"summary = {len(results) - len(failed)}/{len(results)} passed")
    return EXIT_OK if not failed else EXIT_VALIDATION


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
        handler = {
            "solve": cmd_solve,
            "sweep": cmd_sweep,
            "figure": cmd_figure,
            "analytic": cmd_analytic,
            "validate": cmd_validate,
        }[cfg.command]
        return handler(cfg)
    except (UsageError, SpecError, IoFailure, InvalidParameter) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"error = {exc.code}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

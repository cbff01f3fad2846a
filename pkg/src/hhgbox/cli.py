"""Command-line interface: configure, run, sweep and validate simulations.

Configs are flat key=value text files with a fixed key set (unknown or
duplicate keys are rejected: a physics config silently ignoring a
misspelled key is a correctness hazard). All quantities are atomic units.
Outputs are data files only (CSV plus a structured-text manifest); plotting
is left to external tools.

Exit codes: 0 success, 1 convergence-flag failure or failed checks,
2 config/usage errors.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .basis import build_basis
from .boundary import BreathingLaw, multichromatic_coefficients, quadratic_drive
from .hamiltonian import build_matrices
from .observables import DipoleSeries, dipole_series
from .oracle import propagate_grid
from .propagator import (
    DEFAULT_SAMPLES,
    DEFAULT_TOLERANCE,
    NORM_DRIFT_LIMIT,
    InitialState,
    SimulationConfig,
    diagonalize_static,
    propagate,
)
from .spectrum import (
    PowerSpectrum,
    default_omega_grid,
    harmonic_peaks,
    harmonics_to_csv,
    power_spectrum,
)

BASIS_CONVERGENCE_LIMIT = 0.01   # max relative harmonic change for +25% basis size
BASIS_CONVERGENCE_HARMONICS = 20
# Harmonics this far below the strongest one are treated as converged noise floor.
HARMONIC_FLOOR_RATIO = 1e-9


class ConfigError(Exception):
    """Malformed or physically invalid configuration file."""


_CONFIG_SCHEMA = {
    "a": float,
    "b": float,
    "omega0": float,
    "Z": float,
    "l": int,
    "N": int,
    "initial_kind": str,
    "initial_index": int,
    "r_ref": float,
    "T": float,
    "samples": int,
    "tol": float,
}

_CONFIG_DEFAULTS = {
    "a": 100.0,
    "b": 10.0,
    "omega0": 1.0,
    "Z": 1.0,
    "l": 0,
    "N": 100,
    "initial_kind": "box",
    "initial_index": 1,
    "r_ref": None,
    "T": 100.0,
    "samples": DEFAULT_SAMPLES,
    "tol": DEFAULT_TOLERANCE,
}


def parse_config(path) -> SimulationConfig:
    """Read a key=value config file into a SimulationConfig.

    Every parse or validation problem raises ConfigError citing the file,
    line and field.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc

    raw: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _CONFIG_SCHEMA:
            known = ", ".join(sorted(_CONFIG_SCHEMA))
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} (known keys: {known})")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        caster = _CONFIG_SCHEMA[key]
        try:
            raw[key] = caster(value)
        except ValueError as exc:
            raise ConfigError(
                f"{path}:{lineno}: field {key!r}: cannot parse {value!r} as {caster.__name__}"
            ) from exc

    resolved = dict(_CONFIG_DEFAULTS)
    resolved.update(raw)
    return build_config(resolved, source=str(path))


def build_config(resolved: dict, source: str = "<config>") -> SimulationConfig:
    """Turn a fully resolved key dict into a validated SimulationConfig."""
    try:
        law = BreathingLaw(a=resolved["a"], b=resolved["b"], omega0=resolved["omega0"])
        initial = InitialState(
            kind=resolved["initial_kind"],
            index=resolved["initial_index"],
            r_ref=resolved["r_ref"],
        )
        return SimulationConfig(
            law=law,
            Z=resolved["Z"],
            l=resolved["l"],
            basis_size=resolved["N"],
            initial=initial,
            T=resolved["T"],
            samples=resolved["samples"],
            tolerance=resolved["tol"],
        )
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def config_as_dict(config: SimulationConfig) -> dict:
    """Flat key dict (config-file keys) with every default made explicit."""
    return {
        "a": config.law.a,
        "b": config.law.b,
        "omega0": config.law.omega0,
        "Z": config.Z,
        "l": config.l,
        "N": config.basis_size,
        "initial_kind": config.initial.kind,
        "initial_index": config.initial.index,
        "r_ref": config.initial.r_ref,
        "T": config.T,
        "samples": config.samples,
        "tol": config.tolerance,
    }


@dataclass
class RunResult:
    """Everything one propagation produces, before any file is written."""

    config: SimulationConfig
    dipoles: DipoleSeries
    spectrum: PowerSpectrum
    harmonics: list[tuple[int, float]]
    norm_drift: float
    basis_convergence: float | None   # max relative harmonic change, None if skipped
    duration_seconds: float

    @property
    def norm_ok(self) -> bool:
        return self.norm_drift <= NORM_DRIFT_LIMIT

    @property
    def basis_ok(self) -> bool:
        return self.basis_convergence is None or self.basis_convergence < BASIS_CONVERGENCE_LIMIT


def _harmonics_for_config(config: SimulationConfig, window: str | None):
    trajectory = propagate(config, enforce_norm=False)
    basis = build_basis(config.l, config.basis_size)
    matrices = build_matrices(basis)
    series = dipole_series(trajectory, matrices, config.law)
    spec = power_spectrum(series, default_omega_grid(config.law.omega0), window=window)
    k_max = min(BASIS_CONVERGENCE_HARMONICS, int(spec.omegas[-1] / config.law.omega0))
    peaks = harmonic_peaks(spec, config.law.omega0, k_max)
    return trajectory, series, spec, peaks


def harmonic_change(
    peaks_a: list[tuple[int, float]],
    peaks_b: list[tuple[int, float]],
    spectrum_scale: float | None = None,
) -> float:
    """Max relative change between two harmonic ladders.

    Harmonics more than HARMONIC_FLOOR_RATIO below `spectrum_scale` (the
    strongest spectral value, DC included; defaults to the strongest
    harmonic) sit on the numerical floor and are skipped: comparing
    round-off against round-off carries no convergence information.
    """
    pa = np.array([p for _, p in peaks_a])
    pb = np.array([p for _, p in peaks_b])
    n = min(pa.size, pb.size)
    pa, pb = pa[:n], pb[:n]
    if spectrum_scale is None:
        spectrum_scale = max(pa.max(initial=0.0), pb.max(initial=0.0))
    floor = HARMONIC_FLOOR_RATIO * max(spectrum_scale, 1e-300)
    rel = np.zeros(n)
    for i in range(n):
        scale = max(pa[i], pb[i])
        if scale > floor:
            rel[i] = abs(pa[i] - pb[i]) / scale
    return float(rel.max(initial=0.0))


def run_simulation(
    config: SimulationConfig, window: str | None = None, check_basis: bool = True
) -> RunResult:
    """Propagate, form observables and spectra, and evaluate convergence flags.

    The basis-convergence flag re-runs with a 25% larger basis and compares
    the harmonic ladder; disable with check_basis=False when the caller
    handles convergence separately (for example inside a sweep over sizes).
    """
    start = time.perf_counter()
    trajectory, series, spec, peaks = _harmonics_for_config(config, window)
    drift = trajectory.norm_drift

    basis_change = None
    if check_basis:
        bigger = SimulationConfig(
            law=config.law,
            Z=config.Z,
            l=config.l,
            basis_size=math.ceil(1.25 * config.basis_size),
            initial=config.initial,
            T=config.T,
            samples=config.samples,
            tolerance=config.tolerance,
        )
        _, _, spec_big, peaks_big = _harmonics_for_config(bigger, window)
        scale = max(float(spec.values.max()), float(spec_big.values.max()))
        basis_change = harmonic_change(peaks, peaks_big, spectrum_scale=scale)

    return RunResult(
        config=config,
        dipoles=series,
        spectrum=spec,
        harmonics=peaks,
        norm_drift=drift,
        basis_convergence=basis_change,
        duration_seconds=time.perf_counter() - start,
    )


def _fmt(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def write_manifest(path, result: RunResult, outputs: dict[str, str], window: str | None) -> None:
    """Structured-text manifest: resolved config, version, timing, flags, files."""
    lines = ["# hhgbox run manifest", f"version = {__version__}"]
    lines.append(f"duration_seconds = {result.duration_seconds:.3f}")
    lines.append("[config]")
    for key, value in config_as_dict(result.config).items():
        lines.append(f"{key} = {_fmt(value)}")
    lines.append(f"window = {_fmt(window)}")
    lines.append("[convergence]")
    lines.append(f"norm_drift = {_fmt(result.norm_drift)}")
    lines.append(f"norm_drift_ok = {_fmt(result.norm_ok)}")
    lines.append(f"basis_convergence_max_rel_change = {_fmt(result.basis_convergence)}")
    lines.append(f"basis_convergence_ok = {_fmt(result.basis_ok)}")
    lines.append("[outputs]")
    for name, rel in outputs.items():
        lines.append(f"{name} = {rel}")
    Path(path).write_text("\n".join(lines) + "\n")


def _execute_run(
    config: SimulationConfig,
    out_dir: Path,
    window: str | None,
    allow_unconverged: bool,
    write_harmonics: bool = False,
) -> tuple[RunResult, list[str]]:
    """Run one config and write its output files; returns (result, problems)."""
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_simulation(config, window=window)
    outputs = {"dipole_csv": "dipole.csv", "spectrum_csv": "spectrum.csv"}
    result.dipoles.to_csv(out_dir / "dipole.csv")
    result.spectrum.to_csv(out_dir / "spectrum.csv")
    if write_harmonics:
        harmonics_to_csv(result.harmonics, out_dir / "harmonics.csv")
        outputs["harmonics_csv"] = "harmonics.csv"
    write_manifest(out_dir / "manifest.txt", result, outputs, window)

    problems = []
    if not result.norm_ok:
        problems.append(
            f"norm drift {result.norm_drift:.3e} exceeds {NORM_DRIFT_LIMIT:.1e}"
        )
    if not result.basis_ok:
        problems.append(
            f"basis not converged: +25% basis size changes harmonics by "
            f"{100 * result.basis_convergence:.2f}% (limit {100 * BASIS_CONVERGENCE_LIMIT:.0f}%)"
        )
    if problems and not allow_unconverged:
        return result, problems
    return result, []


def cmd_run(args) -> int:
    try:
        config = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result, problems = _execute_run(
        config, Path(args.output), args.window, args.allow_unconverged
    )
    for problem in problems:
        print(f"error: {problem}", file=sys.stderr)
    if problems:
        return 1
    print(
        f"run complete: norm drift {result.norm_drift:.3e}, "
        f"outputs in {args.output}"
    )
    return 0


def cmd_sweep(args) -> int:
    try:
        base = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        print(f"error: cannot parse --values {args.values!r}", file=sys.stderr)
        return 2
    if len(values) < 2:
        print("error: sweep needs at least 2 values", file=sys.stderr)
        return 2

    out_root = Path(args.output)
    out_root.mkdir(parents=True, exist_ok=True)
    combined_rows: list[tuple[float, int, float]] = []
    item_manifests: list[str] = []
    failures: list[str] = []

    for value in values:
        resolved = config_as_dict(base)
        resolved[args.param] = value
        item_dir = out_root / f"{args.param}={value:g}"
        try:
            config = build_config(resolved, source=f"sweep item {args.param}={value:g}")
            result, problems = _execute_run(
                config, item_dir, args.window, args.allow_unconverged, write_harmonics=True
            )
            if problems:
                failures.append(f"{args.param}={value:g}: " + "; ".join(problems))
                continue
            item_manifests.append(str(item_dir / "manifest.txt"))
            for k, p in result.harmonics:
                combined_rows.append((value, k, p))
            print(f"sweep item {args.param}={value:g} done (norm drift {result.norm_drift:.2e})")
        except Exception as exc:  # keep sweeping on per-item failure
            failures.append(f"{args.param}={value:g}: {exc}")

    combined = out_root / "sweep_harmonics.csv"
    with open(combined, "w") as fh:
        fh.write("param_value,harmonic_order,power\n")
        for value, k, p in combined_rows:
            fh.write(f"{value:.17g},{k},{p:.17g}\n")

    lines = [
        "# hhgbox sweep manifest",
        f"version = {__version__}",
        f"param = {args.param}",
        f"values = {args.values}",
        "[outputs]",
        f"combined_harmonics_csv = {combined.name}",
    ]
    for m in item_manifests:
        lines.append(f"item_manifest = {m}")
    for f in failures:
        lines.append(f"failed_item = {f}")
    (out_root / "manifest.txt").write_text("\n".join(lines) + "\n")

    for f in failures:
        print(f"error: sweep item failed: {f}", file=sys.stderr)
    print(f"sweep complete: {len(values) - len(failures)}/{len(values)} items ok")
    return 1 if failures else 0


def _validate_checks(eig_tol: float, basis_n: int | None):
    """The built-in release-gate checks; yields (name, ok, detail)."""
    # 1. multichromatic identity on random laws and times
    rng = np.random.default_rng(20240811)
    worst = 0.0
    for _ in range(1000):
        a = rng.uniform(0.5, 200.0)
        b = rng.uniform(0.0, 0.98) * a
        omega0 = rng.uniform(0.1, 5.0)
        law = BreathingLaw(a=a, b=b, omega0=omega0)
        coeff = multichromatic_coefficients(law)
        t = rng.uniform(0.0, 20.0 * law.period)
        exact = float(quadratic_drive(law, t))
        residual = abs(exact - float(coeff.drive(law, t))) / max(1.0, abs(exact))
        worst = max(worst, residual)
    yield "multichromatic-identity", worst <= 1e-9, f"max rel residual {worst:.2e}"

    # 2. static analytic phase
    law = BreathingLaw(a=100.0, b=0.0, omega0=1.0)
    config = SimulationConfig(law=law, Z=0.0, l=0, basis_size=20, T=100.0, samples=201)
    trajectory = propagate(config)
    basis = build_basis(0, 20)
    final = trajectory.states[-1].c
    expected = np.exp(-1j * basis.energies[0] * config.T / law.a**2)
    err = abs(final[0] - expected)
    others = float(np.max(np.abs(final[1:])))
    ok = err <= 1e-8 and others <= 1e-10
    yield "static-phase", ok, f"|C1 - exact| = {err:.2e}, max other |Cn| = {others:.2e}"

    # 3. confined-hydrogen ground energy, box radius at the free 2s node
    basis = build_basis(0, 100)
    matrices = build_matrices(basis)
    vals, _ = diagonalize_static(basis, matrices, Z=1.0, r0=2.0)
    err = abs(vals[0] + 0.125)
    yield "confined-eigenvalue", err <= eig_tol, f"E0 = {vals[0]:.8f} (err {err:.2e} vs tol {eig_tol:g})"

    # 4 + 5. small-scale cross-method agreement and basis convergence
    n_basis = basis_n if basis_n is not None else 80
    law = BreathingLaw(a=10.0, b=1.0, omega0=1.0)
    config = SimulationConfig(
        law=law, Z=1.0, l=0, basis_size=n_basis, T=20.0, samples=2001
    )
    trajectory = propagate(config, enforce_norm=False)
    b_set = build_basis(config.l, config.basis_size)
    mats = build_matrices(b_set)
    spectral = dipole_series(trajectory, mats, law)
    grid = propagate_grid(config, m=2000)
    rel_l2 = float(
        np.linalg.norm(grid.values - spectral.values) / np.linalg.norm(spectral.values)
    )
    yield "oracle-agreement", rel_l2 <= 1e-3, f"dipole rel L2 distance {rel_l2:.2e}"

    omegas = default_omega_grid(law.omega0)
    spec_small = power_spectrum(spectral, omegas)
    peaks_small = harmonic_peaks(spec_small, law.omega0, 10)
    bigger = SimulationConfig(
        law=law,
        Z=1.0,
        l=0,
        basis_size=math.ceil(1.25 * n_basis),
        T=20.0,
        samples=2001,
    )
    traj_big = propagate(bigger, enforce_norm=False)
    b_big = build_basis(bigger.l, bigger.basis_size)
    mats_big = build_matrices(b_big)
    series_big = dipole_series(traj_big, mats_big, law)
    spec_big = power_spectrum(series_big, omegas)
    peaks_big = harmonic_peaks(spec_big, law.omega0, 10)
    change = harmonic_change(
        peaks_small,
        peaks_big,
        spectrum_scale=max(float(spec_small.values.max()), float(spec_big.values.max())),
    )
    yield (
        "basis-convergence",
        change < BASIS_CONVERGENCE_LIMIT,
        f"max harmonic change {100 * change:.3f}% at +25% basis size",
    )


def cmd_validate(args) -> int:
    failures = 0
    print(f"{'check':<28} {'status':<7} detail")
    for name, ok, detail in _validate_checks(args.eig_tol, args.basis_n):
        status = "PASS" if ok else "FAIL"
        if not ok:
            failures += 1
        print(f"{name:<28} {status:<7} {detail}")
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return 1
    print("all checks passed")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hhgbox",
        description=(
            "Dipole dynamics and high-harmonic spectra of a hydrogen-like atom in a "
            "breathing spherical box (all quantities in atomic units)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one simulation from a config file")
    run.add_argument("config", help="path to key=value config file")
    run.add_argument("-o", "--output", default="hhgbox_out", help="output directory")
    run.add_argument(
        "--allow-unconverged",
        action="store_true",
        help="write outputs and exit 0 even if convergence flags fail",
    )
    run.add_argument(
        "--window",
        choices=["hann"],
        default=None,
        help="apply a Hann window before the transform (leakage studies only; "
        "changes absolute magnitudes relative to the plain definition)",
    )
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run one simulation per parameter value")
    sweep.add_argument("config", help="base config file")
    sweep.add_argument("--param", required=True, choices=["a", "b", "Z"])
    sweep.add_argument("--values", required=True, help="comma-separated list, e.g. 5,10,15")
    sweep.add_argument("-o", "--output", default="hhgbox_sweep", help="output directory")
    sweep.add_argument("--allow-unconverged", action="store_true")
    sweep.add_argument("--window", choices=["hann"], default=None)
    sweep.set_defaults(func=cmd_sweep)

    validate = sub.add_parser("validate", help="run the built-in correctness checks")
    validate.add_argument(
        "--eig-tol",
        type=float,
        default=1e-5,
        help="tolerance for the confined-eigenvalue check (default 1e-5)",
    )
    validate.add_argument(
        "--basis-n",
        type=int,
        default=None,
        help="force the basis size used by the cross-method checks",
    )
    validate.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

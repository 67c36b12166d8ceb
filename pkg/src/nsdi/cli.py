"""Command-line front end: validate, total, sdcs, tdse, compare.

All file outputs are deterministic: identical inputs give byte-identical
CSV and SVG. Energies in output files are in eV, totals in cm^4 s,
differential values in cm^4 s / eV; atomic units never leak out.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import atoms as atoms_mod
from .errors import CoverageError, NsdiError
from .perturbative import nonseq_window, scan, sdcs, total_xsec
from .svg import PlotStyle, render_svg
from .tdse import (
    PulseSpec,
    build_hamiltonian,
    default_grids,
    extract_joint,
    propagate,
    tdse_sdcs,
)
from .units import au_to_ev, ev_to_au, gen_xsec_to_cm4s, sdcs_au_to_cm4s_per_ev
from .xsec import parse_table

__all__ = ["main"]

SCAN_HEADER = "photon_energy_eV,sigma_cm4_s,window_flag"
SDCS_HEADER = "electron_energy_eV,dsdE_cm4_s_per_eV,normalized"
COMPARE_HEADER = "photon_energy_eV,sigma_pert_cm4_s,sigma_tdse_cm4_s,rel_deviation,window_flag"

TDSE_DEFAULTS = {
    "e0_au": 1e-3,
    "cycles": 20,
    "grid_outer": 120,
    "grid_inner": 120,
}


@dataclass
class RunConfig:
    """Resolved common settings for one command invocation."""

    atom: str
    data_dir: str | None
    out: str | None
    svg: bool
    binding_outer_ev: float | None = None
    binding_inner_ev: float | None = None
    outer_file: str | None = None
    inner_file: str | None = None

    def load_atom(self):
        return atoms_mod.load_atom(
            self.atom,
            data_dir=self.data_dir,
            binding_outer_ev=self.binding_outer_ev,
            binding_inner_ev=self.binding_inner_ev,
            outer_file=self.outer_file,
            inner_file=self.inner_file,
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nsdi",
        description="Generalized cross sections for direct two-photon double ionization.",
    )
    parser.add_argument("--config", help="key=value config file with [section] headers")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--atom", help="built-in name (toy, he, ne) or custom")
    common.add_argument("--data-dir", help="directory with sigma tables (or NSDI_DATA_DIR)")
    common.add_argument("--out", help="output CSV path (stdout if omitted)")
    common.add_argument("--svg", action="store_true", default=None,
                        help="also write an SVG plot next to --out")
    common.add_argument("--binding-outer-ev", type=float, help="override I_A in eV")
    common.add_argument("--binding-inner-ev", type=float, help="override I_B in eV")
    common.add_argument("--outer-file", help="explicit outer sigma table")
    common.add_argument("--inner-file", help="explicit inner sigma table")

    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", parents=[common],
                                help="parse a dataset and report its invariants")
    p_validate.add_argument("data_path", help="cross-section table to check")

    p_total = sub.add_parser("total", parents=[common],
                             help="scan the generalized total cross section over omega")
    p_total.add_argument("--omega-min-ev", type=float)
    p_total.add_argument("--omega-max-ev", type=float)
    p_total.add_argument("--omega-step-ev", type=float)

    p_sdcs = sub.add_parser("sdcs", parents=[common],
                            help="energy-differential cross section at one omega")
    p_sdcs.add_argument("--omega-ev", type=float)
    p_sdcs.add_argument("--points", type=int)

    p_tdse = sub.add_parser("tdse", parents=[common],
                            help="propagate the model Hamiltonian and extract the SDCS")
    p_tdse.add_argument("--omega-ev", type=float)
    p_tdse.add_argument("--e0-au", type=float)
    p_tdse.add_argument("--cycles", type=int)
    p_tdse.add_argument("--grid-outer", type=int)
    p_tdse.add_argument("--grid-inner", type=int)
    p_tdse.add_argument("--dt-au", type=float)

    p_cmp = sub.add_parser("compare", parents=[common],
                           help="perturbative vs propagated totals at several omegas")
    p_cmp.add_argument("--omegas-ev", help="comma-separated photon energies in eV")
    p_cmp.add_argument("--tolerance", type=float)

    return parser


def _load_config(path: str | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path:
        if not Path(path).is_file():
            raise NsdiError(f"config file not found: {path}")
        cfg.read(path)
    return cfg


def _setting(args, cfg, section, key, cast=str, default=None):
    """CLI flag wins, then [section], then [global], then the default."""
    value = getattr(args, key, None)
    if value is not None:
        return value
    for sec in (section, "global"):
        if cfg.has_option(sec, key):
            raw = cfg.get(sec, key)
            if cast is bool:
                return raw.strip().lower() in ("1", "true", "yes", "on")
            return cast(raw)
    return default


def _run_config(args, cfg, section) -> RunConfig:
    return RunConfig(
        atom=_setting(args, cfg, section, "atom", str, "toy"),
        data_dir=_setting(args, cfg, section, "data_dir"),
        out=_setting(args, cfg, section, "out"),
        svg=bool(_setting(args, cfg, section, "svg", bool, False)),
        binding_outer_ev=_setting(args, cfg, section, "binding_outer_ev", float),
        binding_inner_ev=_setting(args, cfg, section, "binding_inner_ev", float),
        outer_file=_setting(args, cfg, section, "outer_file"),
        inner_file=_setting(args, cfg, section, "inner_file"),
    )


def _emit(run: RunConfig, csv_text: str, style: PlotStyle | None = None) -> None:
    if run.out:
        Path(run.out).write_text(csv_text, encoding="utf-8")
        if run.svg:
            svg_path = Path(run.out).with_suffix(".svg")
            svg_path.write_text(render_svg(csv_text, style or PlotStyle()), encoding="utf-8")
    else:
        sys.stdout.write(csv_text)


def _check_scan_coverage(atom, omegas_au, in_window) -> None:
    """Fail early, naming the first omega whose sigma evaluations would
    run off the tabulated range."""
    for omega, ok in zip(omegas_au, in_window):
        if not ok:
            continue
        need_outer = 2.0 * omega - atom.binding_inner
        need_inner = 2.0 * omega - atom.binding_outer
        if need_outer > atom.sigma_outer.coverage_max:
            raise CoverageError(
                f"outer curve coverage ends at {au_to_ev(atom.sigma_outer.coverage_max):.3f} eV, "
                f"needed {au_to_ev(need_outer):.3f} eV for omega={au_to_ev(omega):.3f} eV"
            )
        if need_inner > atom.sigma_inner.coverage_max:
            raise CoverageError(
                f"inner curve coverage ends at {au_to_ev(atom.sigma_inner.coverage_max):.3f} eV, "
                f"needed {au_to_ev(need_inner):.3f} eV for omega={au_to_ev(omega):.3f} eV"
            )


def cmd_validate(args, cfg) -> int:
    path = Path(args.data_path)
    if not path.is_file():
        print(f"error: not found: {path}", file=sys.stderr)
        return 1
    curve = parse_table(path.read_text(encoding="utf-8"), path.stem)
    print(f"dataset: {path}")
    print(f"label: {curve.label}")
    print(f"threshold_eV: {au_to_ev(curve.threshold):.6f}")
    print(
        "coverage_eV: "
        f"{au_to_ev(float(curve.energies[0])):.6f}..{au_to_ev(curve.coverage_max):.6f}"
    )
    print(f"nodes: {curve.energies.size}")
    print("OK")
    return 0


def cmd_total(args, cfg) -> int:
    run = _run_config(args, cfg, "total")
    lo = _setting(args, cfg, "total", "omega_min_ev", float)
    hi = _setting(args, cfg, "total", "omega_max_ev", float)
    step = _setting(args, cfg, "total", "omega_step_ev", float)
    if lo is None or hi is None or step is None or step <= 0 or hi < lo:
        raise NsdiError("total needs --omega-min-ev <= --omega-max-ev and --omega-step-ev > 0")

    atom = run.load_atom()
    n_rows = int(np.floor((hi - lo) / step + 1e-9)) + 1
    omegas_ev = lo + step * np.arange(n_rows)
    omegas_au = ev_to_au(omegas_ev)
    wlo, whi = nonseq_window(atom)
    _check_scan_coverage(atom, omegas_au, (omegas_au > wlo) & (omegas_au < whi))

    table = scan(omegas_au, atom)
    lines = [SCAN_HEADER]
    for omega, total, ok in table.rows():
        if ok:
            lines.append(
                f"{au_to_ev(omega):.8e},{gen_xsec_to_cm4s(total):.8e},in"
            )
        else:
            lines.append(f"{au_to_ev(omega):.8e},,out")
    csv_text = "\n".join(lines) + "\n"

    style = PlotStyle(
        title=f"{atom.name}: generalized total cross section",
        x_label="photon energy (eV)",
        y_label="sigma (cm^4 s)",
        vlines=(float(au_to_ev(wlo)), float(au_to_ev(whi))),
    )
    _emit(run, csv_text, style)
    return 0


def _sdcs_csv(curve, metadata: list[str]) -> str:
    energies_ev = au_to_ev(curve.energies)
    values = sdcs_au_to_cm4s_per_ev(curve.dsigma_de)
    peak = float(np.max(values))
    normalized = values / peak if peak > 0 else np.zeros_like(values)
    lines = list(metadata)
    lines.append(SDCS_HEADER)
    for e, v, n in zip(energies_ev, values, normalized):
        lines.append(f"{e:.8e},{v:.8e},{n:.8e}")
    return "\n".join(lines) + "\n"


def cmd_sdcs(args, cfg) -> int:
    run = _run_config(args, cfg, "sdcs")
    omega_ev = _setting(args, cfg, "sdcs", "omega_ev", float)
    points = _setting(args, cfg, "sdcs", "points", int, 201)
    if omega_ev is None:
        raise NsdiError("sdcs needs --omega-ev")

    atom = run.load_atom()
    omega = float(ev_to_au(omega_ev))
    _check_scan_coverage(atom, [omega], [True])
    curve = sdcs(omega, atom, n_samples=points)

    csv_text = _sdcs_csv(curve, [])
    style = PlotStyle(
        title=f"{atom.name}: SDCS at {omega_ev:g} eV",
        x_label="electron energy (eV)",
        y_label="dsigma/dE (cm^4 s / eV)",
    )
    _emit(run, csv_text, style)
    return 0


def cmd_tdse(args, cfg) -> int:
    run = _run_config(args, cfg, "tdse")
    omega_ev = _setting(args, cfg, "tdse", "omega_ev", float)
    if omega_ev is None:
        raise NsdiError("tdse needs --omega-ev")
    e0 = _setting(args, cfg, "tdse", "e0_au", float, TDSE_DEFAULTS["e0_au"])
    cycles = _setting(args, cfg, "tdse", "cycles", int, TDSE_DEFAULTS["cycles"])
    n_outer = _setting(args, cfg, "tdse", "grid_outer", int, TDSE_DEFAULTS["grid_outer"])
    n_inner = _setting(args, cfg, "tdse", "grid_inner", int, TDSE_DEFAULTS["grid_inner"])
    dt = _setting(args, cfg, "tdse", "dt_au", float)

    atom = run.load_atom()
    omega = float(ev_to_au(omega_ev))
    pulse = PulseSpec(peak_field=e0, carrier=omega, n_cycles=cycles)
    grid_outer, grid_inner = default_grids(atom, omega, n_outer, n_inner)
    hamiltonian = build_hamiltonian(atom, grid_outer, grid_inner)

    result = propagate(hamiltonian, pulse, dt=dt)
    joint = extract_joint(result.state, grid_outer, grid_inner)
    prob_ionized = 1.0 - abs(result.state.ground) ** 2
    curve = tdse_sdcs(joint, pulse, atom)

    metadata = [
        f"# atom={atom.name}",
        f"# omega_ev={omega_ev:.8e}",
        f"# e0_au={e0:.8e}",
        f"# cycles={cycles}",
        f"# grid={n_outer}x{n_inner}",
        f"# dt_au={result.dt:.8e}",
        f"# steps={result.n_steps}",
        f"# prob_double={joint.total_probability:.8e}",
        f"# prob_ionized={prob_ionized:.8e}",
        f"# norm_drift={result.norm_drift:.8e}",
        f"# total_cm4_s={gen_xsec_to_cm4s(curve.total):.8e}",
    ]
    for note in curve.notes:
        metadata.append(f"# warning={note}")

    csv_text = _sdcs_csv(curve, metadata)
    style = PlotStyle(
        title=f"{atom.name}: propagated SDCS at {omega_ev:g} eV",
        x_label="electron energy (eV)",
        y_label="dsigma/dE (cm^4 s / eV)",
    )
    _emit(run, csv_text, style)
    return 0


def compare_totals(omegas_au, atom, route_a, route_b):
    """Rows of (omega, sigma_a, sigma_b, rel_deviation, in_window) plus the
    maximum deviation over in-window rows (NaN if none)."""
    wlo, whi = nonseq_window(atom)
    rows = []
    deviations = []
    for omega in omegas_au:
        if not (wlo < omega < whi):
            rows.append((omega, np.nan, np.nan, np.nan, False))
            continue
        sig_a = route_a(omega)
        sig_b = route_b(omega)
        dev = abs(sig_b - sig_a) / abs(sig_a) if sig_a != 0 else np.inf
        deviations.append(dev)
        rows.append((omega, sig_a, sig_b, dev, True))
    max_dev = max(deviations) if deviations else float("nan")
    return rows, max_dev


def cmd_compare(args, cfg) -> int:
    run = _run_config(args, cfg, "compare")
    omegas_raw = _setting(args, cfg, "compare", "omegas_ev")
    tolerance = _setting(args, cfg, "compare", "tolerance", float, 0.05)
    if not omegas_raw:
        raise NsdiError("compare needs --omegas-ev (comma-separated list)")
    omegas_ev = [float(tok) for tok in str(omegas_raw).split(",") if tok.strip()]
    if not omegas_ev:
        raise NsdiError("empty --omegas-ev list")

    e0 = _setting(args, cfg, "compare", "e0_au", float, TDSE_DEFAULTS["e0_au"])
    cycles = _setting(args, cfg, "compare", "cycles", int, TDSE_DEFAULTS["cycles"])
    n_outer = _setting(args, cfg, "compare", "grid_outer", int, TDSE_DEFAULTS["grid_outer"])
    n_inner = _setting(args, cfg, "compare", "grid_inner", int, TDSE_DEFAULTS["grid_inner"])

    atom = run.load_atom()
    omegas_au = [float(ev_to_au(w)) for w in omegas_ev]

    def tdse_route(omega: float) -> float:
        pulse = PulseSpec(peak_field=e0, carrier=omega, n_cycles=cycles)
        grid_outer, grid_inner = default_grids(atom, omega, n_outer, n_inner)
        hamiltonian = build_hamiltonian(atom, grid_outer, grid_inner)
        result = propagate(hamiltonian, pulse)
        joint = extract_joint(result.state, grid_outer, grid_inner)
        return tdse_sdcs(joint, pulse, atom).total

    rows, max_dev = compare_totals(
        omegas_au, atom, lambda w: total_xsec(w, atom), tdse_route
    )

    lines = [f"# tolerance={tolerance:.8e}"]
    lines.append(
        f"# max_rel_deviation={max_dev:.8e}" if np.isfinite(max_dev)
        else "# max_rel_deviation=nan"
    )
    lines.append(COMPARE_HEADER)
    for omega, sig_a, sig_b, dev, ok in rows:
        if ok:
            lines.append(
                f"{au_to_ev(omega):.8e},{gen_xsec_to_cm4s(sig_a):.8e},"
                f"{gen_xsec_to_cm4s(sig_b):.8e},{dev:.8e},in"
            )
        else:
            lines.append(f"{au_to_ev(omega):.8e},,,,out")
    csv_text = "\n".join(lines) + "\n"
    _emit(run, csv_text)

    if np.isfinite(max_dev) and max_dev > tolerance:
        print(
            f"error: max relative deviation {max_dev:.3e} exceeds tolerance {tolerance:g}",
            file=sys.stderr,
        )
        return 1
    return 0


COMMANDS = {
    "validate": cmd_validate,
    "total": cmd_total,
    "sdcs": cmd_sdcs,
    "tdse": cmd_tdse,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (NsdiError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())

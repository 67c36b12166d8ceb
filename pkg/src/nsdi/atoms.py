"""Built-in atom definitions and dataset file resolution.

Binding energies for 'he' and 'ne' are built in; the sigma tables always
come from user-supplied files found in a data directory (argument or the
NSDI_DATA_DIR environment variable). The 'toy' atom is fully synthetic and
needs no files: flat unit cross sections with thresholds at 1 and 2 hartree.
"""

from __future__ import annotations

import os
from pathlib import Path

from .errors import InvalidArgumentError
from .units import ev_to_au
from .xsec import AtomModel, constant_curve, make_atom, parse_table

__all__ = [
    "BUILTIN_BINDINGS_EV",
    "DATA_FILES",
    "data_dir_from_env",
    "toy_atom",
    "load_atom",
    "load_curve_file",
]

BUILTIN_BINDINGS_EV = {
    "he": (24.587, 54.418),
    "ne": (21.6, 40.9),
}

DATA_FILES = {
    "he": ("he.csv", "heplus.csv"),
    "ne": ("ne.csv", "neplus.csv"),
}

ENV_DATA_DIR = "NSDI_DATA_DIR"


def data_dir_from_env() -> Path | None:
    value = os.environ.get(ENV_DATA_DIR)
    return Path(value) if value else None


def toy_atom(sigma_au: float = 1.0, max_energy: float = 8.0) -> AtomModel:
    """Synthetic atom: I_A = 1 ha, I_B = 2 ha, flat curves of sigma_au bohr^2."""
    return make_atom(
        name="toy",
        binding_outer=1.0,
        binding_inner=2.0,
        sigma_outer=constant_curve("toy_outer", 1.0, sigma_au, max_energy),
        sigma_inner=constant_curve("toy_inner", 2.0, sigma_au, max_energy),
    )


def load_curve_file(path: Path | str, label: str | None = None):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset not found: {path}")
    return parse_table(path.read_text(encoding="utf-8"), label or path.stem)


def load_atom(
    name: str,
    data_dir: Path | str | None = None,
    *,
    binding_outer_ev: float | None = None,
    binding_inner_ev: float | None = None,
    outer_file: Path | str | None = None,
    inner_file: Path | str | None = None,
) -> AtomModel:
    """Resolve an atom selector to a validated AtomModel.

    'toy' is self-contained. Built-in names pull binding energies from the
    registry and curves from <data_dir>/<name>.csv files. Explicit binding
    energies and file paths override either route (and allow fully custom
    atoms under any name).
    """
    name = name.lower()
    if name == "toy" and outer_file is None and inner_file is None:
        return toy_atom()

    if binding_outer_ev is None or binding_inner_ev is None:
        if name not in BUILTIN_BINDINGS_EV:
            raise InvalidArgumentError(
                f"unknown atom '{name}'; pass binding energies and data files "
                f"or use one of: toy, {', '.join(sorted(BUILTIN_BINDINGS_EV))}"
            )
        builtin = BUILTIN_BINDINGS_EV[name]
        binding_outer_ev = binding_outer_ev or builtin[0]
        binding_inner_ev = binding_inner_ev or builtin[1]

    if outer_file is None or inner_file is None:
        directory = Path(data_dir) if data_dir else data_dir_from_env()
        if directory is None:
            raise InvalidArgumentError(
                f"atom '{name}' needs a data directory (--data-dir or {ENV_DATA_DIR})"
            )
        default_outer, default_inner = DATA_FILES.get(name, (f"{name}.csv", f"{name}plus.csv"))
        outer_file = outer_file or directory / default_outer
        inner_file = inner_file or directory / default_inner

    return make_atom(
        name=name,
        binding_outer=float(ev_to_au(binding_outer_ev)),
        binding_inner=float(ev_to_au(binding_inner_ev)),
        sigma_outer=load_curve_file(outer_file),
        sigma_inner=load_curve_file(inner_file),
    )

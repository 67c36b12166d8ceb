"""Tabulated one-photon photoionization cross sections and atom models.

A curve stores (photon energy, sigma) nodes in atomic units together with
an ionization threshold: evaluation is linear between nodes, exactly zero
below threshold, and refuses to extrapolate above the last node. A
closed-form hydrogenic 1s generator provides data-free curves for tests
and toy models.

File format (text, UTF-8):
    lines starting with '#' are comments
    optional directive line:  #threshold_eV=<value>
    header line exactly:      photon_energy_eV,sigma_Mb
    data rows: two comma-separated decimal fields, ascending energy
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConsistencyError,
    CoverageError,
    DomainError,
    InvalidArgumentError,
    InvalidModelError,
    OrderingError,
    ParseError,
)
from .units import CONST, au_to_ev, au_to_mb, ev_to_au, mb_to_au

__all__ = [
    "CrossSectionCurve",
    "AtomModel",
    "parse_table",
    "serialize_table",
    "sigma_at",
    "hydrogenic_sigma",
    "hydrogenic_curve",
    "constant_curve",
    "make_atom",
    "TABLE_HEADER",
]

TABLE_HEADER = "photon_energy_eV,sigma_Mb"
THRESHOLD_DIRECTIVE = "#threshold_eV="


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CrossSectionCurve:
    """One-photon single-ionization cross section, tabulated in atomic units.

    energies are photon energies in hartree (strictly increasing, first one
    at or above threshold); sigmas are in bohr^2 and non-negative.
    """

    label: str
    threshold: float
    energies: np.ndarray
    sigmas: np.ndarray

    def __post_init__(self):
        energies = _frozen_array(self.energies)
        sigmas = _frozen_array(self.sigmas)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "sigmas", sigmas)
        if energies.ndim != 1 or energies.shape != sigmas.shape or energies.size == 0:
            raise InvalidArgumentError("curve needs matching 1-D energy/sigma tables")
        if not np.all(np.isfinite(energies)) or not np.all(np.isfinite(sigmas)):
            raise InvalidArgumentError("curve values must be finite")
        if not (np.isfinite(self.threshold) and self.threshold > 0):
            raise InvalidArgumentError("threshold must be positive")
        if energies.size > 1 and not np.all(np.diff(energies) > 0):
            raise OrderingError("photon energies must be strictly increasing")
        if energies[0] < self.threshold:
            raise DomainError("first node lies below threshold")
        if np.any(sigmas < 0):
            raise DomainError("sigma values must be non-negative")

    @property
    def coverage_max(self) -> float:
        """Largest photon energy (hartree) the table can be evaluated at."""
        return float(self.energies[-1])


def sigma_at(curve: CrossSectionCurve, photon_energy):
    """Evaluate a curve at photon energies in hartree (scalar or array).

    Exactly zero strictly below threshold; linear between nodes; between
    threshold and the first node the first node's value is used (keeps the
    evaluation defined when the shared threshold sits just below the first
    tabulated point). Queries above the last node raise CoverageError.
    """
    e = np.asarray(photon_energy, dtype=float)
    if not np.all(np.isfinite(e)):
        raise InvalidArgumentError("photon_energy must be finite")
    if np.any(e > curve.energies[-1]):
        raise CoverageError(
            f"curve '{curve.label}' covers photon energies up to "
            f"{curve.coverage_max:.6g} ha; got {float(np.max(e)):.6g} ha"
        )
    out = np.interp(e, curve.energies, curve.sigmas)
    out = np.where(e < curve.threshold, 0.0, out)
    return float(out) if np.isscalar(photon_energy) else out


def parse_table(content: str, label: str) -> CrossSectionCurve:
    """Parse the two-column text format into a validated curve (atomic units)."""
    threshold_ev: float | None = None
    header_seen = False
    energies_ev: list[float] = []
    sigmas_mb: list[float] = []

    for lineno, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith(THRESHOLD_DIRECTIVE):
                try:
                    threshold_ev = float(line[len(THRESHOLD_DIRECTIVE):])
                except ValueError:
                    raise ParseError("bad threshold directive", line=lineno) from None
            continue
        if not header_seen:
            if line != TABLE_HEADER:
                raise ParseError(f"expected header '{TABLE_HEADER}'", line=lineno)
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise ParseError("expected two comma-separated fields", line=lineno)
        try:
            energy = float(fields[0])
            sigma = float(fields[1])
        except ValueError:
            raise ParseError("non-numeric field", line=lineno) from None
        if energies_ev and energy <= energies_ev[-1]:
            raise OrderingError("photon energies must be strictly increasing", line=lineno)
        if sigma < 0:
            raise DomainError("negative cross section", line=lineno)
        energies_ev.append(energy)
        sigmas_mb.append(sigma)

    if not header_seen:
        raise ParseError("missing header line")
    if not energies_ev:
        raise ParseError("no data rows")

    if threshold_ev is None:
        threshold_ev = energies_ev[0]
    if threshold_ev > energies_ev[0]:
        raise DomainError("threshold directive exceeds first node energy")

    return CrossSectionCurve(
        label=label,
        threshold=float(ev_to_au(threshold_ev)),
        energies=ev_to_au(np.array(energies_ev)),
        sigmas=mb_to_au(np.array(sigmas_mb)),
    )


def serialize_table(curve: CrossSectionCurve) -> str:
    """Write a curve back to the text format (eV / Mb), full float precision."""
    lines = [
        f"# {curve.label}",
        f"{THRESHOLD_DIRECTIVE}{au_to_ev(curve.threshold):.17g}",
        TABLE_HEADER,
    ]
    for e, s in zip(curve.energies, curve.sigmas):
        lines.append(f"{au_to_ev(e):.17g},{au_to_mb(s):.17g}")
    return "\n".join(lines) + "\n"


def hydrogenic_sigma(z: float, photon_energy):
    """Exact nonrelativistic 1s photoionization cross section, in bohr^2.

    Valid strictly above the threshold z^2/2 hartree; scales between nuclear
    charges as sigma_z(z^2 E) = sigma_1(E)/z^2.
    """
    if z < 1:
        raise InvalidArgumentError("nuclear charge must be >= 1")
    nu = np.asarray(photon_energy, dtype=float)
    ip = 0.5 * z * z
    if np.any(nu <= ip) or not np.all(np.isfinite(nu)):
        raise DomainError("photon energy must lie strictly above threshold z^2/2")
    kappa = np.sqrt(nu / ip - 1.0)
    zeta = 1.0 / kappa
    prefactor = (512.0 * np.pi**2 / 3.0) * CONST.fine_structure_alpha / (z * z)
    sigma = (
        prefactor
        * (ip / nu) ** 4
        * np.exp(-4.0 * zeta * np.arctan(kappa))
        / (1.0 - np.exp(-2.0 * np.pi * zeta))
    )
    return float(sigma) if np.isscalar(photon_energy) else sigma


def hydrogenic_curve(z: float, grid) -> CrossSectionCurve:
    """Tabulate the hydrogenic 1s cross section on a photon-energy grid (hartree)."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidArgumentError("grid must be a non-empty 1-D sequence")
    return CrossSectionCurve(
        label=f"hydrogenic_z{z:g}",
        threshold=0.5 * z * z,
        energies=grid,
        sigmas=hydrogenic_sigma(z, grid),
    )


def constant_curve(
    label: str, threshold: float, sigma_au: float, max_energy: float
) -> CrossSectionCurve:
    """Flat curve from threshold to max_energy; handy for toy models and tests."""
    return CrossSectionCurve(
        label=label,
        threshold=threshold,
        energies=np.array([threshold, max_energy]),
        sigmas=np.array([sigma_au, sigma_au]),
    )


@dataclass(frozen=True)
class AtomModel:
    """Two effective binding energies plus the matching ionization curves.

    binding_outer (I_A) is the first ionization potential, binding_inner
    (I_B) the second; sigma_outer/sigma_inner are the one-photon single
    ionization cross sections of the neutral and of the ion. Everything is
    in atomic units.
    """

    name: str
    binding_outer: float
    binding_inner: float
    sigma_outer: CrossSectionCurve
    sigma_inner: CrossSectionCurve


def make_atom(
    name: str,
    binding_outer: float,
    binding_inner: float,
    sigma_outer: CrossSectionCurve,
    sigma_inner: CrossSectionCurve,
    threshold_tol: float = 0.02,
) -> AtomModel:
    """Validate binding energies against curve thresholds and build an AtomModel.

    threshold_tol is the allowed relative mismatch between each binding
    energy and its curve threshold (tabulated experimental thresholds and
    quoted ionization potentials differ slightly).
    """
    if not (0 < binding_outer < binding_inner):
        raise InvalidModelError(
            f"need 0 < I_A < I_B, got I_A={binding_outer:.6g}, I_B={binding_inner:.6g}"
        )
    for binding, curve, which in (
        (binding_outer, sigma_outer, "outer"),
        (binding_inner, sigma_inner, "inner"),
    ):
        if abs(curve.threshold - binding) > threshold_tol * binding:
            raise ConsistencyError(
                f"{which} curve threshold {curve.threshold:.6g} ha is inconsistent "
                f"with binding energy {binding:.6g} ha (tol {threshold_tol:.1%})"
            )
    return AtomModel(
        name=name,
        binding_outer=float(binding_outer),
        binding_inner=float(binding_inner),
        sigma_outer=sigma_outer,
        sigma_inner=sigma_inner,
    )

"""Closed-form second-order route to the two-photon double-ionization SDCS.

The single-differential cross section at photon energy omega is the
exchange-symmetrized average of a one-ordering kernel built from the two
one-photon cross sections,

    kernel(E) = (omega^2/pi) * sigma_out(E + I_A) * sigma_in(2 omega - E - I_A)
                / [ (E + I_A) (2 omega - E - I_A) (E + I_A - omega)^2 ],

with E the detected electron energy on [0, excess] and
excess = 2 omega - I_A - I_B. Inside the open window
((I_A + I_B)/2, I_B) the detuning zero of the last factor lies outside
the physical energy range, so the integrand is smooth and Gauss-Legendre
quadrature with node doubling converges fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .errors import ConvergenceError, InvalidArgumentError, WindowError
from .xsec import AtomModel, sigma_at

__all__ = [
    "SdcsCurve",
    "ScanTable",
    "nonseq_window",
    "nonseq_window_bounds",
    "sdcs_kernel",
    "dsigma_de",
    "sdcs",
    "total_xsec",
    "scan",
]


@dataclass(frozen=True)
class SdcsCurve:
    """Energy-resolved dsigma/dE (a.u.) plus its integral, at one photon energy."""

    photon_energy: float
    excess_energy: float
    energies: np.ndarray
    dsigma_de: np.ndarray
    total: float
    notes: tuple = ()

    def __post_init__(self):
        e = np.array(self.energies, dtype=float)
        d = np.array(self.dsigma_de, dtype=float)
        e.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "dsigma_de", d)
        if e.shape != d.shape or e.ndim != 1 or e.size < 3:
            raise InvalidArgumentError("SDCS needs >= 3 matching samples")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise InvalidArgumentError("dsigma/dE samples must be finite and >= 0")


@dataclass(frozen=True)
class ScanTable:
    """Per-photon-energy totals; out-of-window rows carry NaN and a flag."""

    photon_energies: np.ndarray
    totals: np.ndarray
    in_window: np.ndarray

    def __post_init__(self):
        for name in ("photon_energies", "totals", "in_window"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (
            self.photon_energies.shape == self.totals.shape == self.in_window.shape
        ):
            raise InvalidArgumentError("scan columns must have matching shapes")

    def __len__(self) -> int:
        return int(self.photon_energies.size)

    def rows(self):
        """Yield (photon_energy, total_or_nan, in_window) tuples."""
        yield from zip(self.photon_energies, self.totals, self.in_window)


def nonseq_window_bounds(binding_outer: float, binding_inner: float) -> tuple[float, float]:
    """Open photon-energy interval where direct two-photon double ionization
    is the only energetically allowed double-ionization channel."""
    return 0.5 * (binding_outer + binding_inner), binding_inner


def nonseq_window(atom: AtomModel) -> tuple[float, float]:
    """Nonsequential window (omega_min, omega_max) of an atom, in hartree."""
    return nonseq_window_bounds(atom.binding_outer, atom.binding_inner)


def _require_in_window(omega: float, atom: AtomModel) -> None:
    lo, hi = nonseq_window(atom)
    if not (lo < omega < hi):
        raise WindowError(
            f"photon energy {omega:.6g} ha outside the open nonsequential window "
            f"({lo:.6g}, {hi:.6g}) ha"
        )


def sdcs_kernel(electron_energy, omega: float, atom: AtomModel):
    """One-ordering kernel of the SDCS, in a.u., before exchange symmetrization.

    electron_energy is the energy of the electron ionized first (scalar or
    array, on [0, excess]). Finite and non-negative everywhere inside the
    window: the detuning zero sits above the excess energy there.
    """
    _require_in_window(omega, atom)
    ia = atom.binding_outer
    excess = 2.0 * omega - ia - atom.binding_inner
    e = np.asarray(electron_energy, dtype=float)
    if not np.all(np.isfinite(e)):
        raise InvalidArgumentError("electron_energy must be finite")
    slack = 1e-12 * max(excess, 1.0)
    if np.any(e < -slack) or np.any(e > excess + slack):
        raise InvalidArgumentError(
            f"electron_energy must lie in [0, {excess:.6g}] ha"
        )
    e = np.clip(e, 0.0, excess)

    first = e + ia                 # photon energy absorbed by the first electron
    second = 2.0 * omega - e - ia  # photon energy left for the second one
    value = (
        (omega * omega / np.pi)
        * sigma_at(atom.sigma_outer, first)
        * sigma_at(atom.sigma_inner, second)
        / (first * second * (first - omega) ** 2)
    )
    return float(value) if np.isscalar(electron_energy) else value


def dsigma_de(electron_energy, omega: float, atom: AtomModel):
    """Exchange-symmetrized SDCS at the detected electron energy, in a.u."""
    _require_in_window(omega, atom)
    excess = 2.0 * omega - atom.binding_outer - atom.binding_inner
    e = np.asarray(electron_energy, dtype=float)
    value = 0.5 * (sdcs_kernel(e, omega, atom) + sdcs_kernel(excess - e, omega, atom))
    return float(value) if np.isscalar(electron_energy) else value


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    return roots_legendre(n)


def total_xsec(
    omega: float,
    atom: AtomModel,
    rel_tol: float = 1e-6,
    max_nodes: int = 2**14,
) -> float:
    """Generalized total cross section in a.u.: quadrature of the SDCS.

    Gauss-Legendre on [0, excess] with node doubling until two successive
    estimates agree to rel_tol; raises ConvergenceError at the node cap.
    """
    _require_in_window(omega, atom)
    excess = 2.0 * omega - atom.binding_outer - atom.binding_inner
    half = 0.5 * excess

    previous = None
    n = 16
    while n <= max_nodes:
        x, w = _gauss_legendre(n)
        estimate = half * float(np.dot(w, dsigma_de(half * (x + 1.0), omega, atom)))
        if previous is not None:
            if abs(estimate - previous) <= rel_tol * max(abs(estimate), 1e-300):
                return estimate
        previous = estimate
        n *= 2
    raise ConvergenceError(
        f"quadrature not converged to {rel_tol:g} within {max_nodes} nodes"
    )


def scan(omegas, atom: AtomModel) -> ScanTable:
    """Totals over a strictly increasing list of photon energies (hartree).

    Out-of-window entries are flagged rather than failing the whole scan;
    their totals are NaN.
    """
    omegas = np.asarray(omegas, dtype=float)
    if omegas.ndim != 1 or omegas.size == 0:
        raise InvalidArgumentError("omegas must be a non-empty 1-D sequence")
    if omegas.size > 1 and not np.all(np.diff(omegas) > 0):
        raise InvalidArgumentError("omegas must be strictly increasing")

    lo, hi = nonseq_window(atom)
    in_window = (omegas > lo) & (omegas < hi)
    totals = np.full(omegas.shape, np.nan)
    for i in np.nonzero(in_window)[0]:
        totals[i] = total_xsec(float(omegas[i]), atom)
    return ScanTable(photon_energies=omegas, totals=totals, in_window=in_window)


def sdcs(omega: float, atom: AtomModel, n_samples: int = 201) -> SdcsCurve:
    """Sample the symmetrized SDCS on a uniform grid over [0, excess]."""
    if n_samples < 3:
        raise InvalidArgumentError("n_samples must be >= 3")
    _require_in_window(omega, atom)
    excess = 2.0 * omega - atom.binding_outer - atom.binding_inner
    energies = np.linspace(0.0, excess, n_samples)
    return SdcsCurve(
        photon_energy=float(omega),
        excess_energy=float(excess),
        energies=energies,
        dsigma_de=dsigma_de(energies, omega, atom),
        total=total_xsec(omega, atom),
    )

"""Physical constants and unit conversions.

All internal computation runs in hartree atomic units (hbar = e = m_e = 1).
External interfaces use eV for photon and electron energies, megabarn for
one-photon cross sections, and cm^4 s for two-photon generalized cross
sections.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "CONST",
    "Constants",
    "ev_to_au",
    "au_to_ev",
    "mb_to_au",
    "au_to_mb",
    "gen_xsec_to_cm4s",
    "sdcs_au_to_cm4s_per_ev",
]


@dataclass(frozen=True)
class Constants:
    """CODATA 2018 values, pinned to 8 significant digits for reproducibility."""

    fine_structure_alpha: float = 7.2973526e-3
    hartree_in_ev: float = 27.211386
    bohr_in_cm: float = 5.2917721e-9
    atomic_time_in_s: float = 2.4188843e-17
    # 1 Mb = 1e-18 cm^2, expressed in bohr^2
    megabarn_in_au_area: float = field(init=False)
    # one atomic unit of generalized (two-photon) cross section: bohr^4 * t_au
    gen_xsec_au_in_cm4s: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "megabarn_in_au_area", 1e-18 / self.bohr_in_cm**2)
        object.__setattr__(
            self, "gen_xsec_au_in_cm4s", self.bohr_in_cm**4 * self.atomic_time_in_s
        )


CONST = Constants()


def _require_finite(x, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError(f"{name} must be finite")


def ev_to_au(energy_ev):
    """Energy in eV -> hartree. Accepts scalars or arrays."""
    _require_finite(energy_ev, "energy_ev")
    return energy_ev / CONST.hartree_in_ev


def au_to_ev(energy_au):
    """Energy in hartree -> eV."""
    _require_finite(energy_au, "energy_au")
    return energy_au * CONST.hartree_in_ev


def mb_to_au(sigma_mb):
    """One-photon cross section in megabarn -> bohr^2."""
    _require_finite(sigma_mb, "sigma_mb")
    if np.any(np.asarray(sigma_mb) < 0):
        raise InvalidArgumentError("cross section must be non-negative")
    return sigma_mb * CONST.megabarn_in_au_area


def au_to_mb(sigma_au):
    """One-photon cross section in bohr^2 -> megabarn."""
    _require_finite(sigma_au, "sigma_au")
    if np.any(np.asarray(sigma_au) < 0):
        raise InvalidArgumentError("cross section must be non-negative")
    return sigma_au / CONST.megabarn_in_au_area


def gen_xsec_to_cm4s(sigma_au):
    """Generalized two-photon cross section in a.u. -> cm^4 s."""
    _require_finite(sigma_au, "sigma_au")
    if np.any(np.asarray(sigma_au) < 0):
        raise InvalidArgumentError("cross section must be non-negative")
    return sigma_au * CONST.gen_xsec_au_in_cm4s


def sdcs_au_to_cm4s_per_ev(dsigma_de_au):
    """Energy-differential generalized cross section in a.u. -> cm^4 s / eV."""
    _require_finite(dsigma_de_au, "dsigma_de_au")
    return dsigma_de_au * CONST.gen_xsec_au_in_cm4s / CONST.hartree_in_ev

"""Constrained block-Hamiltonian propagation route to the same cross sections.

The basis is {ground} + {outer electron ionized} + {both ionized}. The
first block of couplings connects the ground state to every singly-ionized
state; the second connects each singly-ionized state only to the doubly-
ionized states that share its outer-electron energy. Both coupling families
are inverted from tabulated one-photon cross sections so that the
discretized golden-rule rate reproduces the continuous one.

That sparsity (one arrow row plus independent inner blocks) lets the
Crank-Nicolson update be solved in closed form per step, so propagation is
unitary to machine precision and costs a handful of array operations per
time step regardless of basis size.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidArgumentError,
    NonperturbativeWarning,
    StabilityError,
    WindowError,
)
from .perturbative import SdcsCurve, nonseq_window
from .units import CONST
from .xsec import AtomModel, CrossSectionCurve, sigma_at

__all__ = [
    "EnergyGrid",
    "PulseSpec",
    "ModelHamiltonian",
    "StateVector",
    "PropagationResult",
    "JointDistribution",
    "dipole_from_xsec",
    "build_hamiltonian",
    "default_grids",
    "field_at",
    "propagate",
    "extract_joint",
    "tdse_sdcs",
    "flux_squared_integral",
]

# Ionized-population ceiling for a clean lowest-order extraction.
PERTURBATIVE_LIMIT = 1e-4

# Hard precondition on the time step, in optical cycles.
MAX_DT_FRACTION_OF_CYCLE = 1.0 / 50.0


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class EnergyGrid:
    """Discretized continuum: node energies (hartree) and quadrature widths."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = _frozen(self.nodes)
        weights = _frozen(self.weights)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise InvalidArgumentError("nodes and weights must be matching 1-D arrays")
        if nodes.size == 0:
            return
        if np.any(nodes < 0) or not np.all(np.isfinite(nodes)):
            raise InvalidArgumentError("continuum energies must be finite and >= 0")
        if nodes.size > 1 and not np.all(np.diff(nodes) > 0):
            raise InvalidArgumentError("grid nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise InvalidArgumentError("grid weights must be positive")
        span = self.nodes[-1] - self.nodes[0] + 0.5 * (weights[0] + weights[-1])
        if abs(weights.sum() - span) > 1e-12 * max(span, 1.0):
            raise InvalidArgumentError("weights must tile the covered span")

    @classmethod
    def uniform(cls, lo: float, hi: float, n: int) -> "EnergyGrid":
        """n cells of equal width on [lo, hi], nodes at cell midpoints."""
        if n < 1 or hi <= lo:
            raise InvalidArgumentError("need n >= 1 and hi > lo")
        width = (hi - lo) / n
        nodes = lo + (np.arange(n) + 0.5) * width
        return cls(nodes=nodes, weights=np.full(n, width))

    def __len__(self) -> int:
        return int(self.nodes.size)

    @property
    def span(self) -> float:
        return float(self.weights.sum()) if len(self) else 0.0


@dataclass(frozen=True)
class PulseSpec:
    """Linearly polarized pulsed field, length gauge, in atomic units.

    envelope 'sin2' is the default physics pulse; 'flat' keeps the envelope
    constant over the same duration (used for analytic benchmarks).
    """

    peak_field: float
    carrier: float
    n_cycles: int
    envelope: str = "sin2"

    def __post_init__(self):
        if not (np.isfinite(self.peak_field) and self.peak_field >= 0):
            raise InvalidArgumentError("peak_field must be finite and >= 0")
        if not (np.isfinite(self.carrier) and self.carrier > 0):
            raise InvalidArgumentError("carrier must be positive")
        if self.n_cycles < 4:
            raise InvalidArgumentError("need at least 4 optical cycles")
        if self.envelope not in ("sin2", "flat"):
            raise InvalidArgumentError("envelope must be 'sin2' or 'flat'")

    @property
    def duration(self) -> float:
        return self.n_cycles * 2.0 * np.pi / self.carrier


def _envelope(pulse: PulseSpec, t):
    t = np.asarray(t, dtype=float)
    inside = (t >= 0.0) & (t <= pulse.duration)
    if pulse.envelope == "flat":
        env = np.where(inside, pulse.peak_field, 0.0)
    else:
        env = np.where(
            inside, pulse.peak_field * np.sin(np.pi * t / pulse.duration) ** 2, 0.0
        )
    return env


def field_at(pulse: PulseSpec, t):
    """Electric field at time t (a.u.); zero outside [0, duration]."""
    value = _envelope(pulse, t) * np.cos(pulse.carrier * np.asarray(t, dtype=float))
    return float(value) if np.isscalar(t) else value


def dipole_from_xsec(curve: CrossSectionCurve, photon_energy, de):
    """Discretized bound-continuum dipole magnitude reproducing the curve.

    sqrt(sigma(photon_energy) * de / (4 pi^2 alpha photon_energy)): squared
    and divided by the cell width de this is the dipole density whose
    golden-rule rate gives back sigma.
    """
    de = np.asarray(de, dtype=float)
    if np.any(de <= 0):
        raise InvalidArgumentError("cell width de must be positive")
    e = np.asarray(photon_energy, dtype=float)
    if np.any(e <= 0):
        raise InvalidArgumentError("photon_energy must be positive")
    sig = sigma_at(curve, e)
    value = np.sqrt(sig * de / (4.0 * np.pi**2 * CONST.fine_structure_alpha * e))
    return float(value) if np.isscalar(photon_energy) else value


@dataclass(frozen=True)
class ModelHamiltonian:
    """Diagonal energies plus the two constrained coupling families.

    ground_couplings[i] connects ground <-> single i; single_couplings[j]
    connects single i <-> double (i, j) for every i (states of a different
    outer index are never connected). Doubly-ionized states couple to
    nothing further.
    """

    ground_energy: float
    outer_grid: EnergyGrid
    inner_grid: EnergyGrid
    single_energies: np.ndarray
    ground_couplings: np.ndarray
    single_couplings: np.ndarray

    def __post_init__(self):
        for name in ("single_energies", "ground_couplings", "single_couplings"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self.single_energies.shape != (len(self.outer_grid),):
            raise InvalidArgumentError("single_energies must match the outer grid")
        if self.ground_couplings.shape != (len(self.outer_grid),):
            raise InvalidArgumentError("ground_couplings must match the outer grid")
        if self.single_couplings.shape != (len(self.inner_grid),):
            raise InvalidArgumentError("single_couplings must match the inner grid")

    @property
    def n_single(self) -> int:
        return len(self.outer_grid)

    @property
    def n_inner(self) -> int:
        return len(self.inner_grid)

    @property
    def dimension(self) -> int:
        return 1 + self.n_single + self.n_single * self.n_inner

    def double_energies(self) -> np.ndarray:
        """(n_single, n_inner) array of doubly-ionized diagonal energies."""
        return self.outer_grid.nodes[:, None] + self.inner_grid.nodes[None, :]

    def dense_matrix(self, field: float) -> np.ndarray:
        """Full matrix at a given field value; for small models and tests only.

        Layout: index 0 ground, 1..n_single singles, then doubles row-major.
        """
        dim = self.dimension
        if dim > 4096:
            raise InvalidArgumentError("dense matrix only supported for small models")
        na, nb = self.n_single, self.n_inner
        h = np.zeros((dim, dim))
        h[0, 0] = self.ground_energy
        np.fill_diagonal(h[1 : 1 + na, 1 : 1 + na], self.single_energies)
        dbl = self.double_energies().ravel()
        np.fill_diagonal(h[1 + na :, 1 + na :], dbl)
        h[0, 1 : 1 + na] = field * self.ground_couplings
        h[1 : 1 + na, 0] = field * self.ground_couplings
        for i in range(na):
            rows = 1 + na + i * nb
            h[1 + i, rows : rows + nb] = field * self.single_couplings
            h[rows : rows + nb, 1 + i] = field * self.single_couplings
        return h


def build_hamiltonian(
    atom: AtomModel, grid_outer: EnergyGrid, grid_inner: EnergyGrid
) -> ModelHamiltonian:
    """Assemble the model from an atom and two continuum grids.

    The ground <-> single coupling at outer node E_a is inverted from the
    outer curve at photon energy E_a + I_A; the single <-> double coupling
    at inner node E_b from the inner curve at E_b + I_B.
    """
    if len(grid_outer) == 0 or len(grid_inner) == 0:
        raise InvalidArgumentError("continuum grids must be non-empty")
    ia, ib = atom.binding_outer, atom.binding_inner
    d1 = dipole_from_xsec(atom.sigma_outer, grid_outer.nodes + ia, grid_outer.weights)
    d2 = dipole_from_xsec(atom.sigma_inner, grid_inner.nodes + ib, grid_inner.weights)
    return ModelHamiltonian(
        ground_energy=-(ia + ib),
        outer_grid=grid_outer,
        inner_grid=grid_inner,
        single_energies=grid_outer.nodes - ib,
        ground_couplings=d1,
        single_couplings=d2,
    )


def default_grids(
    atom: AtomModel, omega: float, n_outer: int = 120, n_inner: int = 120
) -> tuple[EnergyGrid, EnergyGrid]:
    """Uniform grids spanning all energies reachable by two-photon absorption."""
    hi_outer = 2.0 * omega - atom.binding_outer
    hi_inner = 2.0 * omega - atom.binding_inner
    if hi_outer <= 0 or hi_inner <= 0:
        raise WindowError("photon energy too low to reach the double continuum")
    return (
        EnergyGrid.uniform(0.0, hi_outer, n_outer),
        EnergyGrid.uniform(0.0, hi_inner, n_inner),
    )


@dataclass(frozen=True)
class StateVector:
    """Complex amplitudes over {ground} + singles + doubles."""

    ground: complex
    single: np.ndarray
    double: np.ndarray

    def norm_sq(self) -> float:
        return float(
            abs(self.ground) ** 2
            + np.sum(np.abs(self.single) ** 2)
            + np.sum(np.abs(self.double) ** 2)
        )


@dataclass(frozen=True)
class PropagationResult:
    """Final state plus run diagnostics."""

    state: StateVector
    norm_drift: float
    n_steps: int
    dt: float


def propagate(
    hamiltonian: ModelHamiltonian,
    pulse: PulseSpec,
    dt: float | None = None,
    observer=None,
    observe_every: int = 0,
) -> PropagationResult:
    """Propagate the pure ground state through the full pulse.

    Crank-Nicolson with the field sampled at step midpoints; the linear
    system is eliminated analytically through the arrow/block structure, so
    each step is exactly unitary up to roundoff. dt defaults to 1/200 of an
    optical cycle and may not exceed 1/50 of one.

    If observer is given it is called as observer(t, state) with a snapshot
    every observe_every steps.

    Raises StabilityError if dt violates the cap or the norm drifts beyond
    1e-6 mid-run (1e-8 at the end).
    """
    cycle = 2.0 * np.pi / pulse.carrier
    if dt is None:
        dt = cycle / 200.0
    if not (np.isfinite(dt) and dt > 0):
        raise InvalidArgumentError("dt must be positive")
    if dt > cycle * MAX_DT_FRACTION_OF_CYCLE:
        raise StabilityError(
            f"dt={dt:.4g} exceeds 1/50 of the optical cycle ({cycle / 50:.4g})"
        )

    duration = pulse.duration
    n_steps = int(np.ceil(duration / dt))
    dt = duration / n_steps
    gamma = 0.5 * dt

    na, nb = hamiltonian.n_single, hamiltonian.n_inner
    d1 = hamiltonian.ground_couplings
    d2 = hamiltonian.single_couplings
    d1_sq = d1 * d1
    d2_sq = d2 * d2

    # Constant Crank-Nicolson diagonal factors (1 +- i dt/2 E).
    a_g = 1.0 + 1j * gamma * hamiltonian.ground_energy
    b_g = np.conj(a_g)
    a_s = 1.0 + 1j * gamma * hamiltonian.single_energies
    b_s = np.conj(a_s)
    a_d = 1.0 + 1j * gamma * hamiltonian.double_energies()
    b_d = np.conj(a_d)
    inv_a_d = 1.0 / a_d
    # Schur term of the inner blocks; the field enters only through beta^2.
    block_sum = (d2_sq[None, :] * inv_a_d).sum(axis=1) if nb else np.zeros(na)

    c_g = 1.0 + 0.0j
    c_s = np.zeros(na, dtype=complex)
    c_d = np.zeros((na, nb), dtype=complex)

    midpoint_fields = field_at(pulse, (np.arange(n_steps) + 0.5) * dt)

    check_every = 256
    for step in range(n_steps):
        beta = gamma * midpoint_fields[step]
        r_g = b_g * c_g - 1j * beta * (d1 @ c_s)
        if nb:
            r_s = b_s * c_s - 1j * beta * d1 * c_g - 1j * beta * (c_d @ d2)
            r_d = b_d * c_d - 1j * beta * (c_s[:, None] * d2[None, :])
            a_tilde = a_s + beta * beta * block_sum
            r_tilde = r_s - 1j * beta * ((r_d * inv_a_d) @ d2)
        else:
            r_tilde = b_s * c_s - 1j * beta * d1 * c_g
            a_tilde = a_s
        denom_g = a_g + beta * beta * (d1_sq / a_tilde).sum()
        c_g = (r_g - 1j * beta * (d1 * r_tilde / a_tilde).sum()) / denom_g
        c_s = (r_tilde - 1j * beta * d1 * c_g) / a_tilde
        if nb:
            c_d = (r_d - 1j * beta * (c_s[:, None] * d2[None, :])) * inv_a_d

        if (step + 1) % check_every == 0:
            norm_sq = (
                abs(c_g) ** 2 + np.sum(np.abs(c_s) ** 2) + np.sum(np.abs(c_d) ** 2)
            )
            if abs(1.0 - norm_sq) > 1e-6:
                raise StabilityError(
                    f"norm drift {abs(1.0 - norm_sq):.3e} at step {step + 1}; "
                    "reduce dt"
                )
        if observer is not None and observe_every > 0 and (step + 1) % observe_every == 0:
            observer(
                (step + 1) * dt,
                StateVector(ground=complex(c_g), single=c_s.copy(), double=c_d.copy()),
            )

    state = StateVector(ground=complex(c_g), single=c_s, double=c_d)
    drift = abs(1.0 - state.norm_sq())
    if drift > 1e-8:
        raise StabilityError(f"final norm drift {drift:.3e} exceeds 1e-8")
    return PropagationResult(state=state, norm_drift=drift, n_steps=n_steps, dt=dt)


@dataclass(frozen=True)
class JointDistribution:
    """Joint energy density of the two outgoing electrons on the grid product."""

    density: np.ndarray
    grid_outer: EnergyGrid
    grid_inner: EnergyGrid
    total_probability: float


def extract_joint(
    state: StateVector, grid_outer: EnergyGrid, grid_inner: EnergyGrid
) -> JointDistribution:
    """Density P_ij = |c_ij|^2 / (dE_i dE_j); total is the summed probability."""
    prob = np.abs(state.double) ** 2
    if prob.shape != (len(grid_outer), len(grid_inner)):
        raise InvalidArgumentError("state double block does not match the grids")
    density = prob / (grid_outer.weights[:, None] * grid_inner.weights[None, :])
    return JointDistribution(
        density=density,
        grid_outer=grid_outer,
        grid_inner=grid_inner,
        total_probability=float(prob.sum()),
    )


def _env_sq_spectrum(pulse: PulseSpec, detuning) -> np.ndarray:
    """|integral of env(t)^2 e^{i detuning t} dt|^2, closed form per envelope."""
    big_t = pulse.duration
    d = np.asarray(detuning, dtype=float)

    def boxcar(x):
        # integral of e^{ixt} over [0, T]
        small = np.abs(x) < 1e-14
        safe = np.where(small, 1.0, x)
        out = (np.exp(1j * safe * big_t) - 1.0) / (1j * safe)
        return np.where(small, big_t, out)

    if pulse.envelope == "flat":
        amplitude = boxcar(d)
    else:
        # env^2 = E0^2 sin^4 = E0^2 (3/8 - cos(a t)/2 + cos(2 a t)/8), a = 2 pi / T
        a = 2.0 * np.pi / big_t
        amplitude = (
            0.375 * boxcar(d)
            - 0.25 * (boxcar(d + a) + boxcar(d - a))
            + 0.0625 * (boxcar(d + 2 * a) + boxcar(d - 2 * a))
        )
    return pulse.peak_field**4 * np.abs(amplitude) ** 2


def _spectral_acceptance(pulse: PulseSpec, min_detuning) -> np.ndarray:
    """Fraction of the two-photon spectral weight with detuning >= min_detuning.

    Used to undo the kinematic clipping of the pulse bandwidth at the
    second continuum threshold; tends to 1 in the long-pulse limit.
    """
    half_range = 60.0 * np.pi / pulse.duration
    grid = np.linspace(-half_range, half_range, 6001)
    weight = _env_sq_spectrum(pulse, grid)
    cdf = np.concatenate(
        ([0.0], np.cumsum(0.5 * (weight[1:] + weight[:-1]) * np.diff(grid)))
    )
    cdf /= cdf[-1]
    return 1.0 - np.interp(min_detuning, grid, cdf, left=0.0, right=1.0)


def flux_squared_integral(pulse: PulseSpec) -> float:
    """Integral of the squared cycle-averaged photon flux over the pulse.

    Flux is env(t)^2 / (8 pi alpha omega) in atomic units; the envelope
    integrals are analytic for both supported shapes.
    """
    big_t = pulse.duration
    if pulse.envelope == "flat":
        env4 = pulse.peak_field**4 * big_t
    else:
        env4 = pulse.peak_field**4 * 35.0 * big_t / 128.0  # integral of sin^8
    return env4 / (8.0 * np.pi * CONST.fine_structure_alpha * pulse.carrier) ** 2


def tdse_sdcs(
    joint: JointDistribution,
    pulse: PulseSpec,
    atom: AtomModel,
    n_samples: int = 201,
) -> SdcsCurve:
    """Generalized SDCS extracted from the final joint distribution, in a.u.

    The outer-electron marginal is corrected for the finite pulse bandwidth
    (each outer energy only reaches the part of the two-photon line whose
    partner energy is non-negative), mapped onto [0, excess], symmetrized
    by adding the mirrored ordering, and normalized by the squared-flux
    integral. The two corrections are fully determined by the pulse, and
    the construction converges to the closed-form second-order result for
    long, weak pulses.

    Attaches a nonperturbative note (and warns) when the double-ionization
    probability is too large for a lowest-order reading.
    """
    if n_samples < 3:
        raise InvalidArgumentError("n_samples must be >= 3")
    omega = pulse.carrier
    lo, hi = nonseq_window(atom)
    if not (lo < omega < hi):
        raise WindowError(
            f"pulse carrier {omega:.6g} ha outside the open nonsequential window "
            f"({lo:.6g}, {hi:.6g}) ha"
        )
    excess = 2.0 * omega - atom.binding_outer - atom.binding_inner

    nodes = joint.grid_outer.nodes
    marginal = (joint.density * joint.grid_inner.weights[None, :]).sum(axis=1)

    inside = nodes <= excess
    if np.count_nonzero(inside) < 2:
        raise InvalidArgumentError("outer grid does not resolve [0, excess]")

    energies = np.linspace(0.0, excess, n_samples)
    flux_sq = flux_squared_integral(pulse)
    if flux_sq > 0.0:
        acceptance = _spectral_acceptance(pulse, nodes[inside] - excess)
        corrected = marginal[inside] / acceptance
        g = np.interp(energies, nodes[inside], corrected)
        g_mirror = np.interp(excess - energies, nodes[inside], corrected)
        values = (g + g_mirror) / flux_sq
    else:
        values = np.zeros_like(energies)

    notes: tuple = ()
    if joint.total_probability >= PERTURBATIVE_LIMIT:
        message = (
            f"double-ionization probability {joint.total_probability:.3e} exceeds "
            f"the perturbative limit {PERTURBATIVE_LIMIT:g}"
        )
        warnings.warn(message, NonperturbativeWarning, stacklevel=2)
        notes = (message,)

    return SdcsCurve(
        photon_energy=float(omega),
        excess_energy=float(excess),
        energies=energies,
        dsigma_de=values,
        total=float(np.trapezoid(values, energies)),
        notes=notes,
    )

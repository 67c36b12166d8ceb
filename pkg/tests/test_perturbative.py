import numpy as np
import pytest

from nsdi import (
    ConvergenceError,
    CrossSectionCurve,
    InvalidArgumentError,
    WindowError,
    au_to_ev,
    constant_curve,
    dsigma_de,
    ev_to_au,
    make_atom,
    nonseq_window,
    nonseq_window_bounds,
    scan,
    sdcs,
    sdcs_kernel,
    total_xsec,
)
from oracles import brute_force_total, random_polynomial_atom, random_window_omega

# hand arithmetic of the closed form at the toy spot values:
# (1.75^2/pi) / (1.25*2.25*0.25) and (1.75^2/pi) / (1.5*2.0*0.0625)
KERNEL_AT_QUARTER = 1.386416393156066
KERNEL_AT_EDGE = 5.199061474335248


def test_window_examples(toy):
    lo, hi = nonseq_window(toy)
    assert (lo, hi) == (1.5, 2.0)

    he_lo, he_hi = nonseq_window_bounds(float(ev_to_au(24.587)), float(ev_to_au(54.418)))
    assert round(float(au_to_ev(he_lo)), 2) == 39.50
    assert round(float(au_to_ev(he_hi)), 2) == 54.42

    ne_lo, ne_hi = nonseq_window_bounds(float(ev_to_au(21.6)), float(ev_to_au(40.9)))
    assert float(au_to_ev(ne_lo)) == pytest.approx(31.25, abs=1e-9)
    assert float(au_to_ev(ne_hi)) == pytest.approx(40.9, abs=1e-9)

    # degenerate binding energies close the window completely
    lo, hi = nonseq_window_bounds(1.0, 1.0)
    assert lo == hi


def test_kernel_spot_values(toy):
    value = sdcs_kernel(0.25, 1.75, toy)
    assert value == pytest.approx(KERNEL_AT_QUARTER, rel=1e-12)
    assert value == pytest.approx(1.38637, rel=1e-4)

    edge = sdcs_kernel(0.5, 1.75, toy)
    assert edge == pytest.approx(KERNEL_AT_EDGE, rel=1e-12)
    assert edge == pytest.approx(5.1988, rel=1e-3)


def test_kernel_zero_sigma():
    silent = make_atom(
        "silent",
        1.0,
        2.0,
        constant_curve("zero", 1.0, 0.0, 8.0),
        constant_curve("one", 2.0, 1.0, 8.0),
    )
    assert sdcs_kernel(0.25, 1.75, silent) == 0.0


def test_dsigma_symmetry_on_random_atoms():
    rng = np.random.default_rng(42)
    for _ in range(50):
        atom = random_polynomial_atom(rng)
        omega = random_window_omega(rng, atom)
        excess = 2.0 * omega - atom.binding_outer - atom.binding_inner
        e = rng.uniform(0.0, excess)
        a = dsigma_de(e, omega, atom)
        b = dsigma_de(excess - e, omega, atom)
        assert abs(a - b) <= 1e-12 * max(a, b, 1e-300)


def test_kernel_finite_inside_window():
    rng = np.random.default_rng(5)
    atom = random_polynomial_atom(rng)
    for _ in range(1000):
        omega = random_window_omega(rng, atom, low=0.01, high=0.99)
        excess = 2.0 * omega - atom.binding_outer - atom.binding_inner
        # the detuning zero sits strictly above the excess energy in-window
        assert omega - atom.binding_outer > excess
        value = sdcs_kernel(rng.uniform(0.0, excess), omega, atom)
        assert np.isfinite(value) and value >= 0.0


def test_unit_conversion_is_stateless(toy):
    from nsdi import CONST, gen_xsec_to_cm4s

    total = total_xsec(1.75, toy)
    assert gen_xsec_to_cm4s(total) / CONST.gen_xsec_au_in_cm4s == pytest.approx(
        total, rel=1e-15
    )


def test_window_errors(toy):
    with pytest.raises(WindowError):
        total_xsec(1.5, toy)  # lower edge: zero excess energy
    with pytest.raises(WindowError):
        total_xsec(1.2, toy)  # below: negative excess energy
    with pytest.raises(WindowError):
        total_xsec(2.0, toy)  # upper edge: detuning zero enters the domain
    with pytest.raises(WindowError):
        total_xsec(2.3, toy)
    with pytest.raises(InvalidArgumentError):
        sdcs_kernel(0.75, 1.75, toy)  # beyond the excess energy


def test_total_vs_brute_force(toy):
    total = total_xsec(1.75, toy)
    brute = brute_force_total(1.75, toy, n=200_000)
    assert total == pytest.approx(brute, rel=1e-5)
    assert total > 0.0

    rng = np.random.default_rng(17)
    for _ in range(5):
        atom = random_polynomial_atom(rng)
        omega = random_window_omega(rng, atom)
        assert total_xsec(omega, atom) == pytest.approx(
            brute_force_total(omega, atom, n=200_000), rel=1e-5
        )


def test_convergence_error(toy):
    with pytest.raises(ConvergenceError):
        total_xsec(1.75, toy, max_nodes=16)


def test_bilinear_scaling(toy):
    # doubling both curves multiplies every output by exactly 4 (powers of two
    # commute with the float arithmetic here)
    scaled = make_atom(
        "scaled",
        1.0,
        2.0,
        constant_curve("o2", 1.0, 2.0, 8.0),
        constant_curve("i2", 2.0, 2.0, 8.0),
    )
    e = np.linspace(0.0, 0.5, 21)
    assert np.all(sdcs_kernel(e, 1.75, scaled) == 4.0 * sdcs_kernel(e, 1.75, toy))
    assert np.all(dsigma_de(e, 1.75, scaled) == 4.0 * dsigma_de(e, 1.75, toy))
    assert total_xsec(1.75, scaled) == 4.0 * total_xsec(1.75, toy)

    rng = np.random.default_rng(23)
    atom = random_polynomial_atom(rng)
    c = 1.7
    boosted = make_atom(
        "boost",
        atom.binding_outer,
        atom.binding_inner,
        CrossSectionCurve(
            "bo", atom.sigma_outer.threshold, atom.sigma_outer.energies,
            c * atom.sigma_outer.sigmas,
        ),
        CrossSectionCurve(
            "bi", atom.sigma_inner.threshold, atom.sigma_inner.energies,
            c * atom.sigma_inner.sigmas,
        ),
    )
    omega = random_window_omega(rng, atom)
    assert total_xsec(omega, boosted) == pytest.approx(
        c * c * total_xsec(omega, atom), rel=1e-12
    )


def test_scan_semantics(toy):
    single = scan([1.75], toy)
    assert len(single) == 1
    assert bool(single.in_window[0])
    assert float(single.totals[0]) == pytest.approx(total_xsec(1.75, toy), rel=1e-12)

    below = scan([1.1, 1.2, 1.3], toy)
    assert not np.any(below.in_window)
    assert np.all(np.isnan(below.totals))

    mixed = scan([1.4, 1.75, 1.9, 2.1], toy)
    assert list(mixed.in_window) == [False, True, True, False]
    assert np.isfinite(mixed.totals[1]) and np.isfinite(mixed.totals[2])

    with pytest.raises(InvalidArgumentError):
        scan([], toy)
    with pytest.raises(InvalidArgumentError):
        scan([1.8, 1.7], toy)


def test_sdcs_curve(toy):
    curve = sdcs(1.75, toy, n_samples=41)
    assert curve.excess_energy == pytest.approx(0.5)
    assert curve.energies[0] == 0.0 and curve.energies[-1] == pytest.approx(0.5)
    # symmetric sample pairs agree to roundoff
    mirrored = curve.dsigma_de[::-1]
    assert np.allclose(curve.dsigma_de, mirrored, rtol=1e-12, atol=0.0)
    # midpoint equals the one-ordering kernel there (both orderings coincide)
    assert curve.dsigma_de[20] == pytest.approx(KERNEL_AT_QUARTER, rel=1e-12)
    assert curve.total == pytest.approx(total_xsec(1.75, toy), rel=1e-12)
    # toy curve is U-shaped: interior minimum at the midpoint
    assert np.argmin(curve.dsigma_de) == 20

    with pytest.raises(InvalidArgumentError):
        sdcs(1.75, toy, n_samples=2)

import numpy as np
import pytest

from nsdi import (
    CONST,
    EnergyGrid,
    InvalidArgumentError,
    NonperturbativeWarning,
    PulseSpec,
    StabilityError,
    StateVector,
    build_hamiltonian,
    constant_curve,
    default_grids,
    dipole_from_xsec,
    extract_joint,
    field_at,
    flux_squared_integral,
    make_atom,
    propagate,
    tdse_sdcs,
    total_xsec,
)
from oracles import two_state_model


def small_run(toy, n_outer=40, n_inner=40, cycles=8, e0=1e-3, omega=1.75):
    pulse = PulseSpec(peak_field=e0, carrier=omega, n_cycles=cycles)
    grids = default_grids(toy, omega, n_outer, n_inner)
    model = build_hamiltonian(toy, *grids)
    result = propagate(model, pulse)
    return pulse, grids, result


class TestEnergyGrid:
    def test_uniform_tiles_span(self):
        grid = EnergyGrid.uniform(0.0, 2.5, 120)
        assert len(grid) == 120
        assert grid.span == pytest.approx(2.5, rel=1e-15)
        assert np.all(np.diff(grid.nodes) > 0)

    def test_invalid_grids(self):
        with pytest.raises(InvalidArgumentError):
            EnergyGrid(nodes=[1.0, 0.5], weights=[0.1, 0.1])
        with pytest.raises(InvalidArgumentError):
            EnergyGrid(nodes=[0.5, 1.0], weights=[0.1, -0.1])
        with pytest.raises(InvalidArgumentError):
            EnergyGrid(nodes=[-0.5, 1.0], weights=[0.1, 0.1])
        with pytest.raises(InvalidArgumentError):
            EnergyGrid(nodes=[0.5, 1.0], weights=[0.3, 0.3])  # does not tile

    def test_empty_grid_allowed(self):
        grid = EnergyGrid(nodes=[], weights=[])
        assert len(grid) == 0 and grid.span == 0.0


class TestPulse:
    def test_invariants(self):
        with pytest.raises(InvalidArgumentError):
            PulseSpec(peak_field=1e-3, carrier=0.0, n_cycles=10)
        with pytest.raises(InvalidArgumentError):
            PulseSpec(peak_field=1e-3, carrier=1.0, n_cycles=3)
        with pytest.raises(InvalidArgumentError):
            PulseSpec(peak_field=1e-3, carrier=1.0, n_cycles=10, envelope="box")

    def test_field_values(self):
        pulse = PulseSpec(peak_field=0.5, carrier=2.0, n_cycles=6)
        big_t = pulse.duration
        assert big_t == pytest.approx(6 * np.pi)
        assert field_at(pulse, 0.0) == 0.0
        assert field_at(pulse, big_t / 2) == pytest.approx(
            0.5 * np.cos(2.0 * big_t / 2), rel=1e-12
        )
        assert field_at(pulse, -1.0) == 0.0
        assert field_at(pulse, big_t + 1.0) == 0.0

    def test_envelope_squared_integral(self):
        # integral of sin^4 over the pulse is 3T/8
        pulse = PulseSpec(peak_field=1.0, carrier=1.3, n_cycles=7)
        big_t = pulse.duration
        t = np.linspace(0.0, big_t, 200_001)
        env_sq = (np.sin(np.pi * t / big_t) ** 2) ** 2
        assert np.trapezoid(env_sq, t) == pytest.approx(3.0 * big_t / 8.0, rel=1e-9)

    def test_flux_squared_integral_closed_form(self):
        pulse = PulseSpec(peak_field=2e-3, carrier=1.75, n_cycles=9)
        big_t = pulse.duration
        t = np.linspace(0.0, big_t, 400_001)
        env4 = (2e-3 * np.sin(np.pi * t / big_t) ** 2) ** 4
        expected = np.trapezoid(env4, t) / (
            8.0 * np.pi * CONST.fine_structure_alpha * 1.75
        ) ** 2
        assert flux_squared_integral(pulse) == pytest.approx(expected, rel=1e-9)


class TestCouplings:
    def test_dipole_from_xsec_examples(self):
        curve = constant_curve("flat", 2.0, 0.2250, 8.0)
        zero_curve = constant_curve("none", 2.0, 0.0, 8.0)
        assert dipole_from_xsec(zero_curve, 3.0, 0.01) == 0.0

        # quadrupling the cell width doubles the coupling
        d1 = dipole_from_xsec(curve, 3.0, 0.01)
        d4 = dipole_from_xsec(curve, 3.0, 0.04)
        assert d4 == pytest.approx(2.0 * d1, rel=1e-14)

        # frozen arithmetic: sqrt(0.2250 * 0.01 / (4 pi^2 alpha * 0.5))
        low_curve = constant_curve("low", 0.3, 0.2250, 8.0)
        expected = np.sqrt(
            0.2250 * 0.01 / (4.0 * np.pi**2 * CONST.fine_structure_alpha * 0.5)
        )
        value = dipole_from_xsec(low_curve, 0.5, 0.01)
        assert value == pytest.approx(expected, rel=1e-12)
        assert value == pytest.approx(0.12499, rel=1e-3)

    def test_build_dimension_and_couplings(self, toy):
        outer = EnergyGrid.uniform(0.0, 1.5, 3)
        inner = EnergyGrid.uniform(0.0, 1.0, 2)
        model = build_hamiltonian(toy, outer, inner)
        assert model.dimension == 1 + 3 + 6
        assert model.n_single == 3 and model.n_inner == 2
        # constant unit curves: d1_i = sqrt(dE / (4 pi^2 alpha (E_a + I_A)))
        expected = np.sqrt(
            outer.weights
            / (4.0 * np.pi**2 * CONST.fine_structure_alpha * (outer.nodes + 1.0))
        )
        assert np.allclose(model.ground_couplings, expected, rtol=1e-13)
        assert model.ground_energy == -3.0
        assert np.allclose(model.single_energies, outer.nodes - 2.0, rtol=1e-15)

    def test_build_zero_sigma_gives_diagonal(self):
        silent = make_atom(
            "silent",
            1.0,
            2.0,
            constant_curve("z1", 1.0, 0.0, 8.0),
            constant_curve("z2", 2.0, 0.0, 8.0),
        )
        model = build_hamiltonian(silent, EnergyGrid.uniform(0, 1, 4), EnergyGrid.uniform(0, 1, 3))
        assert np.all(model.ground_couplings == 0.0)
        assert np.all(model.single_couplings == 0.0)
        dense = model.dense_matrix(0.3)
        assert np.all(dense == np.diag(np.diag(dense)))

    def test_build_rejects_empty_grids(self, toy):
        with pytest.raises(InvalidArgumentError):
            build_hamiltonian(toy, EnergyGrid(nodes=[], weights=[]), EnergyGrid.uniform(0, 1, 2))


class TestStructure:
    def test_hermitian_at_any_field(self, toy):
        model = build_hamiltonian(
            toy, EnergyGrid.uniform(0.0, 2.0, 5), EnergyGrid.uniform(0.0, 1.0, 4)
        )
        for field in (0.0, 0.02, -0.6):
            dense = model.dense_matrix(field)
            assert np.max(np.abs(dense - dense.T)) == 0.0

    def test_constraint_sparsity(self, toy):
        na, nb = 5, 4
        model = build_hamiltonian(
            toy, EnergyGrid.uniform(0.0, 2.0, na), EnergyGrid.uniform(0.0, 1.0, nb)
        )
        dense = model.dense_matrix(1.0)
        for i in range(na):
            for ip in range(na):
                block = dense[1 + i, 1 + na + ip * nb : 1 + na + (ip + 1) * nb]
                if ip == i:
                    assert np.all(block == model.single_couplings)
                else:
                    assert np.all(block == 0.0)
        # ground never couples directly to the double continuum
        assert np.all(dense[0, 1 + na :] == 0.0)
        # double continuum states couple to nothing further
        doubles = dense[1 + na :, 1 + na :]
        assert np.all(doubles == np.diag(np.diag(doubles)))


class TestPropagation:
    def test_zero_field_is_identity_up_to_phase(self, toy):
        pulse = PulseSpec(peak_field=0.0, carrier=1.75, n_cycles=6)
        grids = default_grids(toy, 1.75, 10, 10)
        model = build_hamiltonian(toy, *grids)
        result = propagate(model, pulse)
        assert abs(result.state.ground) == pytest.approx(1.0, abs=1e-12)
        assert np.all(result.state.single == 0.0)
        assert np.all(result.state.double == 0.0)

    def test_step_size_cap(self, toy):
        pulse = PulseSpec(peak_field=1e-3, carrier=1.75, n_cycles=6)
        grids = default_grids(toy, 1.75, 10, 10)
        model = build_hamiltonian(toy, *grids)
        with pytest.raises(StabilityError):
            propagate(model, pulse, dt=(2 * np.pi / 1.75) / 10)

    def test_norm_conservation(self, toy):
        _, _, result = small_run(toy)
        assert result.norm_drift <= 1e-8

    def test_rabi_two_state(self):
        # resonant flat drive against the rotating-wave solution, sampled
        # stroboscopically (once per carrier cycle) where the counter-
        # rotating ripple vanishes to first order
        omega = 1.0
        coupling, e0 = 2.0, 1e-3
        rabi = coupling * e0
        n_cycles = int(np.ceil((np.pi / rabi) / (2 * np.pi / omega)))
        pulse = PulseSpec(peak_field=e0, carrier=omega, n_cycles=n_cycles, envelope="flat")
        model = two_state_model(-0.5, 0.5, coupling)

        samples = []
        steps_per_cycle = 700
        propagate(
            model,
            pulse,
            dt=(2 * np.pi / omega) / steps_per_cycle,
            observer=lambda t, s: samples.append((t, abs(s.single[0]) ** 2)),
            observe_every=steps_per_cycle,
        )
        times = np.array([t for t, _ in samples])
        populations = np.array([p for _, p in samples])
        analytic = np.sin(rabi * times / 2.0) ** 2
        assert np.max(np.abs(populations - analytic)) < 1e-5

    def test_weak_field_quartic_scaling(self, toy):
        _, grids, res_full = small_run(toy, e0=1e-3)
        _, _, res_half = small_run(toy, e0=5e-4)
        p_full = extract_joint(res_full.state, *grids).total_probability
        p_half = extract_joint(res_half.state, *grids).total_probability
        assert p_full / p_half == pytest.approx(16.0, rel=0.02)


class TestExtraction:
    def test_zero_and_single_cell(self, toy):
        grids = default_grids(toy, 1.75, 4, 3)
        zero = StateVector(
            ground=1.0 + 0j, single=np.zeros(4, complex), double=np.zeros((4, 3), complex)
        )
        joint = extract_joint(zero, *grids)
        assert joint.total_probability == 0.0
        assert np.all(joint.density == 0.0)

        amp = np.zeros((4, 3), complex)
        amp[2, 1] = 0.1 + 0.2j
        one_cell = StateVector(ground=0.9 + 0j, single=np.zeros(4, complex), double=amp)
        joint = extract_joint(one_cell, *grids)
        assert joint.total_probability == pytest.approx(abs(amp[2, 1]) ** 2, rel=1e-15)

    def test_total_probability_grid_invariant(self, toy):
        _, grids_a, res_a = small_run(toy, n_outer=60, n_inner=60, cycles=8)
        _, grids_b, res_b = small_run(toy, n_outer=90, n_inner=90, cycles=8)
        p_a = extract_joint(res_a.state, *grids_a).total_probability
        p_b = extract_joint(res_b.state, *grids_b).total_probability
        assert p_a == pytest.approx(p_b, rel=0.02)

    def test_zero_joint_gives_zero_curve(self, toy):
        pulse = PulseSpec(peak_field=1e-3, carrier=1.75, n_cycles=8)
        grids = default_grids(toy, 1.75, 40, 40)
        zero = StateVector(
            ground=1.0 + 0j,
            single=np.zeros(40, complex),
            double=np.zeros((40, 40), complex),
        )
        curve = tdse_sdcs(extract_joint(zero, *grids), pulse, toy)
        assert curve.total == 0.0
        assert np.all(curve.dsigma_de == 0.0)

    def test_cross_path_total(self, toy):
        pulse, grids, result = small_run(toy, n_outer=60, n_inner=60, cycles=12)
        joint = extract_joint(result.state, *grids)
        curve = tdse_sdcs(joint, pulse, toy)
        reference = total_xsec(1.75, toy)
        assert curve.total == pytest.approx(reference, rel=0.05)
        assert curve.notes == ()

    def test_intensity_independence(self, toy):
        pulse_a, grids, res_a = small_run(toy, n_outer=60, n_inner=60, cycles=12, e0=1e-3)
        pulse_b, _, res_b = small_run(toy, n_outer=60, n_inner=60, cycles=12, e0=5e-4)
        total_a = tdse_sdcs(extract_joint(res_a.state, *grids), pulse_a, toy).total
        total_b = tdse_sdcs(extract_joint(res_b.state, *grids), pulse_b, toy).total
        assert abs(total_b - total_a) / total_a < 0.01

    def test_nonperturbative_warning(self, toy):
        pulse, grids, result = small_run(toy, cycles=8, e0=0.05)
        joint = extract_joint(result.state, *grids)
        assert joint.total_probability >= 1e-4
        with pytest.warns(NonperturbativeWarning):
            curve = tdse_sdcs(joint, pulse, toy)
        assert curve.notes

    def test_bandwidth_narrows_with_pulse_length(self, toy):
        spreads = []
        for cycles in (6, 12, 24):
            _, grids, result = small_run(toy, n_outer=60, n_inner=60, cycles=cycles)
            joint = extract_joint(result.state, *grids)
            total_e = grids[0].nodes[:, None] + grids[1].nodes[None, :]
            weight = joint.density * (
                grids[0].weights[:, None] * grids[1].weights[None, :]
            )
            weight /= weight.sum()
            mean = float((weight * total_e).sum())
            spreads.append(float(np.sqrt((weight * (total_e - mean) ** 2).sum())))
        assert spreads[0] > spreads[1] > spreads[2]

"""Drive-protocol tests: envelopes, calibration, phase schedule, BdG forms."""

import numpy as np
import pytest

from mzm_braiding.drive import (
    DriveCoefficients,
    DriveProtocol,
    PhaseSchedule,
    PulseEnvelope,
    Segment,
    TruncationSpec,
    build_drive_bdg,
    calibrate_pulse_area,
    drive_vector,
    envelope_naive_area,
    envelope_value,
    make_braid_protocol,
    make_composite_protocol,
    make_pi8_protocol,
    measured_pulse_area,
    reverse_protocol,
)
from mzm_braiding.drive import drive_amplitude, phase_value
from mzm_braiding.evolution import static_basis
from mzm_braiding.lattice import ChainParams, SystemSpec, phs_conjugate


def make_segment(theta=np.pi / 2, phi=np.pi / 2, duration=20.0, omega=3.0,
                 truncation=None, rwa=False, phase=None, mults=()):
    return Segment(
        coefficients=DriveCoefficients.from_angles(theta, phi),
        envelope=calibrate_pulse_area(
            PulseEnvelope("sin2", duration, np.pi), np.pi
        ),
        phase=phase or PhaseSchedule(base_phase=0.0),
        drive_frequency=omega,
        truncation=truncation,
        rwa=rwa,
        site_multipliers=mults,
    )


class TestEnvelope:
    def test_validation(self):
        with pytest.raises(ValueError):
            PulseEnvelope("sin2", 0.0, np.pi)
        with pytest.raises(ValueError):
            PulseEnvelope("square", 1.0, np.pi)

    def test_sin2_values(self):
        env = PulseEnvelope("sin2", 20.0, np.pi)
        assert envelope_value(env, 0.0) == pytest.approx(0.0, abs=1e-12)
        assert envelope_value(env, 5.0) == pytest.approx(np.pi / 20.0)
        assert envelope_value(env, 20.0) == pytest.approx(0.0, abs=1e-12)
        with pytest.raises(ValueError):
            envelope_value(env, 21.0)

    def test_naive_areas(self):
        assert envelope_naive_area(PulseEnvelope("sin2", 8.0, np.pi)) == pytest.approx(np.pi / 2)
        assert envelope_naive_area(PulseEnvelope("constant", 8.0, np.pi)) == pytest.approx(np.pi)

    def test_measured_matches_naive(self):
        for shape in ("sin2", "constant"):
            env = PulseEnvelope(shape, 12.0, np.pi, amplitude_scale=1.3)
            assert measured_pulse_area(env) == pytest.approx(
                envelope_naive_area(env), rel=1e-6
            )


class TestCalibration:
    def test_sin2_scale_is_two(self):
        env = calibrate_pulse_area(PulseEnvelope("sin2", 20.0, np.pi), np.pi)
        assert env.amplitude_scale == pytest.approx(2.0, abs=1e-9)

    def test_constant_scale_is_one(self):
        env = calibrate_pulse_area(PulseEnvelope("constant", 20.0, np.pi), np.pi)
        assert env.amplitude_scale == pytest.approx(1.0, abs=1e-9)

    def test_idempotent(self):
        env = calibrate_pulse_area(PulseEnvelope("sin2", 20.0, np.pi), np.pi)
        env2 = calibrate_pulse_area(env, np.pi)
        assert abs(env2.amplitude_scale - env.amplitude_scale) < 1e-10

    def test_zero_target(self):
        env = calibrate_pulse_area(PulseEnvelope("sin2", 20.0, np.pi), 0.0)
        assert env.amplitude_scale == 0.0


class TestPhaseSchedule:
    def test_step(self):
        sched = PhaseSchedule(base_phase=0.3, step_time=10.0,
                              step_amount=-np.pi / 2, enabled=True)
        assert phase_value(sched, 5.0) == pytest.approx(0.3)
        assert phase_value(sched, 15.0) == pytest.approx(0.3 - np.pi / 2)

    def test_disabled(self):
        sched = PhaseSchedule(base_phase=0.3, step_time=10.0, enabled=False)
        assert phase_value(sched, 15.0) == pytest.approx(0.3)

    def test_step_must_be_interior(self):
        with pytest.raises(ValueError):
            make_segment(phase=PhaseSchedule(0.0, step_time=25.0, enabled=True))


class TestDriveAmplitude:
    def test_carrier_uses_global_time(self):
        seg = make_segment()
        t = 3.0
        z_local = drive_amplitude(seg, t)
        z_global = drive_amplitude(seg, t, t_global=t + 20.0)
        omega_t = envelope_value(seg.envelope, t)
        assert z_local == pytest.approx(2 * omega_t * np.cos(seg.drive_frequency * t))
        assert z_global == pytest.approx(
            2 * omega_t * np.cos(seg.drive_frequency * (t + 20.0))
        )

    def test_rwa_amplitude(self):
        seg = make_segment(rwa=True, phase=PhaseSchedule(base_phase=0.7))
        z = drive_amplitude(seg, 4.0, t_global=9.0)
        omega_t = envelope_value(seg.envelope, 4.0)
        assert z == pytest.approx(omega_t * np.exp(1j * (0.7 - 3.0 * 9.0)))


@pytest.fixture(scope="module")
def small_modes():
    chain = ChainParams(30, 0.02, 0.1, 0.1)
    spec = SystemSpec(chain, chain, 3.0)
    return spec, static_basis(spec).modes


class TestDriveVector:
    def test_unit_norm_ideal(self, small_modes):
        spec, modes = small_modes
        b = drive_vector(make_segment(), modes, spec.defect_site)
        assert abs(np.linalg.norm(b) - 1.0) < 1e-12

    def test_truncation_zeroes_and_does_not_renormalise(self, small_modes):
        spec, modes = small_modes
        seg = make_segment(truncation=TruncationSpec(radius=1))
        b = drive_vector(seg, modes, spec.defect_site)
        m = spec.n_sites
        d = spec.defect_site
        kept = {d - 1, d + 1, m + d - 1, m + d + 1}
        for i in range(2 * m):
            if i not in kept:
                assert b[i] == 0.0
        assert np.linalg.norm(b) < 1.0  # lost weight stays lost

    def test_truncation_idempotent(self, small_modes):
        spec, modes = small_modes
        b1 = drive_vector(make_segment(truncation=TruncationSpec(1)), modes, spec.defect_site)
        # a radius-1 vector re-truncated at radius 1 or larger is unchanged
        class Holder:  # minimal mode-like wrapper around an already-truncated vector
            pass
        seg2 = make_segment(truncation=TruncationSpec(2))
        b2 = drive_vector(seg2, modes, spec.defect_site)
        mask2 = np.abs(b2) > 0
        assert np.all(np.abs(b1)[~mask2] == 0.0)

    def test_site_multipliers_hit_both_nambu_components(self, small_modes):
        spec, modes = small_modes
        d = spec.defect_site
        m = spec.n_sites
        seg = make_segment(mults=((d - 1, 1.25),))
        b0 = drive_vector(make_segment(), modes, d)
        b = drive_vector(seg, modes, d)
        assert b[d - 1] == pytest.approx(1.25 * b0[d - 1])
        assert b[m + d - 1] == pytest.approx(1.25 * b0[m + d - 1])
        others = np.ones(2 * m, dtype=bool)
        others[[d - 1, m + d - 1]] = False
        assert np.allclose(b[others], b0[others])


class TestBdGForms:
    def test_mode_coupling_structure(self, small_modes):
        spec, modes = small_modes
        seg = make_segment()
        t = 7.3
        h = build_drive_bdg(seg, t, modes, spec.defect_site)
        assert np.max(np.abs(h - h.conj().T)) < 1e-12
        assert np.linalg.matrix_rank(h, tol=1e-12) <= 2
        b = drive_vector(seg, modes, spec.defect_site)
        z = drive_amplitude(seg, t)
        d = spec.defect_site
        expected_row = z * b.conj()
        assert np.allclose(h[d, :], expected_row, atol=1e-14)

    def test_quadratic_hermitian_and_phs_odd(self, small_modes):
        spec, modes = small_modes
        seg = make_segment(theta=np.pi / 4, phi=0.9)
        for t in np.linspace(0.1, 19.9, 13):
            h = build_drive_bdg(seg, t, modes, spec.defect_site, form="quadratic")
            assert np.max(np.abs(h - h.conj().T)) < 1e-12
            assert np.max(np.abs(phs_conjugate(h) + h)) < 1e-12

    def test_quadratic_sweet_spot_entries(self):
        # at the sweet spot (mu = 0, t = Delta) with one-site truncation the
        # quadratic drive has exactly one hopping and one pairing entry per
        # chain, of magnitude 2 Omega(t) |cos(omega t - phi0)| |c_i|
        chain = ChainParams(12, 0.0, 0.1, 0.1)
        spec = SystemSpec(chain, chain, 3.0)
        modes = static_basis(spec).modes
        theta, phi = 0.8, 0.0
        seg = make_segment(theta=theta, phi=phi, truncation=TruncationSpec(1))
        t = 4.1
        h = build_drive_bdg(seg, t, modes, spec.defect_site, form="quadratic")
        m, d = spec.n_sites, spec.defect_site
        amp = 2.0 * envelope_value(seg.envelope, t) * abs(np.cos(3.0 * t))
        c1, c2 = np.cos(theta / 2), np.sin(theta / 2)
        a_block = h[:m, :m]
        delta_block = h[:m, m:]
        # chain 1 couples through site d-1, chain 2 through site d+1
        assert abs(abs(a_block[d, d - 1]) - amp * c1) < 1e-12
        assert abs(abs(a_block[d, d + 1]) - amp * c2) < 1e-12
        assert abs(abs(delta_block[d, d - 1]) - amp * c1) < 1e-12
        assert abs(abs(delta_block[d, d + 1]) - amp * c2) < 1e-12
        # no other entries anywhere
        a_block = a_block.copy(); delta_block = delta_block.copy()
        for blk in (a_block, delta_block):
            blk[d, d - 1] = blk[d, d + 1] = 0.0
            blk[d - 1, d] = blk[d + 1, d] = 0.0
        assert np.max(np.abs(a_block)) == 0.0
        assert np.max(np.abs(delta_block)) == 0.0

    def test_quadratic_rejects_rwa(self, small_modes):
        spec, modes = small_modes
        with pytest.raises(ValueError):
            build_drive_bdg(make_segment(rwa=True), 1.0, modes, spec.defect_site,
                            form="quadratic")

    def test_unknown_form(self, small_modes):
        spec, modes = small_modes
        with pytest.raises(ValueError):
            build_drive_bdg(make_segment(), 1.0, modes, spec.defect_site, form="x")

    def test_defect_weight_guard(self, small_modes):
        spec, modes = small_modes
        bad = dict(modes)
        v = modes["gamma1R"].vector.copy()
        v[spec.defect_site] = 0.5
        import dataclasses
        bad["gamma1R"] = dataclasses.replace(modes["gamma1R"], vector=v)
        with pytest.raises(ValueError):
            build_drive_bdg(make_segment(), 1.0, bad, spec.defect_site)


class TestProtocols:
    def test_braid_protocol(self):
        prot = make_braid_protocol(20.0, np.pi / 2, np.pi / 2, 3.0, phi0=0.4)
        assert len(prot.segments) == 1
        seg = prot.segments[0]
        assert prot.total_duration == pytest.approx(20.0)
        assert not seg.phase.enabled
        assert seg.phase.base_phase == pytest.approx(0.4)
        assert seg.envelope.amplitude_scale == pytest.approx(2.0, abs=1e-9)

    def test_composite_protocol_orders(self):
        theta = 0.6
        p3 = make_composite_protocol(20.0, 10.0, theta, 0.1, 3.0, order="fig3")
        p7 = make_composite_protocol(20.0, 10.0, theta, 0.1, 3.0, order="eq7")
        a3 = [s.coefficients.theta for s in p3.segments]
        a7 = [s.coefficients.theta for s in p7.segments]
        assert a3 == pytest.approx([theta, theta, np.pi - theta, np.pi - theta])
        assert a7 == pytest.approx(a3[::-1])
        for seg in p3.segments:
            assert seg.phase.enabled
            assert seg.phase.step_time == pytest.approx(10.0)
            assert seg.phase.step_amount == pytest.approx(-np.pi / 2)
            assert seg.phase.base_phase == pytest.approx(0.1)
        assert p3.total_duration == pytest.approx(80.0)

    def test_composite_validation(self):
        with pytest.raises(ValueError):
            make_composite_protocol(20.0, 25.0, 0.5, 0.0, 3.0)
        with pytest.raises(ValueError):
            make_composite_protocol(20.0, 10.0, 0.5, 0.0, 3.0, order="bogus")

    def test_pi8_protocol(self):
        prot = make_pi8_protocol(20.0, 10.0, 3.0)
        assert prot.segments[0].coefficients.theta == pytest.approx(3 * np.pi / 8)
        assert prot.segments[0].coefficients.phi == pytest.approx(0.0)

    def test_empty_protocol_rejected(self):
        with pytest.raises(ValueError):
            DriveProtocol(segments=())

    def test_reverse_protocol(self):
        prot = make_composite_protocol(20.0, 8.0, 0.6, 0.2, 3.0)
        rev = reverse_protocol(prot)
        assert len(rev.segments) == 4
        thetas = [s.coefficients.theta for s in rev.segments]
        assert thetas == pytest.approx(
            [s.coefficients.theta for s in prot.segments][::-1]
        )
        sched = rev.segments[0].phase
        assert sched.step_time == pytest.approx(12.0)  # mirrored
        assert sched.step_amount == pytest.approx(np.pi / 2)  # negated
        # double reversal restores the original schedule modulo 2 pi
        rr = reverse_protocol(rev).segments[0].phase
        orig = prot.segments[0].phase
        assert (rr.base_phase - orig.base_phase) % (2 * np.pi) == pytest.approx(
            0.0, abs=1e-12
        )
        assert rr.step_time == pytest.approx(orig.step_time)
        assert rr.step_amount == pytest.approx(orig.step_amount)


class TestCoefficients:
    def test_from_angles_normalised(self):
        c = DriveCoefficients.from_angles(0.7, 1.9)
        assert c.normalised
        assert c.c1 == pytest.approx(np.cos(0.35))
        assert c.c2 == pytest.approx(np.sin(0.35) * np.exp(1.9j))

    def test_truncation_spec_validation(self):
        with pytest.raises(ValueError):
            TruncationSpec(radius=-1)

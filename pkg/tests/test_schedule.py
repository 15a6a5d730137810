import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xeit.errors import ConfigError, ScheduleValidationError
from xeit.params import CavityParams
from xeit.pulses import Gaussian
from xeit.schedule import (
    AdiabaticityWarning,
    FieldSchedule,
    Segment,
    angle_at,
    angle_trace,
    expected_delay,
    integrated_velocity,
    phi_of_t,
    ramp_duration_tau0,
    step_displacements,
    switch_off_time,
    validate_schedule,
)

V_DESK = 108 / 308


def storage_schedule(ramp=0.0, release=1):
    return FieldSchedule.storage(6.4, -0.6, 5.0, 1.3, 2.2, ramp, release)


def test_segments_contiguous():
    with pytest.raises(ConfigError):
        FieldSchedule((Segment(0, 1, 1, 1), Segment(1.5, 2, 1, 1)))
    with pytest.raises(ConfigError):
        Segment(1, 1, 0, 0)
    with pytest.raises(ConfigError):
        Segment(0, 1, -1, 0)
    with pytest.raises(ConfigError):
        FieldSchedule(())


def test_b_of_t_and_window():
    s = storage_schedule()
    assert s.b_of_t(0.0) == (6.4, 1)
    assert s.b_of_t(1.3) == (0.0, 1)
    assert s.b_of_t(2.2) == (6.4, 1)
    with pytest.raises(ConfigError):
        s.b_of_t(5.1)
    phi, sign = phi_of_t(s, np.array([0.0, 2.0]))
    np.testing.assert_allclose(phi, [6.0, 0.0])


def test_ramp_linear_in_field():
    ramp = ramp_duration_tau0()
    assert ramp == pytest.approx(50 / 141)
    s = storage_schedule(ramp)
    assert s.b_of_t(1.3 + ramp / 2)[0] == pytest.approx(3.2)


def test_off_interval_has_zero_displacement(desk_params):
    assert integrated_velocity(storage_schedule(), desk_params, 1.3, 2.2) == 0.0


def test_displacement_bookkeeping(desk_params):
    s = storage_schedule()
    total = integrated_velocity(s, desk_params, -0.6, 5.0)
    assert total == pytest.approx(V_DESK * (5.6 - 0.9), rel=1e-14)
    assert expected_delay(s, desk_params) == pytest.approx(0.9, rel=1e-13)


def test_step_displacements_match_scalar(desk_params):
    s = storage_schedule(0.35)
    times = np.linspace(-0.6, 5.0, 301)
    vec = step_displacements(s, desk_params, times)
    ref = [integrated_velocity(s, desk_params, a, b) for a, b in zip(times[:-1], times[1:])]
    np.testing.assert_allclose(vec, ref, rtol=1e-13, atol=1e-15)
    assert vec.sum() == pytest.approx(integrated_velocity(s, desk_params, -0.6, 5.0), rel=1e-12)


def test_ramp_quadrature_against_fine_trapezoid(desk_params):
    s = storage_schedule(0.35)
    ts = np.linspace(1.3, 1.65, 200001)
    v = angle_at(s, desk_params, ts)[2]
    fine = float(np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(ts)))
    assert integrated_velocity(s, desk_params, 1.3, 1.65) == pytest.approx(fine, rel=1e-8)


def test_orientation_flip_only_changes_sign(desk_params):
    ts = np.linspace(-0.6, 5.0, 999)
    a = angle_trace(storage_schedule(0.3, 1), desk_params, ts)
    b = angle_trace(storage_schedule(0.3, -1), desk_params, ts)
    assert np.array_equal(a.velocity, b.velocity)
    assert np.array_equal(np.abs(a.cos_theta_signed), np.abs(b.cos_theta_signed))
    assert np.all(b.cos_theta_signed[ts > 2.2] <= 0)


def test_angle_trace_continuous_on_ramps(desk_params):
    ts = np.linspace(-0.6, 5.0, 20001)
    tr = angle_trace(storage_schedule(0.35), desk_params, ts)
    # cos(theta) = phi / sqrt(phi^2 + 200/3) is Lipschitz in phi with constant <= 1/sqrt(200/3)
    dphi_dt = 6.0 / 0.35
    bound = dphi_dt / np.sqrt(200 / 3) * (ts[1] - ts[0])
    assert np.max(np.abs(np.diff(tr.cos_theta_signed))) <= bound * (1 + 1e-9)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 12.8), st.floats(0.0, 12.8), st.floats(0.05, 3.0))
def test_ramp_displacement_bounds(b0, b1, dur):
    p = CavityParams(kappa=4.6e5, kappa_R=3.1e5, g=10.0)
    s = FieldSchedule((Segment(0.0, dur, b0, b1),))
    d = integrated_velocity(s, p, 0.0, dur)
    v = angle_at(s, p, np.array([0.0, dur]))[2]
    assert min(v) * dur - 1e-12 <= d <= max(v) * dur + 1e-12


@given(st.floats(-0.6, 5.0))
def test_pythagoras_along_schedule(t):
    p = CavityParams(kappa=4.6e5, kappa_R=3.1e5, g=10.0)
    c, s, v = angle_at(storage_schedule(0.35), p, t)
    assert abs(c * c + s * s - 1) <= 1e-14
    assert v == c * c


def test_switch_off_time():
    assert switch_off_time(storage_schedule()) == 1.3
    assert switch_off_time(FieldSchedule.constant(6.4, 0, 1)) is None


def test_validate_storage_accepts(desk_params, probe):
    with pytest.warns(AdiabaticityWarning, match="instantaneous"):
        notes = validate_schedule(storage_schedule(), desk_params, probe, 1.0)
    assert len(notes) == 2


def test_validate_switch_at_peak_rejected(desk_params, probe):
    s = FieldSchedule.storage(6.4, -0.6, 5.0, 0.0, 0.9)
    with pytest.raises(ScheduleValidationError, match="boundary compatibility"):
        validate_schedule(s, desk_params, probe, 1.0)


def test_validate_compression(desk_params, probe):
    lo, hi = probe.support()
    short = 0.9 * V_DESK * (hi - lo)
    with pytest.raises(ScheduleValidationError, match="compressed pulse length"):
        validate_schedule(FieldSchedule.constant(6.4, -0.6, 5.0), desk_params, probe, short)


def test_validate_window(desk_params):
    with pytest.raises(ScheduleValidationError, match="before the schedule window"):
        validate_schedule(storage_schedule(), desk_params, Gaussian(1.0, 0.2, -0.5), 1.0)


def test_slow_ramp_has_no_adiabaticity_note(desk_params, probe):
    s = FieldSchedule.storage(6.4, -0.6, 40.0, 1.3, 15.0, ramp=11.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("error", AdiabaticityWarning)
        assert validate_schedule(s, desk_params, probe, 1.0) == []


def test_baseline_schedule():
    b = storage_schedule().baseline()
    assert len(b.segments) == 1
    assert (b.t_start, b.t_end) == (-0.6, 5.0)
    assert b.segments[0].b_start == 6.4

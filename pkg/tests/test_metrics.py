import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xeit.errors import ConfigError, NumericalError, TruncatedRecordError
from xeit.propagation.metrics import fit_peak_velocity, normalized_l2, storage_metrics
from xeit.propagation.solver import FieldSnapshot

T = np.linspace(-2.0, 6.0, 8001)


def pulse(t, center=0.0, amp=1.0):
    return amp * np.exp(-((t - center) / 0.2) ** 2) + 0j


def test_identical_records():
    m = storage_metrics((T, pulse(T)), (T, pulse(T)))
    assert m.retrieval_efficiency == 1.0
    assert m.delay == 0.0 and m.phase_shift == 0.0 and m.l2_shape_error == 0.0


def test_shifted_copy():
    m = storage_metrics((T, pulse(T, 0.9)), (T, pulse(T)))
    assert m.delay == pytest.approx(0.9, abs=1e-12)
    assert m.l2_shape_error < 1e-6
    assert m.retrieval_efficiency == pytest.approx(1.0, abs=1e-9)


def test_sign_flip():
    m = storage_metrics((T, -pulse(T)), (T, pulse(T)))
    assert m.phase_shift == pytest.approx(math.pi, abs=1e-12)
    assert m.l2_shape_error == 0.0


@settings(max_examples=30, deadline=None)
@given(st.floats(-math.pi + 1e-6, math.pi), st.floats(0.0, 3.0), st.floats(0.1, 1.0))
def test_phase_delay_and_efficiency(phase, delay, amp):
    out = pulse(T, delay, amp) * np.exp(1j * phase)
    m = storage_metrics((T, out), (T, pulse(T)))
    assert m.phase_shift == pytest.approx(phase, abs=1e-9)
    assert m.delay == pytest.approx(delay, abs=2e-3 * 1e-3 + 1e-9) or abs(m.delay - delay) < 1e-6
    assert m.retrieval_efficiency == pytest.approx(amp * amp, rel=1e-9)


def test_efficiency_against_input():
    m = storage_metrics((T, 0.5 * pulse(T, 1.0)), (T, pulse(T, 0.5)), (T, pulse(T)))
    assert m.retrieval_efficiency == pytest.approx(0.25, rel=1e-9)


def test_truncated_record_rejected():
    with pytest.raises(TruncatedRecordError, match="extend t_end"):
        storage_metrics((T, pulse(T, 5.9)), (T, pulse(T)))
    with pytest.raises(NumericalError):
        storage_metrics((T, 0 * T + 0j), (T, pulse(T)))


def test_fit_peak_velocity():
    z = np.linspace(0, 1, 501)
    snaps = [FieldSnapshot(t, z, pulse(z, 0.3 * t + 0.1), 1.0, 0.0) for t in (0.0, 0.5, 1.0, 1.5)]
    assert fit_peak_velocity(snaps) == pytest.approx(0.3, rel=1e-6)
    with pytest.raises(ValueError):
        fit_peak_velocity(snaps[:1])
    edge = [FieldSnapshot(t, z, pulse(z, 2.0), 1.0, 0.0) for t in (0.0, 1.0)]
    with pytest.raises(ConfigError, match="grid edge"):
        fit_peak_velocity(edge)


def test_normalized_l2():
    assert normalized_l2([1.0, 1.0], [1.0, 1.0]) == 0.0
    assert normalized_l2([2.0, 0.0], [1.0, 0.0]) == 1.0

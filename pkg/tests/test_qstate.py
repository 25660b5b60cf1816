import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgamble.errors import DomainError
from qgamble.qstate import (
    BasisLabel,
    PureState,
    collapse_b,
    committed_state,
    measure_b,
    mismatch_probability,
    overlap,
    prepare_alice,
    prob_in_b,
    reduced_committed,
    split_b,
    verify_mismatch,
)
from qgamble.rng import RandomStream

unit = st.floats(0.0, 1.0)
open_unit = st.floats(0.01, 0.99)


class Fixed:
    """Stream stub returning a fixed uniform and counting draws."""

    def __init__(self, u):
        self.u = u
        self.draws = 0

    def random(self):
        self.draws += 1
        return self.u


def test_rejects_unnormalized():
    with pytest.raises(DomainError):
        PureState(1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        PureState(float("nan"), 0.0, 0.0)


def test_renormalizes_tiny_drift():
    s = PureState(1.0 + 1e-11, 0.0, 0.0)
    assert s.norm2() == pytest.approx(1.0, abs=1e-15)


def test_normalized_and_zero_vector():
    s = PureState.normalized(3.0, 4.0j, 0.0)
    assert s.amp_a == pytest.approx(0.6)
    assert s.amp_b == pytest.approx(0.8j)
    with pytest.raises(DomainError):
        PureState.normalized(0, 0, 0)


def test_amplitude_and_array():
    s = PureState.normalized(1, 2, 3)
    arr = s.as_array()
    for label in BasisLabel:
        assert s.amplitude(label) == arr[label.value]
    assert PureState.from_array(arr) == s


@given(st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_serialize_roundtrip_is_exact(a, b, c):
    if abs(a) + abs(b) + abs(c) < 1e-3:
        return
    s = PureState.normalized(a, b, c)
    assert PureState.deserialize(s.serialize()) == s


def test_deserialize_wrong_length():
    with pytest.raises(DomainError):
        PureState.deserialize("1,0,0")


def test_committed_state_domain():
    with pytest.raises(DomainError):
        committed_state(0.0)
    with pytest.raises(DomainError):
        prepare_alice(1.5)
    assert committed_state(1.0).amp_b == 1.0


@given(unit, unit)
def test_split_preserves_box_b_weight_split(alpha, beta):
    s = split_b(prepare_alice(alpha), beta)
    assert prob_in_b(s) == pytest.approx(alpha * (1 - beta), abs=1e-12)
    assert abs(s.amp_bprime) ** 2 == pytest.approx(alpha * beta, abs=1e-12)
    assert s.norm2() == pytest.approx(1.0, abs=1e-12)


def test_collapse_found_and_not_found():
    s = split_b(prepare_alice(0.5), 0.5)
    assert collapse_b(s, True) == PureState(0.0, 1.0, 0.0)
    post = collapse_b(s, False)
    assert post.amp_b == 0
    # |a|^2 : |b'|^2 = 0.5 : 0.25
    assert abs(post.amp_a) ** 2 == pytest.approx(2 / 3)
    with pytest.raises(DomainError):
        collapse_b(prepare_alice(0.0), True)


def test_measure_b_uses_one_draw_and_threshold():
    s = split_b(prepare_alice(0.5), 0.5)  # P(found) = 0.25
    lo, hi = Fixed(0.2499), Fixed(0.25)
    assert measure_b(s, lo).found and lo.draws == 1
    assert not measure_b(s, hi).found and hi.draws == 1


def test_certain_events_stay_certain():
    # alpha = 1, beta = 0: box B holds the particle, whatever the draw.
    s = split_b(prepare_alice(1.0), 0.0)
    assert measure_b(s, Fixed(0.9999999999999999)).found
    assert not measure_b(prepare_alice(0.0), Fixed(0.0)).found


def test_overlap_is_conjugate_linear_in_first_argument():
    s1 = PureState(1j, 0.0, 0.0)
    s2 = PureState(1.0, 0.0, 0.0)
    assert overlap(s1, s2) == -1j
    assert overlap(s2, s1) == 1j


def test_reduced_committed_closed_form():
    # gamma = 8/9, beta = 1/4: denom = 1/9 + 2/9 = 1/3, weights 1/3 and 2/3.
    s = reduced_committed(8 / 9, 0.25)
    assert abs(s.amp_a) ** 2 == pytest.approx(1 / 3, abs=1e-15)
    assert abs(s.amp_bprime) ** 2 == pytest.approx(2 / 3, abs=1e-15)
    with pytest.raises(DomainError):
        reduced_committed(1.0, 0.0)


@given(st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_honest_preparation_never_mismatches(gamma, beta):
    if 1 - gamma + beta * gamma == 0:
        return
    s = split_b(prepare_alice(gamma), beta)
    post = collapse_b(s, False) if prob_in_b(s) < 1 else None
    if post is None:
        return
    assert mismatch_probability(post, gamma, beta) == 0.0
    assert not verify_mismatch(post, gamma, beta, Fixed(0.0))


def test_mismatch_requires_empty_box_b():
    with pytest.raises(DomainError):
        mismatch_probability(prepare_alice(0.5), 0.5, 0.5)


@settings(max_examples=50)
@given(open_unit, open_unit, open_unit)
def test_pipeline_against_numpy_projector(alpha, beta, gamma):
    # Independent numpy linear algebra: projector onto |psi_c'> after the split.
    v = np.array([math.sqrt(1 - alpha), math.sqrt(alpha * (1 - beta)), math.sqrt(alpha * beta)])
    empty = np.array([v[0], 0.0, v[2]])
    d = 1 - gamma + beta * gamma
    c = np.array([math.sqrt((1 - gamma) / d), 0.0, math.sqrt(beta * gamma / d)])
    p3_ref = float(np.dot(c, empty)) ** 2

    s = split_b(prepare_alice(alpha), beta)
    post = collapse_b(s, False)
    p_empty = 1 - prob_in_b(s)
    p3 = p_empty * (1 - mismatch_probability(post, gamma, beta))
    assert p3 == pytest.approx(p3_ref, abs=1e-12)


def test_rng_stream_reproducible_and_counted():
    a, b = RandomStream(7), RandomStream(7)
    xs = [a.random() for _ in range(5)]
    assert list(b.random_array(5)) == xs
    assert a.draws == b.draws == 5
    assert a.derive(3).random() == RandomStream(7 ^ 3).random()
    with pytest.raises((DomainError, ValueError)):
        RandomStream(-1)


def test_split_algebra_on_grid():
    for alpha in np.linspace(0, 1, 50):
        for beta in np.linspace(0, 1, 50):
            s = split_b(prepare_alice(alpha), beta)
            assert abs(prob_in_b(s) - alpha * (1 - beta)) <= 1e-12

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rhcexcite.core import (
    ConfigError,
    Constraints,
    ExcitationSignal,
    RunConfig,
    denormalize_point,
    normalize_point,
    seeded_rng,
)


def test_box_corner_maps_to_origin(box2):
    np.testing.assert_array_equal(normalize_point([-1.0, -1.0], box2), [0.0, 0.0])


def test_midpoint_maps_to_half():
    c = Constraints((-2.0, 3.0), [[-2.0, 3.0], [10.0, 20.0]])
    np.testing.assert_allclose(normalize_point([0.5, 15.0], c), [0.5, 0.5])


def test_points_outside_box_are_not_rejected(box2):
    np.testing.assert_allclose(normalize_point([3.0, -3.0], box2), [2.0, -1.0])


def test_round_trip_100_random_points():
    rng = np.random.default_rng(3)
    c = Constraints((-5.0, 2.0), [[-5.0, 2.0], [0.1, 0.7]])
    X = rng.uniform(-10, 10, size=(100, 2))
    np.testing.assert_allclose(denormalize_point(normalize_point(X, c), c), X, rtol=0, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    lo=st.floats(-100, 100),
    width=st.floats(1e-3, 100),
    X=arrays(float, (7, 2), elements=st.floats(-1e3, 1e3)),
)
def test_round_trip_property(lo, width, X):
    box = np.array([[lo, lo + width], [lo, lo + width]])
    back = denormalize_point(normalize_point(X, box), box)
    np.testing.assert_allclose(back, X, rtol=1e-12, atol=1e-9)


def test_degenerate_box_is_a_config_error():
    with pytest.raises(ConfigError):
        normalize_point([0.0, 0.0], np.array([[0.0, 0.0], [0.0, 1.0]]))


def test_normalization_preserves_nn_argmin_for_shared_box():
    rng = np.random.default_rng(11)
    for _ in range(50):
        lo = rng.uniform(-5, 5)
        w = rng.uniform(0.1, 10)
        box = np.array([[lo, lo + w], [lo, lo + w]])
        X = rng.uniform(lo, lo + w, size=(30, 2))
        q = rng.uniform(lo, lo + w, size=2)
        raw = np.argmin(np.linalg.norm(X - q, axis=1))
        nrm = np.argmin(np.linalg.norm(normalize_point(X, box) - normalize_point(q, box), axis=1))
        assert raw == nrm


@pytest.mark.parametrize(
    "input_box, state_box",
    [
        ((1.0, 1.0), [[-1, 1], [-1, 1]]),
        ((-1.0, 1.0), [[-1, 1], [1, 1]]),
        ((-2.0, 1.0), [[-1, 1], [-1, 1]]),  # input box leaks out of state box
        ((-1.0, 1.0), [-1, 1]),
    ],
)
def test_invalid_constraints(input_box, state_box):
    with pytest.raises(ConfigError):
        Constraints(input_box, state_box)


def test_constraints_are_immutable(box2):
    with pytest.raises(ValueError):
        box2.state_box[0, 0] = 5.0


@pytest.mark.parametrize("N, L", [(5, 0), (5, 6), (0, 1)])
def test_run_config_rejects_bad_horizon(N, L):
    with pytest.raises(ConfigError):
        RunConfig(N, L)


def test_seeded_rng_repeats():
    a = seeded_rng(42).random(1000)
    b = seeded_rng(42).random(1000)
    np.testing.assert_array_equal(a, b)


def test_seeded_rng_distinct_seeds_and_streams():
    assert not np.array_equal(seeded_rng(1).random(10), seeded_rng(2).random(10))
    assert not np.array_equal(seeded_rng(1, 5).random(10), seeded_rng(1, 6).random(10))


def test_seeded_rng_golden_values():
    # recorded once; PCG64 + SeedSequence are platform independent
    got = seeded_rng(42).random(4)
    np.testing.assert_array_equal(got, GOLDEN_42)
    got = seeded_rng(42, 1, 7).integers(0, 1_000_000, 4)
    np.testing.assert_array_equal(got, GOLDEN_42_1_7)


GOLDEN_42 = [0.7739560485559633, 0.4388784397520523, 0.8585979199113825, 0.6973680290593639]
GOLDEN_42_1_7 = [194302, 888110, 933900, 465296]


def test_signal_is_append_only_and_bounded(box2):
    s = ExcitationSignal(box2)
    s.append(0.5)
    prefix = s.samples.copy()
    s.append(-1.0)
    np.testing.assert_array_equal(s.samples[:1], prefix)
    assert len(s) == 2
    with pytest.raises(ValueError):
        s.append(1.5)
    assert len(s) == 2
    with pytest.raises(ValueError):
        s.samples[0] = 0.0

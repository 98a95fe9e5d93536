import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teamlab.prob_core import (
    FiniteSpace,
    JointDistribution,
    Kernel,
    NormalizationError,
    ShapeError,
    compose_prior_channel,
    marginalize,
    product,
    push_through_kernel,
    tv_distance,
    uniform,
    validate,
)

from conftest import X, Y, flip

A = FiniteSpace("a", 2)
B = FiniteSpace("b", 3)


def test_validate_uniform():
    assert validate(uniform([A, FiniteSpace("c", 2)])) == []


def test_validate_mass_error():
    d = JointDistribution([A], [0.6, 0.6], check=False)
    problems = validate(d)
    assert len(problems) == 1
    assert "mass error" in problems[0]
    assert float(problems[0].split()[-1]) == pytest.approx(0.2, abs=1e-15)


def test_validate_negativity():
    d = JointDistribution([B], [1.0, -1e-6, 1e-6], check=False)
    assert any("negative" in p for p in validate(d))


def test_constructor_rejects_drift():
    with pytest.raises(NormalizationError):
        JointDistribution([A], [0.5, 0.5 + 1e-10])


def test_tv_examples():
    p = JointDistribution([A], [0.5, 0.5])
    assert tv_distance(p, p) == 0.0
    assert tv_distance(JointDistribution([A], [1, 0]), JointDistribution([A], [0, 1])) == 2.0
    assert tv_distance(p, JointDistribution([A], [1, 0])) == 1.0


def test_tv_axis_mismatch():
    with pytest.raises(ShapeError):
        tv_distance(JointDistribution([A], [1, 0]), JointDistribution([FiniteSpace("z", 2)], [1, 0]))


def test_marginalize_examples(diagonal):
    u = uniform([A, FiniteSpace("c", 2)])
    np.testing.assert_array_equal(marginalize(u, ["a"]).weights, [0.5, 0.5])
    p = JointDistribution([A], [0.3, 0.7])
    q = JointDistribution([B], [0.2, 0.5, 0.3])
    np.testing.assert_allclose(marginalize(product(p, q), ["b"]).weights, q.weights, atol=1e-15)
    for axis in ("x", "y"):
        np.testing.assert_array_equal(marginalize(diagonal, [axis]).weights, [0.5, 0.5])


def test_marginalize_errors(diagonal):
    with pytest.raises(ShapeError):
        marginalize(diagonal, [])
    with pytest.raises(ShapeError):
        marginalize(diagonal, ["nope"])


def test_compose_prior_channel():
    prior = JointDistribution([X], [0.5, 0.5])
    np.testing.assert_array_equal(compose_prior_channel(prior, Kernel.identity(Y)).weights, [0.5, 0, 0, 0.5])
    const = Kernel(X, Y, [[1, 0], [1, 0]])
    skewed = JointDistribution([X], [0.3, 0.7])
    np.testing.assert_array_equal(compose_prior_channel(skewed, const).weights, [0.3, 0, 0.7, 0])
    # hand multiplication table: 0.5 * [[0.75, 0.25], [0.25, 0.75]]
    out = compose_prior_channel(prior, Kernel(X, Y, flip(0.25)))
    np.testing.assert_allclose(out.weights, [0.375, 0.125, 0.125, 0.375], atol=1e-15)


def test_compose_mismatch():
    with pytest.raises(ShapeError):
        compose_prior_channel(JointDistribution([B], [0.2, 0.3, 0.5]), Kernel.identity(Y))


def test_push_examples(diagonal):
    assert push_through_kernel(diagonal, "y", Kernel.identity(Y)) == diagonal
    const = Kernel(Y, Y, [[1, 0], [1, 0]])
    np.testing.assert_array_equal(push_through_kernel(diagonal, "y", const).weights, [0.5, 0, 0.5, 0])
    out = push_through_kernel(diagonal, "y", Kernel(Y, Y, flip(0.25)))
    np.testing.assert_allclose(out.weights, [0.375, 0.125, 0.125, 0.375], atol=1e-15)


def test_push_errors(diagonal):
    with pytest.raises(ShapeError):
        push_through_kernel(diagonal, "z", Kernel.identity(Y))
    with pytest.raises(ShapeError):
        push_through_kernel(diagonal, "y", Kernel.identity(B))


def test_immutable(diagonal):
    with pytest.raises(AttributeError):
        diagonal.axes = ()
    with pytest.raises(ValueError):
        diagonal.tensor[0, 0] = 1.0


# ---------------------------------------------------------------------------
# properties

shapes = st.lists(st.integers(1, 3), min_size=1, max_size=3)


def _dist(seed, shape):
    rng = np.random.default_rng(seed)
    w = rng.exponential(size=shape)
    axes = [FiniteSpace(f"a{i}", s) for i, s in enumerate(shape)]
    return JointDistribution(axes, w / w.sum())


def _kernel(seed, n, m, name="a0"):
    rng = np.random.default_rng(seed)
    r = rng.exponential(size=(n, m))
    return Kernel(FiniteSpace(name, n), FiniteSpace(name, m), r / r.sum(axis=1, keepdims=True))


@settings(max_examples=60, deadline=None)
@given(shapes, st.integers(0, 2**32 - 1))
def test_tv_metric(shape, seed):
    p, q, r = (_dist(seed + k, shape) for k in range(3))
    assert tv_distance(p, q) == pytest.approx(tv_distance(q, p), abs=1e-12)
    assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12
    assert tv_distance(p, p) == 0.0
    if tv_distance(p, q) == 0.0:
        assert np.array_equal(p.tensor, q.tensor)


@settings(max_examples=60, deadline=None)
@given(shapes, st.integers(0, 2**32 - 1))
def test_cost_bound(shape, seed):
    p, q = _dist(seed, shape), _dist(seed + 1, shape)
    c = np.random.default_rng(seed).uniform(-1, 1, size=tuple(shape))
    diff = abs((c * p.tensor).sum() - (c * q.tensor).sum())
    assert diff <= tv_distance(p, q) + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(1, 3), min_size=2, max_size=3), st.integers(1, 4), st.integers(1, 4),
       st.integers(0, 2**32 - 1))
def test_push_properties(shape, m1, m2, seed):
    d = _dist(seed, shape)
    k1 = _kernel(seed + 1, shape[0], m1)
    k2 = _kernel(seed + 2, m1, m2)
    once = push_through_kernel(d, "a0", k1)
    # untouched marginals are preserved exactly
    rest = [n for n in d.names if n != "a0"]
    np.testing.assert_allclose(marginalize(once, rest).tensor, marginalize(d, rest).tensor, atol=1e-14)
    assert abs(once.tensor.sum() - 1) <= 1e-12
    seq = push_through_kernel(once, "a0", k2)
    comp = push_through_kernel(d, "a0", k1.then(k2))
    assert tv_distance(seq, comp) <= 1e-12

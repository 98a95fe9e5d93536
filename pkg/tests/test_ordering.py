import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teamlab.games import CostTensor, TeamGame, equilibrium_value, team_optimal_value
from teamlab.info_struct import (
    CorrelatedGarbling,
    TeamSplit,
    apply_correlated_garbling,
    from_channels,
    no_information,
    perfect_information,
    random_garbling,
    sample_info_structure,
    team_marginal,
)
from teamlab.ordering import (
    IncomparableInputs,
    apply_witness,
    enumerate_pure_garblings,
    hull_vertices,
    is_correlated_garbling,
    lecam_deficiency,
    lecam_distance,
    separating_cost,
    tat_compare,
)
from teamlab.prob_core import tv_distance
from teamlab.strategy import CapExceededError, PureTeamPolicy, strategic_measure

ONE = TeamSplit((2,), (2,))
TWO = TeamSplit((2,), (2,), (2,), (2,))
HALF = [0.5, 0.5]


def test_vertex_counts():
    assert len(enumerate_pure_garblings((2,)).maps) == 4
    assert len(enumerate_pure_garblings((2, 2)).maps) == 16
    assert len(enumerate_pure_garblings((3,), (1,)).maps) == 1
    with pytest.raises(CapExceededError):
        enumerate_pure_garblings((3, 3), cap=100)


def test_garbling_of_itself(noisy):
    res = is_correlated_garbling(noisy, noisy)
    assert res.comparable
    identity = res.vertices.tables(max(res.witness, key=res.witness.get))
    assert [t.tolist() for t in identity] == [[0, 1]]
    assert tv_distance(apply_witness(noisy, res).joint, noisy.joint) <= 1e-9


def test_garbling_to_uninformative(noisy):
    assert is_correlated_garbling(noisy, no_information(HALF, ONE)).comparable


def _product_distance_to_diagonal():
    """Brute force: every garbling of an uninformative structure is a product 0.5 x q."""
    diag = np.array([[0.5, 0], [0, 0.5]])
    return min(np.abs(np.outer(HALF, [q, 1 - q]) - diag).sum() for q in np.linspace(0, 1, 10001))


def test_uninformative_vs_perfect():
    mu, nu = no_information(HALF, ONE), perfect_information(HALF, ONE)
    res = is_correlated_garbling(mu, nu)
    assert not res.comparable and res.status == "separated"
    assert res.distance == pytest.approx(_product_distance_to_diagonal(), abs=1e-8)
    c = res.certificate
    assert c.gap == pytest.approx(1.0, abs=1e-8)
    V = hull_vertices(mu, "both")[1]
    assert c.verify(nu.joint.weights, V)
    # the stated functional is also optimal: -1 on the diagonal, +1 off it
    f = np.array([-1.0, 1.0, 1.0, -1.0])
    assert f @ nu.joint.weights == -1.0
    assert min(f @ v for v in V) == 0.0


def test_separating_cost_game():
    mu, nu = no_information(HALF, ONE), perfect_information(HALF, ONE)
    sep = separating_cost(mu, nu)
    ident = PureTeamPolicy(((0, 1),), (2,))
    j_nu = float((strategic_measure(team_marginal(nu, 1), ident).tensor.sum(axis=1) * sep.cost).sum())
    jstar, _ = team_optimal_value(team_marginal(sep.info, 1), sep.cost)
    assert j_nu == pytest.approx(-1.0, abs=1e-8)
    assert jstar >= -1e-12
    assert j_nu <= jstar - sep.gap + 1e-8
    # flipping the sign reverses the comparison
    jstar_neg, _ = team_optimal_value(team_marginal(sep.info, 1), -sep.cost)
    assert -j_nu > jstar_neg
    # positive scaling keeps the order
    j2, _ = team_optimal_value(team_marginal(sep.info, 1), 0.5 * sep.cost)
    assert 0.5 * j_nu < j2
    with pytest.raises(ValueError):
        separating_cost(nu, mu)


def test_lecam_examples(noisy):
    mu, nu = no_information(HALF, ONE), perfect_information(HALF, ONE)
    assert lecam_deficiency(noisy, noisy).delta <= 1e-9
    g = CorrelatedGarbling((((0, 1),), ((1, 1),)), [0.4, 0.6], (2,))
    assert lecam_deficiency(noisy, apply_correlated_garbling(noisy, g)).delta <= 1e-8
    d = lecam_deficiency(mu, nu)
    assert d.delta == pytest.approx(1.0, abs=1e-8)
    assert d.residual == pytest.approx(d.delta, abs=1e-8)
    assert lecam_deficiency(nu, mu).delta <= 1e-9
    assert lecam_distance(mu, nu) == pytest.approx(1.0, abs=1e-8)
    assert lecam_distance(nu, mu) == lecam_distance(mu, nu)
    assert lecam_distance(noisy, noisy) <= 1e-9


def test_frame_mismatch():
    with pytest.raises(IncomparableInputs):
        is_correlated_garbling(no_information(HALF, ONE), no_information([0.3, 0.7], ONE))


def test_tat_identity_and_garbled():
    mu = sample_info_structure(21, TWO, 2)
    res = tat_compare(mu, mu)
    assert res.comparable
    g = CorrelatedGarbling((((0, 0),), ((1, 0),)), [0.3, 0.7], (2,))
    nu = apply_correlated_garbling(mu, g, 1)
    res = tat_compare(mu, nu)
    assert res.comparable and res.distance <= 1e-9
    k1 = apply_correlated_garbling(mu, res.witness_garbling(), 1)
    k2 = apply_correlated_garbling(nu, res.witness_garbling2(), 2)
    assert tv_distance(k1.joint, k2.joint) <= 1e-9


def test_tat_infeasible():
    # Team 1 learns nothing under mu but everything under nu; Team 2 is perfect in both
    mu = from_channels(HALF, TWO, [np.ones((2, 1)) @ [[1.0, 0.0]], np.eye(2)])
    nu = perfect_information(HALF, TWO)
    res = tat_compare(mu, nu)
    assert not res.comparable and res.status == "separated"
    # Team 1's (state, measurement) marginal is a product under every kappa1 mu and
    # diagonal under every kappa2 nu; marginalizing does not increase L1
    assert res.distance >= _product_distance_to_diagonal() - 1e-8
    _, V1 = hull_vertices(mu, 1)
    _, V2 = hull_vertices(nu, 2)
    f = res.certificate.f
    assert np.abs(f).max() <= 1 + 1e-12
    assert (V1 @ f).min() - (V2 @ f).max() >= res.certificate.gap - 1e-8
    assert res.certificate.gap == pytest.approx(res.distance, abs=1e-8)


def test_tat_split_mismatch():
    with pytest.raises(IncomparableInputs):
        tat_compare(perfect_information(HALF, TWO), perfect_information(HALF, TeamSplit((2,), (2,), (2,), (3,))))


# ---------------------------------------------------------------------------
# properties

seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 3))
def test_forward_blackwell(seed, n):
    split = TeamSplit((2, 2), (2, 2))
    rng = np.random.default_rng(seed)
    mu = sample_info_structure(seed, split, n)
    nu = apply_correlated_garbling(mu, random_garbling(rng, (2, 2)), 1)
    assert is_correlated_garbling(mu, nu).comparable
    for _ in range(5):
        c = rng.uniform(-1, 1, size=(n, 2, 2))
        a, _ = team_optimal_value(team_marginal(mu, 1), c)
        b, _ = team_optimal_value(team_marginal(nu, 1), c)
        assert a <= b + 1e-8


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_transitivity(seed):
    rng = np.random.default_rng(seed)
    mu = sample_info_structure(seed, TWO, 2)
    g1, g2 = random_garbling(rng, (2, 2)), random_garbling(rng, (2, 2))
    nu = apply_correlated_garbling(mu, g1, "both")
    rho = apply_correlated_garbling(nu, g2, "both")
    assert is_correlated_garbling(mu, nu).comparable
    assert is_correlated_garbling(nu, rho).comparable
    res = is_correlated_garbling(mu, rho)
    assert res.comparable
    assert tv_distance(apply_correlated_garbling(mu, g1.then(g2), "both").joint, rho.joint) <= 1e-9
    assert tv_distance(apply_witness(mu, res, "both").joint, rho.joint) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(2, 3))
def test_lecam_forward_and_tight(seed, n):
    rng = np.random.default_rng(seed)
    mu = sample_info_structure(seed, ONE, n)
    nu = sample_info_structure(seed + 1, ONE, n)
    nu = from_channels(mu.prior, ONE, [nu.joint.tensor / nu.joint.tensor.sum(axis=1, keepdims=True)])
    d = lecam_deficiency(mu, nu)
    for _ in range(5):
        c = rng.uniform(-1, 1, size=(n, 2))
        jstar, _ = team_optimal_value(team_marginal(mu, 1), c)
        pol = PureTeamPolicy((tuple(rng.integers(0, 2, size=2).tolist()),), (2,))
        j_nu = float((strategic_measure(team_marginal(nu, 1), pol).tensor.sum(axis=1) * c).sum())
        assert jstar <= j_nu + d.delta + 1e-8
    if d.certificate is not None:
        f = d.certificate.f.reshape(n, 2)
        jstar, _ = team_optimal_value(team_marginal(mu, 1), f)
        j_id = float((nu.joint.tensor * f).sum())
        assert jstar - j_id == pytest.approx(d.delta, abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_tat_chain(seed):
    rng = np.random.default_rng(seed)
    mu = sample_info_structure(seed, TWO, 2)
    nu = apply_correlated_garbling(mu, random_garbling(rng, (2,)), 1)
    res = tat_compare(mu, nu)
    assert res.comparable
    k1 = apply_correlated_garbling(mu, res.witness_garbling(), 1)
    k2 = apply_correlated_garbling(nu, res.witness_garbling2(), 2)
    for _ in range(5):
        c = CostTensor(rng.uniform(-1, 1, size=(2, 2, 2)))
        v = [equilibrium_value(TeamGame(x, c)).value for x in (mu, k1, k2, nu)]
        assert v[0] <= v[1] + 1e-8
        assert v[1] == pytest.approx(v[2], abs=1e-8)
        assert v[2] <= v[3] + 1e-8

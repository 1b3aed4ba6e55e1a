import numpy as np
import pytest

from ncriesz.cocycles import PartialActionError, cyclic_word_cocycle, free_word_cocycle
from ncriesz.gaussian import (
    GaussianSample,
    gp_norm_mc,
    khintchine_report,
    pisier_scalar_check,
    rcp_norm,
    realize_crossed,
)
from ncriesz.groups import build_free_ball
from ncriesz.riesz import CrossedElement, single_term

C4 = cyclic_word_cocycle(2)
C8 = cyclic_word_cocycle(4)


def unit_first_coordinate(c):
    v = np.zeros(c.dim)
    v[0] = 1.0
    return single_term(c, v)


def random_crossed(c, rng):
    return CrossedElement(c, {g: rng.standard_normal(c.dim)
                              + 1j * rng.standard_normal(c.dim)
                              for g in c.elements()})


def test_sample_reproducible():
    a = GaussianSample.draw(11, 3, 6)
    b = GaussianSample.draw(11, 3, 6)
    assert np.array_equal(a.values, b.values)
    c = GaussianSample.draw(11, 4, 6)
    assert not np.array_equal(a.values, c.values)


def test_realize_single_term_diagonal():
    x = unit_first_coordinate(C4)
    gamma = GaussianSample.draw(0, 0, C4.dim)
    mat = realize_crossed(x, gamma)
    assert np.abs(mat - np.diag(np.diag(mat))).max() == 0
    for i, g in enumerate(C4.elements()):
        expected = (C4.alpha(g) @ gamma.values) @ x.coeff(C4.identity())
        assert abs(mat[i, i] - expected) < 1e-12


def test_realize_zero():
    gamma = GaussianSample.draw(0, 0, C4.dim)
    assert np.abs(realize_crossed(CrossedElement(C4, {}), gamma)).max() == 0


def test_realize_rejects_partial_action():
    ball = build_free_ball(2, 1)
    c = free_word_cocycle(ball)
    x = single_term(c, np.ones(c.dim), g=(1,))
    with pytest.raises(PartialActionError):
        realize_crossed(x, GaussianSample.draw(0, 0, c.dim))


def test_mean_hs_matches_coefficient_mass():
    rng = np.random.default_rng(1)
    x = random_crossed(C4, rng)
    trials = 10_000
    acc = 0.0
    vals = np.empty(trials)
    for t in range(trials):
        m = realize_crossed(x, GaussianSample.draw(5, t, C4.dim))
        vals[t] = np.mean(np.abs(m) ** 2) * m.shape[0]  # (1/N) Tr M* M
    target = sum(np.sum(np.abs(v) ** 2) for v in x.coeffs.values())
    stderr = vals.std(ddof=1) / np.sqrt(trials)
    assert abs(vals.mean() - target) <= 3 * stderr


def test_gp_norm_p2_single_gaussian():
    x = unit_first_coordinate(C4)
    res = gp_norm_mc(x, 2, 20_000, seed=2)
    assert abs(res["estimate"] - 1.0) <= 3 * res["stderr"]


def test_gp_norm_p4_single_gaussian():
    x = unit_first_coordinate(C4)
    res = gp_norm_mc(x, 4, 20_000, seed=3)
    assert abs(res["estimate"] - 3 ** 0.25) <= 3 * res["stderr"]


def test_gp_norm_p2_general_element():
    rng = np.random.default_rng(4)
    x = random_crossed(C8, rng)
    res = gp_norm_mc(x, 2, 20_000, seed=5)
    target = np.sqrt(sum(np.sum(np.abs(v) ** 2) for v in x.coeffs.values()))
    assert abs(res["estimate"] - target) <= 3 * res["stderr"]


def test_gp_norm_deterministic():
    x = unit_first_coordinate(C4)
    a = gp_norm_mc(x, 4, 500, seed=6)
    b = gp_norm_mc(x, 4, 500, seed=6)
    assert a == b


def test_gp_norm_monotone_in_p_shared_samples():
    rng = np.random.default_rng(7)
    x = random_crossed(C4, rng)
    estimates = [gp_norm_mc(x, p, 2_000, seed=8)["estimate"] for p in (1, 2, 3, 4)]
    assert all(a <= b + 1e-12 for a, b in zip(estimates, estimates[1:]))


def test_gp_norm_rejects_tiny_trials():
    with pytest.raises(ValueError):
        gp_norm_mc(unit_first_coordinate(C4), 2, 1, seed=0)


def test_rcp_single_term_is_vector_norm():
    v = np.zeros(C4.dim)
    v[0], v[1] = 3.0, 4.0
    x = single_term(C4, v, g=1)
    for p in (1.5, 2, 4, 7):
        assert abs(rcp_norm(x, p) - 5.0) < 1e-9


def test_rcp_p2_is_hs_norm():
    rng = np.random.default_rng(9)
    x = random_crossed(C8, rng)
    assert abs(rcp_norm(x, 2) - x.hs_norm()) < 1e-9


def test_rcp_p4_matches_bruteforce():
    from ncriesz.group_algebra import regular_rep_matrix, schatten_norm_from_psd
    from ncriesz.riesz import expectation_col, expectation_row
    rng = np.random.default_rng(10)
    x = random_crossed(C4, rng)
    col = schatten_norm_from_psd(regular_rep_matrix(expectation_col(x, x)), 4)
    row = schatten_norm_from_psd(regular_rep_matrix(expectation_row(x, x)), 4)
    assert abs(rcp_norm(x, 4) - max(col, row)) < 1e-12


def test_khintchine_single_p2():
    rep = khintchine_report(unit_first_coordinate(C4), 2, 20_000, seed=11)
    assert abs(rep["ratio"] - 1.0) <= 3 * rep["stderr"]
    assert rep["lower_gate_pass"]


def test_khintchine_single_p4():
    rep = khintchine_report(unit_first_coordinate(C4), 4, 20_000, seed=12)
    assert abs(rep["ratio"] - 3 ** 0.25) <= 3 * rep["stderr"]


def test_khintchine_gate_random_elements():
    rng = np.random.default_rng(13)
    for c in (C4, C8):
        x = random_crossed(c, rng)
        rep = khintchine_report(x, 4, 4_000, seed=14)
        assert rep["lower_gate_pass"]


def test_khintchine_regression_envelope():
    """Frozen p = 4 ratios for word-length cocycles as the group grows."""
    envelope = 1.45
    for m, seed in ((2, 15), (4, 16), (8, 17)):
        c = cyclic_word_cocycle(m)
        rng = np.random.default_rng(100 + m)
        x = random_crossed(c, rng)
        rep = khintchine_report(x, 4, 4_000, seed=seed)
        assert 1.0 - 3 * rep["stderr"] <= rep["ratio"] <= envelope


def test_pisier_scalar_check():
    rep = pisier_scalar_check(20_000, seed=18)
    assert rep["pass"]
    assert rep["sign_pass"]
    assert rep["dirichlet"]["pass"]
    assert rep["target"] == pytest.approx(np.sqrt(2 / np.pi), abs=1e-12)

import numpy as np
import pytest

from ncriesz.branches import (
    Branch,
    BranchError,
    branch_from_root,
    branch_lp_family,
    branch_square_report,
    gram_is_block_tridiagonal,
    greedy_branch_partition,
    hm_branch_condition,
    ht_reconstructs_symbol,
    ht_vector,
    integer_windows,
    parent_branch_index,
    project_branch,
    resolved_band_range,
)
from ncriesz.group_algebra import AlgebraElement, moment_norm_free
from ncriesz.groups import EMPTY_WORD, build_free_ball

BALL4 = build_free_ball(2, 4)


def test_branch_validation():
    b = Branch(BALL4, ((1,), (1, 2), (1, 2, 1)))
    assert b.is_principal and b.root == (1,)
    with pytest.raises(BranchError):
        Branch(BALL4, ((1,), (2, 1)))
    with pytest.raises(BranchError):
        Branch(BALL4, (EMPTY_WORD,))


def test_branch_from_root():
    b = branch_from_root(BALL4, (1,), 4)
    assert len(b) == 4
    for w1, w2 in zip(b.words, b.words[1:]):
        assert w2[:-1] == w1


def test_partition_covers_and_disjoint():
    for radius in (2, 3, 4):
        ball = build_free_ball(2, radius)
        parts = greedy_branch_partition(ball)
        seen = set()
        for b in parts:
            for w in b.words:
                assert w not in seen
                seen.add(w)
        assert seen == set(ball.words) - {EMPTY_WORD}


def test_partition_has_principal_roots():
    parts = greedy_branch_partition(BALL4)
    principals = [b for b in parts if b.is_principal]
    assert len(principals) == 4  # one spine per generator of F_2


def test_parent_branch_indices():
    parts = greedy_branch_partition(BALL4)
    parents = parent_branch_index(parts)
    for b, pi in zip(parts, parents):
        if b.is_principal:
            assert pi is None
        else:
            assert b.root[:-1] in set(parts[pi].words) | {EMPTY_WORD}


def test_project_branch_cases():
    b = Branch(BALL4, ((1,), (1, 2), (1, 2, 1)))
    assert project_branch((1, 2), b) == (1, 2)          # member
    assert project_branch((2, 1), b) == EMPTY_WORD      # no shared prefix
    assert project_branch((1, 2, -1), b) == (1, 2)      # from the example
    assert project_branch((1, -2), b) == (1,)


def test_hm_condition_constant():
    assert hm_branch_condition(lambda j: 3.5 + 0j, 40) == pytest.approx(3.5)


def test_hm_condition_one_over_j():
    m = lambda j: 1.0 if j == 0 else 1.0 / j
    assert hm_branch_condition(m, 50) == pytest.approx(1.5)  # attained at j = 2


def test_hm_condition_alternating_diverges():
    m = lambda j: (-1.0) ** j
    assert hm_branch_condition(m, 64) >= 2 * 64  # grows like 2j


def test_integer_windows_partition_unity():
    windows = integer_windows(1, 6)
    for length in range(1, 64):
        total = sum(w(length) for w in windows.values())
        assert total == pytest.approx(1.0, abs=1e-12)


def test_resolved_band_range():
    j_min, j_max, partial = resolved_band_range(6)
    assert j_min == 1
    assert 2 ** (j_max - 1) < 6 <= 2 ** (j_max + 1)
    assert all(2 ** (j + 1) > 6 for j in partial)


def test_ht_zero_multiplier():
    b = branch_from_root(BALL4, (1,), 4)
    res = ht_vector(lambda j: 0.0, 0.5, b)
    assert res["norm"] == 0.0


def test_ht_reconstruction_principal():
    b = branch_from_root(BALL4, (1,), 4)
    m = lambda j: 1.0 if j == 0 else 1.0 / j
    for t in (0.1, 1.0, 4.0):
        assert ht_reconstructs_symbol(m, t, b) < 1e-12


def test_ht_reconstruction_non_principal():
    b = branch_from_root(BALL4, (2, 1), 3)
    m = lambda j: 1.0 / (1.0 + j)
    assert ht_reconstructs_symbol(m, 0.7, b) < 1e-12


def test_ht_sup_bounded_for_hm_multiplier():
    b = branch_from_root(BALL4, (1,), 4)
    m = lambda j: 1.0 if j == 0 else 1.0 / j
    bound = hm_branch_condition(m, 64)
    assert bound <= 1.5
    norms = []
    for k in range(-8, 4):
        res = ht_vector(m, 2.0 ** k, b)
        norms.append(res["norm"])
        assert res["truncation_tail_bound"] >= 0
    # frozen regression envelope for the truncated sup
    assert max(norms) < 1.1


def test_family_gram_block_tridiagonal():
    for radius in (4, 6):
        ball = build_free_ball(2, radius)
        parts = greedy_branch_partition(ball)
        fam = branch_lp_family(parts)
        assert gram_is_block_tridiagonal(fam["keys"], fam["gram"])


def test_family_disjoint_branches_orthogonal():
    parts = greedy_branch_partition(BALL4)
    fam = branch_lp_family(parts)
    keys = fam["keys"]
    gram = fam["gram"]
    for a, (j1, k1) in enumerate(keys):
        for b, (j2, k2) in enumerate(keys):
            if k1 != k2:
                assert gram[a, b] == 0.0


def test_family_uniform_norm_bound():
    ball = build_free_ball(2, 6)
    parts = greedy_branch_partition(ball)
    fam = branch_lp_family(parts)
    norms = [np.linalg.norm(fam["h_vectors"][key]) for key in fam["keys"]]
    # frozen regression bound for the resolved bands (observed max 1.6455)
    assert max(norms) < 1.7


def test_family_rejects_broken_partition():
    parts = greedy_branch_partition(BALL4)
    with pytest.raises(BranchError):
        branch_lp_family(parts[:-1])


def test_lambda_jk_matches_transfer_vectors_everywhere():
    ball = build_free_ball(2, 3)
    parts = greedy_branch_partition(ball)
    fam = branch_lp_family(parts)
    basis_index = {w: i for i, w in enumerate(fam["basis"])}
    for (j, k) in fam["keys"]:
        sym = fam["lambda_jk"](j, k)
        h = fam["h_vectors"][(j, k)]
        for g in ball.words:
            if g == EMPTY_WORD:
                continue
            inner = sum(h[basis_index[g[:t]]] for t in range(1, len(g) + 1))
            assert sym(g) == pytest.approx(inner / np.sqrt(len(g)), abs=1e-12)


def test_lambda_jk_reproduces_lambda_j_on_principal_branch():
    parts = greedy_branch_partition(BALL4)
    fam = branch_lp_family(parts)
    b0 = parts[0]
    assert b0.is_principal
    for j in fam["windows"]:
        sym_jk = fam["lambda_jk"](j, 0)
        for g in b0.words:
            assert sym_jk(g) == pytest.approx(fam["lambda_j"][j](g), abs=1e-12)
        # other branch symbols vanish on this branch's support
        for k in range(1, len(parts)):
            sym_other = fam["lambda_jk"](j, k)
            for g in b0.words:
                assert sym_other(g) == 0.0


def test_branch_square_p2_plancherel():
    rng = np.random.default_rng(0)
    parts = greedy_branch_partition(BALL4)
    b0 = parts[0]
    f = AlgebraElement(BALL4, {w: complex(rng.standard_normal(),
                                          rng.standard_normal())
                               for w in b0.words})
    rep = branch_square_report(f, 2, parts, 0)
    assert rep["lhs"] == pytest.approx(rep["plancherel_p2"], abs=1e-9)
    assert rep["lambda_jk_identity_error"] < 1e-12


def test_branch_square_single_mode():
    parts = greedy_branch_partition(BALL4)
    g0 = parts[0].words[1]
    f = AlgebraElement(BALL4, {g0: 1.0})
    rep = branch_square_report(f, 2, parts, 0)
    fam_windows = integer_windows(*resolved_band_range(BALL4.radius)[:2])
    expected = np.sqrt(sum(w(len(g0)) for w in fam_windows.values()))
    assert rep["lhs"] == pytest.approx(expected, abs=1e-9)
    assert rep["lhs"] <= 1.0 + 1e-12


def test_branch_square_rejects_off_branch_support():
    parts = greedy_branch_partition(BALL4)
    f = AlgebraElement(BALL4, {parts[1].root: 1.0})
    with pytest.raises(BranchError):
        branch_square_report(f, 2, parts, 0)


def test_trivial_branch_matches_circle_quadrature():
    """Powers of one generator live in a commutative algebra; the branch
    square function can be evaluated by quadrature on the circle."""
    ball = build_free_ball(2, 6)
    parts = greedy_branch_partition(ball)
    powers = branch_from_root(ball, (1,), 6)
    assert all(w == (1,) * (i + 1) for i, w in enumerate(powers.words))
    assert powers.words == parts[0].words[:6]

    rng = np.random.default_rng(1)
    coeffs = {w: complex(rng.standard_normal(), rng.standard_normal())
              for w in powers.words}
    f = AlgebraElement(ball, coeffs)
    rep = branch_square_report(f, 4, parts, 0)

    windows = integer_windows(*resolved_band_range(6)[:2])
    theta = np.linspace(0, 2 * np.pi, 8192, endpoint=False)
    total = np.zeros_like(theta)
    for w_fn in windows.values():
        band = sum(v * np.sqrt(w_fn(len(g))) * np.exp(1j * len(g) * theta)
                   for g, v in coeffs.items())
        total += np.abs(band) ** 2
    circle_lhs = float(np.mean(total ** 2) ** 0.25)
    circle_f = float(np.mean(np.abs(
        sum(v * np.exp(1j * len(g) * theta) for g, v in coeffs.items())) ** 4) ** 0.25)
    assert rep["lhs"] == pytest.approx(circle_lhs, abs=1e-6)
    assert rep["ratio"] == pytest.approx(circle_lhs / circle_f, abs=1e-6)

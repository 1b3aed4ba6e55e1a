"""Branch analysis on truncated free groups.

A branch is a chain of words, each extending the previous by one right
letter.  Greedy depth-first spines partition the ball into branches;
radial multiplier windows phi_j then induce the vectors h_{j,k} whose Gram
matrix is block tridiagonal, and branch-local Littlewood-Paley square
functions evaluated by even trace moments.

The window family on integers uses the smooth dyadic profile from the
euclidean module with the j = 1 window clumped: phi_1 = sum_{j <= 1} phi_j,
so that sum_{j >= 1} phi_j = 1 on lengths >= 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .cocycles import Cocycle, free_word_cocycle
from .group_algebra import AlgebraElement, fourier_multiplier, moment_norm_free
from .groups import EMPTY_WORD, FreeGroupBall, Word, prefix_geq
from .euclidean import smooth_bump_eta


class BranchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Branch:
    """Chain (g_1, ..., g_K) with g_k the parent of g_{k+1}."""

    ball: FreeGroupBall
    words: tuple[Word, ...]

    def __post_init__(self) -> None:
        if not self.words:
            raise BranchError("branch must be nonempty")
        root = self.words[0]
        for i, w in enumerate(self.words):
            if w == EMPTY_WORD:
                raise BranchError("the identity belongs to no branch")
            if len(w) != len(root) + i:
                raise BranchError("branch lengths must increase by one")
            if i > 0 and w[:-1] != self.words[i - 1]:
                raise BranchError("consecutive words must differ by one right letter")
            if not self.ball.contains(w):
                raise BranchError(f"word {w!r} outside the ball")

    @property
    def root(self) -> Word:
        return self.words[0]

    @property
    def is_principal(self) -> bool:
        return len(self.root) == 1

    def __contains__(self, g: Word) -> bool:
        return g in set(self.words)

    def __len__(self) -> int:
        return len(self.words)


def branch_from_root(ball: FreeGroupBall, root: Word, depth: int) -> Branch:
    """Spine of the given depth extending the root by its smallest letters."""
    words = [root]
    w = root
    for _ in range(depth - 1):
        nxt = _first_child(ball, w)
        if nxt is None:
            break
        words.append(nxt)
        w = nxt
    return Branch(ball=ball, words=tuple(words))


def _letters(ball: FreeGroupBall) -> list[int]:
    out = list(range(1, ball.k + 1)) + list(range(-ball.k, 0))
    out.sort(key=abs)
    return out


def _first_child(ball: FreeGroupBall, w: Word,
                 taken: Optional[set] = None) -> Optional[Word]:
    if len(w) >= ball.radius:
        return None
    for s in _letters(ball):
        if w and w[-1] == -s:
            continue
        child = w + (s,)
        if taken is None or child not in taken:
            return child
    return None


def greedy_branch_partition(ball: FreeGroupBall) -> list[Branch]:
    """Partition of ball minus identity into depth-first spines.

    Words are visited in (length, lexicographic) order; each unassigned word
    roots a new branch that runs to the boundary along smallest letters.
    """
    assigned: set = set()
    branches: list[Branch] = []
    for w in ball.words:
        if w == EMPTY_WORD or w in assigned:
            continue
        chain = [w]
        assigned.add(w)
        cur = w
        while True:
            child = None
            if len(cur) < ball.radius:
                for s in _letters(ball):
                    if cur and cur[-1] == -s:
                        continue
                    cand = cur + (s,)
                    if cand not in assigned:
                        child = cand
                        break
            if child is None:
                break
            chain.append(child)
            assigned.add(child)
            cur = child
        branches.append(Branch(ball=ball, words=tuple(chain)))
    return branches


def parent_branch_index(partition: Sequence[Branch]) -> list[Optional[int]]:
    """For each branch the index of the branch containing its root's parent."""
    where: dict = {}
    for i, b in enumerate(partition):
        for w in b.words:
            where[w] = i
    out: list[Optional[int]] = []
    for b in partition:
        if b.is_principal:
            out.append(None)
        else:
            out.append(where[b.root[:-1]])
    return out


def project_branch(g: Word, branch: Branch) -> Word:
    """Longest branch element that is a prefix of g; identity when none."""
    best = EMPTY_WORD
    for w in branch.words:
        if len(w) <= len(g) and prefix_geq(g, w):
            best = w if len(w) > len(best) else best
    return best


def hm_branch_condition(m_tilde: Callable[[int], complex], j_max: int) -> float:
    """sup over 1 <= j <= j_max of |m(j)| + j |m(j) - m(j-1)|."""
    best = 0.0
    for j in range(1, j_max + 1):
        val = abs(m_tilde(j)) + j * abs(m_tilde(j) - m_tilde(j - 1))
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# window profiles on the integers
# ---------------------------------------------------------------------------

def integer_windows(j_min: int, j_max: int) -> dict[int, Callable[[float], float]]:
    """Dyadic windows phi_j on lengths with the j <= 1 bands clumped into j = 1.

    phi(x) = eta(x) - eta(2x) with the smooth bump eta; phi_j = phi(2^-j x)
    for j >= 2 and phi_1 = eta(x/2).  Then sum_{j>=1} phi_j = 1 for x >= 1.
    """
    if j_min != 1:
        raise BranchError("windows are clumped at j = 1")

    def phi(x: float) -> float:
        return smooth_bump_eta(x) - smooth_bump_eta(2 * x)

    windows: dict[int, Callable[[float], float]] = {}
    windows[1] = lambda x: smooth_bump_eta(x / 2.0)
    for j in range(2, j_max + 1):
        windows[j] = (lambda x, j=j: phi(x / 2.0 ** j))
    return windows


def resolved_band_range(radius: int) -> tuple[int, int, list[int]]:
    """Bands meeting lengths 1..radius; those with 2^(j+1) > radius are partial."""
    j_max = 1
    while 2 ** (j_max - 1) < radius:
        j_max += 1
    j_max = max(j_max - 1, 1)
    partial = [j for j in range(1, j_max + 1) if 2 ** (j + 1) > radius]
    return 1, j_max, partial


# ---------------------------------------------------------------------------
# h_t vectors (smoothed multiplier transfer)
# ---------------------------------------------------------------------------

def ht_vector(m_tilde: Callable[[int], complex], t: float, branch: Branch,
              cocycle: Optional[Cocycle] = None) -> dict:
    """Transfer vector h_t with m_t(j) = t j exp(-t j) m(j).

    Coefficient against the basis vector at g in the branch is
    m_t(|g|) sqrt(|g|) - m_t(|g^-|) sqrt(|g^-|); the truncation tail bound
    integral_{tR}^inf x (e^-x + e^-2x) dx is reported alongside.
    """
    if t <= 0:
        raise BranchError("t must be positive")
    ball = branch.ball
    if cocycle is None:
        cocycle = free_word_cocycle(ball)

    def m_t(j: int) -> complex:
        return t * j * np.exp(-t * j) * m_tilde(j)

    def edge(w: Word) -> complex:
        j = len(w)
        jm = j - 1
        return m_t(j) * np.sqrt(j) - m_t(jm) * np.sqrt(jm)

    basis = [w for w in ball.words if w != EMPTY_WORD]
    coeffs = np.zeros(len(basis), dtype=complex)
    members = set(branch.words)
    for i, w in enumerate(basis):
        if w in members:
            coeffs[i] = edge(w)
    norm = float(np.linalg.norm(coeffs))
    tr = t * ball.radius
    tail = (1 + tr) * np.exp(-tr) + 0.25 * (1 + 2 * tr) * np.exp(-2 * tr)
    return {"coeffs": coeffs, "basis": basis, "norm": norm,
            "truncation_tail_bound": float(tail), "t": t}


def ht_reconstructs_symbol(m_tilde, t: float, branch: Branch) -> float:
    """Max error of <b(g), h_t>/sqrt(|g|) against m_t(|g|) on the branch.

    Exact for principal branches; non-principal ones carry the boundary
    term m_t(|root|-1) sqrt(|root|-1), which is included here, so the check
    is exact either way.
    """
    ball = branch.ball
    res = ht_vector(m_tilde, t, branch)
    basis_index = {w: i for i, w in enumerate(res["basis"])}

    def m_t(j: int) -> complex:
        return t * j * np.exp(-t * j) * m_tilde(j)

    r = len(branch.root)
    boundary = m_t(r - 1) * np.sqrt(r - 1)
    worst = 0.0
    for g in branch.words:
        inner = sum(res["coeffs"][basis_index[g[:tt]]]
                    for tt in range(1, len(g) + 1) if g[:tt] in basis_index)
        expected = m_t(len(g)) * np.sqrt(len(g)) - boundary
        worst = max(worst, abs(inner - expected))
    return worst


# ---------------------------------------------------------------------------
# the h_{j,k} family and branch square functions
# ---------------------------------------------------------------------------

def branch_lp_family(partition: Sequence[Branch],
                     j_max: Optional[int] = None) -> dict:
    """Window symbols and transfer vectors for a branch partition.

    Returns the radial symbols Lambda_j, the per-branch symbols
    Lambda_{j,k} (computed through nested branch projections, so they agree
    with the transfer-vector form on every word), and the h_{j,k}
    coefficient vectors with their Gram matrix.
    """
    if not partition:
        raise BranchError("partition must be nonempty")
    ball = partition[0].ball
    covered: set = set()
    for b in partition:
        for w in b.words:
            if w in covered:
                raise BranchError("branches overlap")
            covered.add(w)
    expected = set(ball.words) - {EMPTY_WORD}
    if covered != expected:
        raise BranchError("branches do not cover the ball")

    j_lo, j_hi, partial = resolved_band_range(ball.radius)
    if j_max is None:
        j_max = j_hi
    windows = integer_windows(1, j_max)
    parents = parent_branch_index(partition)
    basis = [w for w in ball.words if w != EMPTY_WORD]
    basis_index = {w: i for i, w in enumerate(basis)}

    def weight(j: int, w: Word) -> float:
        L = len(w)
        return float(np.sqrt(windows[j](L) * L)) if L > 0 else 0.0

    lambda_j = {j: (lambda g, j=j: float(np.sqrt(windows[j](len(g)))))
                for j in windows}

    h_vectors: dict = {}
    for j in windows:
        for k, branch in enumerate(partition):
            v = np.zeros(len(basis))
            for w in branch.words:
                v[basis_index[w]] = weight(j, w) - weight(j, w[:-1])
            h_vectors[(j, k)] = v

    def lambda_jk_symbol(j: int, k: int):
        branch = partition[k]
        parent = parents[k]

        def symbol(g: Word) -> float:
            if len(g) == 0:
                return 0.0
            pk = project_branch(g, branch)
            if pk == EMPTY_WORD:
                return 0.0
            if parent is None:
                prev = EMPTY_WORD
            else:
                prev = project_branch(pk, partition[parent])
            return (weight(j, pk) - weight(j, prev)) / float(np.sqrt(len(g)))

        return symbol

    keys = sorted(h_vectors)
    stack = np.stack([h_vectors[key] for key in keys])
    gram = stack @ stack.T
    return {"windows": windows, "lambda_j": lambda_j,
            "lambda_jk": lambda_jk_symbol, "h_vectors": h_vectors,
            "keys": keys, "gram": gram, "partial_bands": partial,
            "j_range": (1, j_max), "basis": basis}


def gram_is_block_tridiagonal(keys: Sequence[tuple], gram: np.ndarray) -> bool:
    """Zero off the (same branch, |j - j'| <= 1) pattern, exactly."""
    for a, (j1, k1) in enumerate(keys):
        for b, (j2, k2) in enumerate(keys):
            if k1 != k2 or abs(j1 - j2) > 1:
                if gram[a, b] != 0.0:
                    return False
    return True


def branch_square_report(f: AlgebraElement, p: int,
                         partition: Sequence[Branch],
                         branch_index: int = 0) -> dict:
    """|| (sum_j |Lambda_j f|^2)^(1/2) ||_p for branch-supported f, even p.

    Evaluated by trace moments of S = sum_j (Lambda_j f)* (Lambda_j f);
    at p = 2 this telescopes to the exact window-mass formula
    sum_g |f^(g)|^2 sum_j phi_j(|g|).
    """
    if p not in (2, 4):
        raise BranchError("p must be 2 or 4 (moment cost guard)")
    ball = partition[branch_index].ball
    members = set(partition[branch_index].words)
    for g in f.support():
        if g not in members:
            raise BranchError(f"f must be supported on the chosen branch; got {g!r}")

    fam = branch_lp_family(partition)
    windows = fam["windows"]
    parts = {j: fourier_multiplier(
        lambda g, j=j: float(np.sqrt(windows[j](len(g)))), f)
        for j in windows}
    s_elem = None
    for part in parts.values():
        term = part.adjoint().convolve(part)
        s_elem = term if s_elem is None else s_elem + term
    power = s_elem
    for _ in range(p // 2 - 1):
        power = power.convolve(s_elem)
    moment = power.coeff(EMPTY_WORD).real
    lhs = float(max(moment, 0.0) ** (1.0 / p))

    plancherel = float(np.sqrt(sum(
        abs(v) ** 2 * sum(windows[j](len(g)) for j in windows)
        for g, v in f.coeffs.items())))
    fnorm = moment_norm_free(f, p)
    identity_err = _lambda_jk_identity_error(f, fam, partition, branch_index)
    return {"lhs": lhs, "f_norm": fnorm,
            "ratio": lhs / fnorm if fnorm > 0 else np.inf,
            "plancherel_p2": plancherel,
            "lambda_jk_identity_error": identity_err,
            "partial_bands": fam["partial_bands"]}


def _lambda_jk_identity_error(f: AlgebraElement, fam: dict,
                              partition: Sequence[Branch],
                              branch_index: int) -> float:
    """Max coefficient error of Lambda_{j,k} f against the h_{j,k} transfer form."""
    basis_index = {w: i for i, w in enumerate(fam["basis"])}
    worst = 0.0
    for j in fam["windows"]:
        for k in range(len(partition)):
            sym = fam["lambda_jk"](j, k)
            h = fam["h_vectors"][(j, k)]
            for g, v in f.coeffs.items():
                # <b(g), h_{j,k}> = sum over prefixes of g
                inner = sum(h[basis_index[g[:tt]]] for tt in range(1, len(g) + 1))
                riesz_val = inner / np.sqrt(len(g)) if len(g) > 0 else 0.0
                worst = max(worst, abs(sym(g) - riesz_val))
    return float(worst)

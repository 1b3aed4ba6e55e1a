"""Conditionally negative lengths and their cocycles.

A length psi on G determines the Gromov form K(g,h) = (psi(g) + psi(h) -
psi(g^-1 h))/2; when K is positive semidefinite, its GNS eigendecomposition
yields vectors b(g) with <b(g), b(h)> = K(g,h) and an orthogonal action
alpha_g solving alpha_g b(h) = b(gh) - b(g).  Explicit cocycles for free
balls (prefix indicators) and even cyclic groups (window indicators) are
provided, together with spectral-measure lengths from positive densities
and fractional lengths |xi|^(2 beta) with their normalizing constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate, special

from .groups import (
    EMPTY_WORD,
    FiniteGroup,
    FreeGroupBall,
    Word,
    build_cyclic,
    prefix_geq,
    word_inv,
    word_mul,
)
from .group_algebra import AlgebraElement, psd_eigenvalues, regular_rep_matrix

GNS_RANK_CUTOFF = 1e-9  # relative to the largest Gromov eigenvalue


class NotConditionallyNegative(ValueError):
    """Raised when a construction requires conditional negativity and it fails."""


class PartialActionError(RuntimeError):
    """Raised when an out-of-ball cocycle action matrix is requested."""


@dataclass(eq=False)
class LengthFunction:
    """Values psi(g) >= 0 with psi(e) = 0 and psi(g) = psi(g^-1)."""

    group: Union[FiniteGroup, FreeGroupBall]
    values: np.ndarray  # indexed by element index / ball word index
    name: str = "psi"

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.values.min(initial=0.0) < 0:
            raise ValueError("length values must be nonnegative")
        e = self._index(self._identity())
        if abs(self.values[e]) > 1e-12:
            raise ValueError("psi(e) must vanish")
        for g in self._elements():
            if abs(self(g) - self(self._inv(g))) > 1e-12:
                raise ValueError("psi must be symmetric under inversion")

    # -- element plumbing shared by finite groups and balls ----------------
    def _identity(self):
        return EMPTY_WORD if isinstance(self.group, FreeGroupBall) else self.group.identity

    def _elements(self):
        if isinstance(self.group, FreeGroupBall):
            return self.group.words
        return range(self.group.order)

    def _index(self, g) -> int:
        if isinstance(self.group, FreeGroupBall):
            return self.group.index[g]
        return int(g)

    def _inv(self, g):
        if isinstance(self.group, FreeGroupBall):
            return word_inv(g)
        return self.group.inv(g)

    def _mul(self, g, h):
        if isinstance(self.group, FreeGroupBall):
            return word_mul(g, h)
        return self.group.mul(g, h)

    def __call__(self, g) -> float:
        if isinstance(self.group, FreeGroupBall):
            w = g
            if w in self.group.index:
                return float(self.values[self._index(w)])
            if self.name == "word":
                # products g^-1 h can leave the ball; word length still makes sense
                return float(len(w))
            raise KeyError(f"length not defined outside the ball at {w!r}")
        return float(self.values[self._index(g)])

    @property
    def size(self) -> int:
        return len(self.values)

    def zero_set(self) -> list:
        """G_0 = {g : psi(g) = 0}; a subgroup for conditionally negative psi."""
        return [g for g in self._elements() if self(g) <= 0.0]


def length_from_values(group, values: Sequence[float], name: str = "psi") -> LengthFunction:
    return LengthFunction(group=group, values=np.asarray(values, dtype=float), name=name)


def gromov_form(psi: LengthFunction, side: str = "left") -> np.ndarray:
    """K1(g,h) = (psi(g)+psi(h)-psi(g^-1 h))/2 or K2 with psi(g h^-1), over all of G."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    elems = list(psi._elements())
    n = len(elems)
    out = np.zeros((n, n))
    for i, g in enumerate(elems):
        for j, h in enumerate(elems):
            if side == "left":
                w = psi._mul(psi._inv(g), h)
            else:
                w = psi._mul(g, psi._inv(h))
            out[i, j] = 0.5 * (psi(g) + psi(h) - psi(w))
    return out


def is_conditionally_negative(psi: LengthFunction, tol: float = 1e-9) -> dict:
    """PSD test of the Gromov form; on failure returns a mean-zero witness."""
    K = gromov_form(psi, "left")
    evals, vecs = np.linalg.eigh(K)
    scale = max(abs(evals).max(initial=0.0), 1.0)
    min_eig = float(evals.min())
    verdict = min_eig >= -tol * scale
    witness = None
    if not verdict:
        v = vecs[:, 0].copy()
        # K's identity row/column vanish, so the identity coordinate is free:
        # rebalance it to make the coefficient vector mean-zero.  On such
        # vectors sum conj(a_g) a_h psi(g^-1 h) = -2 (v, K v) > 0.
        e = psi._index(psi._identity())
        v[e] = v[e] - v.sum()
        witness = v
    return {"verdict": bool(verdict), "min_eigenvalue": min_eig, "witness": witness}


def length_quadratic_form(psi: LengthFunction, coeffs: np.ndarray) -> float:
    """sum_{g,h} conj(a_g) a_h psi(g^-1 h) for a coefficient vector over G."""
    elems = list(psi._elements())
    total = 0.0
    for i, g in enumerate(elems):
        for j, h in enumerate(elems):
            total += (np.conj(coeffs[i]) * coeffs[j]).real * psi(psi._mul(psi._inv(g), h))
    return float(total)


def schoenberg_check(psi: LengthFunction, t_values: Sequence[float],
                     tol: float = 1e-9) -> dict:
    """Per-t PSD verdicts for the semigroup matrices [exp(-t psi(g^-1 h))]."""
    elems = list(psi._elements())
    n = len(elems)
    results = {}
    for t in t_values:
        if t <= 0:
            raise ValueError("t values must be positive")
        mat = np.zeros((n, n))
        for i, g in enumerate(elems):
            for j, h in enumerate(elems):
                mat[i, j] = math.exp(-t * psi(psi._mul(psi._inv(g), h)))
        evals = np.linalg.eigvalsh(mat)
        scale = max(abs(evals).max(initial=0.0), 1.0)
        results[float(t)] = {"psd": bool(evals.min() >= -tol * scale),
                             "min_eigenvalue": float(evals.min())}
    return results


@dataclass(eq=False)
class Cocycle:
    """Dimension d, vectors b(g) in R^d and orthogonal matrices alpha_g.

    The action may be partial for free-ball cocycles: alpha(g) raises
    PartialActionError when left multiplication by g leaves the ball.
    """

    length: LengthFunction
    dim: int
    b_vectors: dict  # element -> (d,) float array
    alpha_matrices: dict  # element -> (d, d) float array or None when partial
    provenance: str = "gns"
    side: str = "left"

    def b(self, g) -> np.ndarray:
        return self.b_vectors[g]

    def has_alpha(self, g) -> bool:
        return self.alpha_matrices.get(g) is not None

    def alpha(self, g) -> np.ndarray:
        mat = self.alpha_matrices.get(g)
        if mat is None:
            raise PartialActionError(
                f"action of {g!r} leaves the truncated ball; no matrix stored")
        return mat

    def action_total(self) -> bool:
        return all(self.has_alpha(g) for g in self.elements())

    @property
    def group(self):
        return self.length.group

    def elements(self):
        return self.length._elements()

    def identity(self):
        return self.length._identity()

    def psi(self, g) -> float:
        return self.length(g)

    def zero_set(self) -> list:
        return self.length.zero_set()

    def gram(self) -> np.ndarray:
        elems = list(self.elements())
        B = np.stack([self.b(g) for g in elems])
        return B @ B.T

    def rotated(self, q: np.ndarray) -> "Cocycle":
        """Conjugate by an orthogonal matrix: b -> Q b, alpha -> Q alpha Q^T."""
        if q.shape != (self.dim, self.dim):
            raise ValueError("rotation must be d x d")
        b = {g: q @ v for g, v in self.b_vectors.items()}
        a = {g: (None if m is None else q @ m @ q.T)
             for g, m in self.alpha_matrices.items()}
        return Cocycle(self.length, self.dim, b, a, provenance=self.provenance)

    def padded(self, extra: int) -> "Cocycle":
        """Append zero coordinates; the action is extended by the identity."""
        if extra < 0:
            raise ValueError("extra dimensions must be >= 0")
        d = self.dim + extra
        b = {g: np.concatenate([v, np.zeros(extra)]) for g, v in self.b_vectors.items()}
        a = {}
        for g, m in self.alpha_matrices.items():
            if m is None:
                a[g] = None
            else:
                big = np.eye(d)
                big[: self.dim, : self.dim] = m
                a[g] = big
        return Cocycle(self.length, d, b, a, provenance=self.provenance)

    def to_json_dict(self) -> dict:
        elems = list(self.elements())
        key = (lambda g: "".join(str(x) + "," for x in g).rstrip(",") or "e") \
            if isinstance(self.group, FreeGroupBall) else str
        return {
            "dimension": self.dim,
            "provenance": self.provenance,
            "psi": {key(g): self.psi(g) for g in elems},
            "b_vectors": {key(g): self.b(g).tolist() for g in elems},
            "alpha_matrices": {key(g): (self.alpha_matrices[g].tolist()
                                        if self.alpha_matrices.get(g) is not None else None)
                               for g in elems},
        }


def check_cocycle_contracts(c: Cocycle, tol: float = 1e-9) -> dict:
    """Cocycle law, orthogonality, homomorphism, |b|^2 = psi, polarization.

    For partial (free-ball) actions the law is verified in its Gram form
    <b(gh)-b(g), b(gh')-b(g)> = <b(h), b(h')> on in-ball products, which is
    what any isometric extension must satisfy.
    """
    elems = list(c.elements())
    law = orth = homo = norm2 = polar = 0.0
    K = gromov_form(c.length, c.side)
    idx = {g: i for i, g in enumerate(elems)}
    is_ball = isinstance(c.group, FreeGroupBall)
    for g in elems:
        norm2 = max(norm2, abs(float(c.b(g) @ c.b(g)) - c.psi(g)))
        for h in elems:
            polar = max(polar, abs(float(c.b(g) @ c.b(h)) - K[idx[g], idx[h]]))
        if not c.has_alpha(g):
            continue
        ag = c.alpha(g)
        orth = max(orth, float(np.abs(ag.T @ ag - np.eye(c.dim)).max()))
        for h in elems:
            gh = _translate(c, g, h)
            if is_ball and gh not in c.group.index:
                continue
            shift = c.b(g) if c.side == "left" else c.b(c.length._inv(g))
            law = max(law, float(np.abs(ag @ c.b(h) - (c.b(gh) - shift)).max()))
            if c.has_alpha(h) and c.has_alpha(c.length._mul(g, h)) \
                    and not is_ball:
                homo = max(homo, float(
                    np.abs(ag @ c.alpha(h) - c.alpha(c.length._mul(g, h))).max()))
    gram_law = 0.0
    if is_ball:
        for g in elems:
            for h in elems:
                gh = c.length._mul(g, h)
                if gh not in c.group.index:
                    continue
                for h2 in elems:
                    gh2 = c.length._mul(g, h2)
                    if gh2 not in c.group.index:
                        continue
                    lhs = float((c.b(gh) - c.b(g)) @ (c.b(gh2) - c.b(g)))
                    gram_law = max(gram_law, abs(lhs - float(c.b(h) @ c.b(h2))))
    worst = max(law, orth, homo, norm2, polar, gram_law)
    return {"cocycle_law": law, "orthogonality": orth, "homomorphism": homo,
            "norm_matches_psi": norm2, "polarization": polar,
            "gram_law": gram_law, "pass": worst <= tol, "worst": worst}


def _translate(c: Cocycle, g, h):
    """gh for left cocycles, h g^-1 for right ones."""
    if c.side == "left":
        return c.length._mul(g, h)
    return c.length._mul(h, c.length._inv(g))


def _solve_action(b_matrix: np.ndarray, target: np.ndarray, tol: float) -> np.ndarray:
    """Least-squares solve alpha @ b_matrix = target with consistency check."""
    # b_matrix, target: (d, N) with span(b) = R^d by construction
    sol, *_ = np.linalg.lstsq(b_matrix.T, target.T, rcond=None)
    alpha = sol.T
    resid = float(np.abs(alpha @ b_matrix - target).max())
    if resid > tol:
        raise NotConditionallyNegative(
            f"action extension inconsistent: residual {resid}")
    return alpha


def build_cocycle_gns(psi: LengthFunction, tol: float = 1e-9,
                      side: str = "left") -> Cocycle:
    """GNS cocycle from the eigendecomposition of the Gromov form."""
    report = is_conditionally_negative(psi, tol)
    if not report["verdict"]:
        raise NotConditionallyNegative(
            f"min Gromov eigenvalue {report['min_eigenvalue']}")
    K = gromov_form(psi, side)
    evals, vecs = np.linalg.eigh(K)
    top = max(evals.max(initial=0.0), 0.0)
    keep = evals > GNS_RANK_CUTOFF * max(top, 1e-300)
    d = int(keep.sum())
    elems = list(psi._elements())
    # columns of B are b(g) = Lambda^(1/2) U^T delta_g
    B = (np.sqrt(evals[keep])[:, None]) * vecs[:, keep].T  # (d, N)
    b_vectors = {g: B[:, i].copy() for i, g in enumerate(elems)}

    alpha_matrices: dict = {}
    index = psi._index
    is_ball = isinstance(psi.group, FreeGroupBall)
    for g in elems:
        cols = []
        targets = []
        defined = True
        for h in elems:
            if side == "left":
                gh = psi._mul(g, h)
                shift = g
            else:
                gh = psi._mul(h, psi._inv(g))
                shift = psi._inv(g)
            if is_ball and gh not in psi.group.index:
                defined = False
                break
            cols.append(B[:, index(h)])
            targets.append(B[:, index(gh)] - B[:, index(shift)])
        if not defined:
            alpha_matrices[g] = None
            continue
        bmat = np.stack(cols, axis=1)
        tmat = np.stack(targets, axis=1)
        alpha = _solve_action(bmat, tmat, tol=max(tol, 1e-7) * max(top, 1.0))
        gram_err = float(np.abs(alpha.T @ alpha - np.eye(d)).max())
        if gram_err > max(tol, 1e-7):
            raise NotConditionallyNegative(
                f"solved action is not orthogonal (defect {gram_err})")
        alpha_matrices[g] = alpha
    return Cocycle(length=psi, dim=d, b_vectors=b_vectors,
                   alpha_matrices=alpha_matrices, provenance="gns")


def free_word_cocycle(ball: FreeGroupBall) -> Cocycle:
    """Prefix-indicator cocycle on a free ball.

    The orthonormal basis is indexed by non-identity words h, and
    <b(g), xi_h> = 1 iff h is a prefix of g.  The action is left
    multiplication, stored only where products stay inside the ball.
    """
    from .groups import free_word_length

    if ball.radius < 1:
        raise ValueError("need radius >= 1")
    psi = free_word_length(ball)
    basis = [w for w in ball.words if w != EMPTY_WORD]
    basis_index = {w: i for i, w in enumerate(basis)}
    d = len(basis)

    def b_of(g: Word) -> np.ndarray:
        v = np.zeros(d)
        for t in range(1, len(g) + 1):
            v[basis_index[g[:t]]] = 1.0
        return v

    b_vectors = {g: b_of(g) for g in ball.words}

    alpha_matrices: dict = {}
    for g in ball.words:
        cols = np.zeros((d, d))
        ok = True
        for h in basis:
            gh = word_mul(g, h)
            gh_parent = word_mul(g, h[:-1])
            if len(gh) > ball.radius or len(gh_parent) > ball.radius:
                ok = False
                break
            cols[:, basis_index[h]] = b_vectors[gh] - b_vectors[gh_parent]
        alpha_matrices[g] = cols if ok else None
    return Cocycle(length=psi, dim=d, b_vectors=b_vectors,
                   alpha_matrices=alpha_matrices, provenance="free")


def cyclic_window_sets(m: int) -> dict[int, list[int]]:
    """Lambda_k = {j : j - k = s mod 2m, 0 <= s <= m-1} for k = 1..m."""
    n = 2 * m
    return {k: [j for j in range(n) if (j - k) % n <= m - 1] for k in range(1, m + 1)}


def cyclic_closed_form_k(m: int, j: int, k: int) -> float:
    """min(j, 2m-k, max(m-k+j, 0)) symmetrized to all index pairs."""
    lo, hi = min(j, k), max(j, k)
    return float(min(lo, 2 * m - hi, max(m - hi + lo, 0)))


def cyclic_word_cocycle(m: int) -> Cocycle:
    """Explicit m-dimensional word-length cocycle on Z_{2m}.

    b(j) is the 0/1 indicator of the windows Lambda_k containing j; the
    action is solved from the cocycle law on the spanning set.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    group = build_cyclic(2 * m)
    from .groups import word_length

    psi = word_length(group, [1, 2 * m - 1])
    windows = cyclic_window_sets(m)
    d = m
    b_vectors = {}
    for j in range(2 * m):
        v = np.zeros(d)
        for k in range(1, m + 1):
            if j in windows[k]:
                v[k - 1] = 1.0
        b_vectors[j] = v
    B = np.stack([b_vectors[j] for j in range(2 * m)], axis=1)
    alpha_matrices = {}
    for g in range(2 * m):
        targets = np.stack([b_vectors[(g + h) % (2 * m)] - b_vectors[g]
                            for h in range(2 * m)], axis=1)
        alpha = _solve_action(B, targets, tol=1e-8)
        alpha_matrices[g] = alpha
    c = Cocycle(length=psi, dim=d, b_vectors=b_vectors,
                alpha_matrices=alpha_matrices, provenance="cyclic")
    return c


def length_from_density(omega: AlgebraElement, group: FiniteGroup,
                        tol: float = 1e-9) -> LengthFunction:
    """psi(g) = tau((2 lambda(e) - lambda(g) - lambda(g^-1)) omega) for PSD omega."""
    mat = regular_rep_matrix(omega)
    psd_eigenvalues(mat)  # raises if omega is not PSD
    values = np.zeros(group.order)
    tr = omega.coeff(group.identity).real
    for g in group.elements():
        val = 2.0 * tr - omega.coeff(group.inv(g)).real - omega.coeff(g).real
        # psi >= 0 holds exactly for PSD omega; clear rounding dust only
        values[g] = 0.0 if abs(val) < 1e-12 * max(1.0, abs(tr)) else val
    psi = LengthFunction(group=group, values=values, name="density")
    report = is_conditionally_negative(psi, tol)
    if not report["verdict"]:
        raise NotConditionallyNegative(
            "density length failed conditional negativity; omega PSD check bug")
    return psi


def functional_from_length(psi: LengthFunction, trials: int = 20,
                           seed: int = 7, tol: float = 1e-9) -> dict:
    """Positivity report for tau_psi(f) = -1/2 sum f^(g) psi(g) on mean-zero f.

    Evaluates tau_psi(|f|^2) on the difference basis lambda(g) - lambda(e)
    and on random mean-zero-coefficient polynomials; all values are >= -tol
    exactly when psi is conditionally negative.
    """
    elems = list(psi._elements())
    e = psi._identity()

    def tau_psi_of_square(coeffs: dict) -> float:
        # |f|^2 = f* f has coefficient at u: sum_g conj(f^(g)) f^(gu)
        total = 0.0
        for g, vg in coeffs.items():
            for h, vh in coeffs.items():
                u = psi._mul(psi._inv(g), h)
                total += -(0.5) * (np.conj(vg) * vh).real * psi(u)
        return total

    values = []
    for g in elems:
        if g == e:
            continue
        values.append(("basis", tau_psi_of_square({g: 1.0, e: -1.0})))
    rng = np.random.default_rng(seed)
    n = len(elems)
    for _ in range(trials):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v[0] -= v.sum()  # mean-zero coefficients; elems[0] is just a slot
        coeffs = {g: v[i] for i, g in enumerate(elems)}
        values.append(("random", tau_psi_of_square(coeffs)))
    min_value = min(v for _, v in values)
    return {"min_value": float(min_value), "values": values,
            "all_nonnegative": bool(min_value >= -tol)}


# ---------------------------------------------------------------------------
# fractional lengths psi_beta(xi) = k_n(beta) |xi|^(2 beta)
# ---------------------------------------------------------------------------

def _radial_cos_constant(alpha: float, u_min: float = 1e-4, u_max: float = 1e4,
                         points_per_decade: int = 240) -> float:
    """integral_0^inf (1 - cos u) u^(-1-alpha) du by product integration.

    Midpoint log-grid with the oscillatory factor integrated exactly per
    cell; the head uses 1 - cos u ~ u^2/2 and the tail the analytic bound
    with its leading oscillatory correction.
    """
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    head = u_min ** (2 - alpha) / (2 * (2 - alpha)) \
        * (1 - u_min ** 2 * (2 - alpha) / (12 * (4 - alpha)))
    tail = u_max ** (-alpha) / alpha + math.sin(u_max) * u_max ** (-1 - alpha)
    decades = math.log10(u_max / u_min)
    n_cells = int(decades * points_per_decade)
    edges = np.geomspace(u_min, u_max, n_cells + 1)
    mids = np.sqrt(edges[:-1] * edges[1:])
    weights = mids ** (-1 - alpha)
    cell_int = (edges[1:] - edges[:-1]) - (np.sin(edges[1:]) - np.sin(edges[:-1]))
    middle = float(np.sum(weights * cell_int))
    return head + middle + tail


def _composite_gl(fn, a: float, b: float, graded_at_a: bool = True,
                  nodes: int = 48, pieces: int = 14) -> float:
    """Gauss-Legendre on geometrically graded pieces (handles x^s endpoints)."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.concatenate([[0.0], np.geomspace((b - a) * 1e-12, b - a, pieces)])
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        s = mid + half * x
        pts = a + s if graded_at_a else b - s
        total += half * float(np.sum(w * fn(pts)))
    return total


def _sphere_axis_moment(n: int, beta: float) -> float:
    """integral over S^(n-1) of |theta_1|^(2 beta), polar-angle quadrature."""
    if n == 1:
        return 2.0
    if n == 2:
        # 4 * int_0^(pi/2) cos(phi)^(2 beta) dphi; graded toward phi = pi/2
        val = _composite_gl(lambda phi: np.cos(phi) ** (2 * beta),
                            0.0, math.pi / 2, graded_at_a=False)
        return 4.0 * val
    if n == 3:
        # 2 pi int_0^pi |cos|^(2 beta) sin dtheta = 4 pi int_0^1 t^(2 beta) dt
        val = _composite_gl(lambda t: t ** (2 * beta), 0.0, 1.0)
        return 4.0 * math.pi * val
    raise ValueError("spherical quadrature implemented for n <= 3")


def fractional_kn(n: int, beta: float) -> float:
    """Normalizing constant k_n(beta) with psi_beta(xi) = k_n(beta)|xi|^(2 beta)."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    c = _radial_cos_constant(2 * beta)
    s = _sphere_axis_moment(n, beta)
    return 2.0 * c * (2 * math.pi) ** (2 * beta) * s


def _fractional_psi_direct(n: int, beta: float, xi: np.ndarray) -> float:
    """psi_beta(xi) by an independent radial quadrature of the defining integral.

    Uses the exact spherical average of cos (cosine/Bessel/sinc kernels for
    n = 1, 2, 3) and adaptive quadrature in the radius.
    """
    r_xi = float(np.linalg.norm(xi))
    if r_xi == 0:
        return 0.0
    a = 2 * math.pi * r_xi

    if n == 1:
        surface = 2.0

        def avg_cos(r):
            return np.cos(a * r)
    elif n == 2:
        surface = 2 * math.pi

        def avg_cos(r):
            return special.j0(a * r)
    elif n == 3:
        surface = 4 * math.pi

        def avg_cos(r):
            z = a * r
            return np.sinc(z / math.pi)  # sin(z)/z
    else:
        raise ValueError("n must be <= 3")

    def head_integrand(r):
        return (1.0 - avg_cos(r)) * r ** (-1 - 2 * beta)

    head, _ = integrate.quad(head_integrand, 0, 1.0 / a, limit=200)
    mid, _ = integrate.quad(head_integrand, 1.0 / a, 50.0 / a, limit=1000)
    # beyond 50 periods: split off 1; the pure power part is exact
    r0 = 50.0 / a
    tail_const = r0 ** (-2 * beta) / (2 * beta)
    if n == 1:
        osc, _ = integrate.quad(lambda r: r ** (-1 - 2 * beta), r0, np.inf,
                                weight="cos", wvar=a, limit=400)
    else:
        # Bessel/sinc averages decay absolutely; a long finite window suffices
        r1 = 2000.0 / a
        osc, _ = integrate.quad(lambda r: avg_cos(r) * r ** (-1 - 2 * beta),
                                r0, r1, limit=4000)
    return 2.0 * surface * (head + mid + tail_const - osc)


def fractional_length(n: int, beta: float, xi: Sequence[float],
                      cross_check_tol: float = 5e-3) -> dict:
    """{psi, kn} for psi_beta(xi) = k_n(beta)|xi|^(2 beta).

    The value is cross-checked against a direct quadrature of the defining
    integral; disagreement beyond cross_check_tol raises ArithmeticError.
    """
    xi_arr = np.asarray(xi, dtype=float)
    if xi_arr.shape != (n,):
        raise ValueError("xi must be an n-vector")
    kn = fractional_kn(n, beta)
    r = float(np.linalg.norm(xi_arr))
    psi = kn * r ** (2 * beta)
    if r > 0:
        direct = _fractional_psi_direct(n, beta, xi_arr)
        rel = abs(direct - psi) / max(abs(psi), 1e-300)
        if rel > cross_check_tol:
            raise ArithmeticError(
                f"fractional length quadratures disagree: rel error {rel:.2e}")
    else:
        direct = 0.0
    return {"psi": psi, "kn": kn, "psi_direct": direct}

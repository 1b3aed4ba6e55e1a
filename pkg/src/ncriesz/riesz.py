"""Riesz transform symbols, square functions and crossed-product expectations.

Conventions.  The Riesz symbol carries the paper-free normalization
m_j(g) = 2 pi i <b(g), e_j> / sqrt(psi(g)) and vanishes on the zero set of
psi; the derivation delta(lambda(g)) = B(b(g)) x lambda(g) carries no 2 pi
factor.  Reports state which convention produced each number.

A CrossedElement sum_g B(xi_g) x lambda(g) keeps one complex coefficient
vector per group element over the real gaussian basis; its adjoint has
coefficient alpha_g conj(xi_{g^-1}) at g.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cocycles import Cocycle, LengthFunction, PartialActionError, gromov_form
from .group_algebra import (
    AlgebraElement,
    fourier_multiplier,
    lp_norm,
    regular_rep_matrix,
    schatten_norm_from_psd,
)
from .groups import FreeGroupBall

TWO_PI_I = 2j * np.pi


class NotInLpCirc(ValueError):
    """f has Fourier mass on the zero set of psi and auto-projection is off."""


@dataclass(eq=False)
class CrossedElement:
    """Finitely supported map g -> xi_g in C^d inside the gaussian crossed product."""

    cocycle: Cocycle
    coeffs: dict  # element -> complex (d,) vector

    def __post_init__(self) -> None:
        clean = {}
        for g, v in self.coeffs.items():
            arr = np.asarray(v, dtype=complex)
            if arr.shape != (self.cocycle.dim,):
                raise ValueError("coefficient vectors must have the cocycle dimension")
            if np.any(arr != 0):
                clean[g] = arr
        self.coeffs = clean

    def coeff(self, g) -> np.ndarray:
        v = self.coeffs.get(g)
        if v is None:
            return np.zeros(self.cocycle.dim, dtype=complex)
        return v

    def support(self):
        return self.coeffs.keys()

    def adjoint(self) -> "CrossedElement":
        inv = self.cocycle.length._inv
        out = {}
        for g, v in self.coeffs.items():
            gi = inv(g)
            out[gi] = self.cocycle.alpha(gi) @ np.conj(v)
        return CrossedElement(self.cocycle, out)

    def __add__(self, other: "CrossedElement") -> "CrossedElement":
        out = {g: v.copy() for g, v in self.coeffs.items()}
        for g, v in other.coeffs.items():
            out[g] = out.get(g, 0.0) + v
        return CrossedElement(self.cocycle, out)

    def __mul__(self, scalar) -> "CrossedElement":
        return CrossedElement(self.cocycle,
                              {g: v * scalar for g, v in self.coeffs.items()})

    __rmul__ = __mul__

    def hs_norm(self) -> float:
        """L2 norm: (sum_g |xi_g|^2)^(1/2)."""
        return float(np.sqrt(sum(np.sum(np.abs(v) ** 2) for v in self.coeffs.values())))


def single_term(cocycle: Cocycle, vector, g=None) -> CrossedElement:
    if g is None:
        g = cocycle.identity()
    return CrossedElement(cocycle, {g: np.asarray(vector, dtype=complex)})


# ---------------------------------------------------------------------------
# symbols and the derivation pair
# ---------------------------------------------------------------------------

def riesz_symbol(c: Cocycle, direction: Sequence[float]) -> dict:
    """m(g) = 2 pi i <b(g), h> / sqrt(psi(g)), zero on the zero set of psi."""
    h = np.asarray(direction, dtype=float)
    if np.linalg.norm(h) == 0:
        raise ValueError("direction must be nonzero")
    out = {}
    for g in c.elements():
        p = c.psi(g)
        out[g] = TWO_PI_I * float(c.b(g) @ h) / np.sqrt(p) if p > 0 else 0.0
    return out


def project_lp_circ(c: Cocycle, f: AlgebraElement) -> AlgebraElement:
    """Drop Fourier coefficients on the zero set of psi."""
    return AlgebraElement(f.group, {g: v for g, v in f.coeffs.items()
                                    if c.psi(g) > 0})


def _require_lp_circ(c: Cocycle, f: AlgebraElement, auto_project: bool) -> AlgebraElement:
    bad = [g for g in f.support() if c.psi(g) <= 0]
    if bad:
        if not auto_project:
            raise NotInLpCirc(f"coefficients on the zero set of psi at {bad!r}")
        return project_lp_circ(c, f)
    return f


def apply_riesz(c: Cocycle, j: int, f: AlgebraElement,
                auto_project: bool = False) -> AlgebraElement:
    """Coordinate Riesz transform R_j f along the j-th cocycle basis vector."""
    f = _require_lp_circ(c, f, auto_project)
    direction = np.zeros(c.dim)
    direction[j] = 1.0
    return fourier_multiplier(riesz_symbol(c, direction), f)


def apply_riesz_direction(c: Cocycle, direction, f: AlgebraElement,
                          auto_project: bool = False) -> AlgebraElement:
    f = _require_lp_circ(c, f, auto_project)
    return fourier_multiplier(riesz_symbol(c, direction), f)


def delta(c: Cocycle, f: AlgebraElement) -> CrossedElement:
    """Derivation lambda(g) -> B(b(g)) x lambda(g); no 2 pi factor."""
    return CrossedElement(c, {g: v * c.b(g).astype(complex)
                              for g, v in f.coeffs.items()})


def delta_adjoint(c: Cocycle, x: CrossedElement) -> AlgebraElement:
    """Coefficient at g is the bilinear pairing (xi_g, b(g))."""
    group = c.group
    return AlgebraElement(group, {g: complex(np.sum(v * c.b(g)))
                                  for g, v in x.coeffs.items()})


def apply_generator(c: Cocycle, f: AlgebraElement, power: float = 1.0,
                    auto_project: bool = False) -> AlgebraElement:
    """A^power f with A: lambda(g) -> psi(g) lambda(g); A^(-s) is 0 on the zero set."""
    if power < 0:
        f = _require_lp_circ(c, f, auto_project)
    out = {}
    for g, v in f.coeffs.items():
        p = c.psi(g)
        out[g] = v * (p ** power if p > 0 else 0.0)
    return AlgebraElement(f.group, out)


# ---------------------------------------------------------------------------
# conditional expectations onto the group algebra
# ---------------------------------------------------------------------------

def expectation_col(x: CrossedElement, y: CrossedElement) -> AlgebraElement:
    """E(x* y) = sum_{g,h} <xi_g, eta_h> lambda(g^-1 h); rotations cancel."""
    if x.cocycle is not y.cocycle:
        raise ValueError("operands must share a cocycle")
    c = x.cocycle
    mul, inv = c.length._mul, c.length._inv
    out: dict = {}
    for g, v in x.coeffs.items():
        gi = inv(g)
        for h, w in y.coeffs.items():
            u = mul(gi, h)
            val = complex(np.sum(np.conj(v) * w))
            out[u] = out.get(u, 0.0) + val
    return AlgebraElement(c.group, out)


def expectation_row(x: CrossedElement, y: CrossedElement) -> AlgebraElement:
    """E(x y*) = sum_{g,h} (xi_g, alpha_{g h^-1} conj(eta_h)) lambda(g h^-1).

    The rotation does not cancel; this is the twist that distinguishes row
    square functions in the crossed product.
    """
    if x.cocycle is not y.cocycle:
        raise ValueError("operands must share a cocycle")
    c = x.cocycle
    mul, inv = c.length._mul, c.length._inv
    out: dict = {}
    for g, v in x.coeffs.items():
        for h, w in y.coeffs.items():
            u = mul(g, inv(h))
            rotated = c.alpha(u) @ np.conj(w)
            val = complex(np.sum(v * rotated))
            out[u] = out.get(u, 0.0) + val
    return AlgebraElement(c.group, out)


def gradient_form(psi: LengthFunction, f1: AlgebraElement, f2: AlgebraElement,
                  cocycle: Optional[Cocycle] = None, tol: float = 1e-9) -> dict:
    """Gradient form Gamma(f1, f2) computed three independent ways.

    Route 1 uses the generator: (A(f1*) f2 + f1* A(f2) - A(f1* f2)) / 2.
    Route 2 sums conj(f1^(g)) f2^(h) K(g,h) lambda(g^-1 h) over supports.
    Route 3 is the crossed-product expectation E(delta f1* delta f2) and
    needs a cocycle (built on demand when omitted).
    Disagreement beyond tol raises ArithmeticError: it signals a cocycle bug.
    """
    mul, inv = psi._mul, psi._inv

    def gen(f: AlgebraElement) -> AlgebraElement:
        return AlgebraElement(f.group, {g: v * psi(g) for g, v in f.coeffs.items()})

    f1a = f1.adjoint()
    route1 = 0.5 * (gen(f1a).convolve(f2) + f1a.convolve(gen(f2))
                    - gen(f1a.convolve(f2)))

    out: dict = {}
    for g, v in f1.coeffs.items():
        for h, w in f2.coeffs.items():
            u = mul(inv(g), h)
            k = 0.5 * (psi(g) + psi(h) - psi(u))
            out[u] = out.get(u, 0.0) + np.conj(v) * w * k
    route2 = AlgebraElement(f1.group, out)

    if cocycle is None:
        from .cocycles import build_cocycle_gns
        cocycle = build_cocycle_gns(psi)
    route3 = expectation_col(delta(cocycle, f1), delta(cocycle, f2))

    keys = set(route1.support()) | set(route2.support()) | set(route3.support())
    spread = max((max(abs(route1.coeff(u) - route2.coeff(u)),
                      abs(route1.coeff(u) - route3.coeff(u))) for u in keys),
                 default=0.0)
    scale = max(route1.norm_inf_coeff(), 1.0)
    if spread > tol * scale:
        raise ArithmeticError(
            f"gradient form routes disagree by {spread}; cocycle construction bug")
    return {"value": route1, "route2": route2, "route3": route3,
            "max_disagreement": float(spread)}


# ---------------------------------------------------------------------------
# twisted families and square functions
# ---------------------------------------------------------------------------

def u_component(x: CrossedElement, j: int) -> AlgebraElement:
    """u_j: extract the j-th gaussian coordinate as a group algebra element."""
    return AlgebraElement(x.cocycle.group,
                          {g: complex(v[j]) for g, v in x.coeffs.items()})


def crossed_from_components(c: Cocycle, parts: Sequence[AlgebraElement]) -> CrossedElement:
    """Assemble sum_j B(e_j) x b_j from per-coordinate group algebra elements."""
    if len(parts) != c.dim:
        raise ValueError("need one component per cocycle dimension")
    out: dict = {}
    for j, part in enumerate(parts):
        for g, v in part.coeffs.items():
            vec = out.setdefault(g, np.zeros(c.dim, dtype=complex))
            vec[j] += v
    return CrossedElement(c, out)


def twisted_family(c: Cocycle, parts: Sequence[AlgebraElement]) -> list:
    """Twisted components: coefficient of the j-th output at g is
    <sum_k b_k^(g) e_k, alpha_g e_j>, bilinear in the complex coefficients."""
    if len(parts) != c.dim:
        raise ValueError("need one component per cocycle dimension")
    support = set()
    for part in parts:
        support |= set(part.support())
    group = c.group
    twisted = [dict() for _ in range(c.dim)]
    for g in support:
        v = np.array([parts[k].coeff(g) for k in range(c.dim)])
        rotated = c.alpha(c.length._inv(g)) @ v
        for j in range(c.dim):
            if rotated[j] != 0:
                twisted[j][g] = complex(rotated[j])
    return [AlgebraElement(group, t) for t in twisted]


def _psd_sum(mats) -> np.ndarray:
    total = None
    for m in mats:
        total = m if total is None else total + m
    return total


def square_function_norm(c: Cocycle, f: AlgebraElement, p: float,
                         side: str = "col", auto_project: bool = False) -> float:
    """L_p norm of the column/row/twisted-row Riesz square function.

    col:  || (sum_j (R_j f)* (R_j f))^(1/2) ||_p
    row:  the same applied to f*
    twisted_row: || (sum_j bt_j bt_j*)^(1/2) ||_p for the twisted family of R_j f
    """
    f = _require_lp_circ(c, f, auto_project)
    if side == "row":
        return square_function_norm(c, f.adjoint(), p, side="col")
    parts = [apply_riesz(c, j, f) for j in range(c.dim)]
    if side == "col":
        mats = [regular_rep_matrix(part) for part in parts]
        total = _psd_sum(m.conj().T @ m for m in mats)
    elif side == "twisted_row":
        twisted = twisted_family(c, parts)
        mats = [regular_rep_matrix(part) for part in twisted]
        total = _psd_sum(m @ m.conj().T for m in mats)
    else:
        raise ValueError("side must be col, row or twisted_row")
    if total is None:
        return 0.0
    return schatten_norm_from_psd(total, p)


def gram_norm(vectors: Sequence[np.ndarray]) -> float:
    """Operator norm of the Gram matrix, square rooted."""
    vs = [np.asarray(v, dtype=float) for v in vectors]
    if not vs:
        return 0.0
    gram = np.array([[float(a @ b) for b in vs] for a in vs])
    evals = np.linalg.eigvalsh(gram)
    return float(np.sqrt(max(evals.max(), 0.0)))


# ---------------------------------------------------------------------------
# decomposition strategies for p < 2 and the equivalence report
# ---------------------------------------------------------------------------

def rc_pair_norm(phi1: CrossedElement, phi2: CrossedElement, p: float) -> float:
    """|| E(phi1* phi1)^(1/2) ||_p + || E(phi2 phi2*)^(1/2) ||_p."""
    col = expectation_col(phi1, phi1)
    row = expectation_row(phi2, phi2)
    ncol = schatten_norm_from_psd(regular_rep_matrix(col), p)
    nrow = schatten_norm_from_psd(regular_rep_matrix(row), p)
    return ncol + nrow


def _sign_split(x: CrossedElement) -> tuple:
    """Assign each (g, coordinate) term by the sign of its real part."""
    c = x.cocycle
    pos: dict = {}
    neg: dict = {}
    for g, v in x.coeffs.items():
        mask = v.real >= 0
        vp = np.where(mask, v, 0.0)
        vn = np.where(mask, 0.0, v)
        if np.any(vp != 0):
            pos[g] = vp
        if np.any(vn != 0):
            neg[g] = vn
    return CrossedElement(c, pos), CrossedElement(c, neg)


def _greedy_refine(x: CrossedElement, assign: dict, p: float,
                   max_passes: int = 2) -> tuple:
    """Flip single (g, k) assignments while the pair norm decreases."""
    c = x.cocycle
    items = [(g, k) for g, v in x.coeffs.items()
             for k in range(c.dim) if v[k] != 0]

    def build(a: dict) -> tuple:
        phi1: dict = {}
        phi2: dict = {}
        for g, v in x.coeffs.items():
            m = np.array([a[(g, k)] if v[k] != 0 else True
                          for k in range(c.dim)])
            v1 = np.where(m, v, 0.0)
            v2 = np.where(m, 0.0, v)
            if np.any(v1 != 0):
                phi1[g] = v1
            if np.any(v2 != 0):
                phi2[g] = v2
        return CrossedElement(c, phi1), CrossedElement(c, phi2)

    best = rc_pair_norm(*build(assign), p)
    for _ in range(max_passes):
        improved = False
        for item in items:
            assign[item] = not assign[item]
            cand = rc_pair_norm(*build(assign), p)
            if cand < best - 1e-12:
                best = cand
                improved = True
            else:
                assign[item] = not assign[item]
        if not improved:
            break
    return build(assign)


def decomposition_strategies(x: CrossedElement, p: float,
                             refine: bool = False) -> dict:
    """Named decompositions x = phi1 + phi2 used for the p < 2 upper bound."""
    c = x.cocycle
    zero = CrossedElement(c, {})
    strategies = {
        "all_column": (x, zero),
        "all_row": (zero, x),
        "sign_split": _sign_split(x),
    }
    if refine:
        assign = {}
        for g, v in x.coeffs.items():
            for k in range(c.dim):
                if v[k] != 0:
                    assign[(g, k)] = bool(v[k].real >= 0)
        strategies["greedy_refined"] = _greedy_refine(x, assign, p)
    return strategies


def rc_upper_bound(x: CrossedElement, p: float, refine: bool = False) -> dict:
    values = {name: rc_pair_norm(phi1, phi2, p)
              for name, (phi1, phi2) in decomposition_strategies(x, p, refine).items()}
    best = min(values, key=values.get)
    return {"value": values[best], "strategy": best, "all": values,
            "label": "upper bound"}


def riesz_equivalence_report(c: Cocycle, f: AlgebraElement, p: float,
                             refine: bool = False,
                             auto_project: bool = False) -> dict:
    """Ratio of ||f||_p against the Riesz square functions.

    p >= 2: ratio = ||f||_p / (max(col, row) / 2 pi); exactly 1 at p = 2.
    p < 2: strategy minimum of the two-term crossed decomposition, reported
    as an upper bound (the true infimum has no known algorithm).
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    f = _require_lp_circ(c, f, auto_project)
    fnorm = lp_norm(f, p)
    report = {"p": p, "f_norm": fnorm, "convention": "riesz-symbol-2pi"}
    if p >= 2:
        col = square_function_norm(c, f, p, "col")
        row = square_function_norm(c, f, p, "row")
        denom = max(col, row) / (2 * np.pi)
        report.update({"col": col, "row": row,
                       "ratio": fnorm / denom if denom > 0 else np.inf})
    else:
        x = delta(c, apply_generator(c, f, -0.5))
        bound = rc_upper_bound(x, p, refine)
        report.update({"upper_bound": bound["value"],
                       "strategy": bound["strategy"],
                       "strategies": bound["all"],
                       "label": bound["label"],
                       "ratio": fnorm / bound["value"] if bound["value"] > 0 else np.inf})
    return report


def extended_riesz(c: Cocycle, xi: CrossedElement, f: AlgebraElement,
                   auto_project: bool = False) -> AlgebraElement:
    """E(xi* delta A^(-1/2) f): Riesz transform with module coefficients.

    For xi = B(h) x lambda(e) this is sum_g <b(g), h>/sqrt(psi(g)) f^(g)
    lambda(g) (the derivation convention, no 2 pi i).
    """
    f = _require_lp_circ(c, f, auto_project)
    return expectation_col(xi, delta(c, apply_generator(c, f, -0.5)))


def g_function_norm(c: Cocycle, f: AlgebraElement, p: float, profile,
                    s_grid: Optional[np.ndarray] = None,
                    points_per_decade: int = 60,
                    auto_project: bool = False) -> float:
    """|| (int |phi(s A)f|^2 ds/s)^(1/2) ||_p by log-grid quadrature.

    profile is a scalar function with profile(0) = 0 and an integrable
    square against ds/s.
    """
    f = _require_lp_circ(c, f, auto_project)
    if not f.coeffs:
        return 0.0
    psis = [c.psi(g) for g in f.support()]
    if s_grid is None:
        lo = 1e-4 / max(psis)
        hi = 1e4 / min(psis)
        n = max(int(np.log10(hi / lo) * points_per_decade), 8)
        s_grid = np.geomspace(lo, hi, n)
    log_s = np.log(s_grid)
    weights = np.zeros_like(s_grid)
    weights[1:-1] = 0.5 * (log_s[2:] - log_s[:-2])
    weights[0] = 0.5 * (log_s[1] - log_s[0])
    weights[-1] = 0.5 * (log_s[-1] - log_s[-2])

    total = None
    for s, w in zip(s_grid, weights):
        part = fourier_multiplier(lambda g, s=s: profile(s * c.psi(g)), f)
        m = regular_rep_matrix(part)
        term = w * (m.conj().T @ m)
        total = term if total is None else total + term
    return schatten_norm_from_psd(total, p)

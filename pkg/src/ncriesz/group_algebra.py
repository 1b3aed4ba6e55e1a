"""Exact L_p calculus on finite group von Neumann algebras.

Elements are finitely supported Fourier coefficient maps g -> f^(g); norms
go through the left regular representation matrix M[a, b] = f^(a b^-1), with
the normalized trace (1/N) Tr realizing tau(lambda(g)) = delta_{g=e}.
Elements over a free-group ball use exact word-reduction convolution and
trace moments instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Union

import numpy as np

from .groups import EMPTY_WORD, FiniteGroup, FreeGroupBall, GroupError, Word, word_inv, word_mul

Element = Union[int, Word]

HERMITIAN_EIG_TOL = 1e-12


@dataclass(eq=False)
class AlgebraElement:
    """Finitely supported Fourier series sum_g f^(g) lambda(g)."""

    group: Union[FiniteGroup, FreeGroupBall]
    coeffs: dict[Element, complex]

    def __post_init__(self) -> None:
        self.coeffs = {g: complex(v) for g, v in self.coeffs.items() if v != 0}

    @property
    def is_free(self) -> bool:
        return isinstance(self.group, FreeGroupBall)

    def coeff(self, g: Element) -> complex:
        return self.coeffs.get(g, 0.0 + 0.0j)

    def support(self):
        return self.coeffs.keys()

    def trace(self) -> complex:
        e = EMPTY_WORD if self.is_free else self.group.identity
        return self.coeff(e)

    def _inv(self, g: Element) -> Element:
        return word_inv(g) if self.is_free else self.group.inv(g)

    def _mul(self, g: Element, h: Element) -> Element:
        return word_mul(g, h) if self.is_free else self.group.mul(g, h)

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.group, {
            self._inv(g): np.conj(v) for g, v in self.coeffs.items()})

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        out = dict(self.coeffs)
        for g, v in other.coeffs.items():
            out[g] = out.get(g, 0.0) + v
        return AlgebraElement(self.group, out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (other * (-1.0))

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return self.convolve(other)
        out = {g: v * other for g, v in self.coeffs.items()}
        return AlgebraElement(self.group, out)

    __rmul__ = __mul__

    def convolve(self, other: "AlgebraElement") -> "AlgebraElement":
        """Product in the group algebra: lambda(a) lambda(b) = lambda(ab)."""
        out: dict[Element, complex] = {}
        for a, va in self.coeffs.items():
            for b, vb in other.coeffs.items():
                c = self._mul(a, b)
                out[c] = out.get(c, 0.0) + va * vb
        return AlgebraElement(self.group, out)

    def l2_norm(self) -> float:
        return float(np.sqrt(sum(abs(v) ** 2 for v in self.coeffs.values())))

    def norm_inf_coeff(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)

    def copy(self) -> "AlgebraElement":
        return AlgebraElement(self.group, dict(self.coeffs))


def lambda_element(group, g: Element, value: complex = 1.0) -> AlgebraElement:
    return AlgebraElement(group, {g: value})


def from_vector(group: FiniteGroup, vec: np.ndarray) -> AlgebraElement:
    return AlgebraElement(group, {i: vec[i] for i in range(group.order)})


def regular_rep_matrix(f: AlgebraElement) -> np.ndarray:
    """Matrix of left convolution by f on l2(G): M[a, b] = f^(a b^-1)."""
    if f.is_free:
        raise GroupError("regular_rep_matrix needs a finite group; "
                         "use moment_norm_free on ball elements")
    group: FiniteGroup = f.group
    n = group.order
    mat = np.zeros((n, n), dtype=complex)
    for g, v in f.coeffs.items():
        for b in range(n):
            mat[group.mul(g, b), b] += v
    return mat


def psd_eigenvalues(mat: np.ndarray, tol: float = HERMITIAN_EIG_TOL) -> np.ndarray:
    """Eigenvalues of a (numerically) PSD Hermitian matrix, clipped at 0."""
    evals = np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
    scale = max(abs(evals).max(initial=0.0), 1.0)
    if evals.min(initial=0.0) < -1e-8 * scale:
        raise ValueError(f"matrix is not PSD: min eigenvalue {evals.min()}")
    return np.clip(evals, 0.0, None)


def schatten_norm_from_psd(square: np.ndarray, p: float) -> float:
    """(tau (square)^{p/2})^{1/p} with tau the normalized trace; p=inf gives the top."""
    evals = psd_eigenvalues(square)
    if np.isinf(p):
        return float(np.sqrt(evals.max(initial=0.0)))
    sv = np.sqrt(evals)
    return float(np.mean(sv ** p) ** (1.0 / p))


def lp_norm(f: AlgebraElement, p: float) -> float:
    """Noncommutative L_p norm (tau |f|^p)^(1/p) from singular values."""
    if p < 1:
        raise ValueError("p must be >= 1")
    mat = regular_rep_matrix(f)
    return schatten_norm_from_psd(mat.conj().T @ mat, p)


def fourier_multiplier(symbol: Union[Mapping[Element, complex], Callable[[Element], complex]],
                       f: AlgebraElement) -> AlgebraElement:
    """Coefficientwise multiplier lambda(g) -> m(g) lambda(g)."""
    out: dict[Element, complex] = {}
    for g, v in f.coeffs.items():
        if callable(symbol):
            m = symbol(g)
        else:
            if g not in symbol:
                raise KeyError(f"symbol not defined at {g!r}")
            m = symbol[g]
        out[g] = m * v
    return AlgebraElement(f.group, out)


def conditional_expectation_subgroup(f: AlgebraElement,
                                     subgroup: Iterable[int]) -> AlgebraElement:
    """Restrict Fourier coefficients to a verified subgroup."""
    if f.is_free:
        raise GroupError("subgroup expectation implemented for finite groups")
    members = set(int(s) for s in subgroup)
    if not f.group.is_subgroup(members):
        raise GroupError("given set is not a subgroup")
    return AlgebraElement(f.group, {g: v for g, v in f.coeffs.items() if g in members})


def moment_norm_free(f: AlgebraElement, p: int) -> float:
    """Even-moment norm tau((f* f)^{p/2})^{1/p} by exact word convolution."""
    if not f.is_free:
        raise GroupError("moment_norm_free expects an element over a free ball")
    if p not in (2, 4, 6, 8):
        raise ValueError("p must be one of 2, 4, 6, 8")
    h = f.adjoint().convolve(f)
    power = h
    for _ in range(p // 2 - 1):
        power = power.convolve(h)
    value = power.coeff(EMPTY_WORD)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
        raise ArithmeticError("trace moment has a nonreal value; convolution bug")
    return float(max(value.real, 0.0) ** (1.0 / p))


def lp_norm_free_estimate(f: AlgebraElement, p: float, extra_radius: int = 2) -> dict:
    """Ball-restricted estimate of the free L_p norm for non-even p.

    Builds the left-convolution matrix on the ball of radius R + extra_radius
    and evaluates the vacuum moment <delta_e, |f|^p delta_e>^(1/p) by
    functional calculus.  The value is flagged approximate and monotone in
    the radius; it is never used in assertions.
    """
    from .groups import build_free_ball

    ball: FreeGroupBall = f.group
    f_radius = max((len(w) for w in f.support()), default=0)
    big = build_free_ball(ball.k, ball.radius + max(extra_radius, f_radius))
    n = big.size
    mat = np.zeros((n, n), dtype=complex)
    for g, v in f.coeffs.items():
        for b, w in enumerate(big.words):
            gw = word_mul(g, w)
            i = big.index.get(gw)
            if i is not None:
                mat[i, b] += v
    square = mat.conj().T @ mat
    evals, vecs = np.linalg.eigh(0.5 * (square + square.conj().T))
    evals = np.clip(evals, 0.0, None)
    e_idx = big.index[EMPTY_WORD]
    weights = np.abs(vecs[e_idx, :]) ** 2
    moment = float(np.sum(weights * evals ** (p / 2.0)))
    return {"estimate": moment ** (1.0 / p), "flag": "approximate, monotone in R",
            "radius": big.radius}

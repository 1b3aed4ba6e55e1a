"""Grid/FFT calculus on R^n (n <= 3) for multiplier norms and Poisson analysis.

Conventions, recorded in every report: the forward transform uses the
kernel exp(-2 pi i <x, xi>), so (-Delta) has symbol 4 pi^2 |xi|^2 and
sqrt(-Delta) has symbol 2 pi |xi|.  Origin bins of |xi|^alpha multipliers
are set to zero, and weighted quadratures exclude one grid cell around the
origin (adding analytic small-ball terms where stated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, special

from .cocycles import fractional_kn


# ---------------------------------------------------------------------------
# the smooth dyadic profile
# ---------------------------------------------------------------------------

def _sigma(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        out = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    return out


def smooth_bump_eta(r) -> np.ndarray:
    """Radially decreasing C-infinity bump with chi_B1 <= eta <= chi_B2.

    eta(r) = s(2 - r) / (s(2 - r) + s(r - 1)) with s(t) = exp(-1/t) for
    t > 0; identically 1 on [0, 1] and 0 on [2, inf).
    """
    r = np.abs(np.asarray(r, dtype=float))
    a = _sigma(2.0 - r)
    b = _sigma(r - 1.0)
    with np.errstate(invalid="ignore"):
        out = np.where(a + b > 0, a / np.where(a + b > 0, a + b, 1.0), 0.0)
    return out


def dyadic_phi(r) -> np.ndarray:
    """phi(r) = eta(r) - eta(2r); supported on 1/2 <= |r| <= 2."""
    return smooth_bump_eta(r) - smooth_bump_eta(2.0 * np.asarray(r, dtype=float))


@dataclass(eq=False)
class PartitionOfUnity:
    """Dyadic windows phi_j(r) = phi(2^-j r) for j in [j_min, j_max]."""

    j_min: int
    j_max: int

    def __post_init__(self) -> None:
        if self.j_min > self.j_max:
            raise ValueError("empty dyadic range")

    def js(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def phi(self, j: int, r) -> np.ndarray:
        return dyadic_phi(np.asarray(r, dtype=float) / 2.0 ** j)

    def sample(self, radius: np.ndarray) -> dict[int, np.ndarray]:
        return {j: self.phi(j, radius) for j in self.js()}

    def telescoped(self, r) -> np.ndarray:
        """sum_j phi_j = eta(2^-j_max r) - eta(2^-(j_min-1) r), exactly."""
        r = np.asarray(r, dtype=float)
        return smooth_bump_eta(r / 2.0 ** self.j_max) \
            - smooth_bump_eta(r / 2.0 ** (self.j_min - 1))


# ---------------------------------------------------------------------------
# grid functions
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class GridFunction:
    """Complex samples on a centered uniform grid over [-box, box)^n.

    domain records whether the sample variable is 'space' or 'frequency';
    transform() moves to the dual grid (spacing 1/(2 box), half-width
    points/(4 box)) with the sign convention fixed by the domain.
    """

    n: int
    points: int
    box: float
    values: np.ndarray
    domain: str = "space"

    def __post_init__(self) -> None:
        if self.n not in (1, 2, 3):
            raise ValueError("dimension must be 1, 2 or 3")
        if self.points & (self.points - 1) or self.points < 4:
            raise ValueError("points per axis must be a power of two >= 4")
        if self.domain not in ("space", "frequency"):
            raise ValueError("domain must be 'space' or 'frequency'")
        expected = (self.points,) * self.n
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != expected:
            raise ValueError(f"values must have shape {expected}")

    # -- geometry -----------------------------------------------------------
    @property
    def spacing(self) -> float:
        return 2.0 * self.box / self.points

    @property
    def dual_spacing(self) -> float:
        return 1.0 / (2.0 * self.box)

    @property
    def dual_box(self) -> float:
        return self.points / (4.0 * self.box)

    def axis(self) -> np.ndarray:
        return (np.arange(self.points) - self.points // 2) * self.spacing

    def coords(self) -> tuple[np.ndarray, ...]:
        ax = self.axis()
        return np.meshgrid(*([ax] * self.n), indexing="ij")

    def radius(self) -> np.ndarray:
        cs = self.coords()
        return np.sqrt(sum(c ** 2 for c in cs))

    def origin_index(self) -> tuple[int, ...]:
        return (self.points // 2,) * self.n

    # -- calculus -------------------------------------------------------------
    def transform(self) -> "GridFunction":
        """Move to the dual grid; space -> frequency uses exp(-2 pi i x xi)."""
        shifted = np.fft.ifftshift(self.values)
        if self.domain == "space":
            out = np.fft.fftshift(np.fft.fftn(shifted)) * self.spacing ** self.n
            new_domain = "frequency"
        else:
            # sum_k V_k exp(+2 pi i x xi_k) dxi; ifftn carries 1/points^n
            out = np.fft.fftshift(np.fft.ifftn(shifted)) \
                * (self.spacing * self.points) ** self.n
            new_domain = "space"
        return GridFunction(n=self.n, points=self.points, box=self.dual_box,
                            values=out, domain=new_domain)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)
                             * self.spacing ** self.n))

    def lp_norm(self, p: float) -> float:
        if np.isinf(p):
            return float(np.abs(self.values).max())
        return float((np.sum(np.abs(self.values) ** p)
                      * self.spacing ** self.n) ** (1.0 / p))

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(n=self.n, points=self.points, box=self.box,
                            values=values, domain=self.domain)

    def copy(self) -> "GridFunction":
        return self.with_values(self.values.copy())


def grid_from_function(fn: Callable, n: int, points: int, box: float,
                       domain: str = "space") -> GridFunction:
    """Sample fn(*coords) on the grid."""
    g = GridFunction(n=n, points=points, box=box,
                     values=np.zeros((points,) * n, dtype=complex), domain=domain)
    g.values = np.asarray(fn(*g.coords()), dtype=complex)
    return g


def d_alpha(g: GridFunction, alpha: float, origin_tol: float = 1e-12) -> GridFunction:
    """Homogeneous differential multiplier |dual variable|^alpha.

    Transform, multiply by |.|^alpha with the origin bin set to zero, and
    transform back.  Negative alpha requires (numerically) mean-zero input.
    """
    t = g.transform()
    if alpha < 0:
        origin_mass = abs(t.values[t.origin_index()])
        scale = np.abs(t.values).max()
        if origin_mass > origin_tol * max(scale, 1e-300):
            raise ValueError("negative order needs mean-zero input "
                             "(divergent origin weight)")
    if alpha == 0:
        return g.copy()
    r = t.radius()
    with np.errstate(divide="ignore"):
        mult = np.where(r > 0, r ** alpha, 0.0)
    t.values = t.values * mult
    return t.transform()


# ---------------------------------------------------------------------------
# refined Sobolev band norms
# ---------------------------------------------------------------------------

def band_weight_psi(n: int, eps: float, radius: np.ndarray) -> np.ndarray:
    """sqrt(psi_eps) on the grid: psi_eps = k_n(eps)|xi|^(2 eps)."""
    kn = fractional_kn(n, eps)
    return np.sqrt(kn) * radius ** eps


def band_sobolev_norm(symbol_grid: GridFunction, eps: float, j: int,
                      partition: PartitionOfUnity) -> float:
    """L2 norm of D_(n/2+eps)(sqrt(psi_eps) phi_j m) for one dyadic band."""
    if symbol_grid.domain != "frequency":
        raise ValueError("symbol grids live in frequency variables")
    if eps <= 0:
        raise ValueError("eps must be positive")
    r = symbol_grid.radius()
    vals = band_weight_psi(symbol_grid.n, eps, r) \
        * partition.phi(j, r) * symbol_grid.values
    banded = symbol_grid.with_values(vals)
    return d_alpha(banded, symbol_grid.n / 2.0 + eps).l2_norm()


def band_leakage_flags(symbol_grid: GridFunction, j: int) -> dict:
    """Support checks: outer edge beyond the grid or inner edge unresolved."""
    outer = 2.0 ** (j + 1) > symbol_grid.box * (1 + 1e-12)
    inner = 2.0 ** (j - 1) < 2.0 * symbol_grid.spacing
    return {"outer_leakage": bool(outer), "under_resolved": bool(inner)}


def band_sobolev_report(symbol_grid: GridFunction, eps: float,
                        partition: PartitionOfUnity) -> dict:
    """Per-band table with the sup and a crude divergence flag."""
    per_j = {}
    flags = {}
    for j in partition.js():
        per_j[j] = band_sobolev_norm(symbol_grid, eps, j, partition)
        flags[j] = band_leakage_flags(symbol_grid, j)
    values = [per_j[j] for j in partition.js()]
    divergent = len(values) >= 4 and all(
        b > a * (1 + 1e-9) for a, b in zip(values[-4:], values[-3:])) \
        and values[-1] > 2.0 * min(v for v in values if v > 0)
    origin_value = symbol_grid.values[symbol_grid.origin_index()]
    return {"per_j": per_j, "sup": max(values), "leakage": flags,
            "divergence_flag": bool(divergent),
            "origin_symbol_value": complex(origin_value)}


def classical_sobolev_norm(symbol: Callable, eps: float, j: int,
                           grid_template: GridFunction) -> float:
    """Inhomogeneous Sobolev norm of phi_0 * m(2^j .) on the template grid."""
    r = grid_template.radius()
    cs = grid_template.coords()
    dilated = symbol(*[2.0 ** j * c for c in cs])
    vals = dyadic_phi(r) * dilated
    g = grid_template.with_values(np.asarray(vals, dtype=complex))
    hat = g.transform()
    weight = (1.0 + hat.radius() ** 2) ** ((grid_template.n / 2.0 + eps) / 2.0)
    return float(np.sqrt(np.sum(np.abs(weight * hat.values) ** 2)
                         * hat.spacing ** hat.n))


def sobolev_comparison_constant(n: int, eps: float) -> float:
    """Observed-scaling factor n pi^(n/4) / sqrt(Gamma(n/2)) / sqrt(eps)."""
    return n * math.pi ** (n / 4.0) / math.sqrt(special.gamma(n / 2.0)) \
        / math.sqrt(eps)


def window_sobolev_sup(symbol_grid: GridFunction, eps: float,
                       s_grid: Optional[np.ndarray] = None) -> dict:
    """sup over s of the analytic-window Sobolev norm with w(x) = x exp(-x).

    The window w(s |xi|^2) replaces the compactly supported bands; the sup
    runs over a log grid of s in [1e-4, 1e4] by default.
    """
    if symbol_grid.domain != "frequency":
        raise ValueError("symbol grids live in frequency variables")
    if s_grid is None:
        s_grid = np.geomspace(1e-4, 1e4, 81)
    r = symbol_grid.radius()
    weight = band_weight_psi(symbol_grid.n, eps, r)
    alpha = symbol_grid.n / 2.0 + eps
    values = {}
    for s in s_grid:
        x = s * r ** 2
        window = x * np.exp(-x)
        g = symbol_grid.with_values(weight * window * symbol_grid.values)
        values[float(s)] = d_alpha(g, alpha).l2_norm()
    s_best = max(values, key=values.get)
    return {"sup": values[s_best], "argmax_s": s_best, "per_s": values}


# ---------------------------------------------------------------------------
# the measure-symbol isometry
# ---------------------------------------------------------------------------

def _odd_singular_transform(eps: float, b: np.ndarray) -> np.ndarray:
    """T(b) = 2 int_0^inf x^(-2 eps) e^(-x^2) sin(b x) dx, 0 < eps < 1.

    T(b) = b Gamma(1 - eps) 1F1(1 - eps; 3/2; -b^2/4); reduces to
    pi erf(b/2) at eps = 1/2.  Large arguments use the Kummer asymptotics.
    """
    a = 1.0 - eps
    z = np.asarray(b, dtype=float) ** 2 / 4.0
    out = np.empty_like(z)
    small = z < 500.0
    out[small] = special.gamma(a) * b[small] \
        * special.hyp1f1(a, 1.5, -z[small])
    zl = z[~small]
    asym = special.gamma(1.5) / special.gamma(0.5 + eps) * zl ** (-a) \
        * (1.0 + a * (a - 0.5) / zl)
    out[~small] = special.gamma(a) * b[~small] * asym
    return out


def symbol_isometry_check(h_fn: Callable, eps: float, n: int = 1,
                          points: int = 2048, box: float = 10.0,
                          refine: int = 2, fd_step: float = 1e-5) -> dict:
    """Isometry between L2(mu_eps) and the weighted Sobolev norm of
    the induced symbol m_h(xi) = psi_eps(xi)^(-1/2) int h (e^(2 pi i xi x) - 1) dmu.

    mu_eps has density |x|^(-n-2 eps).  The density singularity is split
    off analytically: with c = h'(0), the odd part c sign(x)|x|^(-2 eps)
    e^(-x^2) transforms in closed form (a Kummer function), and only the
    regular remainder goes through grid quadrature per dual frequency.
    The Sobolev side is evaluated through the transform-side weight
    |y|^(n/2+eps), which the grid transform makes Parseval-exact.
    """
    if n != 1:
        raise ValueError("the isometry check is implemented on the line")
    fine = grid_from_function(h_fn, n=n, points=refine * points, box=box)
    x_f = fine.axis()
    with np.errstate(divide="ignore"):
        weight_f = np.where(x_f != 0, np.abs(x_f) ** (-n - 2 * eps), 0.0)
    h_f = fine.values.copy()
    h_f[fine.origin_index()] = 0.0

    mean = complex(np.sum(h_f * weight_f) * fine.spacing)
    l2_mu = math.sqrt(float(np.sum(np.abs(h_f) ** 2 * weight_f)) * fine.spacing)

    # singular split: h w = c sign(x)|x|^(-2 eps) e^(-x^2) + remainder
    deriv = (h_fn(np.array([fd_step]))[0] - h_fn(np.array([-fd_step]))[0]) \
        / (2.0 * fd_step)
    c = complex(deriv)
    with np.errstate(divide="ignore", invalid="ignore"):
        singular = np.where(
            x_f != 0,
            c * np.sign(x_f) * np.abs(x_f) ** (-2.0 * eps) * np.exp(-x_f ** 2),
            0.0)
    rem = h_f * weight_f - singular
    o = fine.origin_index()[0]
    rem[o] = 0.5 * (rem[o - 1] + rem[o + 1])  # remainder is continuous at 0
    rem_mean = complex(np.sum(rem) * fine.spacing)  # singular part is odd
    if abs(rem_mean) > 1e-6 * max(l2_mu, 1e-300):
        raise ValueError(f"h is not mean zero in L2(mu_eps): integral {rem_mean}")

    # remainder transform by fine quadrature; central bins = coarse dual grid
    fw = fine.with_values(rem).transform()
    lo = (refine - 1) * points // 2
    r_vals = fw.values[lo: lo + points] - rem_mean

    sym_grid = GridFunction(n=n, points=points, box=points / (4.0 * box),
                            values=r_vals, domain="frequency")
    xi = sym_grid.axis()
    s_xi = -1j * c * np.sign(xi) * _odd_singular_transform(
        eps, 2.0 * math.pi * np.abs(xi))
    g_vals = r_vals + s_xi

    xi_r = sym_grid.radius()
    with np.errstate(divide="ignore"):
        inv_sqrt_psi = np.where(xi_r > 0, 1.0 / band_weight_psi(
            n, eps, np.where(xi_r > 0, xi_r, 1.0)), 0.0)
    m_h = g_vals * inv_sqrt_psi

    # transform side: remainder through the grid transform, singular part exact
    rem_hat = sym_grid.transform()
    y = rem_hat.axis()
    with np.errstate(divide="ignore", invalid="ignore"):
        s_y = np.where(y != 0,
                       c * np.sign(y) * np.abs(y) ** (-2.0 * eps)
                       * np.exp(-y ** 2), 0.0)
    alpha = n / 2.0 + eps
    weighted = np.abs(y) ** alpha * (rem_hat.values + s_y)
    rhs = math.sqrt(float(np.sum(np.abs(weighted) ** 2)) * rem_hat.spacing)

    rel = abs(l2_mu - rhs) / max(l2_mu, 1e-300)
    return {"lhs": l2_mu, "rhs": rhs, "rel_error": rel,
            "mean_zero_defect": float(abs(rem_mean)),
            "symbol": sym_grid.with_values(m_h)}


# ---------------------------------------------------------------------------
# limiting log-borderline length and the weighted Besov norm
# ---------------------------------------------------------------------------

def _limiting_density(r: np.ndarray) -> np.ndarray:
    """u(r) = r^-n (chi_{r<=1} + (1 + log^2 r)^-1 chi_{r>1}) radial part, n folded in later."""
    return np.where(r <= 1.0, 1.0, 1.0 / (1.0 + np.log(r) ** 2))


def limiting_length(xi_norm: float, n: int = 1) -> float:
    """gamma(xi) = 2 int (1 - cos(2 pi <xi, x>)) u(x) dx for the log-borderline u."""
    if xi_norm == 0:
        return 0.0
    a = 2.0 * math.pi * abs(xi_norm)
    if n == 1:
        surface = 2.0

        def avg(rr):
            return np.cos(a * rr)
    elif n == 2:
        surface = 2.0 * math.pi

        def avg(rr):
            return special.j0(a * rr)
    elif n == 3:
        surface = 4.0 * math.pi

        def avg(rr):
            z = a * rr
            return np.sinc(z / math.pi)
    else:
        raise ValueError("n must be <= 3")

    def inner(rr):
        return (1.0 - avg(rr)) / rr

    head, _ = integrate.quad(inner, 0.0, min(1.0, 1.0 / a), limit=200)
    mid = 0.0
    if a > 1.0:
        mid, _ = integrate.quad(inner, 1.0 / a, 1.0, limit=500)

    def outer(rr):
        return (1.0 - avg(rr)) / (rr * (1.0 + np.log(rr) ** 2))

    r_cut = max(1.0, 60.0 / a)
    mid2, _ = integrate.quad(outer, 1.0, r_cut, limit=2000)
    # beyond r_cut the oscillating part is negligible against the log tail
    tail = math.pi / 2.0 - math.atan(math.log(r_cut))
    if n == 1:
        osc, _ = integrate.quad(lambda rr: 1.0 / (rr * (1.0 + math.log(rr) ** 2)),
                                r_cut, np.inf, weight="cos", wvar=a, limit=400)
    else:
        r_far = r_cut * 40.0
        osc, _ = integrate.quad(lambda rr: avg(rr) / (rr * (1.0 + np.log(rr) ** 2)),
                                r_cut, r_far, limit=4000)
    return 2.0 * surface * (head + mid + mid2 + tail - osc)


def limiting_length_band_constant(n: int = 1,
                                  radii: Optional[np.ndarray] = None) -> dict:
    """Observed two-sided constant for gamma against 1/(1+|log|xi||) on [1e-3, 1]."""
    if radii is None:
        radii = np.geomspace(1e-3, 1.0, 25)
    ratios = []
    for r in radii:
        target = 1.0 / (1.0 + abs(math.log(r)))
        ratios.append(limiting_length(float(r), n) / target)
    ratios = np.asarray(ratios)
    c_obs = float(max(ratios.max(), 1.0 / ratios.min()))
    return {"c_obs": c_obs, "ratios": ratios, "radii": radii}


def gamma_on_grid(grid: GridFunction, n: Optional[int] = None,
                  samples: int = 160) -> np.ndarray:
    """sqrt-ready gamma(|xi|) sampled by log interpolation of the quadrature."""
    if n is None:
        n = grid.n
    r = grid.radius()
    positive = r[r > 0]
    r_lo, r_hi = float(positive.min()), float(r.max())
    table_r = np.geomspace(r_lo, r_hi, samples)
    table_g = np.array([limiting_length(float(rr), n) for rr in table_r])
    out = np.zeros_like(r)
    mask = r > 0
    out[mask] = np.interp(np.log(r[mask]), np.log(table_r), table_g)
    return out


def log_weighted_besov_norm(symbol_grid: GridFunction, j: int,
                            partition: PartitionOfUnity,
                            gamma_values: Optional[np.ndarray] = None) -> dict:
    """(sum_k 2^(nk) w_k || phihat_k * (sqrt(gamma) phi_j m) ||_2^2)^(1/2).

    w_k = 1 for k <= 0 and k^2 for k > 0.  The band convolutions are
    evaluated through the transform side: || phihat_k * G ||_2 =
    || phi_k(|y|) Ghat(y) ||_2.
    """
    if symbol_grid.domain != "frequency":
        raise ValueError("symbol grids live in frequency variables")
    n = symbol_grid.n
    r = symbol_grid.radius()
    if gamma_values is None:
        gamma_values = gamma_on_grid(symbol_grid)
    g = symbol_grid.with_values(np.sqrt(gamma_values)
                                * partition.phi(j, r) * symbol_grid.values)
    hat = g.transform()
    y = hat.radius()
    k_lo = int(math.floor(math.log2(max(2.0 * hat.spacing, 1e-12))))
    k_hi = int(math.ceil(math.log2(hat.box))) + 1
    total = 0.0
    per_k = {}
    for k in range(k_lo, k_hi + 1):
        band = dyadic_phi(y / 2.0 ** k)
        mass = float(np.sum(np.abs(band * hat.values) ** 2)
                     * hat.spacing ** hat.n)
        w_k = 1.0 if k <= 0 else float(k) ** 2
        per_k[k] = mass
        total += 2.0 ** (n * k) * w_k * mass
    return {"norm": math.sqrt(total), "per_k": per_k,
            "k_range": (k_lo, k_hi)}


# ---------------------------------------------------------------------------
# Poisson semigroup and the carre du champs
# ---------------------------------------------------------------------------

def poisson_apply(f: GridFunction, t: float) -> GridFunction:
    """P_t with frequency multiplier exp(-2 pi t |xi|)."""
    if f.domain != "space":
        raise ValueError("poisson_apply expects space samples")
    hat = f.transform()
    hat.values *= np.exp(-2.0 * math.pi * t * hat.radius())
    return hat.transform()


def _poisson_multiplier_stack(f: GridFunction):
    hat = f.transform()
    r = hat.radius()
    cs = hat.coords()
    return hat, r, cs


def carre_poisson(f: GridFunction,
                  t_grid: Optional[np.ndarray] = None) -> dict:
    """Gradient form of the Poisson semigroup computed two ways.

    Route A integrates P_t |grad P_t f|^2 dt over a log grid in t (the
    gradient includes the time derivative).  Route B evaluates
    (A(conj f) f + conj(f) A f - A |f|^2) / 2 with A = sqrt(-Delta).
    """
    if f.domain != "space":
        raise ValueError("carre_poisson expects space samples")
    if t_grid is None:
        t_grid = np.geomspace(1e-4, 1e3, 160)
    hat, r, cs = _poisson_multiplier_stack(f)
    weights = np.empty_like(t_grid)
    weights[1:-1] = 0.5 * (t_grid[2:] - t_grid[:-2])
    weights[0] = 0.5 * (t_grid[1] - t_grid[0]) + t_grid[0]
    weights[-1] = 0.5 * (t_grid[-1] - t_grid[-2])

    acc = np.zeros_like(hat.values)
    two_pi = 2.0 * math.pi
    for t, w in zip(t_grid, weights):
        damp = np.exp(-two_pi * t * r)
        ph = hat.values * damp
        grad2 = np.zeros(f.values.shape, dtype=float)
        for c in cs:
            part = hat.with_values(ph * (2j * math.pi * c)).transform()
            grad2 += np.abs(part.values) ** 2
        dt_part = hat.with_values(ph * (-two_pi * r)).transform()
        grad2 += np.abs(dt_part.values) ** 2
        g2hat = f.with_values(grad2).transform()
        acc += w * damp * g2hat.values
    route_a = hat.with_values(acc).transform().values.real

    def sqrt_lap(vals: np.ndarray) -> np.ndarray:
        h = f.with_values(vals).transform()
        h.values *= two_pi * h.radius()
        return h.transform().values

    af = sqrt_lap(f.values)
    route_b = 0.5 * (np.conj(af) * f.values + np.conj(f.values) * af
                     - sqrt_lap(np.abs(f.values) ** 2)).real
    return {"route_a": f.with_values(route_a.astype(complex)),
            "route_b": f.with_values(route_b.astype(complex)),
            "t_grid": t_grid}


def _radial_profile(grid: GridFunction, values: np.ndarray,
                    r_lo: float, r_hi: float, bins: int = 24):
    r = grid.radius().ravel()
    v = values.ravel().real
    edges = np.geomspace(r_lo, r_hi, bins + 1)
    centers, means = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mask = (r >= a) & (r < b)
        if mask.sum() >= (1 if grid.n == 1 else 8):
            centers.append(math.sqrt(a * b))
            means.append(float(v[mask].mean()))
    return np.asarray(centers), np.asarray(means)


def meyer_poisson_report(n: int, p: float, f: GridFunction,
                         t_grid: Optional[np.ndarray] = None) -> dict:
    """Poisson gradient-form report: decay rate, annulus masses, finiteness.

    For the classical comparison to fail one needs the gradient form to
    decay exactly like |x|^(-(n+1)) while (-Delta)^(1/4) f stays p-integrable;
    the divergence flag is armed only for 1 < p <= 2n/(n+1).
    """
    routes = carre_poisson(f, t_grid)
    ga = routes["route_a"].values.real
    gb = routes["route_b"].values.real
    grid = routes["route_b"]
    r = grid.radius()

    interior = r <= grid.box / 4.0
    scale = np.abs(gb[interior]).max()
    route_gap = float(np.abs(ga[interior] - gb[interior]).max() / scale)

    band = (r > 4.0) & (r < grid.box / 2.0)
    decay_floor = float((gb[band] * r[band] ** (n + 1)).min())

    centers, means = _radial_profile(grid, gb, 8.0, 32.0)
    slope, intercept = np.polyfit(np.log(centers), np.log(np.abs(means)), 1)

    annuli = {}
    k = 2
    while 2.0 ** (k + 1) <= grid.box / 2.0 + 1e-9:
        mask = (r > 2.0 ** k) & (r <= 2.0 ** (k + 1))
        annuli[k] = float(np.sum(np.clip(gb[mask], 0.0, None) ** (p / 2.0))
                          * grid.spacing ** n)
        k += 1

    hat = f.transform()
    hat.values *= np.sqrt(2.0 * math.pi * hat.radius())
    quarter = hat.transform()
    quarter_norm = quarter.lp_norm(p)

    threshold = 2.0 * n / (n + 1.0)
    in_range = 1.0 < p <= threshold + 1e-12
    masses = list(annuli.values())
    non_decaying = len(masses) >= 3 and all(
        m >= 0.5 * masses[0] for m in masses)
    return {
        "route_gap_interior": route_gap,
        "decay_floor": decay_floor,
        "fit_slope": float(slope),
        "expected_slope": -(n + 1.0),
        "annulus_masses": annuli,
        "annuli_non_decaying": bool(non_decaying),
        "p": p, "threshold": threshold,
        "divergence_flag": bool(in_range and non_decaying and decay_floor > 0),
        "quarter_laplacian_norm": quarter_norm,
        "routes": routes,
        "convention": "minus-laplacian symbol 4 pi^2 |xi|^2",
    }


# ---------------------------------------------------------------------------
# builtin symbols
# ---------------------------------------------------------------------------

def builtin_symbol(name: str) -> Callable:
    """Symbols for the command line: one, sign, riesz-coordinate, log."""
    if name == "one":
        return lambda *cs: np.ones_like(cs[0], dtype=complex)
    if name == "sign":
        return lambda *cs: np.sign(cs[0]).astype(complex)
    if name == "riesz-coordinate":
        def riesz(*cs):
            rr = np.sqrt(sum(c ** 2 for c in cs))
            return np.where(rr > 0, cs[0] / np.where(rr > 0, rr, 1.0), 0.0) \
                .astype(complex)
        return riesz
    if name == "log":
        def logsym(*cs):
            rr = np.sqrt(sum(c ** 2 for c in cs))
            with np.errstate(divide="ignore"):
                return np.where(rr > 0, np.log(np.where(rr > 0, rr, 1.0)), 0.0) \
                    .astype(complex)
        return logsym
    raise ValueError(f"unknown builtin symbol {name!r}")

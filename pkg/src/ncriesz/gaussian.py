"""Monte Carlo realization of the gaussian crossed product.

Sampling is reproducible: each trial draws its own generator from the
seed sequence (base_seed, trial_index) and converts uniforms by Box-Muller,
so serial and parallel runs agree bit for bit.  Standard errors come from
a jackknife over trial blocks; acceptance gates use three sigmas since
p-th moments are heavy tailed.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .cocycles import Cocycle, PartialActionError
from .group_algebra import regular_rep_matrix, schatten_norm_from_psd
from .riesz import CrossedElement, expectation_col, expectation_row, rc_upper_bound

JACKKNIFE_BLOCK = 100


def thread_workers() -> int:
    """Worker cap from NCF_THREADS; defaults to serial execution."""
    try:
        return max(1, int(os.environ.get("NCF_THREADS", "1")))
    except ValueError:
        return 1


def _box_muller(uniform: np.ndarray) -> np.ndarray:
    """Standard normals from consecutive uniform pairs."""
    n = uniform.shape[0] // 2
    u1 = np.clip(uniform[:n], 1e-300, 1.0)
    u2 = uniform[n: 2 * n]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@dataclass(frozen=True, eq=False)
class GaussianSample:
    """One standard normal vector, reproducible from (seed, trial)."""

    seed: int
    trial: int
    dim: int
    values: np.ndarray

    @classmethod
    def draw(cls, seed: int, trial: int, dim: int) -> "GaussianSample":
        rng = np.random.Generator(np.random.Philox(
            key=np.random.SeedSequence([seed, trial]).generate_state(2, np.uint64)))
        gamma = _box_muller(rng.random(2 * dim))
        return cls(seed=seed, trial=trial, dim=dim, values=gamma)


def _alpha_stack(c: Cocycle) -> tuple:
    elems = list(c.elements())
    mats = []
    for g in elems:
        if not c.has_alpha(g):
            raise PartialActionError(
                "crossed-product realization needs a total cocycle action; "
                "free-ball cocycles are unsupported here")
        mats.append(c.alpha(g))
    return elems, np.stack(mats)


def realize_crossed(x: CrossedElement, gamma: GaussianSample) -> np.ndarray:
    """Matrix M[g, h] = <gamma, alpha_{g^-1} xi_{g h^-1}>, bilinear in xi."""
    c = x.cocycle
    if gamma.dim != c.dim:
        raise ValueError("sample dimension must match the cocycle dimension")
    elems, alphas = _alpha_stack(c)
    index = {g: i for i, g in enumerate(elems)}
    n = len(elems)
    # rotated[i] = alpha_g gamma with g = elems[i]; <gamma, alpha_{g^-1} v> = <alpha_g gamma, v>
    rotated = alphas @ gamma.values
    mat = np.zeros((n, n), dtype=complex)
    inv, mul = c.length._inv, c.length._mul
    for u, xi in x.coeffs.items():
        ui = inv(u)
        for g in elems:
            i = index[g]
            mat[i, index[mul(ui, g)]] += rotated[i] @ xi
    return mat


def _batched_moments(x: CrossedElement, p: float, trials: int, seed: int) -> np.ndarray:
    """Per-trial normalized trace moments (1/N) Tr |M|^p."""
    c = x.cocycle
    elems, alphas = _alpha_stack(c)
    index = {g: i for i, g in enumerate(elems)}
    n = len(elems)
    inv, mul = c.length._inv, c.length._mul

    gammas = np.empty((trials, c.dim))
    for t in range(trials):
        gammas[t] = GaussianSample.draw(seed, t, c.dim).values
    rotated = np.einsum("gij,tj->tgi", alphas, gammas)  # (T, N, d)

    mats = np.zeros((trials, n, n), dtype=complex)
    for u, xi in x.coeffs.items():
        ui = inv(u)
        cols = np.array([index[mul(ui, g)] for g in elems])
        vals = rotated @ xi  # (T, N)
        mats[:, np.arange(n), cols] += vals

    workers = thread_workers()

    def moment_of(batch: np.ndarray) -> np.ndarray:
        sv = np.linalg.svd(batch, compute_uv=False)
        return np.mean(sv ** p, axis=-1)

    if workers == 1 or trials < 2 * workers:
        return moment_of(mats)
    chunks = np.array_split(np.arange(trials), workers)
    out = np.empty(trials)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for idx, res in zip(chunks, pool.map(lambda i: moment_of(mats[i]), chunks)):
            out[idx] = res
    return out


def _jackknife_power(moments: np.ndarray, p: float) -> tuple[float, float]:
    """Estimate mean(m)^(1/p) with a block jackknife standard error."""
    total = moments.sum()
    count = len(moments)
    estimate = (total / count) ** (1.0 / p)
    nblocks = max(2, count // JACKKNIFE_BLOCK)
    blocks = np.array_split(moments, nblocks)
    leave_out = np.array([((total - b.sum()) / (count - len(b))) ** (1.0 / p)
                          for b in blocks])
    mean_lo = leave_out.mean()
    stderr = math.sqrt((nblocks - 1) / nblocks
                       * float(np.sum((leave_out - mean_lo) ** 2)))
    return float(estimate), float(stderr)


def gp_norm_mc(x: CrossedElement, p: float, trials: int, seed: int) -> dict:
    """Monte Carlo gaussian norm (E (1/N) Tr |M(gamma)|^p)^(1/p)."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if trials < 2:
        raise ValueError("need at least two trials")
    moments = _batched_moments(x, p, trials, seed)
    estimate, stderr = _jackknife_power(moments, p)
    return {"estimate": estimate, "stderr": stderr, "trials": trials, "seed": seed}


def rcp_norm(x: CrossedElement, p: float, refine: bool = False) -> float:
    """Conditional row/column norm; exact for p >= 2, strategy bound below 2."""
    if p >= 2:
        col = expectation_col(x, x)
        row = expectation_row(x, x)
        return max(schatten_norm_from_psd(regular_rep_matrix(col), p),
                   schatten_norm_from_psd(regular_rep_matrix(row), p))
    return rc_upper_bound(x, p, refine)["value"]


def khintchine_report(x: CrossedElement, p: float, trials: int, seed: int) -> dict:
    """Gaussian-to-conditional norm ratio with its three-sigma lower gate."""
    if p < 2:
        raise ValueError("the ratio gate is formulated for p >= 2")
    gp = gp_norm_mc(x, p, trials, seed)
    rc = rcp_norm(x, p)
    ratio = gp["estimate"] / rc if rc > 0 else math.inf
    stderr = gp["stderr"] / rc if rc > 0 else math.inf
    return {"ratio": ratio, "stderr": stderr, "gp": gp, "rcp": rc,
            "lower_gate_pass": bool(ratio >= 1.0 - 3.0 * stderr)}


def pisier_scalar_check(trials: int, seed: int) -> dict:
    """Monte Carlo E[sign(gamma) gamma] against sqrt(2/pi), E[sign] against 0,
    and the Dirichlet principal value integral against pi sign(x)."""
    gammas = np.empty(trials)
    for t in range(trials):
        gammas[t] = GaussianSample.draw(seed, t, 1).values[0]
    signed = np.sign(gammas) * gammas
    est = float(signed.mean())
    se = float(signed.std(ddof=1) / math.sqrt(trials))
    sign_est = float(np.sign(gammas).mean())
    sign_se = float(np.sign(gammas).std(ddof=1) / math.sqrt(trials))

    def dirichlet(xval: float) -> float:
        # p.v. integral of sin(x t)/t over R = 2 int_0^inf sin(|x| t)/t dt
        a = abs(xval)
        head, _ = integrate.quad(lambda t: math.sin(a * t) / t, 0, 1, limit=200)
        tail, _ = integrate.quad(lambda t: 1.0 / t, 1, np.inf,
                                 weight="sin", wvar=a, limit=400)
        return math.copysign(2.0 * (head + tail), xval)

    target = math.sqrt(2.0 / math.pi)
    return {
        "estimate": est, "stderr": se, "target": target,
        "pass": bool(abs(est - target) <= 3.0 * se),
        "sign_mean": sign_est, "sign_stderr": sign_se,
        "sign_pass": bool(abs(sign_est) <= 3.0 * sign_se),
        "dirichlet": {"+1": dirichlet(1.0), "-1": dirichlet(-1.0),
                      "target": math.pi,
                      "pass": bool(abs(dirichlet(1.0) - math.pi) < 1e-3
                                   and abs(dirichlet(-1.0) + math.pi) < 1e-3)},
        "trials": trials, "seed": seed,
    }

"""Mountain-pass geometry certification and critical-point search.

The search is a path-deformation method: a discretized path from the
origin to a negative-energy endpoint is deformed by moving its energy
maximum (and a small stencil of neighbors) along the negative Sobolev
gradient with Armijo backtracking, until the preconditioned residual at
the path maximum drops below tolerance.  Multiplicity is approximated
heuristically by multi-start over sign-structured seeds plus deflation
of duplicates; this does not certify min-max levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

import scipy.optimize

from .eigen import EigenPair, first_eigenpair
from .energy import dJ_loads, gradient_representative, j_value, residual_norm
from .exponents import ExponentConfig
from .grid import (FieldPair, Grid, GridFunction, ell_norm, norm_Linf, norm_W,
                   pair_norm_W)
from .model import ModelFunctions


class NoNegativeEnergyError(RuntimeError):
    """No scaling of the trial field reached negative energy."""


@dataclass
class SolverParams:
    tol: float = 1e-6
    max_iters: int = 10_000
    path_points: int = 33
    armijo_c: float = 1e-4
    nontrivial_floor: float = 1e-3
    dedup_tol: float = 1e-2
    reparam_every: int = 10
    polish_every: int = 250
    epsilon_reg: float = 1e-8


@dataclass
class GeometryCertificate:
    r0: float
    rho0: float
    endpoint: FieldPair | None
    endpoint_level: float
    samples: int
    min_sample: FieldPair | None
    validated: bool


@dataclass
class CriticalPointCandidate:
    fields: FieldPair
    level: float
    residual: float
    nontriviality: float
    linf_u: float
    linf_v: float
    iterations: int
    converged: bool
    collapsed: bool = False
    provenance: str = ""


@dataclass
class VerificationRecord:
    level: float
    residual: float
    cerami_residual: float
    nontriviality: float
    linf_u: float
    linf_v: float
    trivial: bool
    positive_level: bool


def _scale_until_negative(field0: FieldPair, mf: ModelFunctions,
                          target: float = -1.0, max_doublings: int = 60,
                          ) -> tuple[FieldPair, float]:
    tau = 1.0
    found = None
    for _ in range(max_doublings):
        trial = field0 * tau
        if j_value(trial, mf) < target:
            found = tau
            break
        tau *= 2.0
    if found is None:
        raise NoNegativeEnergyError(
            "no negative-energy endpoint found: geometry violated or grid too coarse")
    # bisect back toward the crossing so the endpoint is only moderately
    # below the target; a wildly overshot endpoint stretches the search
    # path and starves it of resolution near the ridge
    lo, hi = found / 2.0, found
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if j_value(field0 * mid, mf) < target:
            hi = mid
        else:
            lo = mid
    return field0 * hi, hi


def find_endpoint(cfg: ExponentConfig, grid: Grid, eigenpair: EigenPair,
                  mf: ModelFunctions | None = None) -> FieldPair:
    """Endpoint (tau phi_1, 0) with J < -1, tau doubled from 1."""
    mf = mf or ModelFunctions(cfg)
    base = FieldPair(eigenpair.phi1.copy(), GridFunction.zero(grid))
    endpoint, _ = _scale_until_negative(base, mf)
    return endpoint


def _random_mode_field(grid: Grid, rng: np.random.Generator,
                       n_modes: int = 4) -> GridFunction:
    coeffs = rng.standard_normal((n_modes,) * grid.dimension)
    vals = grid.zeros()
    if grid.dimension == 1:
        x = grid.node_coords()[:, 0]
        for k in range(n_modes):
            vals += coeffs[k] * np.sin((k + 1) * np.pi * x)
    else:
        coords = grid.node_coords()
        x = coords[:, 0].reshape(grid.node_shape)
        y = coords[:, 1].reshape(grid.node_shape)
        for kx in range(n_modes):
            for ky in range(n_modes):
                vals += coeffs[kx, ky] * np.sin((kx + 1) * np.pi * x) \
                    * np.sin((ky + 1) * np.pi * y)
    vals[grid.boundary_mask()] = 0.0
    return GridFunction(grid, vals)


def scale_to_ell(fp: FieldPair, cfg: ExponentConfig, r0: float,
                 rtol: float = 1e-10) -> FieldPair:
    """Rescale a nonzero pair so its ell-norm equals r0.

    ell is not homogeneous when s_i > 0, so the scale factor is found by
    bisection on the strictly increasing map tau -> ell(tau u, tau v).
    """
    base = ell_norm(fp, cfg)
    if base == 0.0:
        raise ValueError("cannot rescale the zero pair")
    lo, hi = 0.0, r0 / base
    while ell_norm(fp * hi, cfg) < r0:
        lo = hi
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = ell_norm(fp * mid, cfg)
        if abs(val - r0) <= rtol * r0:
            return fp * mid
        if val < r0:
            lo = mid
        else:
            hi = mid
    return fp * (0.5 * (lo + hi))


def certify_geometry(cfg: ExponentConfig, grid: Grid, r0: float,
                     n_samples: int = 256, seed: int = 0,
                     mf: ModelFunctions | None = None,
                     eigenpair: EigenPair | None = None) -> GeometryCertificate:
    """Sampled mountain-pass geometry check on the ell-sphere of radius r0.

    Samples seeded random Fourier-mode pairs rescaled to ell = r0 and
    records the minimum energy rho0.  The certificate validates when
    rho0 > 0 and an endpoint beyond the sphere with negative energy
    exists.  A non-positive rho0 returns a non-validated certificate
    rather than raising: the geometry may genuinely fail at that radius.
    """
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    mf = mf or ModelFunctions(cfg)
    rng = np.random.default_rng(seed)
    rho0 = math.inf
    min_sample = None
    for _ in range(n_samples):
        u = _random_mode_field(grid, rng)
        v = _random_mode_field(grid, rng)
        sample = scale_to_ell(FieldPair(u, v), cfg, r0)
        val = j_value(sample, mf)
        if val < rho0:
            rho0 = val
            min_sample = sample
    endpoint = None
    level = math.nan
    try:
        eig = eigenpair or first_eigenpair(cfg.p1, grid,
                                           epsilon_reg=mf.epsilon_reg)
        endpoint = find_endpoint(cfg, grid, eig, mf)
        level = j_value(endpoint, mf)
    except NoNegativeEnergyError:
        pass
    validated = (rho0 > 0.0 and endpoint is not None and level < 0.0
                 and ell_norm(endpoint, cfg) > r0)
    return GeometryCertificate(r0=r0, rho0=rho0, endpoint=endpoint,
                               endpoint_level=level, samples=n_samples,
                               min_sample=min_sample, validated=validated)


def _polish_candidate(fp: FieldPair, mf: ModelFunctions, tol: float,
                      max_iter: int = 200) -> FieldPair | None:
    """Newton-Krylov refinement of an approximate critical point.

    Solves for a zero of the Riesz gradient representative (the same
    preconditioned residual the deformation loop monitors) starting from
    the path maximum.  Returns the refined pair, or None when the solve
    fails or wanders off (trust region: the correction must stay within
    half the starting norm, so the polish cannot swap basins).
    """
    grid = fp.grid
    interior = ~grid.boundary_mask()
    m = int(interior.sum())

    def unpack(x: np.ndarray) -> FieldPair:
        u, v = grid.zeros(), grid.zeros()
        u[interior] = x[:m]
        v[interior] = x[m:]
        return FieldPair(GridFunction(grid, u), GridFunction(grid, v))

    def fun(x: np.ndarray) -> np.ndarray:
        pair = unpack(x)
        fu, fv = dJ_loads(pair, mf)
        return np.concatenate([grid.laplacian_solve(fu)[interior],
                               grid.laplacian_solve(fv)[interior]])

    x0 = np.concatenate([fp.u.values[interior], fp.v.values[interior]])
    try:
        sol = scipy.optimize.root(fun, x0, method="krylov",
                                  options={"fatol": tol * 1e-2,
                                           "maxiter": max_iter,
                                           "disp": False})
    except Exception:
        return None
    if not sol.success:
        return None
    start_norm = np.linalg.norm(x0)
    if np.linalg.norm(sol.x - x0) > 0.5 * max(start_norm, 1.0):
        return None
    return unpack(sol.x)


def _pair_dist_W(a: FieldPair, b: FieldPair, cfg: ExponentConfig) -> float:
    return pair_norm_W(a - b, cfg.p1, cfg.p2)


def _reparametrize(path: list[FieldPair], cfg: ExponentConfig) -> list[FieldPair]:
    """Redistribute path points uniformly by W-norm arc length."""
    npts = len(path)
    seg = [_pair_dist_W(path[k], path[k - 1], cfg) for k in range(1, npts)]
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total <= 0:
        return path
    targets = np.linspace(0.0, total, npts)
    out = [path[0]]
    for t in targets[1:-1]:
        j = int(np.searchsorted(cum, t, side="right")) - 1
        j = min(j, npts - 2)
        denom = cum[j + 1] - cum[j]
        w = 0.0 if denom == 0 else (t - cum[j]) / denom
        out.append(path[j] * (1.0 - w) + path[j + 1] * w)
    out.append(path[-1])
    return out


def mountain_pass_search(cfg: ExponentConfig, grid: Grid,
                         certificate: GeometryCertificate,
                         params: SolverParams | None = None,
                         mf: ModelFunctions | None = None,
                         initial_path: list[FieldPair] | None = None,
                         provenance: str = "mountain_pass",
                         ) -> CriticalPointCandidate:
    """Deform a path from the origin to the certificate endpoint.

    Each iteration locates the path energy maximum (ties broken at the
    lowest index), moves it along the negative gradient representative
    with Armijo backtracking (halving, c = params.armijo_c), drags the
    two stencil neighbors by half the accepted step (reverted when that
    raises their energy), and periodically re-parameterizes the path by
    arc length.  Stops when the residual at the path maximum is <= tol.
    """
    params = params or SolverParams()
    mf = mf or ModelFunctions(cfg, epsilon_reg=params.epsilon_reg)
    if not certificate.validated:
        raise ValueError("mountain_pass_search requires a validated certificate")
    endpoint = certificate.endpoint
    npts = params.path_points
    if initial_path is not None:
        path = [p.copy() for p in initial_path]
        npts = len(path)
    else:
        path = [endpoint * (k / (npts - 1)) for k in range(npts)]
    levels = [j_value(p, mf) for p in path]

    converged = False
    residual = math.inf
    alpha0 = 1.0
    it = 0
    # a drained path has its maximum below the certified sphere minimum
    # (the min-max level dominates rho0); such maxima are tunneling
    # artifacts, not saddle approximations
    level_floor = 0.5 * max(certificate.rho0, 0.0)
    for it in range(1, params.max_iters + 1):
        k_max = int(np.argmax(levels))  # argmax returns the lowest tied index
        if k_max in (0, npts - 1) or levels[k_max] < level_floor:
            # the discrete path has drained past the ridge; re-tension it
            # by arc length so interpolated points re-cross the ridge
            path = _reparametrize(path, cfg)
            levels = [j_value(p, mf) for p in path]
            k_max = int(np.argmax(levels))
            if k_max in (0, npts - 1) or levels[k_max] < level_floor:
                break  # still drained: report the best iterate, unconverged
        point = path[k_max]
        rep, residual = gradient_representative(point, mf)
        # the deformation only needs to localize the saddle; the polish
        # stage below pushes the residual the rest of the way to tol
        if residual <= max(params.tol, 1e-3):
            converged = residual <= params.tol
            break
        if params.polish_every and (it == 1 or it % params.polish_every == 0):
            # try to jump from the current path maximum straight to the
            # nearby saddle, starting with the initial ridge point; long
            # deformation runs let rounding noise break symmetries of the
            # starting path and drift to lower saddles
            refined = _polish_candidate(point, mf, params.tol)
            if refined is not None:
                r_res = residual_norm(refined, mf)
                r_level = j_value(refined, mf)
                if (r_res <= params.tol and r_level >= level_floor
                        and pair_norm_W(refined, cfg.p1, cfg.p2)
                        >= params.nontrivial_floor):
                    return CriticalPointCandidate(
                        fields=refined, level=r_level, residual=r_res,
                        nontriviality=pair_norm_W(refined, cfg.p1, cfg.p2),
                        linf_u=norm_Linf(refined.u),
                        linf_v=norm_Linf(refined.v),
                        iterations=it, converged=True,
                        provenance=provenance)
        res_sq = residual * residual
        # cap the move to the local path spacing so one step cannot jump
        # the ridge and drain the path
        rep_norm = pair_norm_W(rep, cfg.p1, cfg.p2)
        spacing = max(_pair_dist_W(path[k_max], path[k_max - 1], cfg),
                      _pair_dist_W(path[k_max + 1], path[k_max], cfg))
        step = min(alpha0, spacing / rep_norm) if rep_norm > 0 else alpha0
        accepted = False
        while step > 1e-18:
            trial = point - step * rep
            try:
                val = j_value(trial, mf)
            except ArithmeticError:
                step *= 0.5
                continue
            if val < levels[k_max] - params.armijo_c * step * res_sq:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # stalled below machine step: report best iterate
        path[k_max], levels[k_max] = trial, val
        alpha0 = min(step * 2.0, 1e3)
        for kn in (k_max - 1, k_max + 1):
            if 0 < kn < npts - 1:
                moved = path[kn] - (0.5 * step) * rep
                try:
                    mval = j_value(moved, mf)
                except ArithmeticError:
                    continue
                if mval < levels[kn]:
                    path[kn], levels[kn] = moved, mval
        if params.reparam_every and it % params.reparam_every == 0:
            path = _reparametrize(path, cfg)
            levels = [j_value(p, mf) for p in path]

    best = path[int(np.argmax(levels))]
    residual = residual_norm(best, mf)
    if residual > params.tol:
        refined = _polish_candidate(best, mf, params.tol)
        if refined is not None:
            r_res = residual_norm(refined, mf)
            if (r_res < residual
                    and pair_norm_W(refined, cfg.p1, cfg.p2)
                    >= params.nontrivial_floor):
                best, residual = refined, r_res
    converged = residual <= params.tol
    level = j_value(best, mf)
    nontrivial = pair_norm_W(best, cfg.p1, cfg.p2)
    collapsed = nontrivial < params.nontrivial_floor
    return CriticalPointCandidate(
        fields=best, level=level, residual=residual,
        nontriviality=nontrivial,
        linf_u=norm_Linf(best.u), linf_v=norm_Linf(best.v),
        iterations=it, converged=converged and not collapsed,
        collapsed=collapsed, provenance=provenance)


def _structured_start(cfg: ExponentConfig, grid: Grid, index: int,
                      rng: np.random.Generator) -> FieldPair:
    """Sign-structured starting field for the multi-start heuristic."""
    if grid.dimension == 1:
        x = grid.node_coords()[:, 0]
        vals = np.sin((index + 1) * np.pi * x)
    else:
        modes = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3), (3, 3)]
        kx, ky = modes[index % len(modes)]
        coords = grid.node_coords()
        x = coords[:, 0].reshape(grid.node_shape)
        y = coords[:, 1].reshape(grid.node_shape)
        vals = np.sin(kx * np.pi * x) * np.sin(ky * np.pi * y)
    vals = vals.reshape(grid.node_shape).copy()
    vals[grid.boundary_mask()] = 0.0
    u = GridFunction(grid, vals)
    return FieldPair(u, GridFunction.zero(grid))


def multiplicity_search(cfg: ExponentConfig, grid: Grid, count: int,
                        seeds: list[int] | None = None,
                        params: SolverParams | None = None,
                        mf: ModelFunctions | None = None,
                        r0: float = 0.1, n_geo_samples: int = 64,
                        ) -> list[CriticalPointCandidate]:
    """Multi-start mountain-pass search with deflation of duplicates.

    Runs ``count`` searches from sign-structured starting fields, drops
    non-converged or collapsed runs, deflates candidates equal up to the
    dedup tolerance or a global sign flip, and returns the survivors
    sorted by level.  May return fewer than ``count`` candidates.
    """
    params = params or SolverParams()
    mf = mf or ModelFunctions(cfg, epsilon_reg=params.epsilon_reg)
    seeds = seeds if seeds is not None else list(range(count))
    base_cert = certify_geometry(cfg, grid, r0, n_samples=n_geo_samples,
                                 seed=seeds[0] if seeds else 0, mf=mf)
    results: list[CriticalPointCandidate] = []
    for m in range(count):
        seed = seeds[m % len(seeds)]
        rng = np.random.default_rng(seed)
        start = _structured_start(cfg, grid, m, rng)
        try:
            endpoint, _ = _scale_until_negative(start, mf)
        except NoNegativeEnergyError:
            continue
        cert = replace(base_cert, endpoint=endpoint,
                       endpoint_level=j_value(endpoint, mf),
                       validated=base_cert.rho0 > 0.0
                       and ell_norm(endpoint, cfg) > base_cert.r0)
        if not cert.validated:
            continue
        cand = mountain_pass_search(cfg, grid, cert, params, mf,
                                    provenance=f"multi_start[{m}] seed={seed}")
        if not cand.converged or cand.collapsed:
            continue
        duplicate = False
        for kept in results:
            if (_pair_dist_W(cand.fields, kept.fields, cfg) < params.dedup_tol
                    or _pair_dist_W(cand.fields, -kept.fields, cfg)
                    < params.dedup_tol):
                duplicate = True
                break
        if not duplicate:
            results.append(cand)
    results.sort(key=lambda c: c.level)
    return results


def verify_candidate(cand: CriticalPointCandidate, cfg: ExponentConfig,
                     grid: Grid, mf: ModelFunctions | None = None,
                     nontrivial_floor: float = 1e-3) -> VerificationRecord:
    """Independent re-evaluation of a candidate's certificates.

    Recomputes level, residual, nontriviality and sup-norm bounds, and
    reports the Cerami-weighted residual  residual * (1 + |fields|_X)
    with the X-norm surrogate  |u|_W1 + |v|_W2 + |u|_inf + |v|_inf.
    """
    mf = mf or ModelFunctions(cfg)
    fp = cand.fields
    level = j_value(fp, mf)
    res = residual_norm(fp, mf)
    nontrivial = pair_norm_W(fp, cfg.p1, cfg.p2)
    linf_u, linf_v = norm_Linf(fp.u), norm_Linf(fp.v)
    x_norm = nontrivial + linf_u + linf_v
    return VerificationRecord(
        level=level, residual=res,
        cerami_residual=res * (1.0 + x_norm),
        nontriviality=nontrivial, linf_u=linf_u, linf_v=linf_v,
        trivial=nontrivial < nontrivial_floor,
        positive_level=level > 0.0)

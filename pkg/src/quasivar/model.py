"""Closed-form evaluators for the model coefficients and nonlinearity.

The model class is

    A(t, xi) = (1/p1) (1 + |t|^{s1 p1}) |xi|^{p1}
    B(t, xi) = (1/p2) (1 + |t|^{s2 p2}) |xi|^{p2}
    G(u, v)  = |u|^{q1}/q1 + |v|^{q2}/q2 + c* |u|^{g1} |v|^{g2}

with lowercase a, b the xi-gradients and A_t, B_t the t-partials.  All
evaluators are vectorized over numpy arrays; ``t`` has shape (...,) and
``xi`` shape (..., dim).

For p < 2 the factor |xi|^{p-2} is singular at xi = 0; evaluators replace
it by (|xi|^2 + eps^2)^{(p-2)/2} with eps = ``epsilon_reg``.  The energy
A itself is never regularized.  eps = 0 reproduces the exact model (the
limit value 0 is used at xi = 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exponents import ExponentConfig, compute_model_constants


def _sgn_pow(t: np.ndarray, e: float) -> np.ndarray:
    """|t|^e * sign(t) with the limit value 0 at t = 0 (for e > 0)."""
    t = np.asarray(t, dtype=float)
    return np.sign(t) * np.abs(t) ** e


def _abs_pow(t: np.ndarray, e: float) -> np.ndarray:
    """|t|^e with the convention 0^0 = 1."""
    return np.abs(np.asarray(t, dtype=float)) ** e


def _xi_factor(xi_sq: np.ndarray, p: float, eps: float) -> np.ndarray:
    """(|xi|^2 + eps^2)^{(p-2)/2}, with the exact limit 0*|xi|^{p-2} -> 0."""
    e = (p - 2.0) / 2.0
    if eps > 0 and p < 2:
        return (xi_sq + eps * eps) ** e
    if p >= 2:
        return xi_sq ** e
    # exact singular form: finite only through the product with xi
    with np.errstate(divide="ignore"):
        out = np.where(xi_sq > 0, xi_sq, 1.0) ** e
    return np.where(xi_sq > 0, out, 0.0)


@dataclass
class ModelFunctions:
    """Evaluator bundle for one exponent configuration.

    Satisfies the generic coefficient-evaluator contract (methods
    A_eval/a_eval/At_eval, the B-family, and G_eval/Gu_eval/Gv_eval), so
    user-supplied plugin bundles with the same methods are accepted
    everywhere a ModelFunctions is.
    """

    cfg: ExponentConfig
    epsilon_reg: float = 1e-8

    def __post_init__(self):
        if self.epsilon_reg < 0:
            raise ValueError("epsilon_reg must be >= 0")

    # -- A-family ------------------------------------------------------------

    def A_eval(self, t, xi) -> np.ndarray:
        cfg = self.cfg
        xi = np.asarray(xi, dtype=float)
        mag = np.sqrt(np.sum(xi * xi, axis=-1))
        return (1.0 / cfg.p1) * (1.0 + _abs_pow(t, cfg.s1 * cfg.p1)) * mag ** cfg.p1

    def a_eval(self, t, xi) -> np.ndarray:
        cfg = self.cfg
        xi = np.asarray(xi, dtype=float)
        xi_sq = np.sum(xi * xi, axis=-1)
        coef = (1.0 + _abs_pow(t, cfg.s1 * cfg.p1)) * _xi_factor(xi_sq, cfg.p1,
                                                                 self.epsilon_reg)
        return coef[..., None] * xi

    def At_eval(self, t, xi) -> np.ndarray:
        cfg = self.cfg
        xi = np.asarray(xi, dtype=float)
        mag = np.sqrt(np.sum(xi * xi, axis=-1))
        if cfg.s1 == 0:
            return np.zeros(np.broadcast_shapes(np.shape(t), mag.shape))
        return cfg.s1 * _sgn_pow(t, cfg.s1 * cfg.p1 - 1.0) * mag ** cfg.p1

    # -- B-family ------------------------------------------------------------

    def B_eval(self, t, xi) -> np.ndarray:
        cfg = self.cfg
        xi = np.asarray(xi, dtype=float)
        mag = np.sqrt(np.sum(xi * xi, axis=-1))
        return (1.0 / cfg.p2) * (1.0 + _abs_pow(t, cfg.s2 * cfg.p2)) * mag ** cfg.p2

    def b_eval(self, t, xi) -> np.ndarray:
        cfg = self.cfg
        xi = np.asarray(xi, dtype=float)
        xi_sq = np.sum(xi * xi, axis=-1)
        coef = (1.0 + _abs_pow(t, cfg.s2 * cfg.p2)) * _xi_factor(xi_sq, cfg.p2,
                                                                 self.epsilon_reg)
        return coef[..., None] * xi

    def Bt_eval(self, t, xi) -> np.ndarray:
        cfg = self.cfg
        xi = np.asarray(xi, dtype=float)
        mag = np.sqrt(np.sum(xi * xi, axis=-1))
        if cfg.s2 == 0:
            return np.zeros(np.broadcast_shapes(np.shape(t), mag.shape))
        return cfg.s2 * _sgn_pow(t, cfg.s2 * cfg.p2 - 1.0) * mag ** cfg.p2

    # -- nonlinearity ----------------------------------------------------------

    def G_eval(self, u, v) -> np.ndarray:
        cfg = self.cfg
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = np.abs(u) ** cfg.q1 / cfg.q1 + np.abs(v) ** cfg.q2 / cfg.q2
        if cfg.c_star > 0:
            out = out + cfg.c_star * np.abs(u) ** cfg.gamma1 * np.abs(v) ** cfg.gamma2
        return out

    def Gu_eval(self, u, v) -> np.ndarray:
        cfg = self.cfg
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = _sgn_pow(u, cfg.q1 - 1.0)
        if cfg.c_star > 0:
            out = out + (cfg.gamma1 * cfg.c_star * _sgn_pow(u, cfg.gamma1 - 1.0)
                         * np.abs(v) ** cfg.gamma2)
        return out

    def Gv_eval(self, u, v) -> np.ndarray:
        cfg = self.cfg
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = _sgn_pow(v, cfg.q2 - 1.0)
        if cfg.c_star > 0:
            out = out + (cfg.gamma2 * cfg.c_star * np.abs(u) ** cfg.gamma1
                         * _sgn_pow(v, cfg.gamma2 - 1.0))
        return out

    def exact(self) -> "ModelFunctions":
        """The unregularized (eps = 0) evaluator bundle."""
        return ModelFunctions(self.cfg, epsilon_reg=0.0)


@dataclass
class HypothesisSample:
    """Worst-case margin of one sampled pointwise inequality."""

    id: str
    min_margin: float
    argmin: tuple
    note: str = ""


@dataclass
class RatioTrend:
    """Sampled ratio extrema over a geometric sequence of annuli."""

    id: str
    radii: list[float]
    ratios: list[float]
    note: str = ""


@dataclass
class StructuralSampleReport:
    margins: list[HypothesisSample]
    trends: list[RatioTrend]
    samples: int
    seed: int

    def margin(self, rec_id: str) -> HypothesisSample:
        for m in self.margins:
            if m.id == rec_id:
                return m
        raise KeyError(rec_id)

    def trend(self, rec_id: str) -> RatioTrend:
        for t in self.trends:
            if t.id == rec_id:
                return t
        raise KeyError(rec_id)


def sample_structural_hypotheses(mf: ModelFunctions, n_samples: int = 100_000,
                                 seed: int = 0, box: float = 10.0,
                                 n_annuli: int = 8,
                                 lambda_min: float | None = None,
                                 ) -> StructuralSampleReport:
    """Sampled worst-case margins of the pointwise structural inequalities.

    Uses the exact (eps = 0) evaluators.  Margins are reported for the
    coercivity identity (h3), the derivative comparisons (h4), (h5), the
    growth lower bound (h7), and the superlinearity inequality (g3) on
    samples with |(u,v)| >= R.  The asymptotic conditions (g4), (g5) are
    reported as ratio trends over geometric annuli: (g4) the max of
    G/(|u|^{p1}+|v|^{p2}) over shrinking radii 2^-k, (g5) the min of
    G/(|u|^{1/th1}+|v|^{1/th2}) over growing radii 2^k.  ``lambda_min``
    (alpha_2 * min eigenvalue) is attached to the (g4) note if given.
    """
    cfg = mf.cfg
    ex = mf.exact()
    consts = compute_model_constants(cfg)
    rng = np.random.default_rng(seed)
    dim = 2 if cfg.N >= 2 else 1

    t = rng.uniform(-box, box, n_samples)
    xi = rng.uniform(-box, box, (n_samples, dim))

    def record(rec_id, margins, args, note=""):
        i = int(np.argmin(margins))
        return HypothesisSample(id=rec_id, min_margin=float(margins[i]),
                                argmin=tuple(np.atleast_1d(a)[i] for a in args),
                                note=note)

    margins = []
    # (h3): a.xi >= mu0 (1+|t|^{s p})|xi|^p  -- an equality for the model
    # class, so the margin is evaluated in factored form (a.xi written as
    # (1+|t|^{sp})|xi|^{p-2}|xi|^2 with the shared |xi|^{p-2} factor) to
    # keep the exact zero free of rounding noise.
    a = ex.a_eval(t, xi)
    axi = np.sum(a * xi, axis=-1)
    q = np.sum(xi * xi, axis=-1)
    axi_alg = (1.0 + _abs_pow(t, cfg.s1 * cfg.p1)) * _abs_pow(q, (cfg.p1 - 2.0) / 2.0) * q
    margins.append(record("h3", axi_alg - consts.mu0 * axi_alg, (t,),
                          note="model: equality, margin 0"))

    big = np.abs(t) ** 2 + np.sum(xi * xi, axis=-1) >= consts.R ** 2
    At = ex.At_eval(t, xi)
    # (h4): a.xi + A_t t >= mu1 a.xi  for |(t,xi)| >= R
    m4 = np.where(big, axi + At * t - consts.mu1 * axi, np.inf)
    margins.append(record("h4", m4, (t,)))
    # (h5): A - th1 a.xi - th1 A_t t >= mu2_1 a.xi  for |(t,xi)| >= R
    A = ex.A_eval(t, xi)
    m5 = np.where(big, A - cfg.theta1 * axi - cfg.theta1 * At * t
                  - consts.mu2_1 * axi, np.inf)
    margins.append(record("h5", m5, (t,)))
    # (h7): A >= alpha2 (1+|t|^{s p})|xi|^p with alpha2 = min{1/p1, 1/p2};
    # factored as (1/p1 - alpha2) * a.xi since A = (1/p1) a.xi exactly,
    # avoiding rounding noise in the alpha2 = 1/p1 equality case
    alpha2 = min(1.0 / cfg.p1, 1.0 / cfg.p2)
    margins.append(record("h7", (1.0 / cfg.p1 - alpha2) * axi_alg, (t,)))

    # (g3): 0 < G <= th1 Gu u + th2 Gv v on |(u,v)| >= R
    ang = rng.uniform(0.0, 2 * np.pi, n_samples)
    rad = consts.R * np.exp(rng.uniform(0.0, np.log(box), n_samples))
    u = rad * np.cos(ang)
    v = rad * np.sin(ang)
    G = ex.G_eval(u, v)
    # th1 Gu u + th2 Gv v - G collapses algebraically to a sum with the
    # nonnegative coefficients (th_i - 1/q_i) and (g1 th1 + g2 th2 - 1);
    # the factored form keeps the theta_i = 1/q_i equality case exactly 0.
    m_g3 = ((cfg.theta1 - 1.0 / cfg.q1) * _abs_pow(u, cfg.q1)
            + (cfg.theta2 - 1.0 / cfg.q2) * _abs_pow(v, cfg.q2)
            + (cfg.gamma1 * cfg.theta1 + cfg.gamma2 * cfg.theta2 - 1.0)
            * cfg.c_star * _abs_pow(u, cfg.gamma1) * _abs_pow(v, cfg.gamma2))
    margins.append(record("g3", m_g3, (u, v)))
    margins.append(record("g3_positive", G, (u, v), note="G > 0 off the origin"))

    # asymptotic ratio trends
    n_ring = max(256, n_samples // (4 * n_annuli))
    ang = rng.uniform(0.0, 2 * np.pi, n_ring)
    cu, sv = np.cos(ang), np.sin(ang)
    g4_note = "max G/(|u|^p1+|v|^p2) over shrinking annuli"
    if lambda_min is not None:
        g4_note += f"; threshold alpha2*min(lambda) = {alpha2 * lambda_min:.6g}"
    radii_small = [2.0 ** (-k) for k in range(n_annuli)]
    ratios_small = []
    for r in radii_small:
        u, v = r * cu, r * sv
        ratios_small.append(float(np.max(
            ex.G_eval(u, v) / (np.abs(u) ** cfg.p1 + np.abs(v) ** cfg.p2))))
    radii_large = [2.0 ** k for k in range(n_annuli)]
    ratios_large = []
    for r in radii_large:
        u, v = r * cu, r * sv
        ratios_large.append(float(np.min(
            ex.G_eval(u, v)
            / (np.abs(u) ** (1.0 / cfg.theta1) + np.abs(v) ** (1.0 / cfg.theta2)))))
    trends = [
        RatioTrend(id="g4", radii=radii_small, ratios=ratios_small, note=g4_note),
        RatioTrend(id="g5", radii=radii_large, ratios=ratios_large,
                   note="min G/(|u|^{1/th1}+|v|^{1/th2}) over growing annuli"),
    ]
    return StructuralSampleReport(margins=margins, trends=trends,
                                  samples=n_samples, seed=seed)

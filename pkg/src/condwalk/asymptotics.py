"""Closed-form right-hand sides of the conditioned limit theorems.

Each theorem is a pure arithmetic map from supplied ingredients (harmonic
values, kappa constants, target integrals, tilt data) to a positive
number; nothing is estimated here.  Branches are chosen explicitly by a
stable theorem identifier, never inferred from parameter magnitudes,
because neighbouring validity ranges overlap.

Identifier registry (small x means x = o(sqrt n); large x means
x of order sqrt n; tilde denotes division by sigma*sqrt(n)):

  AA001     E(f(x+S_n - y); surv) ~ 2V(x)/(sqrt(2pi) s^2 n) phi+(y~) If
  AA001D    interval version: Delta * AA001 density
  AA002.1   2V(x)/(sqrt(2pi) s^3 n^1.5) * integral f(t-y) V*(t) dt
  AA002.2   2 y V(x)/(sqrt(2pi) s^3 n^1.5) * If
  AA002bis  interval version of AA002.2
  MD-C      conditioned moderate deviations at y = s sqrt(q n log n)
  EXPF      exponential functional, AA002.1 with f = exp(-a t)
  BB001     psi(y~, x~)/(s sqrt n) * If
  BB001D    interval version of BB001
  MD-L      large-x moderate deviations
  BB002.1   2/(sqrt(2pi) s^2 n) phi+(x~) * integral f(t-y) V*(t) dt
  BB002.2   2 y/(sqrt(2pi) s^2 n) phi+(x~) * If
  BB002bis  interval version of BB002.2
  ICLT-S    P(endpoint scaled <= t, surv) ~ 2V(x)/(s sqrt(2 pi n)) Phi+(t)
  ICLT-L    integral of psi(., x~) on [0, t]; t = inf gives 2 Phi(x~) - 1
  TAU-S     P(exit = n) ~ 2 kappa V(x)/(sqrt(2pi) s^3 n^1.5)
  TAU-L     2 kappa/(sqrt(2pi) s^2 n) phi+(x~)
  TAU-S-TILT, TAU-L-TILT   same with kappa_lam, V_lam, s_lam and the
            factor exp(n Lambda + lam x)
  IGL1      drifted survival, small x
  IGL2      drifted survival, large x
  LLT       unconditioned local theorem main term
  MD        unconditioned moderate deviations
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import MissingIngredient, UnknownTheorem
from .special import levy_psi, norm_cdf, quad, rayleigh_cdf

SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Regime:
    kind: str  # "small_x" | "large_x"
    drift: object = None

    def __post_init__(self):
        if self.kind not in ("small_x", "large_x"):
            raise ValueError("regime kind must be small_x or large_x")


@dataclass(frozen=True)
class Prediction:
    value: float
    theorem_id: str
    ingredients: dict
    validity: str = ""


def _need(kwargs, *names):
    missing = [k for k in names if kwargs.get(k) is None]
    if missing:
        raise MissingIngredient(f"missing ingredient(s): {', '.join(missing)}")
    return [kwargs[k] for k in names]


def _rayleigh_density(s):
    return s * math.exp(-0.5 * s * s) if s >= 0 else 0.0


_VALIDITY = {
    "AA001": "x in [0, a_n sqrt(n)], y in [eta sqrt(n), sigma sqrt(q n log n)]",
    "AA001D": "as AA001; Delta in [Delta_0, n^(1/2-eps)]",
    "AA002.1": "x in [0, a_n sqrt(n)], y in [0, a]",
    "AA002.2": "x in [0, a_n sqrt(n)], y in [1/a_n, a_n sqrt(n)]",
    "AA002bis": "as AA002.2; Delta in [Delta_0, o(y)]",
    "MD-C": "y = sigma sqrt(q n log n) with small q; slow convergence",
    "EXPF": "x in [0, a_n sqrt(n)]",
    "BB001": "x ~ sqrt(n), y in [sqrt(n)/eta, sigma sqrt(q n log n)]",
    "BB001D": "as BB001; Delta in [Delta_0, n^(1/2-eps)]",
    "MD-L": "x = eta sigma sqrt(n), y = sigma sqrt(q n log n)",
    "BB002.1": "x ~ sqrt(n), y in [0, a]",
    "BB002.2": "x ~ sqrt(n), y in [1/a_n, a_n sqrt(n)]",
    "BB002bis": "as BB002.2; Delta in [Delta_0, o(y)]",
    "ICLT-S": "x = o(sqrt n)",
    "ICLT-L": "x of order sqrt(n) or larger",
    "TAU-S": "x in [0, a_n sqrt(n)]",
    "TAU-L": "x ~ sqrt(n)",
    "TAU-S-TILT": "drifted walk, x in [0, a_n sqrt(n)]",
    "TAU-L-TILT": "drifted walk, x ~ sqrt(n)",
    "IGL1": "negative drift, x in [0, a_n sqrt(n)]",
    "IGL2": "negative drift, x ~ sqrt(n)",
    "LLT": "narrow target around y",
    "MD": "y = sigma sqrt(q n log n)",
}


def _finish(theorem_id, value, ingredients):
    return Prediction(float(value), theorem_id, dict(ingredients),
                      _VALIDITY.get(theorem_id, ""))


def predict(theorem_id: str, **ing) -> Prediction:
    """Evaluate one theorem's right-hand side from named ingredients."""
    fn = _DISPATCH.get(theorem_id)
    if fn is None:
        raise UnknownTheorem(f"theorem id {theorem_id!r} not registered")
    return _finish(theorem_id, fn(ing), ing)


# -- kernels ---------------------------------------------------------------


def _aa001(ing):
    v_x, sigma, n, y, f_int = _need(ing, "v_x", "sigma", "n", "y", "f_int")
    yt = y / (sigma * math.sqrt(n))
    return 2.0 * v_x / (SQRT2PI * sigma ** 2 * n) * _rayleigh_density(yt) * f_int


def _aa001d(ing):
    delta, = _need(ing, "delta")
    return _aa001({**ing, "f_int": 1.0}) * delta


def _aa002_1(ing):
    v_x, sigma, n, fv = _need(ing, "v_x", "sigma", "n", "f_vstar_int")
    return 2.0 * v_x / (SQRT2PI * sigma ** 3 * n ** 1.5) * fv


def _aa002_2(ing):
    v_x, sigma, n, y, f_int = _need(ing, "v_x", "sigma", "n", "y", "f_int")
    return 2.0 * y * v_x / (SQRT2PI * sigma ** 3 * n ** 1.5) * f_int


def _aa002bis(ing):
    delta, = _need(ing, "delta")
    return _aa002_2({**ing, "f_int": 1.0}) * delta


def _md_c(ing):
    v_x, sigma, n, q, delta = _need(ing, "v_x", "sigma", "n", "q", "delta")
    return (2.0 * v_x / (SQRT2PI * sigma ** 2)
            * delta * math.sqrt(q * math.log(n)) / n ** (1.0 + q / 2.0))


def _expf(ing):
    ev, = _need(ing, "exp_vstar_int")
    return _aa002_1({**ing, "f_vstar_int": ev})


def _bb001(ing):
    sigma, n, x, y, f_int = _need(ing, "sigma", "n", "x", "y", "f_int")
    c = sigma * math.sqrt(n)
    return levy_psi(y / c, x / c) / c * f_int


def _bb001d(ing):
    delta, = _need(ing, "delta")
    return _bb001({**ing, "f_int": 1.0}) * delta


def _md_l(ing):
    sigma, n, x, q, delta = _need(ing, "sigma", "n", "x", "q", "delta")
    eta = x / (sigma * math.sqrt(n))
    expo = -0.5 * eta * eta + eta * math.sqrt(q * math.log(n))
    return delta * math.exp(expo) / (SQRT2PI * sigma * n ** ((1.0 + q) / 2.0))


def _bb002_1(ing):
    sigma, n, x, fv = _need(ing, "sigma", "n", "x", "f_vstar_int")
    xt = x / (sigma * math.sqrt(n))
    return 2.0 / (SQRT2PI * sigma ** 2 * n) * _rayleigh_density(xt) * fv


def _bb002_2(ing):
    sigma, n, x, y, f_int = _need(ing, "sigma", "n", "x", "y", "f_int")
    xt = x / (sigma * math.sqrt(n))
    return 2.0 * y / (SQRT2PI * sigma ** 2 * n) * _rayleigh_density(xt) * f_int


def _bb002bis(ing):
    delta, = _need(ing, "delta")
    return _bb002_2({**ing, "f_int": 1.0}) * delta


def _iclt_s(ing):
    v_x, sigma, n = _need(ing, "v_x", "sigma", "n")
    t = ing.get("t", math.inf)
    shape = 1.0 if t == math.inf else rayleigh_cdf(t)
    return 2.0 * v_x / (sigma * math.sqrt(2.0 * math.pi * n)) * shape


def _iclt_l(ing):
    sigma, n, x = _need(ing, "sigma", "n", "x")
    t = ing.get("t", math.inf)
    xt = x / (sigma * math.sqrt(n))
    if t == math.inf:
        return 2.0 * float(norm_cdf(xt)) - 1.0
    if t <= 0.0:
        return 0.0
    return quad(lambda s: levy_psi(s, xt), 0.0, t, tol=1e-11)


def _exit_prefactor(ing):
    """exp(n Lambda + lam x) and the tilted (sigma, v) replacements."""
    drift = ing.get("drift")
    if drift is None:
        return 1.0, ing.get("sigma"), ing.get("v_x")
    lam, lg, s_lam = (drift[k] for k in ("lam", "log_mgf", "tilted_sigma"))
    factor = math.exp(ing["n"] * lg + lam * ing.get("x", 0.0))
    return factor, s_lam, drift.get("v_lambda_x")


def _tau_s(ing):
    kappa, n = _need(ing, "kappa", "n")
    factor, sigma, v_x = _exit_prefactor(ing)
    if sigma is None or v_x is None:
        raise MissingIngredient("TAU-S needs sigma and v_x (tilted when drifted)")
    return 2.0 * kappa * v_x / (SQRT2PI * sigma ** 3 * n ** 1.5) * factor


def _tau_l(ing):
    kappa, n, x = _need(ing, "kappa", "n", "x")
    factor, sigma, _ = _exit_prefactor(ing)
    if sigma is None:
        raise MissingIngredient("TAU-L needs sigma (tilted when drifted)")
    xt = x / (sigma * math.sqrt(n))
    return 2.0 * kappa / (SQRT2PI * sigma ** 2 * n) * _rayleigh_density(xt) * factor


def _igl1(ing):
    n, = _need(ing, "n")
    drift = ing.get("drift")
    if drift is None:
        raise MissingIngredient("IGL1 needs drift ingredients")
    lam, lg, s_lam = (drift[k] for k in ("lam", "log_mgf", "tilted_sigma"))
    v_lam = drift.get("v_lambda_x")
    i_int = drift.get("i_integral")
    if v_lam is None or i_int is None:
        raise MissingIngredient("IGL1 needs v_lambda_x and i_integral")
    factor = math.exp(n * lg + lam * ing.get("x", 0.0))
    return 2.0 * v_lam * factor / (SQRT2PI * s_lam ** 3 * n ** 1.5) * i_int


def _igl2(ing):
    n, x = _need(ing, "n", "x")
    drift = ing.get("drift")
    if drift is None:
        raise MissingIngredient("IGL2 needs drift ingredients")
    lam, lg, s_lam = (drift[k] for k in ("lam", "log_mgf", "tilted_sigma"))
    i_int = drift.get("i_integral")
    if i_int is None:
        raise MissingIngredient("IGL2 needs i_integral")
    factor = math.exp(n * lg + lam * x)
    xt = x / (s_lam * math.sqrt(n))
    return (2.0 * factor / (SQRT2PI * s_lam ** 2 * n)
            * _rayleigh_density(xt) * i_int)


def _llt(ing):
    sigma, n, y, f_int = _need(ing, "sigma", "n", "y", "f_int")
    c = sigma * math.sqrt(n)
    return f_int * math.exp(-0.5 * (y / c) ** 2) / (SQRT2PI * c)


def _md(ing):
    sigma, n, q, delta = _need(ing, "sigma", "n", "q", "delta")
    return delta / (SQRT2PI * sigma * n ** ((1.0 + q) / 2.0))


_DISPATCH = {
    "AA001": _aa001, "AA001D": _aa001d, "AA002.1": _aa002_1,
    "AA002.2": _aa002_2, "AA002bis": _aa002bis, "MD-C": _md_c,
    "EXPF": _expf, "BB001": _bb001, "BB001D": _bb001d, "MD-L": _md_l,
    "BB002.1": _bb002_1, "BB002.2": _bb002_2, "BB002bis": _bb002bis,
    "ICLT-S": _iclt_s, "ICLT-L": _iclt_l, "TAU-S": _tau_s, "TAU-L": _tau_l,
    "TAU-S-TILT": _tau_s, "TAU-L-TILT": _tau_l, "IGL1": _igl1, "IGL2": _igl2,
    "LLT": _llt, "MD": _md,
}

THEOREM_IDS = tuple(sorted(_DISPATCH))


# ---------------------------------------------------------------------------
# Structured operations (thin wrappers over the registry)


def predict_target_expectation(regime: Regime, v_x, sigma, n, y, f_int,
                               f_vstar_int=None, x=None,
                               branch: str | None = None) -> Prediction:
    """Asymptotics of E(f(x + S_n - y); tau_x > n); branch per theorem id."""
    if branch is None:
        branch = "AA001" if regime.kind == "small_x" else "BB001"
    if branch in ("AA002.1", "BB002.1") and f_vstar_int is None:
        raise MissingIngredient(f"{branch} needs f_vstar_int")
    return predict(branch, v_x=v_x, sigma=sigma, n=n, y=y, f_int=f_int,
                   f_vstar_int=f_vstar_int, x=x)


def predict_interval_prob(regime: Regime, v_x, sigma, n, y, delta, x=None,
                          q=None, branch: str | None = None) -> Prediction:
    """Asymptotics of P(x + S_n in y + [0, Delta], tau_x > n)."""
    if branch is None:
        branch = "AA001D" if regime.kind == "small_x" else "BB001D"
    return predict(branch, v_x=v_x, sigma=sigma, n=n, y=y, delta=delta,
                   x=x, q=q)


def predict_survival(regime: Regime, v_x=None, sigma=None, n=None, x=None,
                     drift_ingredients: dict | None = None) -> Prediction:
    """P(tau_x > n): ICLT-S / ICLT-L when driftless, IGL1 / IGL2 otherwise."""
    if drift_ingredients is not None:
        branch = "IGL1" if regime.kind == "small_x" else "IGL2"
        drift = _normalize_drift(drift_ingredients)
        return predict(branch, n=n, x=x, drift=drift)
    branch = "ICLT-S" if regime.kind == "small_x" else "ICLT-L"
    return predict(branch, v_x=v_x, sigma=sigma, n=n, x=x)


def predict_exit_local(regime: Regime, kappa, v_x=None, sigma=None, n=None,
                       x=None, drift_ingredients: dict | None = None) -> Prediction:
    """P(tau_x = n) with the explicit constant kappa (kappa_lam if drifted)."""
    if kappa is None or kappa <= 0:
        raise MissingIngredient("kappa must be positive")
    if drift_ingredients is not None:
        branch = "TAU-S-TILT" if regime.kind == "small_x" else "TAU-L-TILT"
        drift = _normalize_drift(drift_ingredients)
        return predict(branch, kappa=kappa, n=n, x=x, drift=drift)
    branch = "TAU-S" if regime.kind == "small_x" else "TAU-L"
    return predict(branch, kappa=kappa, v_x=v_x, sigma=sigma, n=n, x=x)


def predict_integral_cdf(regime: Regime, v_x=None, sigma=None, n=None,
                         x=None, t=0.0) -> Prediction:
    """P((x+S_n)/(sigma sqrt n) <= t, tau_x > n)."""
    branch = "ICLT-S" if regime.kind == "small_x" else "ICLT-L"
    return predict(branch, v_x=v_x, sigma=sigma, n=n, x=x, t=t)


def predict_unconditioned_llt(f_int, sigma, n, y,
                              moderate_dev: dict | None = None) -> Prediction:
    """Main term of the plain local limit theorem, or its moderate-deviation
    closed form when (q, delta) are supplied."""
    if moderate_dev is not None:
        return predict("MD", sigma=sigma, n=n, q=moderate_dev["q"],
                       delta=moderate_dev["delta"])
    return predict("LLT", f_int=f_int, sigma=sigma, n=n, y=y)


def predict_exp_functional(v_x, sigma, n, a, exp_vstar_int) -> Prediction:
    """E(exp(-a (x + S_n)); tau_x > n) via the weighted dual-harmonic integral."""
    if a <= 0:
        raise MissingIngredient("decay rate a must be positive")
    return predict("EXPF", v_x=v_x, sigma=sigma, n=n, a=a,
                   exp_vstar_int=exp_vstar_int)


def _normalize_drift(d: dict) -> dict:
    out = {"lam": d.get("lam", d.get("lambda")),
           "log_mgf": d.get("log_mgf"),
           "tilted_sigma": d.get("tilted_sigma"),
           "v_lambda_x": d.get("v_lambda_x"),
           "i_integral": d.get("i_integral")}
    if out["lam"] is None or out["log_mgf"] is None or out["tilted_sigma"] is None:
        raise MissingIngredient("drift ingredients need lam, log_mgf, tilted_sigma")
    return out

"""Explicit constants and bound evaluators for 1-form spectral gap estimates.

Everything here is a pure function of its inputs.  The chain of quantities:

* ``sin_power_integral(n)`` and ``comparison_root(n, lam)`` come from the
  comparison-geometry Poincare inequality: ``C(lam)`` is the unique positive
  root of ``x * int_0^lam (cosh t + x sinh t)^(n-1) dt = int_0^pi sin^(n-1)``,
  wedged between an explicit exponential floor and the sine integral.
* ``sobolev_cs`` turns a Ricci lower bound and a diameter bound into the
  Sobolev constant ``C_s`` of ``|f|_{2n/(n-2)} <= |f|_2 + C_s |df|_2``.
* The Moser-iteration machinery (``moser_parameters``, ``moser_sup_bound``,
  ``moser_product_bound``, ``gradient_sup_bound``, ``eigenform_sup_bound``)
  bootstraps L^2 control of an eigenform and its covariant derivative to
  sup-norm control, with every exponent spelled out.
* ``epsilon_threshold`` is the dimensionless pinching threshold: when it is
  below 1/2 the first eigenform is nowhere vanishing, which is impossible on
  an even-dimensional manifold with nonzero Euler characteristic; inverting
  that contradiction yields ``oneform_gap_lower_bound``.

Dimensional constants that the estimates leave unspecified -- one depending
on the dimension, one on (dimension, exponent), and one more from the final
bootstrap -- are runtime inputs (:class:`AbstractConstants`), default 1.0,
so each formula is executable and the unknowns are explicit and sweepable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import comb

__all__ = [
    "GeometryBudget",
    "AbstractConstants",
    "MoserParameters",
    "sin_power_integral",
    "root_floor_coefficient",
    "comparison_root",
    "comparison_root_limit",
    "poincare_radius",
    "sobolev_s_pq",
    "sobolev_cs",
    "moser_sup_bound",
    "moser_parameters",
    "moser_product_bound",
    "moser_product_partial",
    "moser_product_converged",
    "gradient_sup_bound",
    "eigenform_sup_bound",
    "epsilon_threshold",
    "epsilon_branches",
    "gap_constant",
    "oneform_gap_lower_bound",
    "oneform_gap_branches",
    "li_yau_function_bound",
    "li_yau_predicate",
]

_QUAD_ABS = 1e-13
_QUAD_REL = 1e-13


@dataclass(frozen=True)
class GeometryBudget:
    """Hypothesis package feeding every bound.

    dim          ambient dimension m (for the gap bound m = 2n must be even)
    kappa        Ricci lower-bound parameter, Ric >= -(m-1)*kappa, kappa >= 0
    diameter     diameter upper bound D > 0
    p_exponent   integrability exponent p of the curvature norms
    riem_2p      normalized L^{2p} norm of the full curvature tensor
    ric_minus_p  normalized L^p norm of the negative part of Ricci
    """

    dim: int
    kappa: float
    diameter: float
    p_exponent: float
    riem_2p: float = 0.0
    ric_minus_p: float = 0.0

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dim}")
        if self.diameter <= 0:
            raise ValueError(f"diameter must be positive, got {self.diameter}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.riem_2p < 0 or self.ric_minus_p < 0:
            raise ValueError("curvature norms must be nonnegative")
        if self.p_exponent <= 0:
            raise ValueError("p_exponent must be positive")


@dataclass(frozen=True)
class AbstractConstants:
    """The three dimensional constants the estimates never pin down.

    c_n    constant depending on the dimension only (sup-norm bootstrap)
    c_np   constant depending on (dimension, exponent) (gradient bound)
    c0_np  constant from the final bootstrap of the gap bound

    All default to 1.0; sweeping them shows how each bound scales.
    """

    c_n: float = 1.0
    c_np: float = 1.0
    c0_np: float = 1.0

    def __post_init__(self) -> None:
        for name in ("c_n", "c_np", "c0_np"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class MoserParameters:
    """Derived quantities of the iteration ladder for one (budget, lambda)."""

    b_value: float      # lambda + |Ric^-|_p + |Riem|_2p
    t_value: float      # 4 C_s sqrt(B) sqrt(1 + B D^2)
    alpha: float        # 2pn / (2p - n)
    beta: float         # 2pn / (2p - n + pn)
    gamma: float        # n(p-1) / (p(n-2)), > 1 whenever 2p > n and n > 2
    gamma0: float       # 2np / (2p - n)
    sobolev_cs: float


@lru_cache(maxsize=None)
def sin_power_integral(n: int) -> float:
    """Integral of sin^(n-1) t over [0, pi], by adaptive quadrature.

    Closed forms exist (sqrt(pi) Gamma(n/2) / Gamma((n+1)/2)) and serve as
    the test oracle; the quadrature keeps this module self-contained.
    """
    if n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}")
    val, err = quad(lambda t: math.sin(t) ** (n - 1), 0.0, math.pi,
                    epsabs=1e-14, epsrel=_QUAD_REL)
    if err > 1e-12:
        raise RuntimeError(f"quadrature error estimate {err} too large for n={n}")
    return val


def root_floor_coefficient(n: int) -> float:
    """Coefficient a(n) in the exponential floor of the comparison root.

    With w = sin_power_integral(n), the floor is
    ``lam * comparison_root(n, lam) >= a(n) * exp(-(n-1) lam)`` where
    ``a(n) = w (1 + w)^(1-n)``.  Always 0 < a(n) < w.
    """
    w = sin_power_integral(n)
    return w * (1.0 + w) ** (1 - n)


def _cosh_sinh_moments(n: int, lam: float) -> np.ndarray:
    """Moments m_k = int_0^lam cosh^(n-1-k) t sinh^k t dt for k = 0..n-1."""
    moments = np.empty(n)
    for k in range(n):
        val, _ = quad(lambda t, k=k: math.cosh(t) ** (n - 1 - k) * math.sinh(t) ** k,
                      0.0, lam, epsabs=1e-300, epsrel=_QUAD_REL)
        moments[k] = val
    return moments


def comparison_root(n: int, lam: float) -> float:
    """Unique positive root C of ``C * int_0^lam (cosh t + C sinh t)^(n-1) dt = w(n)``.

    The left side is strictly increasing in C, so the root is unique.  For
    integer n the binomial expansion turns the equation into a polynomial
    ``sum_k binom(n-1, k) m_k C^(k+1) = w(n)`` with positive coefficients,
    which brentq solves inside the bracket [0, w(n)/m_0].  The returned root
    is certified against the direct quadrature definition to a relative
    residual of 1e-10.
    """
    if n < 2:
        raise ValueError(f"n must be an integer >= 2, got {n}")
    if lam <= 0:
        raise ValueError(f"lam must be positive (integral degenerates), got {lam}")
    w = sin_power_integral(n)
    moments = _cosh_sinh_moments(n, lam)
    coeffs = np.array([comb(n - 1, k, exact=True) * moments[k] for k in range(n)])

    def poly(x: float) -> float:
        # F(x) - w with F(x) = sum coeffs[k] x^(k+1), Horner from the top
        acc = 0.0
        for c in coeffs[::-1]:
            acc = acc * x + c
        return acc * x - w

    hi = w / moments[0]  # F(hi) >= hi * m_0 * (integrand >= cosh^(n-1)) >= w
    root = brentq(poly, 0.0, hi * (1.0 + 1e-12),
                  xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)

    direct, _ = quad(lambda t: (math.cosh(t) + root * math.sinh(t)) ** (n - 1),
                     0.0, lam, epsabs=1e-300, epsrel=_QUAD_REL)
    residual = abs(root * direct - w)
    if residual >= 1e-10 * w:
        raise RuntimeError(
            f"root residual {residual:.3e} exceeds 1e-10*w for n={n}, lam={lam}")
    return float(root)


def comparison_root_limit(n: int) -> float:
    """Limiting value of lam * comparison_root(n, lam) as lam -> 0+.

    Substituting x = c/lam and t = lam*u in the root equation gives
    ``((1+c)^n - 1)/n = w(n)``, i.e. ``c = (n w(n) + 1)^(1/n) - 1``
    (sqrt(5)-1 for n = 2).  Note this is strictly below w(n): the naive
    ``F(x) ~ x lam`` reading drops the x*sinh term, which contributes at
    the same order because the root scales like 1/lam.
    """
    w = sin_power_integral(n)
    return (n * w + 1.0) ** (1.0 / n) - 1.0


def poincare_radius(diameter: float, n: int, lam: float) -> float:
    """R(lam) = D / (lam * C(lam)), the radius entering the Poincare constant."""
    if diameter <= 0:
        raise ValueError(f"diameter must be positive, got {diameter}")
    return diameter / (lam * comparison_root(n, lam))


def sobolev_s_pq(budget: GeometryBudget, vol_ratio: float,
                 sphere_sobolev: float, q: float) -> float:
    """Poincare constant S_{p,q} = vol_ratio^(1/p - 1/q) * R(lam) * Sigma.

    ``vol_ratio`` is Vol(g)/Vol(S^n) and ``sphere_sobolev`` the Sobolev
    constant Sigma(n, p, q) of the round unit n-sphere; neither is computed
    here.  lam = sqrt(kappa D^2); at kappa = 0 the limiting value
    :func:`comparison_root_limit` keeps R continuous in kappa.
    """
    n = budget.dim
    p = budget.p_exponent
    if q < 1 or p < 1 or not math.isfinite(p):
        raise ValueError(f"need 1 <= q and 1 <= p < inf, got p={p}, q={q}")
    if q < n and p > n * q / (n - q):
        raise ValueError(f"p={p} exceeds the embedding limit nq/(n-q)={n*q/(n-q)}")
    if vol_ratio <= 0 or sphere_sobolev <= 0:
        raise ValueError("vol_ratio and sphere_sobolev must be positive")
    lam = math.sqrt(budget.kappa * budget.diameter ** 2)
    if lam == 0.0:
        radius = budget.diameter / comparison_root_limit(n)
    else:
        radius = poincare_radius(budget.diameter, n, lam)
    return vol_ratio ** (1.0 / p - 1.0 / q) * radius * sphere_sobolev


def sobolev_cs(budget: GeometryBudget, consts: AbstractConstants = AbstractConstants()) -> float:
    """Sobolev constant C_s = c_n * D * exp((m-1) sqrt(kappa D^2)), m = dim.

    The exponent 2m/(m-2) in the underlying inequality degenerates at m = 2,
    so dimension >= 3 is required.
    """
    m = budget.dim
    if m <= 2:
        raise ValueError(f"Sobolev exponent degenerates at dim <= 2, got {m}")
    lam = math.sqrt(budget.kappa * budget.diameter ** 2)
    return consts.c_n * budget.diameter * math.exp((m - 1) * lam)


def moser_sup_bound(c: float, cs: float, l2_norm: float,
                    consts: AbstractConstants = AbstractConstants()) -> float:
    """Sup bound exp(c_n sqrt(c) C_s) * |u|_2 for subsolutions of u du <= c u^2."""
    if c < 0 or cs < 0:
        raise ValueError("c and cs must be nonnegative")
    if l2_norm < 0:
        raise ValueError("l2_norm must be nonnegative")
    return math.exp(consts.c_n * math.sqrt(c) * cs) * l2_norm


def moser_parameters(budget: GeometryBudget, lam: float, cs: float) -> MoserParameters:
    """Fill the iteration ladder for eigenvalue lam and Sobolev constant cs.

    Uses the ambient dimension n = budget.dim throughout; requires n > 2 and
    2p > n so that gamma = n(p-1)/(p(n-2)) exceeds 1 and the product in
    :func:`moser_product_bound` converges.
    """
    n = budget.dim
    p = budget.p_exponent
    if n <= 2:
        raise ValueError(f"iteration ladder needs dim > 2, got {n}")
    if 2 * p <= n:
        raise ValueError(f"iteration ladder needs 2p > dim, got p={p}, dim={n}")
    if lam <= 0:
        raise ValueError(f"eigenvalue must be positive, got {lam}")
    b = lam + budget.ric_minus_p + budget.riem_2p
    t = 4.0 * cs * math.sqrt(b) * math.sqrt(1.0 + b * budget.diameter ** 2)
    alpha = 2.0 * p * n / (2.0 * p - n)
    beta = 2.0 * p * n / (2.0 * p - n + p * n)
    gamma = n * (p - 1.0) / (p * (n - 2.0))
    gamma0 = 2.0 * n * p / (2.0 * p - n)
    return MoserParameters(b_value=b, t_value=t, alpha=alpha, beta=beta,
                           gamma=gamma, gamma0=gamma0, sobolev_cs=cs)


def moser_product_bound(t: float, gamma: float) -> float:
    """Closed-form majorant exp(2 sqrt(gamma)/(gamma-1)) (1+sqrt(t))^(2/(gamma-1)).

    Dominates the converged infinite product prod_i (1 + t gamma^(i+1))^(1/gamma^(i+1)).
    """
    if gamma <= 1:
        raise ValueError(f"gamma must exceed 1 (product diverges), got {gamma}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    g = gamma - 1.0
    return math.exp(2.0 * math.sqrt(gamma) / g) * (1.0 + math.sqrt(t)) ** (2.0 / g)


def _log_product_term(t: float, gamma: float, i: int) -> float:
    """log(1 + t gamma^(i+1)) / gamma^(i+1), overflow-safe."""
    g = (i + 1) * math.log(gamma)
    if g > 300.0:  # t*gamma^(i+1) astronomically large: log1p(x) ~ log t + g
        return (math.log(t) + g) * math.exp(-g) if t > 0 else 0.0
    x = math.exp(g)
    return math.log1p(t * x) / x


def moser_product_partial(t: float, gamma: float, n_terms: int) -> float:
    """Partial product prod_{i=0}^{n_terms-1} (1 + t gamma^(i+1))^(1/gamma^(i+1))."""
    if gamma <= 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    if n_terms < 1:
        raise ValueError(f"n_terms must be >= 1, got {n_terms}")
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    log_p = sum(_log_product_term(t, gamma, i) for i in range(n_terms))
    return math.exp(log_p)


def _product_tail_bound(t: float, gamma: float, n_terms: int) -> float:
    """Upper bound for the dropped log-tail sum_{i>=n_terms} log1p(t g^(i+1))/g^(i+1).

    Uses log(1 + t x) <= log1p(t) + log(x) for x >= 1, then geometric sums.
    """
    r = 1.0 / gamma
    j0 = n_terms + 1  # tail over j = i+1 >= n_terms+1
    geo = r ** j0 / (1.0 - r)
    lin = r ** j0 * (j0 * (1.0 - r) + r) / (1.0 - r) ** 2  # sum j r^j, j >= j0
    return math.log1p(t) * geo + math.log(gamma) * lin


def moser_product_converged(t: float, gamma: float, tail_tol: float = 1e-12) -> tuple[float, int]:
    """Partial product with enough terms that the log-tail is below tail_tol.

    Returns (value, n_terms).  The tail estimate is a rigorous upper bound,
    so the returned value is the infinite product to within exp(tail_tol).
    """
    if gamma <= 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    n_terms = 4
    while _product_tail_bound(t, gamma, n_terms) >= tail_tol:
        n_terms *= 2
        if n_terms > 2 ** 24:
            raise RuntimeError("product tail does not fall below tolerance")
    return moser_product_partial(t, gamma, n_terms), n_terms


def gradient_sup_bound(params: MoserParameters, lam: float, diameter: float,
                       l2_norm: float,
                       consts: AbstractConstants = AbstractConstants()) -> float:
    """Two-branch sup bound for the covariant derivative of an eigenform.

    D |grad theta|_inf <= min{ c_np (1+sqrt(t))^alpha sqrt(lam D^2) |theta|_2,
                               c_np (1+sqrt(t))^beta (sqrt(lam D^2))^(beta/alpha)
                                   exp(c_np sqrt(lam) C_s) |theta|_2 }
    and the function returns that min divided by D.
    """
    if lam < 0:
        raise ValueError(f"eigenvalue must be nonnegative, got {lam}")
    if l2_norm < 0:
        raise ValueError("l2_norm must be nonnegative")
    b1, b2 = _gradient_branches(params, lam, diameter, consts)
    return min(b1, b2) * l2_norm / diameter


def _gradient_branches(params: MoserParameters, lam: float, diameter: float,
                       consts: AbstractConstants) -> tuple[float, float]:
    x = math.sqrt(lam) * diameter
    base = 1.0 + math.sqrt(params.t_value)
    b1 = consts.c_np * base ** params.alpha * x
    b2 = (consts.c_np * base ** params.beta
          * x ** (params.beta / params.alpha)
          * math.exp(consts.c_np * math.sqrt(lam) * params.sobolev_cs))
    return b1, b2


def eigenform_sup_bound(lam: float, cs: float, l2_norm: float,
                        consts: AbstractConstants = AbstractConstants()) -> float:
    """Sup bound exp(c_n sqrt(lam) C_s) * |theta|_2 for a rough-Laplacian eigenform."""
    if lam < 0 or cs < 0 or l2_norm < 0:
        raise ValueError("lam, cs and l2_norm must be nonnegative")
    return math.exp(consts.c_n * math.sqrt(lam) * cs) * l2_norm


def epsilon_branches(budget: GeometryBudget, lam: float, cs: float,
                     consts: AbstractConstants = AbstractConstants()) -> tuple[float, float]:
    """Both branches of the dimensionless pinching threshold (see epsilon_threshold)."""
    if lam < 0:
        raise ValueError(f"eigenvalue must be nonnegative, got {lam}")
    if lam == 0.0:
        return 0.0, 0.0
    params = moser_parameters(budget, lam, cs)
    return _gradient_branches(params, lam, budget.diameter, consts)


def epsilon_threshold(budget: GeometryBudget, lam: float, cs: float,
                      consts: AbstractConstants = AbstractConstants()) -> float:
    """Dimensionless pinching threshold: D * gradient sup bound at unit L^2 norm.

    When this is below 1/2, the eigenform's pointwise norm is pinched
    (inf/sup >= 1 - 2 eps) and in particular nowhere zero.  Both branches
    vanish with sqrt(lam D^2), so eps -> 0 as lam -> 0.
    """
    b1, b2 = epsilon_branches(budget, lam, cs, consts)
    return min(b1, b2)


def gap_constant(n_half: float, p: float, delta_branch: str = "main",
                 consts: AbstractConstants = AbstractConstants()) -> float:
    """Combined constant of the gap bound.

    Equals (4 c_np)^(-1/delta) / c0_np * exp(-c_n/delta) with
    delta = 2pn/(p-n) on the main branch and 2pn/(p-n+pn) on the secondary
    branch (n = half-dimension).  Decreasing in every abstract constant.
    """
    if p <= n_half:
        raise ValueError(f"need p > n (half-dimension), got p={p}, n={n_half}")
    if delta_branch == "main":
        delta = 2.0 * p * n_half / (p - n_half)
    elif delta_branch == "secondary":
        delta = 2.0 * p * n_half / (p - n_half + p * n_half)
    else:
        raise ValueError(f"delta_branch must be 'main' or 'secondary', got {delta_branch!r}")
    return ((4.0 * consts.c_np) ** (-1.0 / delta)
            / consts.c0_np * math.exp(-consts.c_n / delta))


def oneform_gap_branches(budget: GeometryBudget,
                         consts: AbstractConstants = AbstractConstants(),
                         delta_branch: str = "main",
                         corollary_variant: bool = False) -> tuple[float, float]:
    """The two branches whose min lower-bounds sqrt(lambda_1^(1)) * D.

    branch1 = (Ct/(1+sqrt(K D^2)) * exp(-(2n-1) sqrt(kappa D^2)))^(2pn/(p-n))
    branch2 = exp(-(2n-1) sqrt(kappa D^2))            (displayed form)
            = Ct * exp(-(2n-1) sqrt(kappa D^2))       (corollary variant)

    with m = 2n the ambient dimension, K the L^{2p} curvature norm and
    Ct = gap_constant(n, p).  Requires even dimension and p > n.
    """
    m = budget.dim
    if m % 2 != 0 or m < 4:
        raise ValueError(f"gap bound needs even dimension >= 4, got {m}")
    n = m // 2
    p = budget.p_exponent
    if p <= n:
        raise ValueError(f"need p > half-dimension {n}, got p={p}")
    d = budget.diameter
    a = (2 * n - 1) * math.sqrt(budget.kappa * d ** 2)
    s = math.sqrt(budget.riem_2p * d ** 2)
    ct = gap_constant(n, p, delta_branch, consts)
    branch1 = (ct / (1.0 + s) * math.exp(-a)) ** (2.0 * p * n / (p - n))
    branch2 = math.exp(-a) * (ct if corollary_variant else 1.0)
    return branch1, branch2


def oneform_gap_lower_bound(budget: GeometryBudget,
                            consts: AbstractConstants = AbstractConstants(),
                            delta_branch: str = "main",
                            corollary_variant: bool = False) -> float:
    """Lower bound for sqrt(lambda_1^(1)) * D on even-dimensional manifolds.

    Min of the two branches of :func:`oneform_gap_branches`; dimensionless,
    monotone non-increasing in kappa and in the curvature norm, and at most 1
    in the displayed form whenever kappa >= 0.
    """
    b1, b2 = oneform_gap_branches(budget, consts, delta_branch, corollary_variant)
    return min(b1, b2)


def li_yau_function_bound(n: int, kappa: float, diameter: float, c: float) -> float:
    """Function-Laplacian gap bound c^-1 exp(-(1 + sqrt(1 + 2 c^2 L^2))), L^2 = kappa D^2.

    The classical diameter/Ricci lower bound for the first positive
    eigenvalue of the Laplacian on functions, normalized by D^2.  The
    constant c depends on the dimension n and is supplied by the caller.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    lam_sq = kappa * diameter ** 2
    return math.exp(-(1.0 + math.sqrt(1.0 + 2.0 * c * c * lam_sq))) / c


def li_yau_predicate(lambda1: float, diameter: float, kappa: float, c: float) -> bool:
    """Whether lambda1 * D^2 >= c * exp(-c sqrt(kappa D^2)) (equality counts)."""
    if c <= 0:
        raise ValueError(f"c must be positive, got {c}")
    threshold = c * math.exp(-c * math.sqrt(kappa * diameter ** 2))
    return bool(lambda1 * diameter ** 2 >= threshold)

"""Step-size rules guaranteeing non-expansivity of the explicit
geodesic Euler step.

Each rule consumes RegionConstants and returns the largest step h for
which the one-step squared-distance change is provably nonpositive
throughout the region.  The returned BoundResult records which part of
the inequality was active:

* "flat"          the curvature-free ceiling 2*alpha (or its damped
                  variant) binds;
* "curvature"     the curvature correction term binds at some h below
                  the ceiling;
* "kappa-cap"     the positive-curvature analysis is only valid up to
                  kappa = pi and that cap binds;
* "unconditional" no finite step restriction exists.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import RegionConstants
from .errors import GeostabError, InconsistentConstantsError, NoBoundError
from .jacobi import CurvatureSign, _sinhc, curvature_penalty, f_functions

BISECT_STEPS = 200
R_TOL = 1e-12


@dataclass(frozen=True)
class BoundResult:
    """Largest provably non-expansive step and the active constraint."""

    h_max: float
    rule: str
    binding: str
    kappa_at_h: float


def euclidean_bound(alpha: float) -> BoundResult:
    """Flat-space ceiling: the step is non-expansive iff h <= 2*alpha."""
    if not (alpha > 0):
        raise NoBoundError("cocoercivity constant must be positive")
    return BoundResult(h_max=2.0 * alpha, rule="euclidean", binding="flat",
                       kappa_at_h=0.0)


def _bisect_nonpositive(F, lo: float, hi: float) -> float:
    """Largest h in [lo, hi] with F(h) <= 0, given F(lo) <= 0 < F(hi)."""
    for _ in range(BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if F(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def bound_positive(consts: RegionConstants) -> BoundResult:
    """Step rule on positively curved models.

    Solves h - 2*alpha + 2*mu_plus * G(h*C*sqrt(rho)) = 0 with G the
    curvature penalty, capped at kappa = pi where the penalty analysis
    stops.
    """
    if consts.rho <= 0:
        raise GeostabError("positive-curvature rule needs rho > 0")
    alpha, mu, C = consts.alpha, consts.mu_plus, consts.sup_norm
    if not (alpha > 0) or not math.isfinite(alpha):
        raise NoBoundError("rule needs a finite positive cocoercivity "
                           "constant")
    if C <= 0:
        raise NoBoundError("field norm bound must be positive")
    if not math.isfinite(mu):
        raise NoBoundError("projection constant is infinite; no positive "
                           "step is certified")
    scale = C * math.sqrt(consts.rho)
    cap = math.pi / scale

    def F(h):
        return h - 2.0 * alpha + 2.0 * mu * float(
            curvature_penalty(h * scale, CurvatureSign.POSITIVE))

    ceiling = min(2.0 * alpha, cap)
    if mu <= 0.0 or F(ceiling) <= 0.0:
        binding = "flat" if 2.0 * alpha <= cap else "kappa-cap"
        h = ceiling
    else:
        h = _bisect_nonpositive(F, 0.0, ceiling)
        binding = "curvature"
    return BoundResult(h_max=h, rule="positive", binding=binding,
                       kappa_at_h=h * scale)


def _kappa_coth(kappa: np.ndarray) -> np.ndarray:
    """kappa*coth(kappa) with limit 1 at zero; linear tail for large
    arguments where coth is 1 to machine precision."""
    kappa = np.asarray(kappa, dtype=float)
    big = kappa > 30.0
    safe = np.where(big, 0.0, kappa)
    val = np.cosh(safe) / _sinhc(safe)
    return np.where(big, kappa, val)


def _damped_penalty(kappa: np.ndarray) -> np.ndarray:
    """G(kappa) / (1 + f3(kappa)) on the negative-curvature branch,
    evaluated without overflow for large kappa."""
    kappa = np.asarray(kappa, dtype=float)
    big = kappa > 300.0
    safe = np.where(big, 0.0, kappa)
    _, _, f3 = f_functions(safe, CurvatureSign.NEGATIVE)
    val = curvature_penalty(safe, CurvatureSign.NEGATIVE) / (1.0 + f3)
    # for large kappa the ratio collapses to kappa*(coth(kappa) - 1) -> 0
    return np.where(big, 0.0, val)


def _negative_rhs(kappa, alpha, mu_minus, damping):
    """Admissible step at curvature scale kappa on negative models."""
    kappa = np.asarray(kappa, dtype=float)
    return (2.0 / (1.0 + damping)) * (
        alpha * _kappa_coth(kappa) - mu_minus * _damped_penalty(kappa))


def _min_on_interval(f, hi: float, n_grid: int = 2001):
    """Minimum of a smooth scalar function on [0, hi] by dense grid plus
    local golden-section refinement."""
    if hi <= 0.0:
        return float(f(np.zeros(1))[0])
    grid = np.linspace(0.0, hi, n_grid)
    vals = f(grid)
    i = int(np.argmin(vals))
    best = float(vals[i])
    lo = grid[max(i - 1, 0)]
    up = grid[min(i + 1, n_grid - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, up
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = float(f(np.array([c]))[0])
    fd = float(f(np.array([d]))[0])
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = float(f(np.array([c]))[0])
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = float(f(np.array([d]))[0])
    return min(best, fc, fd)


def bound_negative(consts: RegionConstants) -> BoundResult:
    """Step rule on negatively curved models.

    Certifies h whenever h <= rhs(kappa) for every kappa in
    [0, h*C*sqrt(|rho|)], where rhs combines the cocoercivity gain
    kappa*coth(kappa) with the damped curvature penalty.  The largest
    such h is found by bisection with an inner minimization.
    """
    if consts.rho >= 0:
        raise GeostabError("negative-curvature rule needs rho < 0")
    alpha, mu, sigma, C = (consts.alpha, consts.mu_minus, consts.sigma,
                           consts.sup_norm)
    if not (alpha > 0) or not math.isfinite(alpha):
        raise NoBoundError("rule needs a finite positive cocoercivity "
                           "constant")
    if C <= 0:
        raise NoBoundError("field norm bound must be positive")
    if not math.isfinite(mu) or not math.isfinite(sigma):
        raise NoBoundError("projection or inverse constant is infinite; "
                           "use the singular rule instead")
    scale = C * math.sqrt(-consts.rho)
    damping = (sigma * scale) ** 2
    flat = 2.0 * alpha / (1.0 + damping)

    def worst(h):
        return _min_on_interval(
            lambda k: _negative_rhs(k, alpha, mu, damping), h * scale)

    def F(h):
        return h - worst(h)

    if F(flat) <= 0.0:
        h = flat
        binding = "flat"
    else:
        h = _bisect_nonpositive(F, 0.0, flat)
        binding = "curvature"
    return BoundResult(h_max=h, rule="negative", binding=binding,
                       kappa_at_h=h * scale)


def bound_singular(consts: RegionConstants, x_norm_range) -> BoundResult:
    """Step rule on negative models when the covariant derivative is
    singular and only the inverse bound on its range is available.

    For each admissible field norm c the certified step is
    arccoth(R(c)) / (c*sqrt(|rho|)) with
    R(c) = (1 + c^2*|rho|*sigma^2) / (2*alpha*c*sqrt(|rho|)); the rule
    takes the worst c over the supplied range.  R < 1 is impossible for
    consistent constants; R = 1 certifies every step.
    """
    if consts.rho >= 0:
        raise GeostabError("singular rule needs rho < 0")
    alpha, sigma = consts.alpha, consts.sigma
    if not (alpha > 0) or not math.isfinite(alpha):
        raise NoBoundError("rule needs a finite positive cocoercivity "
                           "constant")
    if not math.isfinite(sigma) or sigma <= 0:
        raise NoBoundError("rule needs a finite positive inverse bound")
    lo, hi = (float(x_norm_range[0]), float(x_norm_range[-1]))
    if not (0 < lo <= hi):
        raise GeostabError("field norm range must be positive")
    root = math.sqrt(-consts.rho)

    def ratio(c):
        return (1.0 + (c * root * sigma) ** 2) / (2.0 * alpha * c * root)

    def certified(c):
        R = ratio(c)
        if R < 1.0 - R_TOL:
            raise InconsistentConstantsError(
                f"certified ratio {R:.12g} < 1 contradicts alpha <= sigma")
        if R <= 1.0 + R_TOL:
            return math.inf
        # arccoth(R) = log((R+1)/(R-1)) / 2
        return 0.5 * math.log((R + 1.0) / (R - 1.0)) / (c * root)

    if lo == hi:
        h = certified(lo)
        c_star = lo
    else:
        grid = np.linspace(lo, hi, 512)
        vals = [certified(float(c)) for c in grid]
        i = int(np.argmin(vals))
        a = float(grid[max(i - 1, 0)])
        b = float(grid[min(i + 1, len(grid) - 1)])
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = certified(c), certified(d)
        for _ in range(80):
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = certified(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = certified(d)
        pairs = [(vals[i], float(grid[i])), (fc, c), (fd, d)]
        h, c_star = min(pairs, key=lambda t: t[0])
    if math.isinf(h):
        return BoundResult(h_max=math.inf, rule="singular",
                           binding="unconditional", kappa_at_h=math.inf)
    return BoundResult(h_max=h, rule="singular", binding="curvature",
                       kappa_at_h=h * c_star * root)

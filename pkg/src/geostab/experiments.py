"""Built-in example studies: direction sweeps, empirical step limits,
theory/experiment comparison tables, and variation-formula validation.

The registry EXAMPLES holds four named field families:

* ``s2``           rotation-plus-drift field on the 2-sphere,
* ``h2``           constant-component field on the hyperbolic plane,
* ``s3``           rotation-plus-drift field on the 3-sphere,
* ``h2-singular``  the dilation field on the hyperbolic plane whose
                   covariant derivative is singular.

For each family the module can compute the largest empirically
non-expansive step at a base point (by sweeping variation directions and
bisecting in h), the certified step of the matching rule from pointwise
constants, and CSV comparison tables over parameter grids.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .bounds import (BoundResult, bound_negative, bound_positive,
                     bound_singular)
from .constants import point_constants
from .errors import BracketError, GeostabError, InconsistentConstantsError
from .fields import (FieldModel, h2_field, h2_singular_field, s2_field,
                     s3_field)
from .integrators import expansivity_ratio, gee_step
from .jacobi import (CurvatureSign, curvature_sign, f_functions,
                     gee_jacobi_data, jacobi_norm)
from .manifolds import (HALF_PLANE, SPHERE2, SPHERE3, ChartPoint,
                        ManifoldModel)

CSV_HEADER = "example,epsilon,base1,base2,h_numeric,h_theory,kappa_at_h,binding"

DEFAULT_EPSILONS = (0.5, 1.0, 2.0)
DEFAULT_GRID = 40
DEFAULT_DIRS = {2: 512, 3: 2048}
DEFAULT_H_CAP = 1e3
REFINE_POINTS = 17  # fine grid per refinement pass, spacing / 8
CROSS_CHECK_RTOL = 1e-8
ALIGN_TOL = 1e-12  # relative size below which a variation block is
#                    treated as structurally zero (rounding dust sits
#                    near 1e-15; genuine couplings are order one)


def _n_workers() -> int:
    raw = os.environ.get("GEOSTAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


# -- example registry --------------------------------------------------------


def _analytic_s2(eps: float, coords) -> dict:
    phi = coords[0]
    root = math.sqrt(1.0 + eps * eps)
    alpha = eps / ((1.0 + eps * eps) * math.sin(phi))
    mu_plus = alpha * (1.0 + root / (2.0 * eps * (1.0 + eps * eps
                                                  + eps * root)))
    return {"alpha": alpha, "mu_plus": mu_plus,
            "sup_norm": root * math.cos(phi)}


def _analytic_h2(eps: float, coords) -> dict:
    y = coords[1]
    root = math.sqrt(1.0 + eps * eps)
    alpha = eps * y / (1.0 + eps * eps)
    return {"alpha": alpha, "sigma": y / root,
            "mu_minus": alpha * (root / (2.0 * eps) + 0.5),
            "sup_norm": root / y}


def _analytic_s3(eps: float, coords) -> dict:
    psi, theta = coords[0], coords[1]
    cpsi, spsi = math.cos(psi), math.sin(psi)
    s2t = math.sin(theta) ** 2
    alpha = eps * cpsi / (cpsi * cpsi * (eps * eps + s2t)
                          + math.cos(theta) ** 2)
    return {"alpha": alpha, "sup_norm": spsi * math.sqrt(eps * eps + s2t)}


def _analytic_h2_singular(eps: float, coords) -> dict:
    return {"alpha": 1.0, "sigma": 1.0, "sup_norm": 1.0}


@dataclass(frozen=True)
class ExampleFamily:
    """A named field family with its manifold, applicable step rule,
    base-point grids and (where available) closed-form constants."""

    name: str
    manifold: ManifoldModel
    make_field: Callable[[float], FieldModel]
    rule: str  # "positive" | "negative" | "singular"
    default_grid: Callable[[int], list]
    to_coords: Callable[[float, Optional[float]], tuple]
    default_base: tuple  # (base1, base2) used when no point is given
    base2_default: Optional[float]  # filled in for spec'd 1-d grids
    validation_box: tuple  # per-coordinate (lo, hi) for random sampling
    analytic: Optional[Callable[[float, tuple], dict]] = None


def _s2_grid(n):
    return [(float(phi), None) for phi in np.linspace(0.3, 1.4, n)]


def _h2_grid(n):
    return [(float(y), None) for y in np.geomspace(0.2, 5.0, n)]


def _s3_grid(n):
    thetas = np.linspace(0.3, 1.4, 5)
    psis = np.linspace(0.3, 1.4, max(2, -(-n // 5)))
    pairs = [(float(psi), float(th)) for psi in psis for th in thetas]
    return pairs[:n]


EXAMPLES = {
    "s2": ExampleFamily(
        name="s2", manifold=SPHERE2, make_field=s2_field, rule="positive",
        default_grid=_s2_grid, to_coords=lambda b1, b2: (b1, 0.0),
        default_base=(0.85, None), base2_default=None,
        validation_box=((-0.4, 0.4), (0.0, 2.0 * np.pi)),
        analytic=_analytic_s2),
    "h2": ExampleFamily(
        name="h2", manifold=HALF_PLANE, make_field=h2_field, rule="negative",
        default_grid=_h2_grid, to_coords=lambda b1, b2: (0.0, b1),
        default_base=(1.0, None), base2_default=None,
        validation_box=((-2.0, 2.0), (0.5, 3.0)),
        analytic=_analytic_h2),
    "s3": ExampleFamily(
        name="s3", manifold=SPHERE3, make_field=s3_field, rule="positive",
        default_grid=_s3_grid,
        to_coords=lambda b1, b2: (b1, np.pi / 2 if b2 is None else b2, 0.0),
        default_base=(0.85, np.pi / 2), base2_default=np.pi / 2,
        validation_box=((np.pi / 2 - 0.4, np.pi / 2 + 0.4),
                        (np.pi / 2 - 0.4, np.pi / 2 + 0.4),
                        (0.0, 2.0 * np.pi)),
        analytic=_analytic_s3),
    "h2-singular": ExampleFamily(
        name="h2-singular", manifold=HALF_PLANE,
        make_field=lambda eps: h2_singular_field(), rule="singular",
        default_grid=_h2_grid, to_coords=lambda b1, b2: (0.0, b1),
        default_base=(1.0, None), base2_default=None,
        validation_box=((-2.0, 2.0), (0.5, 3.0)),
        analytic=_analytic_h2_singular),
}


def get_example(name: str) -> ExampleFamily:
    try:
        return EXAMPLES[name]
    except KeyError:
        known = ", ".join(sorted(EXAMPLES))
        raise GeostabError(f"unknown example {name!r}; known: {known}")


def spec_grid(example: str, start: float, stop: float, count: int) -> list:
    """Uniform base1 grid for an example, base2 at the family default."""
    if count < 1:
        raise GeostabError("grid count must be at least 1")
    family = get_example(example)
    return [(float(b), family.base2_default)
            for b in np.linspace(start, stop, count)]


# -- direction sweeps --------------------------------------------------------


def unit_directions(dim: int, n: int) -> np.ndarray:
    """n deterministic, well-spread unit vectors in R^dim (rows).

    Dimension two uses equally spaced angles, dimension three a Fibonacci
    sphere; higher dimensions fall back to a fixed-seed Gaussian sample.
    """
    if n < 8:
        raise GeostabError("direction sweeps need at least 8 directions")
    if dim == 2:
        ang = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        return np.column_stack([np.cos(ang), np.sin(ang)])
    if dim == 3:
        i = np.arange(n)
        z = 1.0 - 2.0 * (i + 0.5) / n
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        ang = np.pi * (3.0 - np.sqrt(5.0)) * i
        return np.column_stack([r * np.cos(ang), r * np.sin(ang), z])
    rng = np.random.default_rng(12345)
    dirs = rng.normal(size=(n, dim))
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def _cap_grid(center: np.ndarray, half_width: float,
              n: int = REFINE_POINTS) -> np.ndarray:
    """Unit vectors covering a spherical cap around center (dim 3)."""
    helper = (np.array([1.0, 0.0, 0.0]) if abs(center[0]) < 0.9
              else np.array([0.0, 1.0, 0.0]))
    t1 = np.cross(center, helper)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(center, t1)
    off = np.linspace(-half_width, half_width, n)
    o1, o2 = np.meshgrid(off, off)
    pts = (center + o1.ravel()[:, None] * t1 + o2.ravel()[:, None] * t2)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


class _SweepKernel:
    """Per-point data reused across the many Δ evaluations of a sweep.

    Works in frame coefficients: for a unit direction ξ the induced
    variation has initial value ξ and initial derivative h N ξ with
    N = Eᵀ g A E, so everything downstream is a small matrix product.
    """

    def __init__(self, field: FieldModel, manifold: ManifoldModel,
                 p: ChartPoint):
        X = field.require_moving(p)
        g = manifold.metric(p)
        E = manifold.frame(p, X).matrix
        A = field.covariant_matrix(p).entries
        self.dim = manifold.dim
        self.sign = curvature_sign(manifold.rho)
        self.N = E.T @ g @ A @ E
        self.scale = manifold.norm(X) * math.sqrt(abs(manifold.rho))
        # Structural zeros of the variation blocks.  On the negative
        # branch the cross term is multiplied by e^(2k), so rounding
        # dust in a block that is analytically zero (the chart
        # arithmetic of Gamma.X leaves ~1e-16 residue) would masquerade
        # as exponential growth.  A block whose norm is rounding-small
        # relative to the whole matrix is therefore pinned to zero.
        self._row0_zero = False
        self._perp_aligned = False
        if self.sign is CurvatureSign.NEGATIVE:
            R = self.N / self.scale
            gauge = 1.0 + float(np.linalg.norm(R))
            perp = R[1:, :].copy()
            perp[:, 1:] += np.eye(self.dim - 1)
            self._perp_aligned = (
                float(np.linalg.norm(perp)) <= ALIGN_TOL * gauge)
            self._row0_zero = (
                float(np.linalg.norm(R[0, :])) <= ALIGN_TOL * gauge)

    def delta(self, h: float, Xi: np.ndarray) -> np.ndarray:
        """Squared-norm change of the step variation per direction row.

        On negatively curved models each cross component is evaluated as
        expm1(2k)/4 (ξ+T)² + expm1(-2k)/4 (ξ-T)² with T = Nξ/scale,
        which is algebraically equal to the f-function form but stays
        accurate when the hyperbolic functions reach the e^(2k) scale.
        """
        Xi = np.atleast_2d(np.asarray(Xi, dtype=float))
        if self.sign is CurvatureSign.NEGATIVE:
            kappa = h * self.scale
            T = Xi @ self.N.T / self.scale
            if self._row0_zero:
                flat1 = np.zeros(len(Xi))
            else:
                flat1 = ((kappa * T[:, 0]) ** 2
                         + 2.0 * kappa * Xi[:, 0] * T[:, 0])
            if self._perp_aligned:
                psq = np.zeros(len(Xi))
            else:
                psq = np.sum((Xi[:, 1:] + T[:, 1:]) ** 2, axis=1)
            msq = np.sum((Xi[:, 1:] - T[:, 1:]) ** 2, axis=1)
            em = math.expm1(-2.0 * kappa) / 4.0
            if kappa > 350.0:
                grow = np.where(psq > 0.0, math.inf, 0.0)
            else:
                grow = (math.expm1(2.0 * kappa) / 4.0) * psq
            return flat1 + grow + em * msq
        B = h * (Xi @ self.N.T)
        kappa = h * self.scale
        f1, f2, f3 = f_functions(kappa, self.sign)
        return (np.sum(B * B, axis=1) + 2.0 * np.sum(Xi * B, axis=1)
                - self.sign.value * (
                    f1 * np.sum(Xi[:, 1:] ** 2, axis=1)
                    + 2.0 * f2 * np.sum(Xi[:, 1:] * B[:, 1:], axis=1)
                    + f3 * np.sum(B[:, 1:] ** 2, axis=1)))

    def max_delta(self, h: float, n_dirs: int) -> float:
        """Largest Δ over the direction grid, refined around the argmax.

        Two refinement passes shrink the grid spacing by 8 each time, so
        the returned maximum tracks the continuum worst direction far
        below the bisection tolerance in h.
        """
        Xi = unit_directions(self.dim, n_dirs)
        vals = self.delta(h, Xi)
        best = int(np.argmax(vals))
        out = float(vals[best])
        if self.dim == 2:
            width = 2.0 * np.pi / n_dirs
            ang0 = math.atan2(Xi[best, 1], Xi[best, 0])
            for _ in range(2):
                ang = ang0 + np.linspace(-width, width, REFINE_POINTS)
                fine = np.column_stack([np.cos(ang), np.sin(ang)])
                vals = self.delta(h, fine)
                k = int(np.argmax(vals))
                out = max(out, float(vals[k]))
                ang0 = float(ang[k])
                width /= 8.0
        elif self.dim == 3:
            width = math.sqrt(4.0 * np.pi / n_dirs)
            center = Xi[best]
            for _ in range(2):
                fine = _cap_grid(center, width)
                vals = self.delta(h, fine)
                k = int(np.argmax(vals))
                out = max(out, float(vals[k]))
                center = fine[k]
                width /= 8.0
        return out


def sweep_deltas(field: FieldModel, manifold: ManifoldModel, p: ChartPoint,
                 h: float, directions) -> np.ndarray:
    """Δ values for explicit frame-coefficient directions (rows)."""
    return _SweepKernel(field, manifold, p).delta(h, directions)


def direction_sweep_delta(field: FieldModel, manifold: ManifoldModel,
                          p: ChartPoint, h: float,
                          n_dirs: Optional[int] = None) -> float:
    """Worst squared-distance change of one explicit step at p.

    Sweeps unit perturbation directions (512 angles in dimension two,
    a 2048-point Fibonacci sphere in dimension three, refined around the
    argmax) and returns the largest predicted |J(1)|² - |J(0)|² of the
    induced variation; nonpositive means the step is locally
    non-expansive in every sampled direction.
    """
    kernel = _SweepKernel(field, manifold, p)
    if n_dirs is None:
        n_dirs = DEFAULT_DIRS.get(kernel.dim, 512)
    return kernel.max_delta(h, n_dirs)


def numerical_hmax(field: FieldModel, manifold: ManifoldModel, p: ChartPoint,
                   n_dirs: Optional[int] = None, h_lo: float = 1e-6,
                   h_hi: float = DEFAULT_H_CAP, tol_h: float = 1e-6) -> float:
    """Largest step for which the direction sweep stays nonpositive.

    Bisects (to relative width tol_h) between a non-expansive h_lo and
    an expansive step bracketed by doubling, and returns the certified
    nonpositive end of the final bracket.  When even h_hi is not
    expansive the step is unconditionally stable as far as the sweep can
    tell and math.inf is returned.
    """
    kernel = _SweepKernel(field, manifold, p)
    if n_dirs is None:
        n_dirs = DEFAULT_DIRS.get(kernel.dim, 512)

    def worst(h):
        return kernel.max_delta(h, n_dirs)

    if worst(h_lo) > 0.0:
        raise BracketError(f"step already expansive at h_lo = {h_lo:g}")
    if worst(h_hi) <= 0.0:
        return math.inf
    lo, hi = h_lo, min(max(1e-3, 2.0 * h_lo), h_hi)
    while worst(hi) <= 0.0:
        lo, hi = hi, min(2.0 * hi, h_hi)
    while hi - lo > tol_h * hi:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if worst(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def pair_ratios(field: FieldModel, p: ChartPoint, h: float,
                n_dirs: int = 64, delta: float = 1e-5,
                method: str = "gee") -> np.ndarray:
    """One-step contraction ratios for actual point pairs.

    Places n_dirs neighbours at geodesic distance delta from p (frame
    coefficients on the unit circle/sphere) and returns the array of
    d(step(p), step(q)) / d(p, q).
    """
    manifold = field.manifold
    X = field.require_moving(p)
    E = manifold.frame(p, X).matrix
    out = np.empty(n_dirs)
    for j, xi in enumerate(unit_directions(manifold.dim, n_dirs)):
        q = manifold.exp(p, manifold.tangent(p, delta * (E @ xi)))
        out[j] = expansivity_ratio(field, p, q, h, method=method)
    return out


# -- theory side -------------------------------------------------------------


def theory_bound(example: str, eps: float, p: ChartPoint) -> BoundResult:
    """Certified step of the rule matching the example at base point p.

    Constants come from the family's closed-form expressions where those
    exist and from the numeric pointwise path otherwise; whenever both
    are available they are cross-checked to relative 1e-8 so a slip in
    either derivation cannot pass silently.
    """
    family = get_example(example)
    field = family.make_field(eps)
    consts = point_constants(field, family.manifold, p)
    if family.analytic is not None:
        exact = family.analytic(eps, p.coords)
        for key, val in exact.items():
            num = getattr(consts, key)
            tol = CROSS_CHECK_RTOL * max(abs(val), abs(num))
            if math.isfinite(num) and abs(num - val) > tol:
                raise InconsistentConstantsError(
                    f"closed-form {key} = {val:.17g} disagrees with the "
                    f"numeric value {num:.17g} at {tuple(p.coords)}")
        consts = replace(consts, **exact)
    if family.rule == "positive":
        return bound_positive(consts)
    if family.rule == "negative":
        return bound_negative(consts)
    if family.rule == "singular":
        c = consts.sup_norm
        return bound_singular(consts, (c, c))
    raise GeostabError(f"example {family.name!r} has no step rule")


# -- comparison sweeps -------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """One base point of a theory/experiment comparison table.

    base2 is None for families swept in a single parameter and is left
    empty in the CSV form.
    """

    example: str
    epsilon: float
    base1: float
    base2: Optional[float]
    h_numeric: float
    h_theory: float
    kappa_at_h: float
    binding: str


def _sweep_row(family: ExampleFamily, eps: float, b1: float,
               b2: Optional[float], n_dirs: Optional[int],
               tol_h: float) -> SweepRow:
    field = family.make_field(eps)
    p = family.manifold.point(family.to_coords(b1, b2))
    res = theory_bound(family.name, eps, p)
    h_num = numerical_hmax(field, family.manifold, p, n_dirs=n_dirs,
                           tol_h=tol_h)
    return SweepRow(example=family.name, epsilon=eps, base1=b1, base2=b2,
                    h_numeric=h_num, h_theory=res.h_max,
                    kappa_at_h=res.kappa_at_h, binding=res.binding)


def figure_sweep(example: str, epsilons=DEFAULT_EPSILONS,
                 base_grid=DEFAULT_GRID, n_dirs: Optional[int] = None,
                 tol_h: float = 1e-6) -> list:
    """Empirical versus certified step over a grid of base points.

    base_grid is either a point count for the family's default grid or
    an explicit list of (base1, base2) pairs.  Rows are ordered by
    (epsilon, grid index) regardless of the worker count, so repeated
    runs produce identical tables.
    """
    family = get_example(example)
    if isinstance(base_grid, int):
        base_grid = family.default_grid(base_grid)
    tasks = [(eps, b1, b2) for eps in epsilons for (b1, b2) in base_grid]

    def run(task):
        eps, b1, b2 = task
        return _sweep_row(family, eps, b1, b2, n_dirs, tol_h)

    workers = _n_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, tasks))
    return [run(t) for t in tasks]


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return format(float(x), ".17g")


def rows_to_csv(rows) -> str:
    """Render sweep rows as a CSV string (LF line endings, 17 significant
    digits, 'inf' for unbounded entries, empty base2 where unused)."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.example, _fmt(r.epsilon), _fmt(r.base1),
            "" if r.base2 is None else _fmt(r.base2),
            _fmt(r.h_numeric), _fmt(r.h_theory), _fmt(r.kappa_at_h),
            r.binding]))
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str) -> list:
    """Parse rows_to_csv output back into SweepRow values (exact floats)."""
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise GeostabError("unrecognized CSV header")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(CSV_HEADER.split(",")):
            raise GeostabError(f"malformed CSV row: {ln!r}")
        rows.append(SweepRow(
            example=parts[0], epsilon=float(parts[1]), base1=float(parts[2]),
            base2=None if parts[3] == "" else float(parts[3]),
            h_numeric=float(parts[4]), h_theory=float(parts[5]),
            kappa_at_h=float(parts[6]), binding=parts[7]))
    return rows


def write_csv(rows, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


# -- variation-formula validation --------------------------------------------


@dataclass(frozen=True)
class ValidationResult:
    """Outcome of comparing closed-form variation norms against the
    finite-difference variation of the actual step map."""

    example: str
    n_cases: int
    seed: int
    max_error: float
    rms_error: float
    elapsed: float


def jacobi_validation(example: str, n_cases: int = 200, seed: int = 0,
                      eps: float = 1.0, h_range=(0.05, 0.5),
                      fd_delta: float = 1e-6) -> ValidationResult:
    """Validate the closed-form variation norm on random cases.

    Draws random base points inside a chart-safe box, a random unit
    variation direction e and step size h per case, and compares the
    closed-form norm of the step variation at its endpoint against a
    central difference through actual steps: the base point is moved to
    exp_p(±Δ e), both neighbours are stepped, and the derivative is
    formed from the inverse exponential at the stepped center.
    """
    family = get_example(example)
    model = family.manifold
    field = family.make_field(eps)
    rng = np.random.default_rng(seed)
    t0 = time.monotonic()
    errs = np.zeros(n_cases)
    for i in range(n_cases):
        coords = tuple(float(rng.uniform(lo, hi))
                       for (lo, hi) in family.validation_box)
        p = model.point(coords)
        raw = rng.normal(size=model.dim)
        e = model.tangent(p, raw)
        e = model.tangent(p, e.comps / model.norm(e))
        h = float(rng.uniform(h_range[0], h_range[1]))
        closed = jacobi_norm(gee_jacobi_data(field, p, e, h), 1.0)
        center = gee_step(field, p, h)
        plus = gee_step(field, model.exp(
            p, model.tangent(p, fd_delta * e.comps)), h)
        minus = gee_step(field, model.exp(
            p, model.tangent(p, -fd_delta * e.comps)), h)
        diff = (model.log(center, plus).comps
                - model.log(center, minus).comps) / (2.0 * fd_delta)
        errs[i] = abs(closed - model.norm(model.tangent(center, diff)))
    elapsed = time.monotonic() - t0
    max_error = float(errs.max()) if n_cases else 0.0
    rms_error = float(np.sqrt(np.mean(errs ** 2))) if n_cases else 0.0
    return ValidationResult(example=example, n_cases=n_cases, seed=seed,
                            max_error=max_error, rms_error=rms_error,
                            elapsed=elapsed)

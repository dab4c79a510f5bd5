"""Explicit and implicit geodesic Euler steps.

The explicit step follows the geodesic from the current point along the
field for arc parameter h.  The implicit step solves

    p = exp_q(-h * X|_q)

for the next point q by fixed-point iteration: each iterate moves the
field vector at the current guess back to p by parallel transport along
the connecting geodesic and re-exponentiates.  Convergence is measured
by the defect d(exp_q(-h*X|_q), p).
"""

from .errors import GeostabError, NonconvergenceError
from .fields import FieldModel
from .manifolds import ChartPoint

GIE_TOL = 1e-12
GIE_MAX_ITER = 200


def gee_step(field: FieldModel, p: ChartPoint, h: float) -> ChartPoint:
    """One explicit geodesic Euler step of size h from p."""
    model = field.manifold
    X = field.eval(p)
    return model.exp(p, model.tangent(p, h * X.comps))


def _gie_defect(field, q, h, p) -> float:
    model = field.manifold
    X = field.eval(q)
    back = model.exp(q, model.tangent(q, -h * X.comps))
    return model.distance(back, p)


def gie_step(field: FieldModel, p: ChartPoint, h: float,
             tol: float = GIE_TOL, max_iter: int = GIE_MAX_ITER
             ) -> ChartPoint:
    """One implicit geodesic Euler step of size h from p.

    Raises NonconvergenceError (carrying the final defect) when the
    fixed-point iteration fails to reach the requested tolerance; this
    happens once h exceeds the contraction range of the field.
    """
    model = field.manifold
    q = gee_step(field, p, h)
    defect = _gie_defect(field, q, h, p)
    for _ in range(max_iter):
        if defect <= tol:
            return q
        X = field.eval(q)
        u = model.log(q, p)
        moved = model.transport(model.tangent(q, h * X.comps), u)
        q = model.exp(p, moved)
        defect = _gie_defect(field, q, h, p)
    if defect <= tol:
        return q
    raise NonconvergenceError(
        f"implicit step did not converge in {max_iter} iterations "
        f"(defect {defect:.3e} > tol {tol:.1e})", defect=defect)


def integrate(field: FieldModel, p0: ChartPoint, h: float, n_steps: int,
              method: str = "gee") -> list:
    """Trajectory [p0, p1, ..., p_{n_steps}] of the chosen stepper."""
    if method == "gee":
        stepper = gee_step
    elif method == "gie":
        stepper = gie_step
    else:
        raise GeostabError(f"unknown method {method!r}; use 'gee' or 'gie'")
    out = [p0]
    p = p0
    for _ in range(int(n_steps)):
        p = stepper(field, p, h)
        out.append(p)
    return out


def expansivity_ratio(field: FieldModel, p: ChartPoint, q: ChartPoint,
                      h: float, method: str = "gee") -> float:
    """d(step(p), step(q)) / d(p, q) for one step of size h."""
    model = field.manifold
    d0 = model.distance(p, q)
    if d0 <= 0.0:
        raise GeostabError("points must be distinct")
    if method == "gee":
        p1, q1 = gee_step(field, p, h), gee_step(field, q, h)
    elif method == "gie":
        p1, q1 = gie_step(field, p, h), gie_step(field, q, h)
    else:
        raise GeostabError(f"unknown method {method!r}; use 'gee' or 'gie'")
    return model.distance(p1, q1) / d0

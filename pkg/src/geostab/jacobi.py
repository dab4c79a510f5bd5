"""Closed-form geodesic variation fields on constant-curvature models.

Along a geodesic gamma(t) = exp_p(t*u) on a model of curvature rho, any
variation field J solving the second-order variation equation decomposes
in a parallel orthonormal frame e_1(t), ..., e_d(t) with e_1 = u/|u| as

    J(t) = (a1 + b1*t) e_1(t) + sum_{i>=2} (a_i c(t) + b_i s(t)) e_i(t),

where c(t), s(t) are cosine-like and sine-like functions of kappa*t and
kappa = sqrt(|rho|)*|u|.  The module provides c, s, the associated scalar
functions f1, f2, f3 of kappa, the end-to-end norm difference
|J(1)|^2 - |J(0)|^2, and the variation data generated by one explicit
geodesic Euler step.

Near kappa = 0 the f-functions suffer catastrophic cancellation; below
1e-4 they switch to series evaluation.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import GeostabError
from .manifolds import ChartPoint, Frame, TangentVector

SERIES_KAPPA = 1e-4


class CurvatureSign(enum.Enum):
    POSITIVE = 1
    ZERO = 0
    NEGATIVE = -1


def curvature_sign(rho: float) -> CurvatureSign:
    if rho > 0:
        return CurvatureSign.POSITIVE
    if rho < 0:
        return CurvatureSign.NEGATIVE
    return CurvatureSign.ZERO


# -- stable scalar kernels ---------------------------------------------------


def _one_minus_sinc(u):
    """1 - sin(u)/u, series below the cancellation threshold."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_KAPPA
    u2 = u * u
    series = (u2 / 6.0) * (1.0 - u2 / 20.0)
    safe = np.where(small, 1.0, u)
    direct = 1.0 - np.sin(safe) / safe
    return np.where(small, series, direct)


def _sinhc_minus_one(u):
    """sinh(u)/u - 1, series below the cancellation threshold."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < SERIES_KAPPA
    u2 = u * u
    series = (u2 / 6.0) * (1.0 + u2 / 20.0)
    safe = np.where(small, 1.0, u)
    direct = np.sinh(safe) / safe - 1.0
    return np.where(small, series, direct)


def _sinc(u):
    return 1.0 - _one_minus_sinc(u)


def _sinhc(u):
    return 1.0 + _sinhc_minus_one(u)


def ck(kappa, t, sign: CurvatureSign):
    """Cosine-like factor of the cross components at parameter t."""
    if sign is CurvatureSign.POSITIVE:
        out = np.cos(kappa * t)
    elif sign is CurvatureSign.NEGATIVE:
        out = np.cosh(kappa * t)
    else:
        out = np.ones_like(np.asarray(kappa * t, dtype=float))
    return out if np.ndim(out) else float(out)


def sk(kappa, t, sign: CurvatureSign):
    """Sine-like factor; equals t at kappa = 0 for every sign."""
    t = np.asarray(t, dtype=float)
    if sign is CurvatureSign.POSITIVE:
        out = t * _sinc(kappa * t)
    elif sign is CurvatureSign.NEGATIVE:
        out = t * _sinhc(kappa * t)
    else:
        out = t * np.ones_like(np.asarray(kappa, dtype=float))
    return out if np.ndim(out) else float(out)


def f_functions(kappa, sign: CurvatureSign):
    """The three nonnegative curvature functions of kappa at t = 1.

    f1 = s(rho)(1 - c^2), f2 = s(rho)(1 - c*s), f3 = s(rho)(1 - s^2)
    with s(rho) the sign of the curvature; identically zero on flat
    models.  Vectorized over kappa.
    """
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa < 0):
        raise GeostabError("kappa must be nonnegative")
    if sign is CurvatureSign.POSITIVE:
        f1 = np.sin(kappa) ** 2
        f2 = _one_minus_sinc(2.0 * kappa)  # 1 - cos(k)sin(k)/k
        f3 = _one_minus_sinc(kappa) * (1.0 + _sinc(kappa))
    elif sign is CurvatureSign.NEGATIVE:
        f1 = np.sinh(kappa) ** 2
        f2 = _sinhc_minus_one(2.0 * kappa)
        f3 = _sinhc_minus_one(kappa) * (1.0 + _sinhc(kappa))
    else:
        z = np.zeros_like(kappa)
        f1, f2, f3 = z, z.copy(), z.copy()
    if f1.ndim == 0:
        return float(f1), float(f2), float(f3)
    return f1, f2, f3


def curvature_penalty(kappa, sign: CurvatureSign):
    """f2 - sqrt(f1*f3), the combined correction entering the step
    bounds; nonnegative for every kappa.

    Evaluated as the algebraically equal ratio (c - s)^2 / (f2 +
    sqrt(f1*f3)), with c, s the cosine-like and sine-like factors at
    t = 1.  The direct difference cancels catastrophically once the
    hyperbolic terms grow; the ratio does not.  On the negative branch
    beyond kappa = 30 the ratio is replaced by its asymptote
    kappa/2 + 1/(2*kappa) - 1, exact there to machine precision.
    """
    kappa = np.asarray(kappa, dtype=float)
    if np.any(kappa < 0):
        raise GeostabError("kappa must be nonnegative")
    if sign is CurvatureSign.ZERO:
        out = np.zeros_like(kappa)
    else:
        if sign is CurvatureSign.POSITIVE:
            work = kappa
            cs_diff = _one_minus_sinc(work) - 2.0 * np.sin(0.5 * work) ** 2
        else:
            work = np.minimum(kappa, 30.0)
            cs_diff = 2.0 * np.sinh(0.5 * work) ** 2 - _sinhc_minus_one(work)
        f1, f2, f3 = f_functions(work, sign)
        den = np.asarray(f2 + np.sqrt(np.multiply(f1, f3)))
        out = cs_diff * cs_diff / np.where(den > 0.0, den, 1.0)
        if sign is CurvatureSign.NEGATIVE:
            big = kappa > 30.0
            tail_arg = np.where(big, kappa, 1.0)
            out = np.where(big, 0.5 * tail_arg + 0.5 / tail_arg - 1.0, out)
    return float(out) if out.ndim == 0 else out


# -- variation data ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JacobiData:
    """Frame coefficients of a variation field and its covariant rate at
    t = 0, along a geodesic of curvature scale kappa."""

    a: np.ndarray
    b: np.ndarray
    kappa: float
    sign: CurvatureSign


def _check_shared_base(*vs):
    base = vs[0].base
    for v in vs[1:]:
        if v.base.model is not base.model or not np.array_equal(
                v.base.coords, base.coords):
            raise GeostabError("tangent vectors must share a base point")
    return base


def variation_data(v: TangentVector, w: TangentVector,
                   u: TangentVector) -> JacobiData:
    """Frame decomposition of the variation with J(0) = v and covariant
    rate w at t = 0, along the geodesic with initial velocity u."""
    base = _check_shared_base(v, w, u)
    model = base.model
    frame = model.frame(base, u)  # raises on degenerate u
    g = model.metric(base)
    a = frame.matrix.T @ g @ v.comps
    b = frame.matrix.T @ g @ w.comps
    kappa = float(np.sqrt(abs(model.rho)) * model.norm(u))
    return JacobiData(a, b, kappa, curvature_sign(model.rho))


def norm_diff(v: TangentVector, w: TangentVector, u: TangentVector) -> float:
    """|J(1)|^2 - |J(0)|^2 for the variation with J(0) = v, covariant
    rate w at t = 0, along the geodesic with initial velocity u.

    Evaluates |w|^2 + 2<v,w> - s(rho) * sum_{i>=2} (a_i^2 f1
    + 2 a_i b_i f2 + b_i^2 f3) in a frame aligned with u.
    """
    data = variation_data(v, w, u)
    a, b = data.a, data.b
    f1, f2, f3 = f_functions(data.kappa, data.sign)
    cross = float(a[1:] @ a[1:] * f1 + 2.0 * (a[1:] @ b[1:]) * f2
                  + b[1:] @ b[1:] * f3)
    return float(b @ b + 2.0 * (a @ b) - data.sign.value * cross)


def jacobi_coeffs(data: JacobiData, t: float) -> np.ndarray:
    """Coefficients of the variation field in the parallel frame at t."""
    c = ck(data.kappa, t, data.sign)
    s = sk(data.kappa, t, data.sign)
    out = data.a * c + data.b * s
    out[0] = data.a[0] + data.b[0] * t
    return out


def jacobi_eval(data: JacobiData, frame_t: Frame, t: float) -> TangentVector:
    """Realize the variation field at parameter t in the supplied
    parallel-transported frame."""
    coeffs = jacobi_coeffs(data, t)
    return TangentVector(frame_t.base, frame_t.matrix @ coeffs)


def jacobi_norm(data: JacobiData, t: float) -> float:
    """|J(t)|; frame-independent since parallel frames are orthonormal."""
    return float(np.linalg.norm(jacobi_coeffs(data, t)))


def gee_jacobi_data(field, p: ChartPoint, direction: TangentVector,
                    h: float) -> JacobiData:
    """Variation data of one explicit geodesic Euler step.

    Perturbing the start point of the step exp_p(h*X|_p) along the unit
    direction e produces a variation field with J(0) = e and covariant
    rate h * (grad X) e at t = 0, along the geodesic with initial
    velocity u = h*X|_p.
    """
    X = field.require_moving(p)
    A = field.covariant_matrix(p).entries
    w = TangentVector(p, h * (A @ direction.comps))
    u = TangentVector(p, h * X.comps)
    return variation_data(direction, w, u)

"""Space curves: arclength resampling, Frenet data, and the named example curves."""

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import PchipInterpolator, make_interp_spline

from .errors import DegenerateCurve, UnknownCurve
from .expr import SampleTable, ScalarFunction, as_function, parse_scalar
from .fd import derivative

SPEED_MIN = 1e-8
KAPPA_ZERO = 1e-8
MAX_ZERO_RUN = 3
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


@dataclass
class CurveData:
    """Uniform-arclength samples of a space curve with Frenet data.

    ``s[k]`` are uniform; ``t[k]`` the matching original parameters.  ``N``
    and ``B`` are NaN where ``kappa`` vanishes.
    """

    s: np.ndarray
    t: np.ndarray
    gamma: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    kappa_zero: np.ndarray
    tau_unit: list = field(default_factory=list)
    tau_minus_unit: list = field(default_factory=list)
    name: str = "curve"

    @property
    def h(self):
        return self.s[1] - self.s[0]

    @property
    def interval(self):
        return (float(self.s[0]), float(self.s[-1]))

    @property
    def length(self):
        return float(self.s[-1] - self.s[0])

    def kappa_function(self):
        return SampleTable(self.s[0], self.h, self.kappa)

    def tau_function(self):
        return SampleTable(self.s[0], self.h, self.tau)

    def frenet_residuals(self, kappa_min=1e-3):
        """Max residuals of ``T' = k N``, ``N' = -k T + t B``, ``B' = -t N``."""
        h = self.h
        ok = self.kappa > kappa_min
        k, t = self.kappa[:, None], self.tau[:, None]
        dT = derivative(self.T, h, 0, 1, 4)
        dN = derivative(self.N, h, 0, 1, 4)
        dB = derivative(self.B, h, 0, 1, 4)
        r = [np.linalg.norm(dT - k * self.N, axis=1),
             np.linalg.norm(dN + k * self.T - t * self.B, axis=1),
             np.linalg.norm(dB + t * self.N, axis=1)]
        ok = ok & np.all(np.isfinite(np.stack(r)), axis=0)
        return [float(np.max(x[ok])) if np.any(ok) else 0.0 for x in r]

    def unit_speed_error(self):
        d = derivative(self.gamma, self.h, 0, 1, 4)
        return float(np.max(np.abs(np.linalg.norm(d, axis=1) - 1.0)))

    def orthonormality_error(self, kappa_min=1e-6):
        ok = self.kappa > kappa_min
        M = np.stack([self.T[ok], self.N[ok], self.B[ok]], axis=-2)
        G = M @ np.swapaxes(M, -1, -2)
        return float(np.max(np.abs(G - np.eye(3)))) if np.any(ok) else 0.0


class _SplineFunction(ScalarFunction):
    def __init__(self, spline):
        self.spline = spline

    def __call__(self, t):
        out = self.spline(t)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self):
        return _SplineFunction(self.spline.derivative())


def _sign_crossings(s, values):
    out = []
    sg = np.sign(values)
    for i in np.nonzero(sg[:-1] * sg[1:] < 0)[0]:
        out.append(float(s[i] - values[i] * (s[i + 1] - s[i]) / (values[i + 1] - values[i])))
    out += [float(x) for x in s[values == 0]]
    return sorted(out)


def _fill_tau_at_zeros(s, tau, zero):
    """Interpolate torsion through isolated curvature zeros."""
    if not np.any(zero):
        return tau
    runs, start = [], None
    for k, z in enumerate(zero):
        if z and start is None:
            start = k
        if not z and start is not None:
            runs.append((start, k))
            start = None
    if start is not None:
        runs.append((start, len(zero)))
    for a, b in runs:
        if b - a > MAX_ZERO_RUN:
            raise DegenerateCurve(
                f"curvature vanishes on {b - a} consecutive samples near s={s[a]:.4g}; "
                "torsion is undefined there, pass it explicitly")
    good = ~zero
    if good.sum() < 2:
        raise DegenerateCurve("curvature vanishes almost everywhere")
    out = tau.copy()
    out[zero] = np.interp(s[zero], s[good], tau[good])
    return out


def _arclength(speed_fn, t_fine):
    v = speed_fn(t_fine)
    return cumulative_simpson(v, x=t_fine, initial=0.0)


def _polish(t, s_target, t_fine, s_fine, speed_fn, iters=2):
    """Newton-refine ``t`` so that the arclength from ``t_fine`` matches."""
    for _ in range(iters):
        j = np.clip(np.searchsorted(t_fine, t) - 1, 0, len(t_fine) - 1)
        a, b = t_fine[j], t
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        nodes = mid[:, None] + half[:, None] * _GL_X
        seg = half * (speed_fn(nodes) @ _GL_W)
        s_now = s_fine[j] + seg
        t = t - (s_now - s_target) / speed_fn(t)
    return t


def curve_from_functions(fx, fy, fz, interval, n_samples=2001, origin=None,
                         tau=None, name="curve"):
    """Resample a parametrized curve uniformly in arclength.

    Derivatives come from the components' own ``derivative()`` (symbolic for
    expressions, spline derivatives for tables).  Arclength is measured from
    the parameter ``origin`` (default: 0 if inside the interval, else the
    start), so ``s = 0`` there.
    """
    comps = [as_function(c) for c in (fx, fy, fz)]
    d1 = [c.derivative() for c in comps]
    d2 = [c.derivative() for c in d1]
    d3 = [c.derivative() for c in d2]

    def vec(fs, t):
        return np.stack([np.broadcast_to(np.asarray(f(t), dtype=float), np.shape(t))
                         for f in fs], axis=-1)

    def speed(t):
        return np.linalg.norm(vec(d1, t), axis=-1)

    t0, t1 = float(interval[0]), float(interval[1])
    if not t1 > t0:
        raise ValueError("empty parameter interval")
    if origin is None:
        origin = 0.0 if t0 <= 0.0 <= t1 else t0
    t_fine = np.linspace(t0, t1, 16 * (n_samples - 1) + 1)
    sp = speed(t_fine)
    if np.min(sp) < SPEED_MIN:
        k = int(np.argmin(sp))
        raise DegenerateCurve(f"|gamma'| = {sp[k]:.3e} at t={t_fine[k]:.6g}")
    s_fine = _arclength(speed, t_fine)
    s_origin = float(np.interp(origin, t_fine, s_fine))
    s_fine_rel = s_fine - s_origin
    s = np.linspace(s_fine_rel[0], s_fine_rel[-1], n_samples)
    t = PchipInterpolator(s_fine_rel, t_fine)(s)
    t[0], t[-1] = t0, t1
    t[1:-1] = _polish(t[1:-1], s[1:-1], t_fine, s_fine_rel, speed)

    g, g1, g2, g3 = vec(comps, t), vec(d1, t), vec(d2, t), vec(d3, t)
    v = np.linalg.norm(g1, axis=1)
    c = np.cross(g1, g2)
    cn = np.linalg.norm(c, axis=1)
    kappa = cn / v ** 3
    zero = kappa < KAPPA_ZERO
    with np.errstate(invalid="ignore", divide="ignore"):
        tau_raw = np.einsum("ij,ij->i", c, g3) / cn ** 2
        T = g1 / v[:, None]
        B = c / cn[:, None]
    if tau is not None:
        tau_v = np.broadcast_to(np.asarray(as_function(tau)(s), dtype=float), s.shape).copy()
    else:
        tau_v = _fill_tau_at_zeros(s, np.where(zero, 0.0, tau_raw), zero)
    B[zero] = np.nan
    Nn = np.cross(B, T)
    return CurveData(s, t, g, T, Nn, B, kappa, tau_v, zero,
                     _sign_crossings(s, tau_v - 1.0), _sign_crossings(s, tau_v + 1.0),
                     name)


def curve_from_expressions(x, y, z, interval, n_samples=2001, bindings=None, **kw):
    comps = [parse_scalar(e, bindings=bindings) if isinstance(e, str) else e
             for e in (x, y, z)]
    return curve_from_functions(*comps, interval, n_samples, **kw)


def curve_from_csv(path, n_samples=2001, **kw):
    """Curve from ``t,x,y,z`` rows (header optional), via quintic splines."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append([float(c) for c in row[:4]])
            except ValueError:
                if rows:
                    raise
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] != 4 or len(data) < 6:
        raise ValueError(f"{path}: need at least 6 rows of t,x,y,z")
    order = np.argsort(data[:, 0])
    data = data[order]
    t = data[:, 0]
    comps = [_SplineFunction(make_interp_spline(t, data[:, k], k=5)) for k in (1, 2, 3)]
    return curve_from_functions(*comps, (t[0], t[-1]), n_samples, **kw)


NAMED = {
    "circle": ({"R": 1.0}, ("R*cos(t)", "R*sin(t)", "0"), (-np.pi, np.pi)),
    "helix": ({"a": 0.6, "b": 0.8}, ("a*cos(t)", "a*sin(t)", "b*t"), (-np.pi, np.pi)),
    "cylinder_figure": ({}, ("cos(3*t)", "sin(3*t)", "-sin(t)"), (-np.pi, np.pi)),
    "viviani": ({"c": 0.3}, ("c*(1+cos(t))", "c*sin(t)", "2*c*sin(t/2)"),
                (-2 * np.pi, 2 * np.pi)),
}


def named_curve(name, params=None, interval=None, n_samples=2001):
    """One of ``circle`` (R), ``helix`` (a, b), ``cylinder_figure``, ``viviani`` (c)."""
    if name not in NAMED:
        raise UnknownCurve(f"unknown curve {name!r}; choose from {sorted(NAMED)}")
    defaults, exprs, default_interval = NAMED[name]
    bind = dict(defaults)
    for k, val in (params or {}).items():
        if k not in bind:
            raise ValueError(f"curve {name!r} has no parameter {k!r}")
        bind[k] = float(val)
    iv = default_interval if interval is None else interval
    return curve_from_expressions(*exprs, iv, n_samples, bindings=bind, name=name)


def singular_geometric_cauchy_check(curve, Z, tol=1e-6):
    """Per-sample checks of the singular Cauchy data ``(gamma, Z)``.

    Returns booleans for ``<Z, gamma'> = 0``, ``<Z', gamma'> = 0`` and
    ``|Z'| != |gamma'| = 1``, and where ``kappa > tol`` whether ``Z = +-B``.
    """
    Z = np.asarray(Z, dtype=float)
    if Z.shape != curve.gamma.shape:
        raise ValueError("Z must be sampled at the curve's arclength nodes")
    dZ = derivative(Z, curve.h, 0, 1, 4)
    T = curve.T
    orth = np.abs(np.einsum("ij,ij->i", Z, T)) <= tol
    orth_d = np.abs(np.einsum("ij,ij->i", dZ, T)) <= max(tol, 1e-5)
    speed_z = np.linalg.norm(dZ, axis=1)
    weak = np.abs(speed_z - 1.0) > max(tol, 1e-5)
    curved = curve.kappa > tol
    binormal = np.zeros(len(Z), dtype=bool)
    with np.errstate(invalid="ignore"):
        binormal[curved] = np.linalg.norm(np.cross(Z[curved], curve.B[curved]), axis=1) <= 1e-5
    return {"orthogonal": orth, "derivative_orthogonal": orth_d, "weakly_regular": weak,
            "binormal": binormal, "curved": curved, "Z_speed": speed_z,
            "all_hold": bool(np.all(orth & orth_d & weak))}


def reconstruct_from_frenet(s, kappa, tau, frame0=None, gamma0=None):
    """RK4 solution of the Frenet system; returns ``gamma`` and the frames."""
    kappa, tau = as_function(kappa), as_function(tau)
    s = np.asarray(s, dtype=float)
    M = np.eye(3) if frame0 is None else np.asarray(frame0, dtype=float)
    g = np.zeros(3) if gamma0 is None else np.asarray(gamma0, dtype=float)

    def rhs(t, g, M):
        k, w = float(kappa(t)), float(tau(t))
        T, N, B = M
        return T, np.array([k * N, -k * T + w * B, -w * N])

    gs, Ms = [g], [M]
    for a, b in zip(s[:-1], s[1:]):
        h = b - a
        k1g, k1m = rhs(a, g, M)
        k2g, k2m = rhs(a + h / 2, g + h / 2 * k1g, M + h / 2 * k1m)
        k3g, k3m = rhs(a + h / 2, g + h / 2 * k2g, M + h / 2 * k2m)
        k4g, k4m = rhs(b, g + h * k3g, M + h * k3m)
        g = g + h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g)
        M = M + h / 6 * (k1m + 2 * k2m + 2 * k3m + k4m)
        gs.append(g)
        Ms.append(M)
    return np.array(gs), np.array(Ms)


def curvature_torsion_of_samples(points, h, accuracy=6):
    """Curvature and torsion of a uniformly sampled (in any parameter) polyline."""
    p = np.asarray(points, dtype=float)
    d1 = derivative(p, h, 0, 1, accuracy)
    d2 = derivative(p, h, 0, 2, accuracy)
    d3 = derivative(d1, h, 0, 2, accuracy)
    c = np.cross(d1, d2)
    cn = np.linalg.norm(c, axis=1)
    v = np.linalg.norm(d1, axis=1)
    kappa = cn / v ** 3
    with np.errstate(invalid="ignore", divide="ignore"):
        tau = np.einsum("ij,ij->i", c, d3) / cn ** 2
    return kappa, tau


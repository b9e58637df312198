"""Singular curves of a frontal: detection on the grid and point classification.

The singular set is ``mu = <f_x x f_y, N> = 0``.  Crossings of grid edges are
located by marching squares, refined by regula falsi on the exact point
evaluator, and chained into polylines.  Each point is labelled with one of
``TYPES``.

For classification the null direction is ``eta = B_s d_x - A d_y`` where
``B_s = B cos(phi)`` carries the sign of ``f_y`` relative to ``f_x``; the
swallowtail/cone test uses ``delta = det(sigma', eta)`` along the curve with
``sigma'`` the unit domain tangent.  With ``sigma' ~ (1, eps)`` this is a
multiple of ``A + eps B``.
"""

from dataclasses import dataclass, field

import numpy as np
from skimage.measure import find_contours

from .curves import curvature_torsion_of_samples
from .errors import NotOnSingularSet, NumericalFailure
from .frames import PointEvaluator

CUSPIDAL_EDGE = "CuspidalEdge"
SWALLOWTAIL = "Swallowtail"
CONE_ARC = "ConeArc"
HIGHER_ORDER = "HigherOrderCuspidalEdge"
DEGENERATE = "Degenerate"
UNCLASSIFIED = "Unclassified"
TYPES = (CUSPIDAL_EDGE, SWALLOWTAIL, CONE_ARC, HIGHER_ORDER, DEGENERATE, UNCLASSIFIED)


@dataclass(frozen=True)
class Tolerances:
    weak_tol: float = 1e-6
    zero_tol: float = 1e-6
    degeneracy_tol: float = 1e-4
    refine_tol: float = 1e-8
    characteristic_tol: float = 1e-3

    def replace(self, **kw):
        vals = {**self.__dict__, **{k: v for k, v in kw.items() if v is not None}}
        return Tolerances(**vals)


@dataclass
class SingularCurve:
    """Ordered domain points ``xy`` on a singular curve with per-point data."""

    xy: np.ndarray
    types: list
    eta: np.ndarray
    sigma: np.ndarray
    image: np.ndarray
    mu: np.ndarray
    delta: np.ndarray
    degeneracy: np.ndarray
    weakly_regular: np.ndarray
    characteristic: bool = False
    closed: bool = False

    def __len__(self):
        return len(self.xy)

    def count(self, kind):
        return sum(1 for t in self.types if t == kind)

    def to_dict(self):
        return {"closed": self.closed, "characteristic": self.characteristic,
                "points": [{"x": float(p[0]), "y": float(p[1]), "type": t,
                            "eta": [float(e) for e in n], "image": [float(c) for c in f],
                            "mu": float(m)}
                           for p, t, n, f, m in zip(self.xy, self.types, self.eta,
                                                    self.image, self.mu)]}


@dataclass
class SingularSet:
    curves: list
    degenerate_region: np.ndarray
    degenerate_points: list = field(default_factory=list)

    @property
    def fully_degenerate(self):
        return bool(np.all(self.degenerate_region))

    def all_points(self):
        if not self.curves:
            return np.zeros((0, 2)), []
        xy = np.concatenate([c.xy for c in self.curves])
        types = [t for c in self.curves for t in c.types]
        return xy, types

    def to_dict(self):
        return {"curves": [c.to_dict() for c in self.curves],
                "degenerate_region_fraction": float(np.mean(self.degenerate_region)),
                "degenerate_points": [[float(a), float(b)] for a, b in self.degenerate_points]}


# ---------------------------------------------------------------- local data

def _evaluator(surface):
    ev = getattr(surface, "_evaluator", None)
    if ev is None:
        ev = PointEvaluator(surface.frame, surface.lam0)
        surface._evaluator = ev
    return ev


def _bases(ev, x, y):
    fr = ev.frame
    return (ev.nearest_index(fr.x_lattice, x), ev.nearest_index(fr.y_lattice, y))


def mu_gradient(ev, x, y, d):
    """Central-difference gradient of ``mu`` with lattice bases held fixed."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    base = _bases(ev, x, y)
    gx = (ev.mu(x + d, y, base) - ev.mu(x - d, y, base)) / (2 * d)
    gy = (ev.mu(x, y + d, base) - ev.mu(x, y - d, base)) / (2 * d)
    return np.stack([gx, gy], axis=-1)


def mu_hessian(ev, x, y, d):
    base = _bases(ev, x, y)
    m0 = ev.mu(x, y, base)
    mxx = (ev.mu(x + d, y, base) - 2 * m0 + ev.mu(x - d, y, base)) / d ** 2
    myy = (ev.mu(x, y + d, base) - 2 * m0 + ev.mu(x, y - d, base)) / d ** 2
    mxy = (ev.mu(x + d, y + d, base) - ev.mu(x + d, y - d, base)
           - ev.mu(x - d, y + d, base) + ev.mu(x - d, y - d, base)) / (4 * d * d)
    return np.stack([np.stack([mxx, mxy], -1), np.stack([mxy, myy], -1)], -2)


def point_data(surface, x, y, tol=Tolerances(), step=None):
    """Evaluate everything classification needs at domain points."""
    ev = _evaluator(surface)
    step = 1e-3 * min(surface.grid.spacing) if step is None else step
    x, y = np.atleast_1d(np.asarray(x, float)), np.atleast_1d(np.asarray(y, float))
    d = ev.evaluate(x, y)
    grad = mu_gradient(ev, x, y, step)
    A, B = d["A"], d["B"]
    up = np.linalg.norm(d["Up"], axis=-1)
    vp = np.linalg.norm(d["Vp"], axis=-1)
    weak = (up > tol.weak_tol) & (vp > tol.weak_tol)
    gnorm = np.linalg.norm(grad, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        scale = np.where(weak, A * B, np.maximum(A, B))
        degeneracy = np.where(scale > 0, gnorm / scale, 0.0)
    cosphi = np.cos(d["phi"])
    Bs = B * np.sign(cosphi)
    eta = np.stack([Bs, -A], axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        sigma = np.stack([-grad[:, 1], grad[:, 0]], axis=-1) / gnorm[:, None]
    sigma = np.where(np.isfinite(sigma), sigma, 0.0)
    return {**d, "x": x, "y": y, "grad": grad, "degeneracy": degeneracy,
            "weak": weak, "eta": eta, "sigma": sigma}


def _delta(sigma, eta):
    return sigma[:, 0] * eta[:, 1] - sigma[:, 1] * eta[:, 0]


def _is_characteristic(sigma, tol):
    return (np.abs(sigma[:, 0]) < tol) | (np.abs(sigma[:, 1]) < tol)


def classify_arc(data, tol=Tolerances(), arc_scale=None):
    """Label each point of one ordered arc; returns (types, delta, extra_zeros).

    ``extra_zeros`` lists ``(k, frac)`` positions between samples ``k`` and
    ``k+1`` where ``delta`` changes sign transversally.
    """
    n = len(data["x"])
    sigma, eta = data["sigma"], data["eta"]
    delta = _delta(sigma, eta)
    degenerate = data["degeneracy"] <= tol.degeneracy_tol
    weak = data["weak"]
    if arc_scale is None:
        scale = np.median(np.maximum(data["A"], data["B"])) if n else 1.0
        arc_scale = max(1.0, float(scale))
    zt = tol.zero_tol * arc_scale
    types = [UNCLASSIFIED] * n
    wr = weak & ~degenerate
    cone = bool(np.any(wr)) and bool(np.all(np.abs(delta[wr]) < zt))
    log_len = np.concatenate([[0.0], np.cumsum(np.linalg.norm(
        np.diff(np.stack([data["x"], data["y"]], -1), axis=0), axis=1))])
    slope = (np.gradient(delta) / np.maximum(np.gradient(log_len), 1e-300)
             if n > 1 else np.zeros(n))
    zeros = []
    for k in range(n):
        if degenerate[k]:
            types[k] = DEGENERATE
        elif not weak[k]:
            types[k] = HIGHER_ORDER
        elif cone:
            types[k] = CONE_ARC
        elif abs(delta[k]) >= zt:
            types[k] = CUSPIDAL_EDGE
        elif abs(slope[k]) > zt:
            types[k] = SWALLOWTAIL
        else:
            types[k] = UNCLASSIFIED
    if not cone:
        for k in range(n - 1):
            if wr[k] and wr[k + 1] and abs(delta[k]) >= zt and abs(delta[k + 1]) >= zt \
                    and delta[k] * delta[k + 1] < 0:
                zeros.append((k, delta[k] / (delta[k] - delta[k + 1])))
    return types, delta, zeros


# ---------------------------------------------------------------- detection

def _ab_to_xy(grid, a, b):
    if grid.chart == "xy":
        return a, b
    return a + b, grid.epsilon * (a - b)


def _xy_to_ab(grid, x, y):
    if grid.chart == "xy":
        return x, y
    w = grid.epsilon * y
    return 0.5 * (x + w), 0.5 * (x - w)


def _refine_vertices(ev, grid, mu, verts, iters=60, tol_mu=1e-14):
    """Bisect ``mu`` along the grid edge containing each contour vertex."""
    ha, hb = grid.spacing
    a0, b0 = grid.range_a[0], grid.range_b[0]
    r, c = verts[:, 0], verts[:, 1]
    on_row = np.abs(r - np.rint(r)) < 1e-9
    i0 = np.where(on_row, np.rint(r), np.floor(r)).astype(int)
    j0 = np.where(on_row, np.floor(c), np.rint(c)).astype(int)
    i0 = np.clip(i0, 0, grid.n_a - 1)
    j0 = np.clip(j0, 0, grid.n_b - 1)
    i1 = np.clip(np.where(on_row, i0, i0 + 1), 0, grid.n_a - 1)
    j1 = np.clip(np.where(on_row, j0 + 1, j0), 0, grid.n_b - 1)
    m0, m1 = mu[i0, j0], mu[i1, j1]
    pa0, pb0 = a0 + ha * i0, b0 + hb * j0
    pa1, pb1 = a0 + ha * i1, b0 + hb * j1
    lo = np.zeros(len(verts))
    hi = np.ones(len(verts))
    f_lo, f_hi = m0.copy(), m1.copy()
    exact0, exact1 = m0 == 0, m1 == 0
    bracket = (m0 * m1 < 0)
    t = 0.5 * np.ones(len(verts))
    side = np.zeros(len(verts), dtype=int)
    active = bracket.copy()
    for _ in range(iters):
        if not np.any(active):
            break
        # Illinois variant of regula falsi
        with np.errstate(invalid="ignore", divide="ignore"):
            cand = (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        cand = np.where(np.isfinite(cand) & (cand > lo) & (cand < hi), cand, 0.5 * (lo + hi))
        idx = np.nonzero(active)[0]
        a = pa0[idx] + cand[idx] * (pa1[idx] - pa0[idx])
        b = pb0[idx] + cand[idx] * (pb1[idx] - pb0[idx])
        m = np.zeros(len(verts))
        m[idx] = ev.mu(*_ab_to_xy(grid, a, b))
        t = np.where(active, cand, t)
        left = active & (np.sign(m) == np.sign(f_lo))
        right = active & ~left
        lo = np.where(left, cand, lo)
        f_lo = np.where(left, m, f_lo)
        f_hi = np.where(left & (side == 1), 0.5 * f_hi, f_hi)
        hi = np.where(right, cand, hi)
        f_hi = np.where(right, m, f_hi)
        f_lo = np.where(right & (side == -1), 0.5 * f_lo, f_lo)
        side = np.where(left, 1, np.where(right, -1, side))
        done = (np.abs(m) <= tol_mu) | (hi - lo < 1e-15)
        active = active & ~done
    t = np.where(bracket, t, np.where(exact1 & ~exact0, 1.0, 0.0))
    # vertices without a sign bracket (exact zeros) fall back to the contour value
    frac = np.where(on_row, c - np.floor(c), r - np.floor(r))
    t = np.where(bracket | exact0 | exact1, t, frac)
    a = pa0 + t * (pa1 - pa0)
    b = pb0 + t * (pb1 - pb0)
    return np.stack(_ab_to_xy(grid, a, b), axis=-1)


def _newton_critical(ev, x, y, d, iters=25, reach=None):
    """Newton iteration for ``grad mu = 0`` from ``(x, y)``, staying within ``reach``."""
    p0 = p = np.array([x, y], dtype=float)
    for _ in range(iters):
        try:
            g = mu_gradient(ev, p[0:1], p[1:2], d)[0]
            Hm = mu_hessian(ev, p[0:1], p[1:2], 10 * d)[0]
            step = np.linalg.solve(Hm, g)
        except (np.linalg.LinAlgError, NumericalFailure):
            return p, False
        p = p - step
        if not np.all(np.isfinite(p)) or (reach is not None
                                          and np.linalg.norm(p - p0) > reach):
            return p, False
        if np.linalg.norm(step) < 1e-12:
            break
    return p, True


def _find_degenerate_points(ev, surface, curves_raw, tol):
    """Critical points of ``mu`` on the zero set near minima of the degeneracy."""
    h = min(surface.grid.spacing)
    d = 1e-3 * h
    found = []
    for data in curves_raw:
        deg = data["degeneracy"]
        n = len(deg)
        if n < 3:
            continue
        med = np.median(deg)
        weak = data["weak"]
        # a regular branch crossing a non-weak line is a saddle of mu whose
        # normalized degeneracy blows up instead of vanishing, so seed there too
        junction = np.zeros(n, bool)
        junction[:-1] |= weak[:-1] != weak[1:]
        junction[1:] |= weak[:-1] != weak[1:]
        for k in range(n):
            lo, hi = max(0, k - 1), min(n, k + 2)
            if not junction[k] and (deg[k] > 0.25 * med or deg[k] > np.min(deg[lo:hi])):
                continue
            # contours cut corners at crossings, so junction seeds may sit a bit further off
            reach = (3 if junction[k] else 2) * h
            p, ok = _newton_critical(ev, data["x"][k], data["y"][k], d, reach=reach)
            if not ok or np.hypot(p[0] - data["x"][k], p[1] - data["y"][k]) > reach:
                continue
            m = float(ev.mu(p[0:1], p[1:2])[0])
            if abs(m) > tol.refine_tol:
                continue
            if any(np.hypot(p[0] - q[0], p[1] - q[1]) < 1e-6 for q in found):
                continue
            found.append((float(p[0]), float(p[1])))
    return found


def _inside(grid, x, y):
    a, b = _xy_to_ab(grid, x, y)
    return (grid.range_a[0] - 1e-12 <= a <= grid.range_a[1] + 1e-12
            and grid.range_b[0] - 1e-12 <= b <= grid.range_b[1] + 1e-12)


def _polyline_distance(xy, p, closed=False):
    if len(xy) == 1:
        return float(np.hypot(*(xy[0] - p)))
    a = xy if not closed else np.vstack([xy, xy[:1]])
    seg = np.diff(a, axis=0)
    ln2 = np.maximum(np.sum(seg ** 2, axis=1), 1e-300)
    t = np.clip(np.sum((p - a[:-1]) * seg, axis=1) / ln2, 0.0, 1.0)
    return float(np.min(np.linalg.norm(a[:-1] + t[:, None] * seg - p, axis=1)))


def _insert_point(xy, p):
    """Index at which ``p`` best splits the polyline ``xy``."""
    dist = np.hypot(xy[:, 0] - p[0], xy[:, 1] - p[1])
    k = int(np.argmin(dist))
    if k == 0:
        return 1 if len(xy) > 1 and dist[1] < np.hypot(*(xy[1] - xy[0])) else 0
    if k == len(xy) - 1:
        return k
    before = np.dot(p - xy[k], xy[k - 1] - xy[k])
    return k if before > 0 else k + 1


def _assemble(surface, xy, tol, closed):
    data = point_data(surface, xy[:, 0], xy[:, 1], tol)
    # orient tangents along the polyline
    if len(xy) > 1:
        chord = np.gradient(xy, axis=0)
        flip = np.einsum("ij,ij->i", chord, data["sigma"]) < 0
        data["sigma"][flip] *= -1
        zero = np.linalg.norm(data["sigma"], axis=1) == 0
        if np.any(zero):
            cn = np.linalg.norm(chord[zero], axis=1)[:, None]
            data["sigma"][zero] = chord[zero] / np.where(cn > 0, cn, 1.0)
    return data


def _to_curve(data, types, delta, tol, closed):
    char = bool(len(types)) and bool(np.all(_is_characteristic(data["sigma"],
                                                                tol.characteristic_tol)))
    return SingularCurve(np.stack([data["x"], data["y"]], -1), list(types), data["eta"],
                         data["sigma"], data["f"], data["mu"], delta, data["degeneracy"],
                         data["weak"], char, closed)


def detect_singular_set(surface, tol=Tolerances(), min_points=3):
    """Singular curves of ``surface`` plus its rank-zero (degenerate) region."""
    grid = surface.grid
    rank0 = (surface.A <= tol.weak_tol) & (surface.B <= tol.weak_tol)
    mu = np.array(surface.mu, dtype=float)
    scale = max(float(np.max(np.abs(mu))), 0.0)
    if scale <= 1e-14 or np.all(rank0):
        return SingularSet([], np.ones(grid.shape, dtype=bool) if scale <= 1e-14 else rank0)
    ev = _evaluator(surface)
    contours = find_contours(mu, 0.0)
    raw = []
    for cont in contours:
        if len(cont) < min_points:
            continue
        closed = bool(np.allclose(cont[0], cont[-1]))
        pts = _refine_vertices(ev, grid, mu, cont)
        if closed:
            pts = pts[:-1]
        keep = np.concatenate([[True], np.linalg.norm(np.diff(pts, axis=0), axis=1) > 1e-10])
        pts = pts[keep]
        if len(pts) < min_points:
            continue
        raw.append((pts, closed))
    datas = [_assemble(surface, pts, tol, closed) for pts, closed in raw]
    degen = [p for p in _find_degenerate_points(ev, surface, datas, tol)
             if _inside(grid, *p)]
    curves = []
    for (pts, closed), data in zip(raw, datas):
        extra = [np.array(p) for p in degen
                 if _polyline_distance(pts, p, closed) < 2 * min(grid.spacing)]
        if extra:
            for p in extra:
                near = np.hypot(pts[:, 0] - p[0], pts[:, 1] - p[1])
                if np.min(near) < 1e-6 * min(grid.spacing):
                    pts[int(np.argmin(near))] = p
                    continue
                k = _insert_point(pts, p)
                pts = np.insert(pts, k, p, axis=0)
            cuts = sorted({int(np.argmin(np.hypot(pts[:, 0] - p[0], pts[:, 1] - p[1])))
                           for p in extra})
            for piece, pinned in _split_at(pts, cuts, closed):
                curves.append(_classify_piece(ev, surface, piece, tol, pinned=pinned))
            continue
        curves.append(_classify_piece(ev, surface, pts, tol, closed, data=data))
    return SingularSet(curves, rank0, degen)


def _split_at(pts, cuts, closed):
    """Arcs of a polyline cut at vertex indices, each with its cut-end indices."""
    if closed:
        pts = np.concatenate([pts[cuts[0]:], pts[:cuts[0] + 1]])
        cuts = sorted({(k - cuts[0]) % (len(pts) - 1) for k in cuts} | {len(pts) - 1})
    bounds = sorted(set(cuts) | {0, len(pts) - 1})
    cut = set(cuts)
    out = []
    for a, b in zip(bounds[:-1], bounds[1:]):
        if b > a:
            out.append((pts[a:b + 1], [k - a for k in (a, b) if k in cut]))
    return out


def _classify_piece(ev, surface, pts, tol, closed=False, data=None, pinned=()):
    """Classify one arc; ``pinned`` vertices are known degenerate points."""
    if data is None:
        data = _assemble(surface, pts, tol, closed)
    for k in pinned:
        data["degeneracy"][k] = 0.0
    types, delta, zeros = classify_arc(data, tol)
    if zeros:
        # insert the transversal zeros of delta as refined swallowtail points
        new_pts = [(k + 1, pts[k] + frac * (pts[k + 1] - pts[k])) for k, frac in zeros]
        for shift, (k, p) in enumerate(new_pts):
            pts = np.insert(pts, k + shift, p, axis=0)
        pin = [k + sum(1 for kk, _ in new_pts if kk <= k) for k in pinned]
        refined = _project_to_zero(ev, pts, min(surface.grid.spacing))
        refined[pin] = pts[pin]
        data = _assemble(surface, refined, tol, closed)
        data["degeneracy"][pin] = 0.0
        types, delta, _ = classify_arc(data, tol)
    return _to_curve(data, types, delta, tol, closed)


def _project_to_zero(ev, pts, h, iters=8):
    """Newton projection of points onto ``mu = 0`` along the gradient."""
    p = np.array(pts, dtype=float)
    d = 1e-3 * h
    for _ in range(iters):
        m = ev.mu(p[:, 0], p[:, 1])
        g = mu_gradient(ev, p[:, 0], p[:, 1], d)
        gg = np.einsum("ij,ij->i", g, g)
        ok = gg > 1e-24
        step = np.where(ok[:, None], (m / np.where(ok, gg, 1.0))[:, None] * g, 0.0)
        step = np.where(np.linalg.norm(step, axis=1)[:, None] > h, 0.0, step)
        p = p - step
    return p


def classify(point, surface, tol=Tolerances(), curve=None):
    """Type of a single domain point; raises NotOnSingularSet away from ``mu = 0``.

    Without the surrounding ``curve`` the cone test cannot be applied; a point
    with ``delta = 0`` and nonzero slope is then reported as a swallowtail.
    """
    x, y = float(point[0]), float(point[1])
    data = point_data(surface, [x], [y], tol)
    scale = max(float(data["A"][0] * data["B"][0]), float(np.max(np.abs(surface.mu))), 1e-300)
    if abs(data["mu"][0]) > max(tol.refine_tol, 1e-6 * scale):
        raise NotOnSingularSet(f"mu({x:.6g}, {y:.6g}) = {data['mu'][0]:.3e} is not zero")
    if curve is not None:
        k = int(np.argmin(np.hypot(curve.xy[:, 0] - x, curve.xy[:, 1] - y)))
        return curve.types[k]
    if data["degeneracy"][0] <= tol.degeneracy_tol:
        return DEGENERATE
    if not data["weak"][0]:
        return HIGHER_ORDER
    delta = _delta(data["sigma"], data["eta"])[0]
    if abs(delta) >= tol.zero_tol * max(1.0, float(max(data["A"][0], data["B"][0]))):
        return CUSPIDAL_EDGE
    h = 1e-3 * min(surface.grid.spacing)
    s = data["sigma"][0]
    near = point_data(surface, [x - h * s[0], x + h * s[0]], [y - h * s[1], y + h * s[1]], tol)
    near_sigma = np.where((near["sigma"] @ s < 0)[:, None], -near["sigma"], near["sigma"])
    dd = _delta(near_sigma, near["eta"])
    return SWALLOWTAIL if abs(dd[1] - dd[0]) / (2 * h) > tol.zero_tol else UNCLASSIFIED


# ---------------------------------------------------------------- image curves

def sample_curve(surface, curve, n=401, project=True):
    """Uniform samples (in domain chord length) of a singular curve and its image."""
    xy = curve.xy
    seg = np.linalg.norm(np.diff(xy, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    from scipy.interpolate import CubicSpline
    spl = CubicSpline(s, xy, axis=0)
    su = np.linspace(0.0, s[-1], n)
    pts = spl(su)
    ev = _evaluator(surface)
    if project:
        pts = _project_to_zero(ev, pts, min(surface.grid.spacing))
    d = ev.evaluate(pts[:, 0], pts[:, 1])
    return pts, d["f"], su


def characteristic_diagnostics(surface, curve, n=401, tol=Tolerances()):
    """Curvature and torsion of the image of a characteristic singular curve."""
    if not curve.characteristic:
        raise NotOnSingularSet("curve is not tangent to a null coordinate direction")
    xy = curve.xy
    ev = _evaluator(surface)
    horizontal = np.ptp(xy[:, 0]) >= np.ptp(xy[:, 1])
    if horizontal:
        c = float(np.median(xy[:, 1]))
        t = np.linspace(xy[:, 0].min(), xy[:, 0].max(), n)
        d = ev.evaluate(t, np.full_like(t, c))
        mu = ev.mu(t, np.full_like(t, c))
    else:
        c = float(np.median(xy[:, 0]))
        t = np.linspace(xy[:, 1].min(), xy[:, 1].max(), n)
        d = ev.evaluate(np.full_like(t, c), t)
        mu = ev.mu(np.full_like(t, c), t)
    if np.max(np.abs(mu)) > 1e-6 * max(1.0, float(np.max(np.abs(surface.mu)))):
        raise NotOnSingularSet("sampled line leaves the singular set")
    img = d["f"]
    kappa, tau = curvature_torsion_of_samples(img, t[1] - t[0])
    inner = slice(n // 10, n - n // 10)
    k_in, t_in = kappa[inner], tau[inner]
    straight = bool(np.max(k_in) < 1e-4)
    finite_tau = t_in[np.isfinite(t_in)]
    helix = (not straight) and bool(finite_tau.size) and bool(
        np.all(np.abs(np.abs(finite_tau) - 1.0) < 1e-3))
    return {"parameter": t, "image": img, "kappa": kappa, "tau": tau,
            "line": "y" if horizontal else "x", "coordinate": c,
            "kappa_max": float(np.max(k_in)), "kappa_mean": float(np.mean(k_in)),
            "tau_mean": float(np.mean(finite_tau)) if finite_tau.size else float("nan"),
            "straight_line": straight, "unit_torsion": helix,
            "passes": straight or helix}


def image_diameter(points):
    p = np.asarray(points, dtype=float)
    if len(p) < 2:
        return 0.0
    from scipy.spatial.distance import pdist
    return float(np.max(pdist(p)))

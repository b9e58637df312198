"""Axis integration, grid assembly by Birkhoff factorization, and the Sym formula.

For a potential pair ``(chi, psi)`` the axis frames solve ``X^{-1} dX = chi``
and ``Y^{-1} dY = psi``, both equal to the initial value at ``t = 0``.  At
every node ``X^{-1} Y = H_- H_+`` and the admissible frame is ``F = X H_-``.

Tangents are not differentiated numerically: the lambda^1 part of
``F^{-1} F_x`` is ``chi_1(x)`` and the lambda^-1 part of ``F^{-1} F_y`` is
``Ad_{h0} psi_{-1}(y)`` with ``h0 = H_+(0)``.  The Sym derivative of the
frame then gives ``f_x = lam Ad_F U_p`` and ``f_y = -Ad_F V_p / lam``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import loopcore as lc
from .birkhoff import birkhoff_factor, reverse_birkhoff_factor
from .errors import TailOverflow
from .expr import SampleTable
from .parallel import chunked_map

TAIL_BUDGET = 1e-6
H_CLIP = 1e4
SIN_EPS = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Node box in either the null chart ``xy`` or the chart ``uv``.

    In the ``uv`` chart ``x = u + v`` and ``y = eps (u - v)``, so the curve
    ``v = 0`` is the diagonal ``y = eps x``.  Node ``(i, j)`` sits at
    ``(a_i, b_j)`` with ``a`` the first coordinate (``x`` or ``u``).
    """

    chart: str = "uv"
    range_a: tuple = (-1.0, 1.0)
    range_b: tuple = (-1.0, 1.0)
    n_a: int = 101
    n_b: int = 101
    epsilon: int = 1

    def __post_init__(self):
        if self.chart not in ("xy", "uv"):
            raise ValueError(f"unknown chart {self.chart!r}")
        if self.n_a < 2 or self.n_b < 2:
            raise ValueError("each axis needs at least two samples")
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")
        if self.chart == "uv":
            ha, hb = self.spacing
            if abs(ha - hb) > 1e-12 * max(ha, hb):
                raise ValueError(f"uv grids need equal spacings, got {ha} and {hb}")

    @property
    def shape(self):
        return (self.n_a, self.n_b)

    @property
    def spacing(self):
        return ((self.range_a[1] - self.range_a[0]) / (self.n_a - 1),
                (self.range_b[1] - self.range_b[0]) / (self.n_b - 1))

    @property
    def axis_a(self):
        return np.linspace(self.range_a[0], self.range_a[1], self.n_a)

    @property
    def axis_b(self):
        return np.linspace(self.range_b[0], self.range_b[1], self.n_b)

    def node_xy(self):
        a, b = np.meshgrid(self.axis_a, self.axis_b, indexing="ij")
        if self.chart == "xy":
            return a, b
        return a + b, self.epsilon * (a - b)

    def lattices(self):
        """Axis lattices for the two integrations and node index maps into them."""
        i, j = np.meshgrid(np.arange(self.n_a), np.arange(self.n_b), indexing="ij")
        if self.chart == "xy":
            return self.axis_a, i, self.axis_b, j
        h = self.spacing[0]
        a0, b0 = self.range_a[0], self.range_b[0]
        K = self.n_a + self.n_b - 1
        x_lat = (a0 + b0) + h * np.arange(K)
        w = (a0 - b0) + h * (np.arange(K) - (self.n_b - 1))
        k = i - j + self.n_b - 1
        if self.epsilon == 1:
            return x_lat, i + j, w, k
        return x_lat, i + j, -w[::-1], K - 1 - k

    def to_dict(self):
        return {"chart": self.chart, "range_a": list(self.range_a),
                "range_b": list(self.range_b), "n_a": self.n_a, "n_b": self.n_b,
                "epsilon": self.epsilon}


# ---------------------------------------------------------------- integration

def _form_mats(form, t):
    """``{power: (..., 2, 2)}`` matrices of a LoopForm at times ``t``."""
    return {j: form.matrix(j, t) for j in form.terms}


def _mul_band(Xc, mats, N):
    """``X @ A`` for dense X and a sparse band A; returns coeffs and dropped norm."""
    out = np.zeros_like(Xc)
    dropped = np.zeros(Xc.shape[:-3])
    K = 2 * N + 1
    for p, M in mats.items():
        M = M[..., None, :, :]
        if p >= 0:
            prod = Xc @ M
            out[..., p:, :, :] += prod[..., :K - p, :, :]
            lost = prod[..., K - p:, :, :]
        else:
            prod = Xc @ M
            out[..., :K + p, :, :] += prod[..., -p:, :, :]
            lost = prod[..., :-p, :, :]
        if lost.shape[-3]:
            dropped = dropped + np.linalg.norm(lost, axis=(-2, -1)).sum(-1)
    return out, dropped


def rk4_step(form, Xc, t, h, N):
    """One classical RK4 step of ``dX/dt = X A(t)``; ``t`` and ``h`` may be arrays."""
    t = np.asarray(t, dtype=float)
    h = np.asarray(h, dtype=float)
    hb = h[..., None, None, None]
    m0 = _form_mats(form, t)
    m1 = _form_mats(form, t + 0.5 * h)
    m2 = _form_mats(form, t + h)
    k1, d1 = _mul_band(Xc, m0, N)
    k2, d2 = _mul_band(Xc + 0.5 * hb * k1, m1, N)
    k3, d3 = _mul_band(Xc + 0.5 * hb * k2, m1, N)
    k4, d4 = _mul_band(Xc + hb * k3, m2, N)
    new = Xc + hb / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return new, np.abs(h) / 6.0 * (d1 + 2 * d2 + 2 * d3 + d4)


def _march(form, Xc, tail, times, N):
    vals, tails = [Xc], [tail]
    for t0, t1 in zip(times[:-1], times[1:]):
        Xc, d = rk4_step(form, Xc, t0, t1 - t0, N)
        tail = tail + d
        vals.append(Xc)
        tails.append(tail)
    return vals, tails


def integrate_axis(form, samples, initial=None, t0=0.0, N=lc.DEFAULT_TRUNCATION,
                   tail_budget=TAIL_BUDGET, name="x"):
    """Frame values at ``samples`` for ``X^{-1} dX = form`` with ``X(t0) = initial``.

    ``samples`` must be ascending and uniformly spaced; the RK4 step is the
    spacing.  If ``t0`` is not a sample, the nearest sample is reached first
    in substeps no longer than the spacing.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1 or s.size < 1:
        raise ValueError("samples must be a nonempty 1-d array")
    if initial is None:
        initial = lc.identity_loop(N)
    N = initial.N
    h = (s[-1] - s[0]) / (s.size - 1) if s.size > 1 else 1.0
    if s.size > 2 and np.max(np.abs(np.diff(s) - h)) > 1e-9 * max(abs(h), 1.0):
        raise ValueError("samples must be uniformly spaced")
    k0 = int(np.argmin(np.abs(s - t0)))
    gap = s[k0] - t0
    m = int(np.ceil(abs(gap) / abs(h) - 1e-9)) if gap != 0 else 0
    Xc, tail = np.array(initial.coeffs), float(np.max(initial.tail))
    if m:
        vals, tails = _march(form, Xc, tail, np.linspace(t0, s[k0], m + 1), N)
        Xc, tail = vals[-1], tails[-1]
    out = np.empty((s.size,) + Xc.shape, dtype=complex)
    tout = np.empty(s.size)
    fw, tfw = _march(form, Xc, tail, s[k0:], N)
    bw, tbw = _march(form, Xc, tail, s[k0::-1], N)
    out[k0:], tout[k0:] = fw, tfw
    out[:k0 + 1] = bw[::-1]
    tout[:k0 + 1] = tbw[::-1]
    if not np.all(np.isfinite(out)):
        bad = int(np.argmax(~np.isfinite(out).reshape(s.size, -1).all(-1)))
        raise TailOverflow(f"integration along {name} diverged", {name: float(s[bad])})
    if np.max(tout) > tail_budget:
        bad = int(np.argmax(tout > tail_budget))
        raise TailOverflow(
            f"dropped-tail mass {np.max(tout):.3e} along {name} exceeds budget "
            f"{tail_budget:.1e}; increase the truncation order", {name: float(s[bad])})
    return lc.TwistedLoop(out, "group", tout)


# ---------------------------------------------------------------- assembly

@dataclass
class FrameGrid:
    grid: GridSpec
    pair: object
    N: int
    x: np.ndarray
    y: np.ndarray
    x_lattice: np.ndarray
    y_lattice: np.ndarray
    ix: np.ndarray
    iy: np.ndarray
    X: lc.TwistedLoop
    Y: lc.TwistedLoop
    F: lc.TwistedLoop
    h0: np.ndarray
    residual: np.ndarray
    condition: np.ndarray
    basepoint: tuple = (0.0, 0.0)
    diagnostics: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.grid.shape


def _factor_nodes(Xc, Yc, N, tail):
    Xl = lc.TwistedLoop(lc.adjugate2(Xc), "group", tail)
    Yl = lc.TwistedLoop(Yc, "group")
    G = lc.loop_mul(Xl, Yl).replace(kind="group")
    res = birkhoff_factor(G)
    F = lc.loop_mul(lc.TwistedLoop(Xc, "group"), res.h_minus)
    return F, res


def build_frame_grid(pair, grid, N=lc.DEFAULT_TRUNCATION, basepoint=(0.0, 0.0),
                     initial=None, tail_budget=TAIL_BUDGET, threads=None,
                     chunk=2048):
    """Integrate both legs of ``pair`` and assemble ``F = X H_-`` on ``grid``."""
    if initial is not None:
        N = initial.N
    x_lat, ix, y_lat, iy = grid.lattices()
    X = integrate_axis(pair.chi, x_lat, initial, basepoint[0], N, tail_budget, "x")
    Y = integrate_axis(pair.psi, y_lat, initial, basepoint[1], N, tail_budget, "y")
    fi, fj = ix.ravel(), iy.ravel()
    n = fi.size
    K = 2 * N + 1
    Fc = np.empty((n, K, 2, 2), dtype=complex)
    h0 = np.empty((n, 2, 2), dtype=complex)
    resid = np.empty(n)
    cond = np.empty(n)
    ftail = np.empty(n)
    xs, ys = grid.node_xy()

    def work(sl):
        try:
            F, res = _factor_nodes(X.coeffs[fi[sl]], Y.coeffs[fj[sl]], N,
                                   X.tail[fi[sl]] + Y.tail[fj[sl]])
        except Exception as exc:
            loc = getattr(exc, "location", None)
            if isinstance(loc, tuple) and loc:
                k = sl.start + loc[0]
                i, j = np.unravel_index(k, grid.shape)
                exc.location = {"node": (int(i), int(j)), "x": float(xs[i, j]),
                                "y": float(ys[i, j])}
            raise
        Fc[sl] = F.coeffs
        h0[sl] = res.h_plus.coeff(0)
        resid[sl] = res.residual
        cond[sl] = res.condition
        ftail[sl] = F.tail

    chunked_map(work, n, chunk, threads)
    if np.max(ftail) > tail_budget:
        k = int(np.argmax(ftail))
        i, j = np.unravel_index(k, grid.shape)
        raise TailOverflow(
            f"dropped-tail mass {ftail[k]:.3e} exceeds budget {tail_budget:.1e}",
            {"node": (int(i), int(j)), "x": float(xs[i, j]), "y": float(ys[i, j])})
    shp = grid.shape
    F = lc.TwistedLoop(Fc.reshape(shp + (K, 2, 2)), "group", ftail.reshape(shp))
    diag = {"max_birkhoff_residual": float(np.max(resid)),
            "max_condition": float(np.max(cond)),
            "max_tail": float(np.max(ftail)),
            "det_drift_x": float(np.max(lc.det_defect(X))),
            "det_drift_y": float(np.max(lc.det_defect(Y)))}
    return FrameGrid(grid, pair, N, xs, ys, x_lat, y_lat, ix, iy, X, Y, F,
                     h0.reshape(shp + (2, 2)), resid.reshape(shp), cond.reshape(shp),
                     tuple(basepoint), diag)


def rebase_frame(frame, node):
    """Renormalize so that ``F = I`` at grid ``node``: ``F -> F(node)^{-1} F``.

    ``X`` and ``Y`` pick up the same constant left factor, so ``G`` and the
    potentials are untouched while the surface moves by a rigid motion.
    """
    i, j = node
    Fn = frame.F[i, j]
    C = lc.TwistedLoop(lc.adjugate2(Fn.coeffs), "group", Fn.tail)

    def left(L):
        return lc.loop_mul(C, L)

    diag = dict(frame.diagnostics, rebased_at=(int(i), int(j)))
    return FrameGrid(frame.grid, frame.pair, frame.N, frame.x, frame.y,
                     frame.x_lattice, frame.y_lattice, frame.ix, frame.iy,
                     left(frame.X), left(frame.Y), left(frame.F), frame.h0,
                     frame.residual, frame.condition,
                     (float(frame.x[i, j]), float(frame.y[i, j])), diag)


# ---------------------------------------------------------------- Sym formula

def rotation_of(F):
    """3x3 matrices of ``Ad_F`` on R^3 for stacked SU(2) values ``F``."""
    Finv = lc.inv2(F)
    cols = [lc.su2_to_vec(F @ e @ Finv) for e in (lc.E1, lc.E2, lc.E3)]
    return np.stack(cols, axis=-1)


@dataclass
class SurfaceGrid:
    """Frontal and its first-order data on a node grid.

    ``Up``, ``Vp`` are the su(2) coefficients (as vectors) of the lambda^1
    part of ``F^{-1}F_x`` and the lambda^-1 part of ``F^{-1}F_y``.
    """

    grid: GridSpec
    lam0: float
    x: np.ndarray
    y: np.ndarray
    f: np.ndarray
    N: np.ndarray
    fx: np.ndarray
    fy: np.ndarray
    A: np.ndarray
    B: np.ndarray
    phi: np.ndarray
    mu: np.ndarray
    H: np.ndarray
    Up: np.ndarray
    Vp: np.ndarray
    frame: object = None

    @property
    def epsilon(self):
        return self.grid.epsilon

    @property
    def sin_phi(self):
        with np.errstate(invalid="ignore", divide="ignore"):
            s = self.mu / (self.A * self.B)
        return np.where(self.A * self.B > 0, s, 0.0)

    @property
    def H_clipped(self):
        return np.clip(self.H, -H_CLIP, H_CLIP)

    def regular_mask(self, threshold=0.1):
        return np.abs(self.sin_phi) > threshold


def tangent_data(fx, fy, N):
    """``A, B, phi, mu, H`` from tangents and normal; ``phi`` is wrapped."""
    A = np.linalg.norm(fx, axis=-1)
    B = np.linalg.norm(fy, axis=-1)
    mu = np.einsum("...i,...i->...", np.cross(fx, fy), N)
    dot = np.einsum("...i,...i->...", fx, fy)
    phi = np.arctan2(mu, dot)
    AB = A * B
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(AB > 0, mu / AB, 0.0)
        c = np.where(AB > 0, dot / AB, 1.0)
        H = np.where(np.abs(s) > SIN_EPS, -c / s, np.copysign(np.inf, -c * np.where(s == 0, 1.0, s)))
    return A, B, phi, mu, H


def unwrap_grid(phi):
    out = np.array(phi, dtype=float)
    out[:, 0] = np.unwrap(out[:, 0])
    return np.unwrap(out, axis=1)


def surface_from_values(Fv, Fl, Up, Vp, lam0):
    """Sym formula at stacked frame values ``Fv`` and ``Fl = lam dF/dlam``."""
    Finv = lc.inv2(Fv)
    f = lc.su2_to_vec(Fl @ Finv)
    R = rotation_of(Fv)
    Nn = R[..., :, 2]
    fx = lam0 * np.einsum("...ij,...j->...i", R, Up)
    fy = -np.einsum("...ij,...j->...i", R, Vp) / lam0
    return f, Nn, fx, fy


def leading_vectors(pair, x, y, h0):
    Up = pair.chi.component(1, x)
    psi1 = lc.vec_to_su2(pair.psi.component(-1, y))
    Vp = lc.su2_to_vec(h0 @ psi1 @ lc.inv2(h0))
    return Up, Vp


def sym_surface(frame, lam0=1.0):
    """Evaluate the Sym formula at real ``lam0`` along with its first-order data."""
    lam0 = float(lam0)
    if lam0 == 0 or not np.isfinite(lam0):
        raise ValueError("lambda0 must be a nonzero real number")
    Fv = lc.evaluate(frame.F, lam0)
    Fl = lc.evaluate(lc.euler_derivative(frame.F), lam0)
    Up, Vp = leading_vectors(frame.pair, frame.x, frame.y, frame.h0)
    f, Nn, fx, fy = surface_from_values(Fv, Fl, Up, Vp, lam0)
    A, B, phi, mu, H = tangent_data(fx, fy, Nn)
    return SurfaceGrid(frame.grid, lam0, frame.x, frame.y, f, Nn, fx, fy, A, B,
                       unwrap_grid(phi), mu, H, Up, Vp, frame)


# ---------------------------------------------------------------- point evaluation

class PointEvaluator:
    """Surface data at arbitrary domain points, from the stored axis frames.

    Each point takes one partial RK4 step from the nearest lattice node on
    each axis, so its accuracy matches the grid's.
    """

    def __init__(self, frame, lam0=1.0):
        self.frame = frame
        self.lam0 = float(lam0)
        self.N = frame.N

    @staticmethod
    def nearest_index(lattice, t):
        h = lattice[1] - lattice[0]
        return np.clip(np.rint((np.asarray(t, float) - lattice[0]) / h).astype(int),
                       0, lattice.size - 1)

    def _axis_value(self, form, lattice, loops, t, base=None):
        t = np.asarray(t, dtype=float)
        k = self.nearest_index(lattice, t) if base is None else \
            np.broadcast_to(np.asarray(base, dtype=int), t.shape)
        start = lattice[k]
        Xc, _ = rk4_step(form, loops.coeffs[k], start, t - start, self.N)
        return Xc

    def frames(self, x, y, base=None):
        """Factored frames at points; ``base`` optionally fixes the lattice nodes."""
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        shp = x.shape
        x, y = x.ravel(), y.ravel()
        fr = self.frame
        bx = by = None
        if base is not None:
            bx = np.broadcast_to(np.asarray(base[0]), shp).ravel()
            by = np.broadcast_to(np.asarray(base[1]), shp).ravel()
        Xc = self._axis_value(fr.pair.chi, fr.x_lattice, fr.X, x, bx)
        Yc = self._axis_value(fr.pair.psi, fr.y_lattice, fr.Y, y, by)
        F, res = _factor_nodes(Xc, Yc, self.N, 0.0)
        return x, y, F, res.h_plus.coeff(0), shp

    def evaluate(self, x, y, base=None):
        x, y, F, h0, shp = self.frames(x, y, base)
        Fv = lc.evaluate(F, self.lam0)
        Fl = lc.evaluate(lc.euler_derivative(F), self.lam0)
        Up, Vp = leading_vectors(self.frame.pair, x, y, h0)
        f, Nn, fx, fy = surface_from_values(Fv, Fl, Up, Vp, self.lam0)
        A, B, phi, mu, H = tangent_data(fx, fy, Nn)
        out = {"f": f, "N": Nn, "fx": fx, "fy": fy, "A": A, "B": B, "phi": phi,
               "mu": mu, "Up": Up, "Vp": Vp}
        return {k: v.reshape(shp + v.shape[1:]) for k, v in out.items()}

    def mu(self, x, y, base=None):
        x, y, F, h0, shp = self.frames(x, y, base)
        Up, Vp = leading_vectors(self.frame.pair, x, y, h0)
        # lam0 cancels: mu = -<U_p x V_p, e3>
        return -np.cross(Up, Vp)[:, 2].reshape(shp)


# ---------------------------------------------------------------- diagnostics

def connection_components(frame, accuracy=2):
    """``(U_k, U_p, V_k, V_p)`` per node from finite differences of ``F``.

    Returned as R^3 vectors keyed by name.  The loop ``F^{-1} dF`` is formed
    coefficientwise and split by power: lambda^0 gives the k-parts, lambda^1
    of the x-derivative ``U_p`` and lambda^-1 of the y-derivative ``V_p``.
    """
    from .fd import xy_partials

    Fc = frame.F.coeffs
    Fx, Fy = xy_partials(Fc, frame.grid, accuracy)
    Finv = lc.TwistedLoop(lc.adjugate2(Fc), "group")
    N = frame.N
    ux = lc.loop_mul(Finv, lc.TwistedLoop(Fx, "plain"))
    vy = lc.loop_mul(Finv, lc.TwistedLoop(Fy, "plain"))
    return {"U_k": lc.su2_to_vec(ux.coeffs[..., N, :, :]),
            "U_p": lc.su2_to_vec(ux.coeffs[..., N + 1, :, :]),
            "V_k": lc.su2_to_vec(vy.coeffs[..., N, :, :]),
            "V_p": lc.su2_to_vec(vy.coeffs[..., N - 1, :, :]),
            "x_residual": np.linalg.norm(np.delete(ux.coeffs, [N, N + 1], axis=-3),
                                         axis=(-2, -1)).max(-1),
            "y_residual": np.linalg.norm(np.delete(vy.coeffs, [N - 1, N], axis=-3),
                                         axis=(-2, -1)).max(-1)}


@dataclass
class NormalizedPotentialPair:
    """Normalized potentials ``zeta(x) lam dx`` and ``xi(y) dy / lam``.

    ``zeta_vec``/``xi_vec`` hold su(2) coordinates; ``zeta``/``xi`` are the
    upper-right matrix entries.  ``shape_error`` is the largest coefficient of
    the reconstructed forms outside the allowed single power.
    """

    x: np.ndarray
    y: np.ndarray
    zeta_vec: np.ndarray
    xi_vec: np.ndarray
    shape_error: float

    @property
    def zeta(self):
        return 0.5 * (1j * self.zeta_vec[:, 0] - self.zeta_vec[:, 1])

    @property
    def xi(self):
        return 0.5 * (1j * self.xi_vec[:, 0] - self.xi_vec[:, 1])

    def tables(self):
        """Sample tables ``(zeta_e1, zeta_e2, xi_e1, xi_e2)``."""
        hx = self.x[1] - self.x[0]
        hy = self.y[1] - self.y[0]
        return (SampleTable(self.x[0], hx, self.zeta_vec[:, 0]),
                SampleTable(self.x[0], hx, self.zeta_vec[:, 1]),
                SampleTable(self.y[0], hy, self.xi_vec[:, 0]),
                SampleTable(self.y[0], hy, self.xi_vec[:, 1]))

    def to_pair(self):
        from .potentials import normalized_pair
        ze1, ze2, xe1, xe2 = self.tables()
        return normalized_pair(ze1, ze2, xe1, xe2, (self.x[0], self.x[-1]),
                               (self.y[0], self.y[-1]))


def normalized_potentials(frame):
    """Normalized potentials along the lattice lines through the basepoint.

    ``F(x, y_b) = X_+ G_-`` with ``X_+(0) = I`` gives ``zeta = Ad_{g0} U_p``
    and ``F(x_b, y) = Y_- G_+`` gives ``xi = Ad_{g0'} V_p``, where ``g0``,
    ``g0'`` are the constant terms of ``G_-`` and ``G_+``.
    """
    pair = frame.pair
    xb, yb = frame.basepoint
    xl, yl = frame.x_lattice, frame.y_lattice
    N = frame.N
    ev = PointEvaluator(frame)
    _, _, Fx, h0x, _ = ev.frames(xl, np.full_like(xl, yb))
    _, _, Fy, h0y, _ = ev.frames(np.full_like(yl, xb), yl)
    rx = reverse_birkhoff_factor(Fx)
    ry = birkhoff_factor(Fy)
    Up, _ = leading_vectors(pair, xl, np.full_like(xl, yb), h0x)
    _, Vp = leading_vectors(pair, np.full_like(yl, xb), yl, h0y)
    g0 = rx.h_minus.coeff(0)
    g0p = ry.h_plus.coeff(0)
    zeta = lc.su2_to_vec(g0 @ lc.vec_to_su2(Up) @ lc.inv2(g0))
    xi = lc.su2_to_vec(g0p @ lc.vec_to_su2(Vp) @ lc.inv2(g0p))
    # shape check: X_+^{-1} dX_+ by differences of the factor must be zeta*lam only
    from .fd import derivative
    Xp = rx.h_plus.coeffs
    dXp = derivative(Xp, xl[1] - xl[0], 0, 1, 4)
    form = lc.loop_mul(lc.TwistedLoop(lc.adjugate2(Xp)), lc.TwistedLoop(dXp, "plain"))
    other = np.delete(form.coeffs, [N + 1], axis=-3)
    err_x = float(np.max(np.linalg.norm(other, axis=(-2, -1))))
    Ym = ry.h_minus.coeffs
    dYm = derivative(Ym, yl[1] - yl[0], 0, 1, 4)
    formy = lc.loop_mul(lc.TwistedLoop(lc.adjugate2(Ym)), lc.TwistedLoop(dYm, "plain"))
    othery = np.delete(formy.coeffs, [N - 1], axis=-3)
    err_y = float(np.max(np.linalg.norm(othery, axis=(-2, -1))))
    return NormalizedPotentialPair(xl, yl, zeta, xi, max(err_x, err_y))

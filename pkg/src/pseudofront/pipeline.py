"""End-to-end runs: potentials -> frames -> surface -> singular set -> checks."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from . import potentials as pot
from .curves import curvature_torsion_of_samples
from .frames import GridSpec, build_frame_grid, sym_surface
from .singular import Tolerances, detect_singular_set, sample_curve
from .verify import check_suite, kabsch_align


@dataclass
class RunResult:
    mode: str
    pair: object
    grid: GridSpec
    frame: object
    surface: object
    singular: object = None
    report: dict = None
    curve: object = None
    extras: dict = field(default_factory=dict)


def uv_grid(u_range, v_half, n_u, epsilon):
    """uv grid with ``n_u`` samples on ``u_range`` and the same spacing in ``v``."""
    h = (u_range[1] - u_range[0]) / (n_u - 1)
    m = max(1, int(round(v_half / h)))
    return GridSpec("uv", tuple(u_range), (-m * h, m * h), n_u, 2 * m + 1, epsilon)


def grid_from_domain(domain, res, chart, epsilon):
    """``domain = (a0, a1, b0, b1)``; ``res`` is an int or a pair."""
    a0, a1, b0, b1 = (float(v) for v in domain)
    na, nb = (res, res) if np.isscalar(res) else (int(res[0]), int(res[1]))
    if chart == "uv":
        ha = (a1 - a0) / (na - 1)
        nb_fit = (b1 - b0) / ha + 1
        if abs(nb_fit - round(nb_fit)) > 1e-9:
            raise ValueError(f"uv domain needs equal spacings: v-extent {b1 - b0} is not a "
                             f"multiple of the u-spacing {ha}")
        nb = int(round(nb_fit))
    return GridSpec(chart, (a0, a1), (b0, b1), int(na), int(nb), int(epsilon))


def finish(mode, pair, grid, N=12, lam0=1.0, tol=Tolerances(), threads=None,
           detect=True, checks=True, curve=None):
    frame = build_frame_grid(pair, grid, N, threads=threads)
    surface = sym_surface(frame, lam0)
    sing = detect_singular_set(surface, tol) if detect else None
    report = check_suite(surface, weak_tol=tol.weak_tol) if checks else None
    return RunResult(mode, pair, grid, frame, surface, sing, report, curve)


def run_cauchy(kappa, tau, grid=None, N=12, lam0=1.0, branch="proof", epsilon=None,
               tol=Tolerances(), threads=None, curve=None, v_half=0.5, n_u=101, **kw):
    interval = curve.interval if curve is not None else (
        (grid.range_a if grid is not None else (-1.0, 1.0)))
    pair = pot.cuspidal_edge_potential(kappa, tau, interval, branch, epsilon)
    if grid is None:
        grid = uv_grid(interval, v_half, n_u, pair.epsilon)
    elif grid.epsilon != pair.epsilon:
        grid = GridSpec(grid.chart, grid.range_a, grid.range_b, grid.n_a, grid.n_b,
                        pair.epsilon)
    return finish("cauchy", pair, grid, N, lam0, tol, threads, curve=curve, **kw)


def run_generate(A, B, beta, epsilon, grid, N=12, lam0=1.0, tol=Tolerances(),
                 threads=None, **kw):
    pair = pot.noncharacteristic_potential(A, B, beta, epsilon, grid.range_a)
    if grid.epsilon != pair.epsilon:
        grid = GridSpec(grid.chart, grid.range_a, grid.range_b, grid.n_a, grid.n_b,
                        pair.epsilon)
    return finish("generate", pair, grid, N, lam0, tol, threads, **kw)


def run_characteristic(kappa, alpha, beta, grid, N=12, lam0=1.0, tol=Tolerances(),
                       threads=None, **kw):
    xs, ys = grid.node_xy()
    pair = pot.characteristic_potential(kappa, alpha, beta,
                                        (float(xs.min()), float(xs.max())),
                                        (float(ys.min()), float(ys.max())))
    return finish("characteristic", pair, grid, N, lam0, tol, threads, **kw)


def longest_curve(singular, characteristic=None):
    curves = [c for c in singular.curves
              if characteristic is None or c.characteristic == characteristic]
    return max(curves, key=len) if curves else None


def cauchy_fidelity(run, n=801, trim=0.1, floor=0.1):
    """Compare the detected singular curve's image with the input curve.

    Returns the rigid-alignment deviation and the relative curvature/torsion
    errors on the image, skipping ``trim`` of each end and samples where the
    reference value is below ``floor`` times its maximum magnitude.
    """
    curve = run.curve
    c = longest_curve(run.singular, characteristic=False)
    if c is None or curve is None:
        return None
    pts, img, _ = sample_curve(run.surface, c, n)
    s = pts[:, 0]
    order = np.argsort(s)
    s, img = s[order], img[order]
    gamma = CubicSpline(curve.s, curve.gamma, axis=0)(s)
    al = kabsch_align(img, gamma)
    # curvature and torsion are parametrization invariant; samples are uniform in s
    k_img, t_img = curvature_torsion_of_samples(img, s[1] - s[0])
    k_ref = np.interp(s, curve.s, curve.kappa)
    t_ref = np.interp(s, curve.s, curve.tau)
    m = len(s)
    keep = np.zeros(m, dtype=bool)
    keep[int(trim * m):m - int(trim * m)] = True

    def rel(a, b):
        ok = keep & (np.abs(b) > floor * np.max(np.abs(b))) & np.isfinite(a)
        return float(np.max(np.abs(a[ok] - b[ok]) / np.abs(b[ok]))) if np.any(ok) else 0.0

    return {"max_deviation": al.max, "rms_deviation": al.rms,
            "kappa_rel_error": rel(k_img, k_ref), "tau_rel_error": rel(t_img, t_ref),
            "s_range": [float(s[0]), float(s[-1])], "samples": m}


def leading_coefficient_report(pair, tol=1e-6):
    """Leading-coefficient norms along the diagonal at the torsion crossings.

    At a parameter ``s`` with ``|tau(s)| = 1`` exactly one of ``chi_1`` and
    ``psi_{-1}`` should vanish at the diagonal point ``(s, eps s)``.
    """
    md = pair.metadata
    pts = sorted(list(md.get("tau_plus_one", [])) + list(md.get("tau_minus_one", [])))
    rows = []
    for s in pts:
        c1, p1 = pair.leading_coefficients(np.array([s]), np.array([pair.epsilon * s]))
        c1, p1 = float(c1[0]), float(p1[0])
        rows.append({"s": float(s), "chi_1": c1, "psi_-1": p1,
                     "vanishing": int(c1 <= tol) + int(p1 <= tol)})
    return rows

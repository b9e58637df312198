"""Finite-difference derivatives on uniform grids (Fornberg weights)."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=256)
def fornberg_weights(offsets, deriv):
    """Weights for the ``deriv``-th derivative at 0 from nodes at ``offsets``.

    ``offsets`` is a tuple in units of the grid spacing.
    """
    z = np.asarray(offsets, dtype=float)
    n = len(z)
    if deriv >= n:
        raise ValueError("stencil too small for requested derivative")
    c = np.zeros((n, deriv + 1))
    c1, c4 = 1.0, z[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, deriv)
        c2, c5 = 1.0, c4
        c4 = z[i]
        for j in range(i):
            c3 = z[i] - z[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    w = c[:, deriv].copy()
    w.setflags(write=False)
    return w


def derivative(a, h, axis=0, deriv=1, accuracy=2):
    """Derivative of ``a`` along ``axis``: centered inside, one-sided at edges."""
    a = np.asarray(a)
    a = np.moveaxis(a, axis, 0)
    n = a.shape[0]
    half = (deriv + 1) // 2 - 1 + accuracy // 2
    width = 2 * half + 1
    one_sided = deriv + accuracy
    if n < max(width, one_sided):
        raise ValueError(f"need at least {max(width, one_sided)} samples, got {n}")
    out = np.empty(a.shape, dtype=np.result_type(a.dtype, float))
    w = fornberg_weights(tuple(range(-half, half + 1)), deriv)
    inner = np.zeros((n - 2 * half,) + a.shape[1:], dtype=out.dtype)
    for k, wk in enumerate(w):
        inner += wk * a[k:n - 2 * half + k]
    out[half:n - half] = inner
    for i in list(range(half)) + list(range(n - half, n)):
        start = 0 if i < half else n - one_sided
        offs = tuple(range(start - i, start - i + one_sided))
        wi = fornberg_weights(offs, deriv)
        out[i] = np.tensordot(wi, a[start:start + one_sided], axes=(0, 0))
    return np.moveaxis(out / h ** deriv, 0, axis)


def xy_partials(field, grid, accuracy=2, second=False):
    """``d/dx`` and ``d/dy`` of a node field on a grid in either chart.

    ``field`` has the node axes first.  With ``second=True`` also returns
    ``(f_xx, f_xy, f_yy)``.
    """
    ha, hb = grid.spacing
    da = derivative(field, ha, 0, 1, accuracy)
    db = derivative(field, hb, 1, 1, accuracy)
    if grid.chart == "xy":
        fx, fy = da, db
    else:
        e = grid.epsilon
        fx, fy = 0.5 * (da + db), 0.5 * e * (da - db)
    if not second:
        return fx, fy
    daa = derivative(field, ha, 0, 2, accuracy)
    dbb = derivative(field, hb, 1, 2, accuracy)
    dab = derivative(da, hb, 1, 1, accuracy)
    if grid.chart == "xy":
        return fx, fy, (daa, dab, dbb)
    e = grid.epsilon
    fxx = 0.25 * (daa + 2 * dab + dbb)
    fyy = 0.25 * (daa - 2 * dab + dbb)
    fxy = 0.25 * e * (daa - dbb)
    return fx, fy, (fxx, fxy, fyy)

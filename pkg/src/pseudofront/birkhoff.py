"""Normalized Birkhoff factorization ``G = H_- H_+`` of twisted loops.

``H_-^{-1} = I + sum_{k=1..N} K_k lam^{-k}`` is found from the requirement
that ``H_-^{-1} G`` has no strictly negative powers.  Twisting leaves one
unknown scalar per power in each matrix row, so each row is an N x N Toeplitz
system in the coefficients of ``G``; all grid nodes are solved in one batched
LU call.
"""

from dataclasses import dataclass

import numpy as np

from . import loopcore as lc
from .errors import IllConditioned

TOL_BIRKHOFF = 1e-9
COND_LIMIT = 1e12


@dataclass(frozen=True)
class BirkhoffResult:
    h_minus: lc.TwistedLoop
    h_plus: lc.TwistedLoop
    residual: np.ndarray
    condition: np.ndarray


def _toeplitz_systems(c, N):
    """Assemble the reduced systems for both matrix rows.

    ``c`` holds coefficients of G for powers -N..N.  Returns matrices of shape
    ``(2, ..., N, N)`` and right-hand sides ``(2, ..., N)``.
    """
    batch = c.shape[:-3]

    def g(j, r, s):
        # G coefficient at power j, entry (r, s); zero outside the band
        j = np.asarray(j)
        inside = np.abs(j) <= N
        vals = c[..., np.clip(j, -N, N) + N, r, s]
        return np.where(inside, vals, 0.0)

    k = np.arange(1, N + 1)
    m = np.arange(1, N + 1)
    mats = np.empty((2,) + batch + (N, N), dtype=complex)
    rhs = np.empty((2,) + batch + (N,), dtype=complex)
    for r in (0, 1):
        s_of_k = np.where(k % 2 == 0, r, 1 - r)
        c_of_m = np.where(m % 2 == 0, r, 1 - r)
        for mi, mm in enumerate(m):
            cc = c_of_m[mi]
            # sum_k K_k[r, s(k)] * G_{k-m}[s(k), cc] = -G_{-m}[r, cc]
            row = np.stack([g(kk - mm, s_of_k[ki], cc) for ki, kk in enumerate(k)],
                           axis=-1)
            mats[r, ..., mi, :] = row
            rhs[r, ..., mi] = -g(-mm, r, cc)
    return mats, rhs


def _solve_minus_inverse(G, N):
    """Coefficients of H_-^{-1} (powers -N..0) by the reduced Toeplitz solve."""
    c = G.coeffs
    mats, rhs = _toeplitz_systems(c, N)
    cond = np.max(np.linalg.cond(mats), axis=0)
    sol = np.linalg.solve(mats, rhs[..., None])[..., 0]
    batch = c.shape[:-3]
    K = np.zeros(batch + (2 * N + 1, 2, 2), dtype=complex)
    K[..., N, 0, 0] = K[..., N, 1, 1] = 1.0
    for r in (0, 1):
        for ki in range(N):
            kk = ki + 1
            s = r if kk % 2 == 0 else 1 - r
            K[..., N - kk, r, s] = sol[r, ..., ki]
    return lc.TwistedLoop(K, "group"), cond


def birkhoff_factor(G, tol=TOL_BIRKHOFF, cond_limit=COND_LIMIT, location=None):
    """Factor ``G = H_- H_+`` with ``H_-(lam=inf) = I``.

    Nodes whose system condition number exceeds ``cond_limit`` are retried
    once with the band doubled; if that is still outside the limit,
    ``IllConditioned`` is raised.
    """
    N = G.N
    if not np.all(np.isfinite(G.coeffs)):
        bad = np.argwhere(~np.isfinite(G.coeffs).reshape(G.batch_shape + (-1,)).all(-1))
        loc = tuple(int(v) for v in bad[0]) if len(bad) and G.batch_shape else location
        raise IllConditioned("loop has non-finite coefficients", loc)
    K, cond = _solve_minus_inverse(G, N)
    bad = ~(cond <= cond_limit)
    if np.any(bad):
        G2 = lc.resize(G, 2 * N)
        K2, cond2 = _solve_minus_inverse(G2, 2 * N)
        if np.any(~(cond2[bad] <= cond_limit)):
            where = location
            if where is None and np.ndim(bad):
                where = tuple(int(i) for i in np.argwhere(bad)[0])
            raise IllConditioned(
                f"Birkhoff system condition {np.max(cond2[bad]):.3e} "
                f"exceeds {cond_limit:.1e} even at truncation {2 * N}", where)
        K_small = lc.resize(K2, N)
        c = np.where(bad[..., None, None, None], K_small.coeffs, K.coeffs)
        K = lc.TwistedLoop(c, "group")
        cond = np.where(bad, cond2, cond)

    full = lc._cauchy_full(K.coeffs, G.coeffs)
    kg, _ = lc._split_full(full, N)
    # negative powers beyond the imposed band are the truncation tail
    neg_tail = np.linalg.norm(full[..., :N, :, :], axis=(-2, -1)).sum(-1)
    kg[..., :N, :, :] = 0.0
    h_plus = lc.TwistedLoop(kg, "group", G.tail + neg_tail)
    h_minus = lc.TwistedLoop(lc.adjugate2(K.coeffs), "group", G.tail)
    recon = lc.loop_mul(h_minus, h_plus)
    residual = lc.coeff_distance(recon, G)
    return BirkhoffResult(h_minus, h_plus, residual, cond)


def reverse_birkhoff_factor(G, **kw):
    """Factor ``G = P_+ Q_-`` with ``P_+(lam=0) = I``.

    Obtained from the standard factorization of ``G(1/lam)``.  Returned as a
    ``BirkhoffResult`` whose ``h_plus`` field is the normalized ``P_+`` and
    whose ``h_minus`` is ``Q_-``.
    """
    res = birkhoff_factor(lc.invert_lambda(G), **kw)
    return BirkhoffResult(lc.invert_lambda(res.h_plus),
                          lc.invert_lambda(res.h_minus),
                          res.residual, res.condition)

"""Truncated twisted matrix Laurent series and the su(2) <-> R^3 dictionary.

A loop is stored by its coefficients ``c_j`` for powers ``j = -N..N`` in an
array of shape ``(..., 2N+1, 2, 2)``; index ``j + N`` holds ``c_j``.  Leading
axes are batch axes, so a whole grid of loops is a single object and every
operation below is vectorized over them.

Twisting means diagonal entries live on even powers and off-diagonal entries
on odd powers (``parity=0``).  Differentiating in lambda shifts powers by one
and flips this pattern, which is recorded as ``parity=1``.
"""

import numpy as np

from .errors import DetDrift

E1 = 0.5 * np.array([[0, 1j], [1j, 0]])
E2 = 0.5 * np.array([[0, -1], [1, 0]], dtype=complex)
E3 = 0.5 * np.array([[1j, 0], [0, -1j]])
I2 = np.eye(2, dtype=complex)

for _m in (E1, E2, E3, I2):
    _m.setflags(write=False)

DEFAULT_TRUNCATION = 12
TOL_DET = 1e-10
TOL_UNITARY = 1e-8


def su2_basis():
    """Return copies of the orthonormal basis ``(e1, e2, e3)`` of su(2)."""
    return E1.copy(), E2.copy(), E3.copy()


def inner(a, b):
    """``<a, b> = -2 trace(ab)`` on su(2); works on stacked matrices."""
    return np.real(-2.0 * np.einsum("...ij,...ji->...", a, b))


def commutator(a, b):
    return a @ b - b @ a


def vec_to_su2(v):
    v = np.asarray(v, dtype=float)
    return (v[..., 0, None, None] * E1 + v[..., 1, None, None] * E2
            + v[..., 2, None, None] * E3)


def su2_to_vec(m):
    # inverse of vec_to_su2; uses only the anti-Hermitian part of m
    m = np.asarray(m)
    v1 = np.imag(m[..., 0, 1] + m[..., 1, 0])
    v2 = np.real(m[..., 1, 0] - m[..., 0, 1])
    v3 = np.imag(m[..., 0, 0] - m[..., 1, 1])
    return np.stack([v1, v2, v3], axis=-1)


def det2(m):
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def adjugate2(m):
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out


def inv2(m):
    return adjugate2(m) / det2(m)[..., None, None]


def adjoint(g, x):
    """``Ad_g x = g x g^{-1}`` for stacked 2x2 matrices."""
    return g @ x @ inv2(g)


def _allowed_mask(N, parity=0):
    """Boolean mask of shape (2N+1, 2, 2): entries permitted by twisting."""
    j = np.arange(-N, N + 1)
    even = (j + parity) % 2 == 0
    mask = np.zeros((2 * N + 1, 2, 2), dtype=bool)
    mask[even, 0, 0] = mask[even, 1, 1] = True
    mask[~even, 0, 1] = mask[~even, 1, 0] = True
    return mask


class TwistedLoop:
    """Immutable truncated Laurent series with 2x2 complex coefficients.

    ``kind`` is ``"group"`` (SL(2,C) loops, unitary on real lambda),
    ``"algebra"`` (su(2)-valued coefficients) or ``"plain"`` for anything
    else (products mixing kinds, lambda derivatives).  ``tail`` carries the
    accumulated norm of coefficients dropped by truncation, per batch entry.
    """

    __slots__ = ("coeffs", "kind", "tail", "parity")

    def __init__(self, coeffs, kind="group", tail=0.0, parity=0):
        c = np.array(coeffs, dtype=complex)
        if c.ndim < 3 or c.shape[-2:] != (2, 2) or c.shape[-3] % 2 != 1:
            raise ValueError(f"bad coefficient array shape {c.shape}")
        c.setflags(write=False)
        t = np.broadcast_to(np.asarray(tail, dtype=float), c.shape[:-3]).copy()
        t.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "tail", t)
        object.__setattr__(self, "parity", parity % 2)

    def __setattr__(self, name, value):
        raise AttributeError("TwistedLoop is immutable")

    @property
    def N(self):
        return (self.coeffs.shape[-3] - 1) // 2

    @property
    def batch_shape(self):
        return self.coeffs.shape[:-3]

    def coeff(self, j):
        if abs(j) > self.N:
            return np.zeros(self.batch_shape + (2, 2), dtype=complex)
        return self.coeffs[..., j + self.N, :, :]

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        c = self.coeffs[idx + (Ellipsis,)] if self.batch_shape else self.coeffs
        if c.ndim < 3:
            raise IndexError("index consumed coefficient axes")
        return TwistedLoop(c, self.kind, self.tail[idx], self.parity)

    def __matmul__(self, other):
        return loop_mul(self, other)

    def __call__(self, lam):
        return evaluate(self, lam)

    def __repr__(self):
        return (f"TwistedLoop(N={self.N}, kind={self.kind!r}, "
                f"batch={self.batch_shape}, parity={self.parity})")

    def replace(self, coeffs=None, kind=None, tail=None, parity=None):
        return TwistedLoop(self.coeffs if coeffs is None else coeffs,
                           self.kind if kind is None else kind,
                           self.tail if tail is None else tail,
                           self.parity if parity is None else parity)

    def twisting_error(self):
        """Largest modulus among entries that twisting says must vanish."""
        bad = ~_allowed_mask(self.N, self.parity)
        return np.max(np.abs(self.coeffs) * bad, axis=(-3, -2, -1))

    def max_coeff_norm(self):
        return np.max(np.linalg.norm(self.coeffs, axis=(-2, -1)), axis=-1)


def identity_loop(N=DEFAULT_TRUNCATION, batch_shape=()):
    c = np.zeros(tuple(batch_shape) + (2 * N + 1, 2, 2), dtype=complex)
    c[..., N, 0, 0] = c[..., N, 1, 1] = 1.0
    return TwistedLoop(c, "group")


def loop_from_terms(terms, N=DEFAULT_TRUNCATION, kind="plain", parity=0):
    """Build a loop from ``{power: matrix}``; matrices may carry batch axes."""
    batch = np.broadcast_shapes(*(np.shape(m)[:-2] for m in terms.values())) \
        if terms else ()
    c = np.zeros(batch + (2 * N + 1, 2, 2), dtype=complex)
    for j, m in terms.items():
        if abs(j) > N:
            raise ValueError(f"power {j} outside band [-{N}, {N}]")
        c[..., j + N, :, :] += m
    return TwistedLoop(c, kind, parity=parity)


def constant_loop(m, N=DEFAULT_TRUNCATION, kind="group"):
    return loop_from_terms({0: np.asarray(m, dtype=complex)}, N, kind)


def _cauchy_full(a, b):
    # full product coefficients for powers -2N..2N, entrywise for speed
    K = a.shape[-3]
    batch = np.broadcast_shapes(a.shape[:-3], b.shape[:-3])
    out = np.zeros(batch + (2 * K - 1, 2, 2), dtype=complex)
    b00, b01, b10, b11 = (b[..., :, 0, 0], b[..., :, 0, 1],
                          b[..., :, 1, 0], b[..., :, 1, 1])
    for i in range(K):
        ai = a[..., i, :, :]
        if not np.any(ai):
            continue
        a00, a01 = ai[..., 0, 0, None], ai[..., 0, 1, None]
        a10, a11 = ai[..., 1, 0, None], ai[..., 1, 1, None]
        seg = out[..., i:i + K, :, :]
        seg[..., 0, 0] += a00 * b00 + a01 * b10
        seg[..., 0, 1] += a00 * b01 + a01 * b11
        seg[..., 1, 0] += a10 * b00 + a11 * b10
        seg[..., 1, 1] += a10 * b01 + a11 * b11
    return out


def _split_full(full, N):
    """Keep powers -N..N of a full product of two band-N loops."""
    keep = full[..., N:3 * N + 1, :, :]
    dropped = (np.linalg.norm(full[..., :N, :, :], axis=(-2, -1)).sum(-1)
               + np.linalg.norm(full[..., 3 * N + 1:, :, :], axis=(-2, -1)).sum(-1))
    return keep, dropped


def loop_mul(a, b):
    """Cauchy product truncated back to the band ``[-N, N]``."""
    if a.N != b.N:
        raise ValueError(f"truncation mismatch: {a.N} vs {b.N}")
    keep, dropped = _split_full(_cauchy_full(a.coeffs, b.coeffs), a.N)
    kind = "group" if a.kind == b.kind == "group" else "plain"
    return TwistedLoop(keep, kind, a.tail + b.tail + dropped,
                       (a.parity + b.parity) % 2)


def loop_add(a, b, sign=1.0):
    if a.N != b.N:
        raise ValueError(f"truncation mismatch: {a.N} vs {b.N}")
    return TwistedLoop(a.coeffs + sign * b.coeffs, "plain",
                       a.tail + b.tail, a.parity)


def loop_scale(a, s):
    return TwistedLoop(a.coeffs * s, "plain", a.tail, a.parity)


def evaluate(g, lam):
    """Sum ``c_j lam**j`` over the band; returns stacked 2x2 matrices."""
    lam = complex(lam)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    powers = lam ** np.arange(-g.N, g.N + 1)
    return np.einsum("...jab,j->...ab", g.coeffs, powers)


def det_defect(g, lam=1.0):
    return np.abs(det2(evaluate(g, lam)) - 1.0)


def unitarity_defect(g, lams=(0.5, 1.0, 2.0)):
    """Max over the sample lambdas of ``|g g^* - I|`` (entrywise max)."""
    worst = 0.0
    for lam in lams:
        m = evaluate(g, lam)
        d = m @ np.conj(np.swapaxes(m, -1, -2)) - I2
        worst = np.maximum(worst, np.max(np.abs(d), axis=(-2, -1)))
    return worst


def loop_inverse(g, tol_det=TOL_DET):
    """Inverse of a det-one loop via the coefficientwise adjugate."""
    drift = np.max(det_defect(g, 1.0))
    if drift > tol_det:
        raise DetDrift(f"|det - 1| = {drift:.3e} exceeds {tol_det:.1e}")
    return TwistedLoop(adjugate2(g.coeffs), g.kind, g.tail, g.parity)


def lambda_derivative(g):
    """d/dlambda: output coefficient j is ``(j+1) c_{j+1}``; parity flips."""
    N = g.N
    c = g.coeffs
    out = np.zeros_like(c)
    j = np.arange(-N, N)  # output powers that receive a term
    out[..., :-1, :, :] = (j + 1)[:, None, None] * c[..., 1:, :, :]
    dropped = N * np.linalg.norm(c[..., 0, :, :], axis=(-2, -1))
    return TwistedLoop(out, "plain", g.tail + dropped, g.parity + 1)


def euler_derivative(g):
    """lambda d/dlambda: coefficient j becomes ``j c_j``, parity unchanged."""
    j = np.arange(-g.N, g.N + 1)
    return TwistedLoop(g.coeffs * j[:, None, None], "plain", g.tail, g.parity)


def project_minus(g):
    """Strictly negative powers."""
    c = np.array(g.coeffs)
    c[..., g.N:, :, :] = 0
    return TwistedLoop(c, "plain", g.tail, g.parity)


def project_plus(g):
    """Non-negative powers; the constant term belongs here."""
    c = np.array(g.coeffs)
    c[..., :g.N, :, :] = 0
    return TwistedLoop(c, "plain", g.tail, g.parity)


def invert_lambda(g):
    """Substitute ``lambda -> 1/lambda``; preserves twisting."""
    return g.replace(coeffs=g.coeffs[..., ::-1, :, :])


def resize(g, N_new):
    """Zero-pad or truncate to a new band; truncation adds to ``tail``."""
    N = g.N
    if N_new == N:
        return g
    batch = g.batch_shape
    c = np.zeros(batch + (2 * N_new + 1, 2, 2), dtype=complex)
    tail = g.tail
    if N_new > N:
        c[..., N_new - N:N_new + N + 1, :, :] = g.coeffs
    else:
        c[...] = g.coeffs[..., N - N_new:N + N_new + 1, :, :]
        lost = np.concatenate([g.coeffs[..., :N - N_new, :, :],
                               g.coeffs[..., N + N_new + 1:, :, :]], axis=-3)
        tail = tail + np.linalg.norm(lost, axis=(-2, -1)).sum(-1)
    return TwistedLoop(c, g.kind, tail, g.parity)


def coeff_distance(a, b):
    """Max coefficient Frobenius distance between two loops of equal band."""
    return np.max(np.linalg.norm(a.coeffs - b.coeffs, axis=(-2, -1)), axis=-1)


def random_unipotent_loop(rng, N, side, n_factors=3, scale=0.5, diagonal=True):
    """Random det-one twisted polynomial loop on one side of the band.

    Built as a product of elementary unipotent factors ``I + c lam^{+-k} E``
    with odd ``k``; ``side="minus"`` gives constant term ``I``, while
    ``side="plus"`` optionally starts from a random diagonal constant.
    """
    sgn = -1 if side == "minus" else 1
    g = identity_loop(N)
    if side == "plus" and diagonal:
        d = np.exp(rng.normal() * 0.3 + 1j * rng.uniform(0, 2 * np.pi))
        g = constant_loop(np.diag([d, 1 / d]), N)
    budget = N
    for _ in range(n_factors):
        k = int(rng.choice([1, 3])) if budget >= 3 else 1
        if k > budget:
            break
        budget -= k
        c = scale * (rng.normal() + 1j * rng.normal())
        m = np.zeros((2, 2), dtype=complex)
        m[(0, 1) if rng.random() < 0.5 else (1, 0)] = c
        g = loop_mul(g, loop_from_terms({0: I2, sgn * k: m}, N, "group"))
    return g.replace(kind="group")

"""Potential pairs for the generalized d'Alembert construction.

A leg of a pair is a loop-algebra valued 1-form ``sum_j P_j(t) lam^j dt``
whose coefficients are real combinations of e1, e2, e3. Twisting puts e1/e2
on odd powers and e3 on even powers.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import loopcore as lc
from .errors import InvalidCharacteristicData
from .expr import Constant, ScalarFunction, as_function

BASIS = (lc.E1, lc.E2, lc.E3)
CHAR_TOL = 1e-10


class LoopForm:
    """``sum_j (a_j e1 + b_j e2 + c_j e3) lam^j dt`` with scalar coefficient functions.

    ``terms`` maps a power ``j`` to a triple of ScalarFunctions (or None).
    """

    def __init__(self, terms):
        clean = {}
        for j, comps in terms.items():
            comps = tuple(None if c is None else as_function(c) for c in comps)
            if len(comps) != 3:
                raise ValueError("each power needs (e1, e2, e3) components")
            if j % 2 == 0 and (comps[0] is not None or comps[1] is not None):
                raise ValueError(f"even power {j} may only carry e3")
            if j % 2 == 1 and comps[2] is not None:
                raise ValueError(f"odd power {j} may not carry e3")
            if any(c is not None for c in comps):
                clean[int(j)] = comps
        self.terms = clean

    @property
    def band(self):
        if not self.terms:
            return (0, 0)
        return (min(self.terms), max(self.terms))

    def component(self, j, t):
        """su(2) coefficient of ``lam^j`` at ``t`` as an R^3 vector array."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape + (3,))
        for k, c in enumerate(self.terms.get(j, (None, None, None))):
            if c is not None:
                out[..., k] = c(t)
        return out

    def matrix(self, j, t):
        return lc.vec_to_su2(self.component(j, t))

    def loop(self, t, N=lc.DEFAULT_TRUNCATION):
        """Coefficient loop at each ``t`` (batch shape of ``t``)."""
        t = np.asarray(t, dtype=float)
        c = np.zeros(t.shape + (2 * N + 1, 2, 2), dtype=complex)
        for j in self.terms:
            if abs(j) > N:
                raise ValueError(f"power {j} outside truncation {N}")
            c[..., j + N, :, :] = self.matrix(j, t)
        return lc.TwistedLoop(c, "algebra")

    def pullback_reflect(self, eps):
        """Pull back along ``t = eps*y``: identity for +1, ``-eta(-y)`` for -1."""
        if eps == 1:
            return self
        return LoopForm({j: tuple(None if c is None else -c.reflected() for c in comps)
                         for j, comps in self.terms.items()})

    def __repr__(self):
        return f"LoopForm(powers={sorted(self.terms)})"


@dataclass
class PotentialPair:
    """Pair of 1-forms ``chi`` on ``interval_x`` and ``psi`` on ``interval_y``."""

    chi: LoopForm
    psi: LoopForm
    epsilon: int = 1
    interval_x: tuple = (-1.0, 1.0)
    interval_y: tuple = (-1.0, 1.0)
    kind: str = "raw"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.chi.band[1] > 1:
            raise ValueError("chi may not contain powers above lambda^1")
        if self.psi.band[0] < -1:
            raise ValueError("psi may not contain powers below lambda^-1")

    def leading_coefficients(self, x, y):
        """Norms of ``chi_1(x)`` and ``psi_{-1}(y)``."""
        return (np.linalg.norm(self.chi.component(1, x), axis=-1),
                np.linalg.norm(self.psi.component(-1, y), axis=-1))

    def regularity_flags(self, x, y, tol=1e-6):
        """Per-sample (semi_regular, regular) flags at the points ``(x, y)``."""
        c1, p1 = self.leading_coefficients(x, y)
        a, b = c1 > tol, p1 > tol
        return a | b, a & b


def _sym_interval(J, eps):
    lo, hi = float(J[0]), float(J[1])
    return (lo, hi) if eps == 1 else (-hi, -lo)


def boundary_potential(U_k, U_p, V_k, V_p, eps, interval):
    """Boundary pair ``eps V_p/lam + U_k + eps V_k + U_p lam`` on both legs.

    ``U_k``, ``V_k`` are e3-coefficients; ``U_p``, ``V_p`` are
    ``(e1, e2)``-coefficient pairs; every entry may be a ScalarFunction,
    expression string or number.
    """
    eps = int(eps)
    U_k, V_k = as_function(U_k), as_function(V_k)
    up = tuple(as_function(c) for c in U_p)
    vp = tuple(as_function(c) for c in V_p)
    k_part = U_k + eps * V_k
    terms = {
        -1: (eps * vp[0], eps * vp[1], None),
        0: (None, None, k_part),
        1: (up[0], up[1], None),
    }
    eta = LoopForm(terms)
    return PotentialPair(eta, eta.pullback_reflect(eps), eps, tuple(interval),
                         _sym_interval(interval, eps), "boundary",
                         {"singular_set": f"y = {eps}*x"})


def boundary_potential_from_frame(U_k, U_p, V_k, V_p, eps=1, interval=(-1.0, 1.0)):
    return boundary_potential(U_k, U_p, V_k, V_p, eps, interval)


def noncharacteristic_potential(A, B, beta, eps, interval=(-1.0, 1.0)):
    """``eta = (-eps B e1/lam - (beta/2) e3 + A e1 lam) dt`` on ``J x eps J``."""
    A, B, beta = as_function(A), as_function(B), as_function(beta)
    eps = int(eps)
    if eps not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    eta = LoopForm({-1: (-eps * B, None, None),
                    0: (None, None, -0.5 * beta),
                    1: (A, None, None)})
    pair = PotentialPair(eta, eta.pullback_reflect(eps), eps, tuple(interval),
                         _sym_interval(interval, eps), "noncharacteristic")
    pair.metadata.update(singular_set=f"y = {eps}*x", A=A, B=B, beta=beta)
    return pair


def _sample_grid(interval, n=2001):
    return np.linspace(float(interval[0]), float(interval[1]), n)


def _sign_change_points(t, values, fn=None):
    """Parameter values where ``values`` vanishes or changes sign.

    Brackets come from the samples; with ``fn`` each root is polished by
    Brent's method, otherwise it is linearly interpolated.
    """
    out = list(t[values == 0.0])
    s = np.sign(values)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    for i in idx:
        if fn is not None:
            out.append(brentq(lambda x: float(fn(x)), t[i], t[i + 1], xtol=1e-15))
        else:
            out.append(t[i] - values[i] * (t[i + 1] - t[i]) / (values[i + 1] - values[i]))
    return sorted(out)


def cuspidal_edge_potential(kappa, tau, interval=(-1.0, 1.0), branch="proof",
                            epsilon=None):
    """Cuspidal-edge potential from curvature and torsion.

    ``eta = ((tau-1)/2 e1/lam + kappa e3 + (tau+1)/2 e1 lam) ds``.  With
    ``branch="proof"`` the sign is ``eps = sign(1 - tau)`` (making ``B > 0``);
    ``branch="statement"`` uses ``sign(tau - 1)``.  An explicit ``epsilon``
    overrides both.
    """
    kappa, tau = as_function(kappa), as_function(tau)
    s = _sample_grid(interval)
    tv = np.broadcast_to(np.asarray(tau(s), dtype=float), s.shape)
    kv = np.broadcast_to(np.asarray(kappa(s), dtype=float), s.shape)
    mixed = bool(np.any(tv > 1) and np.any(tv < 1))
    if epsilon is None:
        ref = np.median(tv)
        eps = 1 if ref < 1 else -1
        if branch == "statement":
            eps = -eps
        elif branch != "proof":
            raise ValueError(f"unknown branch {branch!r}")
    else:
        eps = int(epsilon)
    eta = LoopForm({-1: (0.5 * (tau - 1.0), None, None),
                    0: (None, None, kappa),
                    1: (0.5 * (tau + 1.0), None, None)})
    pair = PotentialPair(eta, eta.pullback_reflect(eps), eps, tuple(interval),
                         _sym_interval(interval, eps), "cuspidal_edge")
    pair.metadata.update(
        singular_set=f"y = {eps}*x", kappa=kappa, tau=tau,
        kappa_zeros=_sign_change_points(s, kv, kappa),
        tau_plus_one=_sign_change_points(s, tv - 1.0, lambda x: tau(x) - 1.0),
        tau_minus_one=_sign_change_points(s, tv + 1.0, lambda x: tau(x) + 1.0),
        torsion_crosses_one=mixed,
        # the equivalent noncharacteristic data: A = (tau+1)/2, eps B = (1-tau)/2, beta = -2 kappa
        A=0.5 * (tau + 1.0), B=(0.5 * eps) * (1.0 - tau), beta=-2.0 * kappa)
    return pair


def characteristic_potential(kappa, alpha, beta, interval_x=(-1.0, 1.0),
                             interval_y=(-1.0, 1.0), tol=CHAR_TOL):
    """Pair ``chi = (kappa e3 + lam e1) dx``, ``psi = (alpha e1 + beta e2) dy / lam``."""
    kappa, alpha, beta = as_function(kappa), as_function(alpha), as_function(beta)
    if abs(float(beta(0.0))) > tol:
        raise InvalidCharacteristicData(f"beta(0) = {float(beta(0.0)):.3e} must vanish")
    dbeta0 = float(beta.derivative()(0.0))
    if abs(dbeta0) <= tol:
        raise InvalidCharacteristicData("beta'(0) must be nonzero")
    kv = np.asarray(kappa(_sample_grid(interval_x)), dtype=float)
    kappa_zero = bool(np.all(np.abs(kv) <= tol))
    if not kappa_zero and abs(float(alpha(0.0))) > tol:
        raise InvalidCharacteristicData(
            "alpha(0) must vanish when kappa is not identically zero")
    chi = LoopForm({0: (None, None, kappa), 1: (Constant(1.0), None, None)})
    psi = LoopForm({-1: (alpha, beta, None)})
    return PotentialPair(chi, psi, 1, tuple(interval_x), tuple(interval_y),
                         "characteristic",
                         {"singular_set": "y = 0", "kappa": kappa, "alpha": alpha,
                          "beta": beta, "kappa_identically_zero": kappa_zero})


def normalized_pair(zeta_e1, zeta_e2, xi_e1, xi_e2, interval_x, interval_y):
    """Pair built from normalized potentials given in e1/e2 components."""
    chi = LoopForm({1: (zeta_e1, zeta_e2, None)})
    psi = LoopForm({-1: (xi_e1, xi_e2, None)})
    return PotentialPair(chi, psi, 1, tuple(interval_x), tuple(interval_y), "normalized")


def zero_pair(interval_x=(-1.0, 1.0), interval_y=(-1.0, 1.0)):
    return PotentialPair(LoopForm({}), LoopForm({}), 1, tuple(interval_x),
                         tuple(interval_y), "zero")


def is_scalar_function(obj):
    return isinstance(obj, ScalarFunction)

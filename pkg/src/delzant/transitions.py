"""Coordinate changes between charts.

* :func:`phi` -- symplectic transition ``U_{v,w} -> U_{w,v}`` between reduced
  phase space charts.
* :func:`toric_transition` -- Laurent monomial transition between toric charts.
* :func:`theta`, :func:`theta_inverse` -- symplectic chart to toric chart at
  the same vertex and back.  The inverse needs a root solve.
* :func:`cpn_theta`, :func:`cpn_theta_inverse`, :func:`hirzebruch_t2` --
  closed or one-dimensional forms for projective spaces and Hirzebruch
  surfaces.

Integer powers of complex numbers are computed by repeated multiplication so
that no branch of the logarithm is ever chosen.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .charts import TOL, ChartError, ChartPoint, PointOutsideDelta, _check, chart_slacks, mu_v, other_slacks
from .polytope import BaseChange, DelzantPolytope, as_rational


class DomainError(ChartError):
    """The point is outside the overlap where a transition is defined."""


class ZeroAtNegativeExponent(DomainError):
    pass


class ConvergenceFailure(RuntimeError):
    def __init__(self, iterations: int, residual: float):
        super().__init__(f"no convergence after {iterations} iterations (residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-12
    max_iter: int = 100
    damping: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


DEFAULT_SOLVER = SolverConfig()


def ipow(x: complex, k: int) -> complex:
    """``x ** k`` for integer ``k`` by repeated multiplication."""
    k = int(k)
    result = 1.0 + 0j
    for _ in range(abs(k)):
        result *= x
    return 1.0 / result if k < 0 else result


# ---------------------------------------------------------------------------
# Laurent maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaurentMap:
    """Exponent table of the toric transition ``v -> w`` (a view of the base change)."""

    base_change: BaseChange

    @property
    def from_vertex(self) -> str:
        return self.base_change.from_vertex

    @property
    def to_vertex(self) -> str:
        return self.base_change.to_vertex

    @property
    def exponents(self) -> tuple[tuple[int, ...], ...]:
        return self.base_change.matrix.rows

    def __call__(self, zeta: Sequence[complex]) -> np.ndarray:
        rows = self.exponents
        ncols = len(self.base_change.matrix.col_keys)
        out = np.empty(ncols, dtype=complex)
        for j in range(ncols):
            val = 1.0 + 0j
            for i, row in enumerate(rows):
                e = row[j]
                if e:
                    if e < 0 and zeta[i] == 0:
                        raise ZeroAtNegativeExponent(
                            f"coordinate {self.base_change.matrix.row_keys[i]} vanishes "
                            f"but has exponent {e}")
                    val *= ipow(zeta[i], e)
            out[j] = val
        return out


def laurent_map(P: DelzantPolytope, v: str, w: str) -> LaurentMap:
    bc = P.base_change(v, w)
    fv, fw = set(bc.matrix.row_keys), set(bc.matrix.col_keys)
    for f in fv & fw:
        for g in bc.matrix.col_keys:
            # on shared facets the exponents are 0/1, which keeps phi smooth
            assert bc.coeff(f, g) in (0, 1)
    return LaurentMap(bc)


def toric_transition(P: DelzantPolytope, zeta: ChartPoint, w: str) -> ChartPoint:
    """``zeta^w_g = prod_f (zeta^v_f) ** (w)_f^g``."""
    _check(P, zeta)
    L = laurent_map(P, zeta.vertex, w)
    return ChartPoint(w, P.vertex(w).facets, L(zeta.z))


# ---------------------------------------------------------------------------
# symplectic transitions
# ---------------------------------------------------------------------------

def phi(P: DelzantPolytope, z: ChartPoint, w: str, tol: float = TOL) -> ChartPoint:
    """Symplectic transition from the chart of ``z.vertex`` to the chart of ``w``.

    ``z`` must lie in ``U_v`` with ``z_f != 0`` for every ``f`` in ``F_v \\ F_w``.
    """
    cd = _check(P, z)
    v = z.vertex
    fw = P.vertex(w).facets
    if v == w:
        return ChartPoint(w, fw, z.z.copy())
    slack = chart_slacks(P, z)
    if np.any(slack <= tol):
        raise DomainError(f"point is not in U_{v}")
    fw_set = set(fw)
    dropped = [i for i, f in enumerate(cd.facets) if f not in fw_set]
    for i in dropped:
        if abs(z.z[i]) <= tol:
            raise DomainError(f"coordinate {cd.facets[i]} vanishes; point is not in U_({v},{w})")
    L = laurent_map(P, v, w)
    mono = L(z.z)
    rows = L.exponents
    radius = dict(zip(cd.others, np.sqrt(2 * slack)))
    out = np.empty(len(fw), dtype=complex)
    for j, g in enumerate(fw):
        denom = 1.0
        for i in dropped:
            e = rows[i][j]
            if e:
                denom *= abs(z.z[i]) ** e
        val = mono[j] / denom
        if g in radius:
            val *= radius[g]
        out[j] = val
    return ChartPoint(w, fw, out)


def transport_angles(P: DelzantPolytope, v: str, w: str, angles: Sequence[float]) -> np.ndarray:
    """Angles at ``w`` matching a rotation by ``angles`` at ``v``: ``a^w_g = sum_f (w)_f^g a_f``."""
    m = np.array(P.base_change(v, w).matrix.rows, dtype=float)
    return np.asarray(angles, dtype=float) @ m


# ---------------------------------------------------------------------------
# symplectic <-> toric at one vertex
# ---------------------------------------------------------------------------

def theta(P: DelzantPolytope, z: ChartPoint, tol: float = TOL) -> ChartPoint:
    """Toric coordinates ``zeta_f = z_f * prod_f' r_f'(mu_v(z)) ** (v)^f_f'``."""
    cd = _check(P, z)
    slack = chart_slacks(P, z)
    if np.any(slack <= tol):
        raise DomainError(f"point is not in U_{z.vertex}")
    r = np.sqrt(2 * slack)
    factors = np.ones(len(cd.facets))
    for k, row in enumerate(cd.exponent_rows):
        for i, e in enumerate(row):
            if e:
                factors[i] *= r[k] ** e
    return ChartPoint(z.vertex, z.facets, z.z * factors)


@dataclass(frozen=True)
class MomentumSolve:
    """Outcome of solving for the momentum of a toric chart point."""

    xi: np.ndarray
    squared_moduli: np.ndarray  # |z_f|^2 for f in F_v
    residual: float
    iterations: int


class _Frame:
    """Doubled slacks ``L_f = 2 (<X_f, xi> + lambda_f)`` as affine functions of ``L`` on ``F_w``.

    Rows follow ``P.facet_ids``; ``L = D @ y + kappa`` where ``y`` holds the
    doubled slacks of the facets through ``w``.
    """

    def __init__(self, P: DelzantPolytope, w: str):
        cd = P.chart_data(w)
        index = {f: i for i, f in enumerate(P.facet_ids)}
        self.vertex = w
        self.D = np.zeros((len(P.facets), P.dim))
        self.kappa = np.zeros(len(P.facets))
        for j, g in enumerate(cd.facets):
            self.D[index[g], j] = 1.0
        for k, f in enumerate(cd.others):
            self.D[index[f]] = cd.exponents[k]
            self.kappa[index[f]] = 2 * cd.corner_slack[k]
        self.own = [index[g] for g in cd.facets]
        self.cd = cd


def _newton(frame: _Frame, y, free, rows, log_w, residual, cfg: SolverConfig, budget: int):
    """Minimize ``sum_f L_f (log L_f - 1 - log_w_f)`` over the free coordinates of ``y``.

    ``rows`` are the facets whose ``L_f`` may vary (the rest stay at 0).
    Stops one step after ``residual(L) <= cfg.tol`` or when progress stalls; returns
    ``(y, L, norm, iterations, converged)``.
    """
    D = frame.D[np.ix_(rows, free)]
    kappa = frame.kappa[rows]  # fixed coordinates are 0 and contribute nothing
    lw = log_w[rows]
    x = y[free].copy()

    def slacks(x):
        full = np.zeros(len(frame.kappa))
        full[rows] = D @ x + kappa
        return full

    def potential(Lr):
        return float(np.sum(Lr * (np.log(Lr) - 1 - lw)))

    L = slacks(x)
    norm = residual(L)
    it = 0
    polished = False
    while it < budget:
        if norm <= cfg.tol:
            # one more step, kept only if it helps; Newton is quadratic here
            if polished:
                break
            polished = True
        it += 1
        Lr = L[rows]
        g = D.T @ (np.log(Lr) - lw)
        H = (D.T / Lr) @ D
        step = -np.linalg.solve(H, g)
        dL = D @ step
        alpha = cfg.damping
        neg = dL < 0
        if np.any(neg):
            with np.errstate(over="ignore"):
                alpha = min(alpha, 0.99 * float(np.min(Lr[neg] / -dL[neg])))
        slope = float(g @ step)
        psi = potential(Lr)
        for _ in range(60):
            x_new = x + alpha * step
            L_new = slacks(x_new)
            if np.all(L_new[rows] > 0):
                if potential(L_new[rows]) <= psi + 1e-4 * alpha * slope:
                    break
                # near the root the potential is flat to rounding; judge by the residual instead
                if residual(L_new) <= (1 - 0.5 * alpha) * norm:
                    break
            alpha *= 0.5
        else:
            break
        new_norm = residual(L_new)
        if new_norm >= norm and (norm < 1e-6 or alpha < 1e-8):
            break  # rounding floor of this frame
        x, L, norm = x_new, L_new, new_norm
    y = y.copy()
    y[free] = x
    return y, L, norm, it, norm <= cfg.tol


_NEGLIGIBLE = 1e-280


def _recover_negligible(cd, tau, t, R):
    # log t_f = log |zeta_f|^2 - sum_f' c_f'f log R_f'
    for i, x in enumerate(tau):
        if 0 < x < _NEGLIGIBLE:
            t[i] = np.exp(np.log(x) - cd.exponents[:, i] @ np.log(R))


def solve_momentum(P: DelzantPolytope, zeta: ChartPoint,
                   cfg: SolverConfig = DEFAULT_SOLVER) -> MomentumSolve:
    """Find the momentum ``xi`` of the point with toric coordinates ``zeta``.

    Unknowns are ``t_f = |z_f|^2``, ``f`` in ``F_v``.  Then ``r_f'(xi)^2`` is
    affine in ``t``, ``R_f'(t) = sum_f c_f'f t_f + r_f'(v)^2`` with
    ``c_f'f = (v)^f_f'``, and the equations to solve are

        log t_f + sum_f' c_f'f log R_f'(t) = log |zeta_f|^2 .

    Their left side minus right side is the gradient of the strictly convex

        Psi(t) = sum_f (t_f log t_f - t_f - t_f log |zeta_f|^2)
                 + sum_f' (R_f' log R_f' - R_f')

    on ``{t > 0, R > 0}``, so damped Newton on ``Psi`` with a
    fraction-to-boundary rule converges from any interior start.
    Coordinates with ``zeta_f = 0`` are fixed at ``t_f = 0``.  ``residual``
    is the largest absolute log-residual, i.e. a relative error.

    ``Psi`` is a function of ``xi`` alone, so it can be minimized in the
    slack coordinates of any vertex.  When the solution is close to facets
    not through ``v``, computing ``R`` from ``t`` cancels badly, and the
    last Newton steps are taken in the chart of the vertex nearest the
    solution, whose own slacks carry full relative precision.
    """
    cd = _check(P, zeta)
    v = zeta.vertex
    tau = np.abs(zeta.z) ** 2
    idx = {f: i for i, f in enumerate(P.facet_ids)}
    own_v = np.array([idx[f] for f in cd.facets])
    # coordinates too small to move any other slack are held at 0 during the solve
    # (1 / t_f would overflow) and recovered from their own equation afterwards
    zero = {f for f, x in zip(cd.facets, tau) if x < _NEGLIGIBLE}
    if len(zero) == P.dim:
        frame = _Frame(P, v)
        t = np.zeros(P.dim)
        _recover_negligible(cd, tau, t, frame.kappa[[idx[f] for f in cd.others]])
        return MomentumSolve(cd.position.copy(), t, 0.0, 0)

    log_w = np.zeros(len(P.facets))
    active = [i for i, f in enumerate(cd.facets) if f not in zero]
    log_w[own_v[active]] = np.log(tau[active])
    rows = [i for i, f in enumerate(P.facet_ids) if f not in zero]
    C = cd.exponents[:, active]
    other_rows = [idx[f] for f in cd.others]

    def residual(L):
        G = np.log(L[own_v[active]]) - log_w[own_v[active]] + C.T @ np.log(L[other_rows])
        return float(np.max(np.abs(G)))

    # start halfway from the vertex to the barycenter, pulled back until the fixed zeros fit
    frame = _Frame(P, v)
    xi0 = cd.position + 0.5 * (P.barycenter() - cd.position)
    y = 2 * (cd.basis @ xi0 + cd.offsets)
    y[[i for i, f in enumerate(cd.facets) if f in zero]] = 0.0
    # near the vertex t_f is about |zeta_f|^2; starting there saves many steps for tiny inputs
    y = np.minimum(y, np.where(tau > 0, tau, np.inf))
    while np.any(frame.D[rows] @ y + frame.kappa[rows] <= 0):
        y = 0.5 * y
    free = [i for i, f in enumerate(cd.facets) if f not in zero]
    y, L, norm, used, ok = _newton(frame, y, free, rows, log_w, residual, cfg, cfg.max_iter)

    if not ok:
        # finish in the chart whose facets carry the smallest slacks
        candidates = [w for w in P.vertices if zero <= set(w.facets)]

        def spread(w):
            outside = [idx[f] for f in P.chart_data(w.id).others]
            return float(np.min(L[outside]))

        best = max(candidates, key=spread).id
        if best != v:
            frame = _Frame(P, best)
            bcd = frame.cd
            y = L[frame.own].copy()
            free = [i for i, f in enumerate(bcd.facets) if f not in zero]
            y, L, norm, more, ok = _newton(frame, y, free, rows, log_w, residual, cfg,
                                           cfg.max_iter - used)
            used += more
        if not ok:
            raise ConvergenceFailure(used, norm)

    t = L[own_v].copy()
    t[[i for i, f in enumerate(cd.facets) if f in zero]] = 0.0
    _recover_negligible(cd, tau, t, L[other_rows])
    fcd = frame.cd
    xi = fcd.basis_inv @ (L[frame.own] / 2 - fcd.offsets)
    return MomentumSolve(xi, t, norm, used)


def theta_inverse(P: DelzantPolytope, zeta: ChartPoint,
                  cfg: SolverConfig = DEFAULT_SOLVER) -> ChartPoint:
    """Symplectic chart point whose toric coordinates are ``zeta``.

    ``z_f`` has the phase of ``zeta_f`` and modulus ``sqrt(t_f)`` from the
    momentum solve, which equals ``|zeta_f| prod r_f'(xi) ** -(v)^f_f'`` but
    skips recomputing the radii from ``xi``.  Coordinates whose ``t_f`` would
    underflow use the product form instead.
    """
    cd = _check(P, zeta)
    sol = solve_momentum(P, zeta, cfg)
    mod = np.sqrt(sol.squared_moduli)
    tiny = (np.abs(zeta.z) ** 2 < _NEGLIGIBLE) & (zeta.z != 0)
    if np.any(tiny):
        log_r = 0.5 * np.log(2 * other_slacks(P, zeta.vertex, sol.xi))
        mod[tiny] = np.abs(zeta.z[tiny]) * np.exp(-(log_r @ cd.exponents)[tiny])
    # the phase, taken via the angle so subnormal moduli do not turn into nan
    unit = np.where(zeta.z != 0, np.exp(1j * np.angle(zeta.z)), 0)
    return ChartPoint(zeta.vertex, zeta.facets, unit * mod)


def mu_toric(P: DelzantPolytope, zeta: ChartPoint, cfg: SolverConfig = DEFAULT_SOLVER) -> np.ndarray:
    """Momentum of the point with toric coordinates ``zeta``."""
    return solve_momentum(P, zeta, cfg).xi


# ---------------------------------------------------------------------------
# projective spaces
# ---------------------------------------------------------------------------

def cpn_theta(gamma: float, z: Sequence[complex]) -> np.ndarray:
    """``zeta = z / sqrt(2 gamma - |z|^2)`` on the ball of radius ``sqrt(2 gamma)``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    z = np.asarray(z, dtype=complex)
    gap = 2 * gamma - np.sum(np.abs(z) ** 2)
    if gap <= 0:
        raise DomainError("point is outside the ball of radius sqrt(2 gamma)")
    return z / np.sqrt(gap)


def cpn_theta_inverse(n: int, gamma: float, zeta: Sequence[complex]) -> np.ndarray:
    """``z = zeta * sqrt(2 gamma / (1 + |zeta|^2))``."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    zeta = np.asarray(zeta, dtype=complex).reshape(-1)
    if len(zeta) != n:
        raise ValueError(f"expected {n} coordinates")
    return zeta * np.sqrt(2 * gamma / (1 + np.sum(np.abs(zeta) ** 2)))


# ---------------------------------------------------------------------------
# Hirzebruch surfaces
# ---------------------------------------------------------------------------

def hirzebruch_t2(m: int, gamma_plus: float, gamma_minus: float, tau1: float, tau2: float,
                  cfg: SolverConfig = DEFAULT_SOLVER) -> float:
    """Nonnegative root of ``(1+tau1)^m tau2 (2 S - t) = t (2 gamma_minus + m t)^m``.

    Here ``S = gamma_plus + gamma_minus``.  The difference of the two sides
    is strictly increasing on ``[0, 2 S]`` and changes sign there, so the root
    is unique; it is found by Newton steps safeguarded by bisection.

    For the chart at the corner ``f1 = f2 = 0`` of :func:`~delzant.polytope.hirzebruch`
    use :func:`hirzebruch_t2_parameters` to obtain matching ``gamma`` values.
    """
    if m < 0 or int(m) != m:
        raise ValueError("m must be a nonnegative integer")
    S = gamma_plus + gamma_minus
    if not (gamma_minus > 0 and S > 0):
        raise ValueError("need gamma_minus > 0 and gamma_plus + gamma_minus > 0")
    if tau1 < 0 or tau2 < 0:
        raise ValueError("tau1 and tau2 must be nonnegative")
    eps = (1 + tau1) ** m * tau2
    if eps == 0:
        return 0.0

    def h(t):
        return t * (2 * gamma_minus + m * t) ** m - eps * (2 * S - t)

    def dh(t):
        base = 2 * gamma_minus + m * t
        d = base ** m + eps
        if m:
            d += t * m * m * base ** (m - 1)
        return d

    def rel(t):
        # size of the remaining Newton correction relative to t; comparing the two sides
        # instead would be hopeless near t = 2 S, where eps * (2 S - t) cancels
        return abs(h(t) / dh(t)) / t

    # dropping m t from the base gives the root of a linear equation; it is exact for m = 0
    # and an upper bound otherwise, and close to the root when tau2 is small
    lo = 0.0
    hi = t = 2 * S * eps / ((2 * gamma_minus) ** m + eps)
    for _ in range(cfg.max_iter + 200):
        val = h(t)
        if val == 0:
            return t
        if val > 0:
            hi = t
        else:
            lo = t
        nxt = t - val / dh(t)
        if not lo <= nxt <= hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - t) <= 2 * np.finfo(float).eps * max(t, 1e-300):
            if rel(nxt) <= cfg.tol:
                return nxt
            break
        t = nxt
    raise ConvergenceFailure(cfg.max_iter, rel(t))


def hirzebruch_t2_parameters(m: int, lam: Sequence) -> tuple[Fraction, Fraction]:
    """``(gamma_plus, gamma_minus)`` that make :func:`hirzebruch_t2` solve the ``f1, f2`` chart.

    ``gamma_minus`` is the bottom edge ``l1 + l3 - m l2`` and the sum equals
    the height ``l2 + l4``, which bounds ``t2 = |z_f2|^2``.
    """
    l1, l2, l3, l4 = (as_rational(x) for x in lam)
    bottom = l1 + l3 - m * l2
    return (l2 + l4) - bottom, bottom

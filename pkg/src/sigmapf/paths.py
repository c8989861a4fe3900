"""Discretized path spaces: gauge action, parallel transport and the doubling isomorphism.

Paths live on the uniform grid t_j = j/N.  The doubling maps Upsilon and
Omega send an N-grid path to an N/2-grid path over g + g (resp. G x G),
sampling u(t/2) and u(1 - t/2) at existing nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .exact import SigmaPFError
from .lie import LieAlgebraModel, bracket, exp_map, product_model


class PathError(SigmaPFError):
    pass


def _trapezoid_weights(n: int) -> np.ndarray:
    w = np.full(n + 1, 1.0 / n)
    w[0] = w[-1] = 0.5 / n
    return w


@dataclass(frozen=True, eq=False)
class DiscreteAlgebraPath:
    model: LieAlgebraModel
    samples: np.ndarray  # (N + 1, d)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[1] != self.model.dim or s.shape[0] < 3:
            raise PathError("need N >= 2 samples of length dim g")
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.shape[0] - 1

    @classmethod
    def constant(cls, model, x, n: int) -> "DiscreteAlgebraPath":
        return cls(model, np.tile(np.asarray(x, dtype=float), (n + 1, 1)))

    @classmethod
    def from_function(cls, model, f: Callable[[float], np.ndarray], n: int) -> "DiscreteAlgebraPath":
        return cls(model, np.array([f(j / n) for j in range(n + 1)]))

    def inner(self, other: "DiscreteAlgebraPath") -> float:
        if other.n != self.n:
            raise PathError("grid mismatch")
        w = _trapezoid_weights(self.n)
        return float(np.einsum("j,ja,ab,jb->", w, self.samples, self.model.gram, other.samples))

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self), 0.0)))

    def __sub__(self, other):
        return DiscreteAlgebraPath(self.model, self.samples - other.samples)

    def __add__(self, other):
        return DiscreteAlgebraPath(self.model, self.samples + other.samples)

    def scale(self, c: float):
        return DiscreteAlgebraPath(self.model, c * self.samples)


@dataclass(frozen=True, eq=False)
class DiscreteGroupPath:
    model: LieAlgebraModel
    samples: np.ndarray  # (N + 1, n, n)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 3 or s.shape[0] < 3:
            raise PathError("need N >= 2 matrix samples")
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.shape[0] - 1

    @classmethod
    def constant(cls, model, b, n: int):
        return cls(model, np.tile(np.asarray(b, dtype=complex), (n + 1, 1, 1)))

    def __mul__(self, other: "DiscreteGroupPath"):
        if other.n != self.n:
            raise PathError("grid mismatch")
        return DiscreteGroupPath(self.model, self.samples @ other.samples)

    def right_log_derivative(self) -> np.ndarray:
        """Discrete g' g^-1 from group logarithms of node ratios, second order everywhere."""
        g = self.samples
        n = self.n
        h = 1.0 / n
        model = self.model
        inv = np.conj(np.transpose(g, (0, 2, 1)))

        def lg(m):
            return model.coords(scipy.linalg.logm(m))

        out = np.empty((n + 1, model.dim))
        for j in range(1, n):
            out[j] = lg(g[j + 1] @ inv[j - 1]) / (2 * h)
        out[0] = (4 * lg(g[1] @ inv[0]) - lg(g[2] @ inv[0])) / (2 * h)
        out[n] = -(4 * lg(g[n - 1] @ inv[n]) - lg(g[n - 2] @ inv[n])) / (2 * h)
        return out

    def energy(self) -> float:
        x = self.right_log_derivative()
        w = _trapezoid_weights(self.n)
        return float(np.einsum("j,ja,ab,jb->", w, x, self.model.gram, x))


@dataclass(frozen=True, eq=False)
class SmoothGroupPath:
    """g(t) = exp(t x) exp(s(t) y) with g' g^-1 = x + s'(t) Ad(exp(t x)) y known in closed form."""

    model: LieAlgebraModel
    x: np.ndarray
    y: np.ndarray
    s: Callable[[float], float]
    ds: Callable[[float], float]
    left: np.ndarray | None = None  # optional constant left factor b: g(t) = b exp(tx) exp(s y)

    def at(self, t: float) -> np.ndarray:
        g = exp_map(self.model, t * self.x) @ exp_map(self.model, self.s(t) * self.y)
        return g if self.left is None else self.left @ g

    def log_derivative(self, t: float) -> np.ndarray:
        e = exp_map(self.model, t * self.x)
        ady = self.model.coords(e @ self.model.matrix(self.y) @ np.linalg.inv(e))
        out = self.x + self.ds(t) * ady
        if self.left is None:
            return out
        b = self.left
        return self.model.coords(b @ self.model.matrix(out) @ np.linalg.inv(b))

    def sample(self, n: int) -> DiscreteGroupPath:
        return DiscreteGroupPath(self.model, np.array([self.at(j / n) for j in range(n + 1)]))


def random_smooth_group_path(model, rng, closed: bool = False, left=None) -> SmoothGroupPath:
    x = np.zeros(model.dim) if closed else model.random_element(rng, 0.7)
    y = model.random_element(rng, 0.7)
    c1, c2 = rng.uniform(0.5, 1.5, 2)
    if closed:
        def s(t):
            return c1 * np.sin(2 * np.pi * t) + c2 * np.sin(4 * np.pi * t) ** 2

        def ds(t):
            return 2 * np.pi * c1 * np.cos(2 * np.pi * t) + 8 * np.pi * c2 * np.sin(4 * np.pi * t) * np.cos(4 * np.pi * t)
    else:
        def s(t):
            return c1 * np.sin(2 * np.pi * t) + c2 * t * t

        def ds(t):
            return 2 * np.pi * c1 * np.cos(2 * np.pi * t) + 2 * c2 * t
    return SmoothGroupPath(model, x, y, s, ds, left)


def random_smooth_algebra_function(model, rng) -> Callable[[float], np.ndarray]:
    a0, a1, a2 = (model.random_element(rng, 0.6) for _ in range(3))
    f1, f2 = rng.uniform(1.0, 3.0, 2)
    return lambda t: a0 + a1 * np.sin(f1 * t) + a2 * np.cos(f2 * t * t)


# --- gauge action and transport -------------------------------------------------

def _ad_path(model, g, u):
    inv = np.linalg.inv(g)
    return np.array([model.coords(g[j] @ model.matrix(u[j]) @ inv[j]) for j in range(len(g))])


def gauge_action(g: DiscreteGroupPath, u: DiscreteAlgebraPath) -> DiscreteAlgebraPath:
    """g * u = g u g^-1 - g' g^-1 with the discrete logarithmic derivative."""
    if g.n != u.n:
        raise PathError(f"grid mismatch: {g.n} vs {u.n}")
    model = u.model
    return DiscreteAlgebraPath(model, _ad_path(model, g.samples, u.samples) - g.right_log_derivative())


def gauge_action_exact(g: SmoothGroupPath, u: DiscreteAlgebraPath) -> DiscreteAlgebraPath:
    n = u.n
    model = u.model
    gs = g.sample(n).samples
    deriv = np.array([g.log_derivative(j / n) for j in range(n + 1)])
    return DiscreteAlgebraPath(model, _ad_path(model, gs, u.samples) - deriv)


def _dexpinv(model, omega, v):
    b1 = bracket(model, omega, v)
    return v + 0.5 * b1 + bracket(model, omega, b1) / 12.0


def parallel_transport(u: DiscreteAlgebraPath, full: bool = False):
    """Solve g^-1 g' = u, g(0) = e by RKMK4 on node triplets; returns g(1) (or all even nodes)."""
    n = u.n
    if n % 2:
        raise PathError("parallel transport needs an even number of intervals")
    model = u.model
    step = 2.0 / n
    g = np.eye(model.matrix_size, dtype=complex)
    nodes = [g]
    s = u.samples
    for i in range(0, n, 2):
        u0, um, u1 = s[i], s[i + 1], s[i + 2]
        k1 = step * u0
        k2 = step * _dexpinv(model, 0.5 * k1, um)
        k3 = step * _dexpinv(model, 0.5 * k2, um)
        k4 = step * _dexpinv(model, k3, u1)
        theta = (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        g = g @ exp_map(model, theta)
        if full:
            nodes.append(g)
    return np.array(nodes) if full else g


def endpoint_map(g) -> tuple:
    s = g.samples if isinstance(g, DiscreteGroupPath) else g
    return s[0], s[-1]


# --- doubling maps ---------------------------------------------------------------

def _require_even(n):
    if n % 2:
        raise PathError("the doubling maps need an even number of intervals")


def doubled_model(model: LieAlgebraModel) -> LieAlgebraModel:
    return product_model(model, model)


def upsilon(u: DiscreteAlgebraPath, target: LieAlgebraModel | None = None) -> DiscreteAlgebraPath:
    """(1/2 u(t/2), -1/2 u(1 - t/2)) on the N/2 grid."""
    n = u.n
    _require_even(n)
    k = n // 2
    target = doubled_model(u.model) if target is None else target
    s = u.samples
    first = 0.5 * s[:k + 1]
    second = -0.5 * s[n - np.arange(k + 1)]
    return DiscreteAlgebraPath(target, np.hstack([first, second]))


def omega(g: DiscreteGroupPath, target: LieAlgebraModel | None = None) -> DiscreteGroupPath:
    """(g(t/2), g(1 - t/2)) on the N/2 grid, block diagonal."""
    n = g.n
    _require_even(n)
    k = n // 2
    target = doubled_model(g.model) if target is None else target
    s = g.samples
    m = s.shape[1]
    out = np.zeros((k + 1, 2 * m, 2 * m), dtype=complex)
    out[:, :m, :m] = s[:k + 1]
    out[:, m:, m:] = s[n - np.arange(k + 1)]
    return DiscreteGroupPath(target, out)


def omega_log_derivative(g: SmoothGroupPath, n: int) -> np.ndarray:
    """Exact Omega(g)' Omega(g)^-1 on the N/2 grid."""
    k = n // 2
    first = np.array([0.5 * g.log_derivative(j / n) for j in range(k + 1)])
    second = np.array([-0.5 * g.log_derivative(1 - j / n) for j in range(k + 1)])
    return np.hstack([first, second])


def phi_iso(b, c) -> np.ndarray:
    """The coset map (b, c) Delta G -> b c^-1."""
    return np.asarray(b) @ np.linalg.inv(np.asarray(c))


def dphi(model: LieAlgebraModel, x, y) -> np.ndarray:
    """Differential of (b, c) -> b c^-1 at (e, e)."""
    return np.asarray(x, dtype=float) - np.asarray(y, dtype=float)


def split_pair(model: LieAlgebraModel, m: np.ndarray) -> tuple:
    k = model.matrix_size
    return m[:k, :k], m[k:, k:]


# --- verification of the doubling diagrams --------------------------------------------

GRIDS = (64, 128, 256)


def _slope(ns, res) -> float | None:
    res = np.asarray(res, dtype=float)
    if np.any(res <= 0) or not np.all(np.isfinite(res)):
        return None
    p = np.polyfit(np.log(np.asarray(ns, dtype=float)), np.log(res), 1)
    return float(-p[0])


def verify_path_diagrams(model: LieAlgebraModel, grids=GRIDS, seed: int = 0, w=None) -> dict:
    """Residual tables and convergence slopes for the doubling-map identities."""
    rng = np.random.default_rng(seed)
    double = doubled_model(model)
    f = random_smooth_algebra_function(model, rng)
    g = random_smooth_group_path(model, rng)
    h = random_smooth_group_path(model, rng)
    f2 = random_smooth_algebra_function(model, rng)
    # fine-grid reference for Phi(u); its error is (max(grids) / n_ref)^4 times the coarsest one
    n_ref = 16 * max(grids)
    phi_ref = parallel_transport(DiscreteAlgebraPath.from_function(model, f, n_ref))
    rows = []
    for n in grids:
        u = DiscreteAlgebraPath.from_function(model, f, n)
        v = DiscreteAlgebraPath.from_function(model, f2, n)
        gs = g.sample(n)
        # Upsilon equivariance: Upsilon(g * u) against Omega(g) * Upsilon(u)
        lhs = upsilon(gauge_action(gs, u), double)
        om = omega(gs, double)
        yu = upsilon(u, double)
        rhs = DiscreteAlgebraPath(double, _ad_path(double, om.samples, yu.samples) - omega_log_derivative(g, n))
        ups_res = (lhs - rhs).norm()
        # gauge composition (gh) * u = g * (h * u)
        hs = h.sample(n)
        comp_res = (gauge_action(gs * hs, u) - gauge_action(gs, gauge_action(hs, u))).norm()
        # transport equivariance Phi(g * u) = g(0) Phi(u) g(1)^-1 with the exact gauge action
        pu = parallel_transport(u)
        pgu = parallel_transport(gauge_action_exact(g, u))
        eq_res = float(np.linalg.norm(pgu - g.at(0.0) @ pu @ np.linalg.inv(g.at(1.0))))
        # phi o Phi_{G x G} o Upsilon = Phi
        pair = parallel_transport(yu)
        b, c = split_pair(model, pair)
        lhs_phi = phi_iso(b, c)
        diag_res = float(np.linalg.norm(lhs_phi - phi_ref))
        # both sides discretized: the backward half is the adjoint of RK4, so the
        # H^4 terms cancel and this decays faster than the integrator order
        diag_discrete = float(np.linalg.norm(lhs_phi - pu))
        # quadrature identity
        quad = abs(yu.inner(upsilon(v, double)) - 0.5 * u.inner(v))
        rows.append({
            "N": n,
            "upsilon_equivariance": ups_res,
            "gauge_composition": comp_res,
            "transport_equivariance": eq_res,
            "doubling_diagram": diag_res,
            "doubling_diagram_discrete": diag_discrete,
            "quadrature": quad,
        })
    ns = [r["N"] for r in rows]
    slopes = {k: _slope(ns, [r[k] for r in rows])
              for k in ("upsilon_equivariance", "gauge_composition", "transport_equivariance", "doubling_diagram",
                        "doubling_diagram_discrete")}
    # exact cases: constant u and constant g
    n = grids[-1]
    x = model.random_element(rng, 1.0)
    xhat = DiscreteAlgebraPath.constant(model, x, n)
    exp_res = float(np.abs(parallel_transport(xhat) - exp_map(model, x)).max())
    b = exp_map(model, model.random_element(rng, 1.0))
    bconst = DiscreteGroupPath.constant(model, b, n)
    u = DiscreteAlgebraPath.from_function(model, f, n)
    const_res = float(np.abs(gauge_action(bconst, u).samples - _ad_path(model, bconst.samples, u.samples)).max())
    # endpoint diagram
    gs = g.sample(n)
    om = omega(gs, double)
    (e0, e1) = endpoint_map(om)
    end_res = max(
        float(np.abs(e0 - scipy.linalg.block_diag(gs.samples[0], gs.samples[-1])).max()),
        float(np.abs(e1 - scipy.linalg.block_diag(gs.samples[n // 2], gs.samples[n // 2])).max()),
    )
    orbit = orbit_identity_check(model, rng, n, w=w)
    ok_slopes = (
        slopes["upsilon_equivariance"] is not None and abs(slopes["upsilon_equivariance"] - 2) <= 0.3
        and slopes["transport_equivariance"] is not None and abs(slopes["transport_equivariance"] - 4) <= 0.3
        and slopes["doubling_diagram"] is not None and abs(slopes["doubling_diagram"] - 4) <= 0.3
    )
    ok = (
        ok_slopes
        and max(r["quadrature"] for r in rows) <= 1e-12
        and exp_res <= 1e-10
        and const_res <= 1e-12
        and end_res == 0.0
        and orbit["pass"]
    )
    return {
        "pass": bool(ok),
        "group": model.family,
        "seed": seed,
        "rows": rows,
        "slopes": slopes,
        "exp_residual": exp_res,
        "constant_gauge_residual": const_res,
        "endpoint_residual": end_res,
        "orbit_identity": orbit,
    }


def _sorted_eigs(m):
    ev = np.linalg.eigvals(m)
    return ev[np.lexsort((ev.imag, ev.real))]


def _spectrum_distance(a, b) -> float:
    ea, eb = np.angle(np.linalg.eigvals(a)), np.angle(np.linalg.eigvals(b))
    return float(np.abs(np.sort(ea) - np.sort(eb)).max())


def orbit_identity_check(model: LieAlgebraModel, rng, n: int, w=None) -> dict:
    """For L = Delta G, Phi(g * w_hat) stays conjugate to exp w exactly when g(0) = g(1)."""
    w = model.random_element(rng, 0.5) if w is None else np.asarray(w, dtype=float)
    what = DiscreteAlgebraPath.constant(model, w, n)
    b = exp_map(model, model.random_element(rng, 1.0))
    closed = random_smooth_group_path(model, rng, closed=True, left=b)
    open_ = random_smooth_group_path(model, rng, closed=False)
    target = exp_map(model, w)
    d_closed = _spectrum_distance(parallel_transport(gauge_action_exact(closed, what)), target)
    d_open = _spectrum_distance(parallel_transport(gauge_action_exact(open_, what)), target)
    return {
        "pass": bool(d_closed <= 1e-6 and d_open > 1e-6),
        "closed_path_distance": d_closed,
        "open_path_distance": d_open,
    }


__all__ = [
    "DiscreteAlgebraPath",
    "DiscreteGroupPath",
    "SmoothGroupPath",
    "PathError",
    "dphi",
    "endpoint_map",
    "gauge_action",
    "gauge_action_exact",
    "omega",
    "orbit_identity_check",
    "parallel_transport",
    "phi_iso",
    "upsilon",
    "verify_path_diagrams",
]

"""Automorphisms sigma of G and g: recipes, differentials and eigen-angle structure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import Angle, SigmaPFError
from .lie import LieAlgebraModel, bracket, exp_map

OUTER_RECIPES = ("complex_conjugation", "dynkin_flip")
CLUSTER_TOL = 1e-8


class AutomorphismError(SigmaPFError):
    pass


def _flip_matrix(n: int) -> np.ndarray:
    p = np.eye(n, dtype=complex)
    p[-1, -1] = -1
    return p


def _apply_outer(model: LieAlgebraModel, name: str | None, g: np.ndarray) -> np.ndarray:
    if name is None:
        return g
    if name == "complex_conjugation":
        return np.conj(g)
    if name == "dynkin_flip":
        p = _flip_matrix(g.shape[0])
        return p @ g @ p
    raise AutomorphismError(f"unknown outer recipe {name!r}; choose from {OUTER_RECIPES}")


@dataclass(frozen=True, eq=False)
class AutomorphismModel:
    """sigma = Ad(inner) o outer, at group level and as the orthogonal map D = d(sigma).

    ``inner``/``outer`` are ``None`` when absent.  Automorphisms built from a
    bare algebra map have ``group_recipe = False``; on such maps the group
    action is only available on exponentials, via ``sigma(exp x) = exp(D x)``.
    """

    model: LieAlgebraModel
    algebra_map: np.ndarray
    inner: np.ndarray | None = None
    outer: str | None = None
    declared_order: int | None = None
    group_recipe: bool = True

    def apply_group(self, g) -> np.ndarray:
        if not self.group_recipe:
            raise AutomorphismError("automorphism has no group-level recipe")
        t = _apply_outer(self.model, self.outer, np.asarray(g, dtype=complex))
        if self.inner is None:
            return t
        return self.inner @ t @ np.linalg.inv(self.inner)

    def apply_exp(self, x) -> np.ndarray:
        """sigma(exp x)."""
        if self.group_recipe:
            return self.apply_group(exp_map(self.model, x))
        return exp_map(self.model, self.algebra_map @ np.asarray(x, dtype=float))

    @property
    def orthonormal_map(self) -> np.ndarray:
        r = self.model.to_orthonormal
        return r @ self.algebra_map @ self.model.from_orthonormal

    def describe(self) -> dict:
        return {
            "inner": None if self.inner is None else "matrix",
            "outer": self.outer,
            "declared_order": self.declared_order,
        }


def _algebra_map_from_recipe(model, inner, outer) -> np.ndarray:
    cols = []
    binv = None if inner is None else np.linalg.inv(inner)
    for e in model.basis:
        t = _apply_outer(model, outer, e)
        if inner is not None:
            t = inner @ t @ binv
        cols.append(model.coords(t))
    return np.array(cols).T


def automorphism(model: LieAlgebraModel, inner=None, outer: str | None = None,
                 declared_order: int | None = None, rng=None, validate: bool = True) -> AutomorphismModel:
    """Build and validate sigma = Ad(inner) o outer on ``model``."""
    if inner is not None:
        inner = np.asarray(inner, dtype=complex)
        if model.group_defect(inner) > 1e-10:
            raise AutomorphismError("inner element is not unitary")
    if outer is not None and outer not in OUTER_RECIPES:
        raise AutomorphismError(f"unknown outer recipe {outer!r}; choose from {OUTER_RECIPES}")
    d = _algebra_map_from_recipe(model, inner, outer)
    sigma = AutomorphismModel(model, d, inner, outer, declared_order)
    if validate:
        validate_automorphism(sigma, rng=rng)
    return sigma


def from_algebra_map(model: LieAlgebraModel, algebra_map, declared_order=None,
                     rng=None) -> AutomorphismModel:
    """Accept an arbitrary algebra automorphism given as a matrix on coordinates."""
    sigma = AutomorphismModel(model, np.asarray(algebra_map, dtype=float), None, None,
                              declared_order, group_recipe=False)
    validate_automorphism(sigma, rng=rng)
    return sigma


def identity(model: LieAlgebraModel) -> AutomorphismModel:
    return AutomorphismModel(model, np.eye(model.dim), None, None, 1)


def validation_residuals(sigma: AutomorphismModel, rng=None, samples: int = 50) -> dict:
    model, d = sigma.model, sigma.algebra_map
    m = model.gram
    out = {"isometry": float(np.abs(d.T @ m @ d - m).max())}
    hom = 0.0
    for i in range(model.dim):
        for j in range(model.dim):
            ei = np.eye(model.dim)[i]
            ej = np.eye(model.dim)[j]
            lhs = d @ bracket(model, ei, ej)
            rhs = bracket(model, d @ ei, d @ ej)
            hom = max(hom, float(np.abs(lhs - rhs).max()))
    out["homomorphism"] = hom
    if sigma.group_recipe:
        rng = np.random.default_rng(0) if rng is None else rng
        grp = 0.0
        for _ in range(samples):
            x = model.random_element(rng)
            grp = max(grp, float(np.abs(sigma.apply_exp(x) - exp_map(model, d @ x)).max()))
        out["group_compatibility"] = grp
    if sigma.declared_order is not None:
        p = int(sigma.declared_order)
        out["order"] = float(np.abs(np.linalg.matrix_power(d, p) - np.eye(model.dim)).max())
    return out


def validate_automorphism(sigma: AutomorphismModel, rng=None) -> dict:
    res = validation_residuals(sigma, rng=rng)
    limits = {"isometry": 1e-12, "homomorphism": 1e-10, "group_compatibility": 1e-8, "order": 1e-9}
    for key, value in res.items():
        if value > limits[key]:
            raise AutomorphismError(f"{key} residual {value:.3g} exceeds {limits[key]:g}")
    return res


def orthonormal_null_space(a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal columns spanning ker(a) (singular values <= tol)."""
    if a.size == 0:
        return np.eye(a.shape[1])
    _u, s, vt = np.linalg.svd(a)
    rank = int(np.sum(s > tol))
    return vt[rank:].T


def fixed_algebra(sigma: AutomorphismModel) -> np.ndarray:
    """Basis (columns, model coordinates, gram-orthonormal) of g^sigma = ker(D - 1)."""
    dim = sigma.model.dim
    null = orthonormal_null_space(sigma.orthonormal_map - np.eye(dim))
    return sigma.model.from_orthonormal @ null


@dataclass(frozen=True)
class EigenBlock:
    angle: Angle  # in [0, pi]
    basis: np.ndarray  # columns in model coordinates, gram-orthonormal
    exact: bool

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True)
class EigenAngleDecomposition:
    blocks: tuple

    @property
    def angles(self) -> list[Angle]:
        return [b.angle for b in self.blocks]

    def dims(self) -> list[int]:
        return [b.dim for b in self.blocks]


def cluster_sorted(values: np.ndarray, tol: float = CLUSTER_TOL, gap: float | None = None) -> list[np.ndarray]:
    """Group indices of ascending ``values`` whose neighbours differ by <= tol.

    With ``gap`` set, raise if two neighbouring clusters are closer than ``gap``.
    """
    groups, cur = [], [0]
    for i in range(1, len(values)):
        delta = values[i] - values[i - 1]
        if delta <= tol:
            cur.append(i)
        else:
            if gap is not None and delta < gap:
                raise AutomorphismError(
                    f"ambiguous clustering: gap {delta:.3g} between {tol:g} and {gap:g}"
                )
            groups.append(np.array(cur))
            cur = [i]
    if len(values):
        groups.append(np.array(cur))
    return groups


def canonical_form(d_on: np.ndarray, tol: float = CLUSTER_TOL) -> list[tuple[float, np.ndarray]]:
    """Real canonical form of an orthogonal matrix given in orthonormal coordinates.

    Returns ``(theta, Q)`` pairs, theta in [0, pi], with Q orthonormal columns;
    for 0 < theta < pi the columns come in pairs (v, u) with D v = cos v + sin u.
    """
    if d_on.shape[0] == 0:
        return []
    c = (d_on + d_on.T) / 2
    s = (d_on - d_on.T) / 2
    vals, vecs = np.linalg.eigh(c)
    out = []
    for grp in cluster_sorted(vals, tol):
        q = vecs[:, grp]
        cos_t = float(np.clip(np.mean(vals[grp]), -1.0, 1.0))
        sin_t = float(np.sqrt(max(-np.trace(q.T @ s @ s @ q) / len(grp), 0.0))) + 0.0
        theta = float(np.arctan2(sin_t, cos_t))
        if sin_t > 1e-7 and len(grp) >= 2:
            q = _rotation_planes(q, s, sin_t)
        out.append((theta, q))
    out.sort(key=lambda p: p[0])
    return out


def _rotation_planes(q: np.ndarray, s: np.ndarray, sin_t: float) -> np.ndarray:
    space = q.copy()
    cols = []
    while space.shape[1] > 0:
        v = space[:, 0]
        for c in cols:
            v = v - (c @ v) * c
        v = v / np.linalg.norm(v)
        u = s @ v / sin_t
        u = u - (v @ u) * v
        for c in cols:
            u = u - (c @ u) * c
        u = u / np.linalg.norm(u)
        cols.extend([v, u])
        proj = np.column_stack(cols)
        rest = q - proj @ (proj.T @ q)
        uu, sv, _ = np.linalg.svd(rest, full_matrices=False)
        space = uu[:, sv > 1e-6]
    return np.column_stack(cols)


def eigen_angles(sigma: AutomorphismModel) -> EigenAngleDecomposition:
    model = sigma.model
    blocks = []
    for theta, q in canonical_form(sigma.orthonormal_map):
        angle = Angle.snap(theta)
        blocks.append(EigenBlock(angle, model.from_orthonormal @ q, angle.exact))
    return EigenAngleDecomposition(tuple(blocks))


def reconstruct(sigma: AutomorphismModel, dec: EigenAngleDecomposition) -> np.ndarray:
    """Rebuild D (orthonormal coordinates) from the eigen-angle blocks."""
    r = sigma.model.to_orthonormal
    out = np.zeros((sigma.model.dim,) * 2)
    for blk in dec.blocks:
        q = r @ blk.basis
        t = blk.angle.radians
        if blk.dim >= 2 and 1e-12 < abs(np.sin(t)):
            for k in range(0, blk.dim, 2):
                v, u = q[:, k], q[:, k + 1]
                out += np.cos(t) * (np.outer(v, v) + np.outer(u, u)) + np.sin(t) * (
                    np.outer(u, v) - np.outer(v, u)
                )
        else:
            out += np.cos(t) * q @ q.T
    return out


def verify_ad_tau_split(sigma: AutomorphismModel, b, tau: AutomorphismModel,
                        samples: int = 20, rng=None, tol: float = 1e-8) -> dict:
    """Check sigma = Ad(b) o tau at algebra and group level.

    Failure is reported with the residuals; it never asserts that no valid
    (b, tau) exists.
    """
    model = sigma.model
    b = np.asarray(b, dtype=complex)
    binv = np.linalg.inv(b)
    if tau.declared_order not in (1, 2, 3):
        raise AutomorphismError("tau must declare order 1, 2 or 3")
    order_res = float(np.abs(np.linalg.matrix_power(tau.algebra_map, tau.declared_order)
                             - np.eye(model.dim)).max())
    ad_b = np.array([model.coords(b @ e @ binv) for e in model.basis]).T
    alg = float(np.abs(sigma.algebra_map - ad_b @ tau.algebra_map).max())
    rng = np.random.default_rng(1) if rng is None else rng
    grp = 0.0
    for _ in range(samples):
        x = model.random_element(rng)
        grp = max(grp, float(np.abs(sigma.apply_exp(x) - b @ tau.apply_exp(x) @ binv).max()))
    ok = alg <= tol and grp <= tol and order_res <= 1e-9
    return {
        "pass": bool(ok),
        "algebra_residual": alg,
        "group_residual": grp,
        "tau_order_residual": order_res,
        "max_residual": max(alg, grp),
    }


def unitary_diag_phase(turns) -> np.ndarray:
    """diag(exp(i pi q_j)) for rational q_j."""
    return np.diag([np.exp(1j * np.pi * float(q)) for q in turns])


def matrix_power_order(d: np.ndarray, max_order: int = 12, tol: float = 1e-9) -> int | None:
    """Smallest p <= max_order with D^p = 1, else None."""
    acc = np.eye(d.shape[0])
    for p in range(1, max_order + 1):
        acc = acc @ d
        if np.abs(acc - np.eye(d.shape[0])).max() <= tol:
            return p
    return None


__all__ = [
    "AutomorphismModel",
    "AutomorphismError",
    "EigenAngleDecomposition",
    "EigenBlock",
    "automorphism",
    "canonical_form",
    "eigen_angles",
    "fixed_algebra",
    "from_algebra_map",
    "identity",
    "reconstruct",
    "validate_automorphism",
    "verify_ad_tau_split",
]

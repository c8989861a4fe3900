"""Matrix models of compact semisimple Lie algebras.

Algebra elements are coordinate vectors (length ``dim``) over the model's
basis; group elements are plain complex matrices in the defining
representation.  Products ``g1 + g2`` are realized block-diagonally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .exact import SigmaPFError, snap_rational

TOL_STRUCTURE = 1e-12
TOL_GROUP = 1e-10


class ModelError(SigmaPFError):
    pass


@dataclass(frozen=True, eq=False)
class LieAlgebraModel:
    """A compact semisimple Lie algebra with an Ad-invariant inner product.

    ``gram`` is the Gram matrix of ``<x, y> = -c B(x, y)`` on the basis, with
    ``c`` stored per simple-or-product factor in ``metric_scale``.  The
    Killing form ``B`` is always computed from the structure constants.
    """

    family: str
    basis: np.ndarray  # (d, n, n) complex
    factors: tuple  # ((start, stop, row_start, row_stop, tag, metric_scale), ...)
    simply_connected: bool = True
    structure_constants: np.ndarray = field(init=False, repr=False)
    killing: np.ndarray = field(init=False, repr=False)
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=complex)
        object.__setattr__(self, "basis", basis)
        d = basis.shape[0]
        c = np.empty((d, d, d))
        for i in range(d):
            for j in range(d):
                c[i, j] = self.coords(basis[i] @ basis[j] - basis[j] @ basis[i])
        object.__setattr__(self, "structure_constants", c)
        killing = np.einsum("ilk,jkl->ij", c, c)
        object.__setattr__(self, "killing", killing)
        gram = np.zeros((d, d))
        for start, stop, *_rest, scale in self.factors:
            gram[start:stop, start:stop] = -scale * killing[start:stop, start:stop]
        object.__setattr__(self, "gram", gram)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def matrix_size(self) -> int:
        return self.basis.shape[1]

    @property
    def metric_scale(self) -> tuple:
        return tuple(f[-1] for f in self.factors)

    @cached_property
    def _real_basis(self) -> np.ndarray:
        flat = self.basis.reshape(self.dim, -1)
        return np.concatenate([flat.real, flat.imag], axis=1)

    @cached_property
    def _coord_solver(self) -> np.ndarray:
        return np.linalg.pinv(self._real_basis)

    @cached_property
    def to_orthonormal(self) -> np.ndarray:
        """Upper-triangular R with gram = R.T @ R, so that R @ x are orthonormal coordinates."""
        return np.linalg.cholesky(self.gram).T

    @cached_property
    def from_orthonormal(self) -> np.ndarray:
        return np.linalg.inv(self.to_orthonormal)

    def matrix(self, x) -> np.ndarray:
        return np.tensordot(np.asarray(x, dtype=float), self.basis, axes=(0, 0))

    def coords(self, m) -> np.ndarray:
        """Coordinates of the Frobenius-orthogonal projection of ``m`` onto the algebra."""
        flat = np.asarray(m, dtype=complex).reshape(-1)
        return np.concatenate([flat.real, flat.imag]) @ self._coord_solver

    def element_defect(self, m) -> float:
        """Distance of a matrix from the algebra."""
        m = np.asarray(m, dtype=complex)
        return float(np.linalg.norm(m - self.matrix(self.coords(m))))

    def group_defect(self, g) -> float:
        g = np.asarray(g, dtype=complex)
        return float(np.linalg.norm(g.conj().T @ g - np.eye(g.shape[0])))

    def norm(self, x) -> float:
        return float(np.sqrt(max(inner(self, x, x), 0.0)))

    def random_element(self, rng, scale: float = 1.0) -> np.ndarray:
        """Random element with orthonormal coordinates ~ N(0, scale^2)."""
        return self.from_orthonormal @ (scale * rng.standard_normal(self.dim))


def bracket(model: LieAlgebraModel, x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (model.dim,) or y.shape != (model.dim,):
        raise ModelError(f"expected coordinate vectors of length {model.dim}")
    return np.einsum("i,j,ijk->k", x, y, model.structure_constants)


def inner(model: LieAlgebraModel, x, y) -> float:
    return float(np.asarray(x) @ model.gram @ np.asarray(y))


def exp_map(model: LieAlgebraModel, x) -> np.ndarray:
    # scipy's expm is scaling-and-squaring with a degree-13 Pade approximant
    return scipy.linalg.expm(model.matrix(x))


def ad_operator(model: LieAlgebraModel, x) -> np.ndarray:
    """Matrix of ``y -> [x, y]`` acting on coordinate vectors."""
    return np.einsum("i,ikl->lk", np.asarray(x, dtype=float), model.structure_constants)


def jacobi_residual(model: LieAlgebraModel) -> float:
    c = model.structure_constants
    # sum_m c_ij^m c_mk^l + cyclic
    t = np.einsum("ijm,mkl->ijkl", c, c)
    return float(np.abs(t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)).max())


# --- families -------------------------------------------------------------

def _unit(m: np.ndarray) -> np.ndarray:
    return m / np.sqrt(np.real(np.vdot(m, m)))


def _su_basis(n: int) -> list[np.ndarray]:
    out = []
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), complex)
            e[j, k], e[k, j] = 1, -1
            out.append(_unit(e))
            f = np.zeros((n, n), complex)
            f[j, k] = f[k, j] = 1j
            out.append(_unit(f))
    for l in range(1, n):
        h = np.zeros((n, n), complex)
        h[np.arange(l), np.arange(l)] = 1j
        h[l, l] = -1j * l
        out.append(_unit(h))
    return out


def _so_basis(n: int) -> list[np.ndarray]:
    out = []
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), complex)
            e[j, k], e[k, j] = 1, -1
            out.append(_unit(e))
    return out


def _sp_basis(n: int) -> list[np.ndarray]:
    # [[A, B], [-conj(B), conj(A)]] with A in u(n), B complex symmetric
    out = []
    u_basis = []
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), complex)
            e[j, k], e[k, j] = 1, -1
            u_basis.append(e)
            f = np.zeros((n, n), complex)
            f[j, k] = f[k, j] = 1j
            u_basis.append(f)
        h = np.zeros((n, n), complex)
        h[j, j] = 1j
        u_basis.append(h)
    for a in u_basis:
        m = np.zeros((2 * n, 2 * n), complex)
        m[:n, :n], m[n:, n:] = a, a.conj()
        out.append(_unit(m))
    for j in range(n):
        for k in range(j, n):
            s = np.zeros((n, n))
            s[j, k] = s[k, j] = 1
            for b in (s, 1j * s):
                m = np.zeros((2 * n, 2 * n), complex)
                m[:n, n:], m[n:, :n] = b, -np.conj(b)
                out.append(_unit(m))
    return out


def _default_scale(basis: np.ndarray) -> float:
    """The c with -c B equal to the trace form Re tr(x y^*) of the defining representation."""
    probe = LieAlgebraModel("probe", basis, ((0, len(basis), 0, basis.shape[1], "probe", 1.0),))
    frob = np.real(np.einsum("iab,jab->ij", basis, basis.conj()))
    c = float(np.mean(np.diag(frob) / -np.diag(probe.killing)))
    c = float(snap_rational(c, tol=1e-12, max_den=1000))
    if not np.allclose(frob, -c * probe.killing, atol=1e-10):
        raise ModelError("Killing form is not proportional to the trace form")
    return c


def simple_model(family: str, n: int, metric_scale: float | None = None) -> LieAlgebraModel:
    """su(n) (n >= 2), so(n) (n >= 3) or sp(n) (n >= 1) in the defining representation."""
    if family == "su":
        if n < 2:
            raise ModelError("su(n) needs n >= 2")
        basis, size, sc = _su_basis(n), n, True
    elif family == "so":
        if n < 3:
            raise ModelError("so(n) needs n >= 3")
        basis, size, sc = _so_basis(n), n, False
    elif family == "sp":
        if n < 1:
            raise ModelError("sp(n) needs n >= 1")
        basis, size, sc = _sp_basis(n), 2 * n, True
    else:
        raise ModelError(f"unknown family {family!r}")
    basis = np.array(basis)
    scale = _default_scale(basis) if metric_scale is None else float(metric_scale)
    if scale <= 0:
        raise ModelError("metric_scale must be positive")
    tag = f"{family}({n})"
    return LieAlgebraModel(tag, basis, ((0, len(basis), 0, size, tag, scale),), simply_connected=sc)


def product_model(a: LieAlgebraModel, b: LieAlgebraModel) -> LieAlgebraModel:
    """Direct sum realized block-diagonally; the inner product is the orthogonal sum."""
    na, nb = a.matrix_size, b.matrix_size
    basis = np.zeros((a.dim + b.dim, na + nb, na + nb), complex)
    basis[: a.dim, :na, :na] = a.basis
    basis[a.dim :, na:, na:] = b.basis
    factors = tuple(a.factors) + tuple(
        (s + a.dim, e + a.dim, r0 + na, r1 + na, tag, scale) for s, e, r0, r1, tag, scale in b.factors
    )
    return LieAlgebraModel(
        f"{a.family}+{b.family}", basis, factors, simply_connected=a.simply_connected and b.simply_connected
    )


def block_diag(*mats) -> np.ndarray:
    return scipy.linalg.block_diag(*mats).astype(complex)


def split_blocks(model: LieAlgebraModel, m) -> list[np.ndarray]:
    """The diagonal blocks of a product-model matrix, one per factor."""
    return [np.asarray(m)[r0:r1, r0:r1] for _s, _e, r0, r1, _t, _c in model.factors]


def model_from_descriptor(desc: dict) -> LieAlgebraModel:
    """Build a model from ``{"family": "su", "n": 3, "metric_scale": ...}`` or ``{"product": [...]}``."""
    if "product" in desc:
        parts = [model_from_descriptor(p) for p in desc["product"]]
        if len(parts) < 2:
            raise ModelError("product needs at least two factors")
        out = parts[0]
        for p in parts[1:]:
            out = product_model(out, p)
        return out
    try:
        family, n = desc["family"], int(desc["n"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"bad group descriptor {desc!r}") from exc
    return simple_model(family, n, desc.get("metric_scale"))

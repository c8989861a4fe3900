"""Geometry of the orbit N = G(sigma) . exp(w) for w in t.

Tangent and normal spaces are stored left-translated to the identity:
``T`` is the subspace of g with T_aN = dl_a(T).  The exact spectrum
comes from the closed form in terms of theta = <alpha, w> + arg eps; the
oracle recomputes it from finite differences of the orbit map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

from .automorphism import cluster_sorted
from .exact import Angle, SigmaPFError, UndecidableError, cot_multiples_equal, format_angle
from .lie import ad_operator, exp_map
from .roots import RefinedRootData, Root, RootBlock, ZeroBlock

POINT_TOL = 1e-12
EXACT_ZERO_TOL = 1e-12


class OrbitError(SigmaPFError):
    pass


# --- orbit specification ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitSpec:
    data: RefinedRootData
    w: tuple  # Angle coordinates over the frame's coordinate basis

    def __post_init__(self):
        w = tuple(c if isinstance(c, Angle) else Angle.snap(float(c)) for c in self.w)
        if len(w) != self.data.frame.rank:
            raise OrbitError(f"w needs {self.data.frame.rank} coordinates, got {len(w)}")
        object.__setattr__(self, "w", w)

    @property
    def frame(self):
        return self.data.frame

    @property
    def model(self):
        return self.data.frame.model

    @property
    def sigma(self):
        return self.data.frame.sigma

    @property
    def w_vector(self) -> np.ndarray:
        return np.array([c.radians for c in self.w]) @ self.frame.coord

    @property
    def a(self) -> np.ndarray:
        return exp_map(self.model, self.w_vector)

    def theta(self, blk: RootBlock) -> Angle:
        return blk.root.pair_angle(self.w) + blk.angle

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.w) and all(b.root.exact and b.angle.exact for b in self.data.root_blocks)


def xi_vector(spec: OrbitSpec, xi) -> np.ndarray:
    return spec.frame.element(xi)


def _pair_xi(root: Root, xi):
    v = root.pair(xi)
    if isinstance(v, float) and abs(v) <= EXACT_ZERO_TOL:
        return 0.0
    return v


# --- tangent / normal split -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class TangentNormalSplit:
    spec: OrbitSpec
    tangent_roots: tuple  # (RootBlock, theta)
    normal_roots: tuple
    tangent_zero: tuple  # ZeroBlock
    normal_zero: tuple
    tangent_basis: np.ndarray  # (d, dim N) gram-orthonormal columns
    normal_basis: np.ndarray
    span_residual: float

    @property
    def dim(self) -> int:
        return self.tangent_basis.shape[1]

    @property
    def codim(self) -> int:
        return self.normal_basis.shape[1]

    @property
    def principal(self) -> bool:
        """Normal space equals dl_a(t)."""
        return self.codim == self.spec.frame.rank


def _columns(blocks, attr="basis", d=None):
    cols = [getattr(b, attr) for b in blocks if getattr(b, attr).shape[1]]
    if not cols:
        return np.zeros((d, 0))
    return np.hstack(cols)


def action_tangent_map(spec: OrbitSpec) -> np.ndarray:
    """x -> Ad(a^-1) x - D x in model coordinates (left-trivialized orbit differential)."""
    model = spec.model
    a = spec.a
    ainv = a.conj().T
    ad_ainv = np.array([model.coords(ainv @ e @ a) for e in model.basis]).T
    return ad_ainv - spec.sigma.algebra_map


def split_tangent_normal(spec: OrbitSpec) -> TangentNormalSplit:
    d = spec.model.dim
    t_roots, n_roots = [], []
    for blk in spec.data.root_blocks:
        th = spec.theta(blk)
        try:
            normal = th.in_two_pi_z()
        except UndecidableError as exc:
            raise UndecidableError(
                f"cannot decide whether theta = {th} is in 2piZ for root {blk.root.pairing}; "
                "give w as exact rational multiples of pi"
            ) from exc
        (n_roots if normal else t_roots).append((blk, th))
    t_zero = tuple(b for b in spec.data.zero_blocks if not (b.angle.exact and b.angle.turns == 0) and b.dim)
    n_zero = tuple(b for b in spec.data.zero_blocks if b.angle.exact and b.angle.turns == 0 and b.dim)
    zero_inexact = [b for b in spec.data.zero_blocks if not b.angle.exact and abs(b.angle.radians) <= 1e-9]
    if zero_inexact:
        raise UndecidableError("zero block angle is near 0 but inexact")
    tb = np.hstack([_columns(t_zero, d=d), _columns([b for b, _ in t_roots], d=d)])
    nb = np.hstack([_columns(n_zero, d=d), _columns([b for b, _ in n_roots], d=d)])
    # numeric confirmation: image of the action differential equals T
    model = spec.model
    r = model.to_orthonormal
    img = r @ action_tangent_map(spec) @ model.from_orthonormal
    u, s, _ = np.linalg.svd(img)
    rank = int(np.sum(s > 1e-8 * max(1.0, s.max() if s.size else 1.0)))
    p_img = u[:, :rank] @ u[:, :rank].T
    t_on = r @ tb
    p_t = t_on @ t_on.T
    residual = float(np.abs(p_img - p_t).max())
    return TangentNormalSplit(spec, tuple(t_roots), tuple(n_roots), t_zero, n_zero, tb, nb, residual)


# --- exact spectrum -------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumEntry:
    eigenvalue: float
    mult: int
    root: tuple | None  # pairing, None for zero blocks
    eps_angle: Angle
    theta: Angle | None


@dataclass(frozen=True)
class CurvatureVector:
    """lambda = coeff * alpha with coeff = -1/2 cot(theta/2); zero vector when root is None."""

    root: Root | None
    theta: Angle | None
    mult: int
    eps_angle: Angle

    @property
    def coeff(self) -> float:
        if self.root is None:
            return 0.0
        return -0.5 * self.theta.cot_half()

    @property
    def is_zero(self) -> bool:
        return self.root is None or (self.theta.exact and (self.theta.turns - 1) % 2 == 0)

    def vector(self, model_dim: int) -> np.ndarray:
        if self.root is None:
            return np.zeros(model_dim)
        return self.coeff * self.root.vector

    def pair(self, xi) -> float:
        if self.root is None or self.is_zero:
            return 0.0
        return self.coeff * float(self.root.pair(xi))


@dataclass(frozen=True, eq=False)
class FiniteSpectrum:
    entries: tuple
    curvature_vectors: tuple
    xi: tuple

    def multiset(self) -> list[tuple[float, int]]:
        vals = sorted((e.eigenvalue, e.mult) for e in self.entries)
        return merge_close(vals)

    @property
    def total_mult(self) -> int:
        return sum(e.mult for e in self.entries)


def merge_close(pairs, tol: float = 1e-12) -> list[tuple[float, int]]:
    out = []
    for v, m in sorted(pairs):
        if out and abs(out[-1][0] - v) <= tol * max(1.0, abs(v)):
            out[-1] = (out[-1][0], out[-1][1] + m)
        else:
            out.append((v, m))
    return out


def _check_xi(spec: OrbitSpec, xi) -> tuple:
    xi = tuple(xi)
    if len(xi) != spec.frame.rank:
        raise OrbitError(f"xi needs {spec.frame.rank} coordinates over the frame, got {len(xi)}")
    return xi


def curvature_vectors(split: TangentNormalSplit) -> tuple:
    out = [CurvatureVector(None, None, b.dim, b.angle) for b in split.tangent_zero]
    for blk, th in split.tangent_roots:
        out.append(CurvatureVector(blk.root, th, blk.mult, blk.angle))
    return tuple(out)


def shape_spectrum(split: TangentNormalSplit, xi) -> FiniteSpectrum:
    """Exact eigenvalues -(<alpha, xi>/2) cot(theta/2) of the shape operator A_xi, xi in t."""
    xi = _check_xi(split.spec, xi)
    entries = [SpectrumEntry(0.0, b.dim, None, b.angle, None) for b in split.tangent_zero]
    for blk, th in split.tangent_roots:
        if th.exact and th.turns % 2 == 0:
            raise OrbitError("tangent block with theta in 2piZ")
        ax = float(_pair_xi(blk.root, xi))
        ev = -(ax / 2) * th.cot_half()
        entries.append(SpectrumEntry(ev + 0.0, blk.mult, blk.root.pairing, blk.angle, th))
    return FiniteSpectrum(tuple(entries), curvature_vectors(split), xi)


# --- numeric oracle ---------------------------------------------------------------

FD_STEP = 1e-4
ORACLE_CLUSTER = 1e-5


def _orbit_matrix(spec: OrbitSpec, a: np.ndarray, ainv: np.ndarray, x: np.ndarray) -> np.ndarray:
    """a^-1 exp(x) a sigma(exp(-x))."""
    return ainv @ exp_map(spec.model, x) @ a @ spec.sigma.apply_exp(-x)


def _second_derivatives(spec, xs, h):
    """Symmetric second derivatives of the left-trivialized orbit map along xs at 0."""
    a = spec.a
    ainv = np.linalg.inv(a)
    k = len(xs)
    out = np.empty((k, k), dtype=object)
    f0 = _orbit_matrix(spec, a, ainv, np.zeros(spec.model.dim))
    for i in range(k):
        fp = _orbit_matrix(spec, a, ainv, h * xs[i])
        fm = _orbit_matrix(spec, a, ainv, -h * xs[i])
        out[i, i] = (fp - 2 * f0 + fm) / h**2
        for j in range(i + 1, k):
            fpp = _orbit_matrix(spec, a, ainv, h * (xs[i] + xs[j]))
            fpm = _orbit_matrix(spec, a, ainv, h * (xs[i] - xs[j]))
            fmp = _orbit_matrix(spec, a, ainv, h * (-xs[i] + xs[j]))
            fmm = _orbit_matrix(spec, a, ainv, -h * (xs[i] + xs[j]))
            out[i, j] = out[j, i] = (fpp - fpm - fmp + fmm) / (4 * h**2)
    return out


def numeric_shape_oracle(spec: OrbitSpec, xi, h: float = FD_STEP, cluster_tol: float = ORACLE_CLUSTER,
                         tangent_basis: np.ndarray | None = None) -> list[tuple[float, int]]:
    """Shape operator eigenvalues of A_{dl_a xi} from finite differences of the orbit map.

    Works only from sigma's group recipe and the matrix exponential; the root
    data is not consulted.  Returns clustered (eigenvalue, multiplicity) pairs.
    """
    model = spec.model
    xi = _check_xi(spec, xi)
    xi_vec = xi_vector(spec, xi)
    r = model.to_orthonormal
    lmap = r @ action_tangent_map(spec) @ model.from_orthonormal
    _u, s, vt = np.linalg.svd(lmap)
    keep = s > 1e-8 * max(1.0, s.max())
    if not keep.any():
        raise OrbitError("orbit is a point")
    xs = [model.from_orthonormal @ v for v in vt[keep]]
    ys = [action_tangent_map(spec) @ x for x in xs]
    g = np.array([[yi @ model.gram @ yj for yj in ys] for yi in ys])
    if np.linalg.cond(g) > 1e8:
        raise OrbitError(f"ill-conditioned tangent Gram matrix (cond {np.linalg.cond(g):.3g})")
    d1 = _second_derivatives(spec, xs, h)
    d2 = _second_derivatives(spec, xs, h / 2)
    k = len(xs)
    smat = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            z = (4 * d2[i, j] - d1[i, j]) / 3
            smat[i, j] = model.coords(z) @ model.gram @ xi_vec
    smat = (smat + smat.T) / 2
    vals = scipy.linalg.eigh(smat, g, eigvals_only=True)
    return cluster_values(vals, cluster_tol)


def cluster_values(vals, tol: float) -> list[tuple[float, int]]:
    vals = np.sort(np.asarray(vals, dtype=float))
    return [(float(np.mean(vals[g])), len(g)) for g in cluster_sorted(vals, tol)]


def spectra_agree(exact: list[tuple[float, int]], numeric: list[tuple[float, int]], tol: float = 1e-5) -> bool:
    a = np.repeat([v for v, _ in exact], [m for _, m in exact]) if exact else np.zeros(0)
    b = np.repeat([v for v, _ in numeric], [m for _, m in numeric]) if numeric else np.zeros(0)
    if a.shape != b.shape:
        return False
    return bool(np.all(np.abs(np.sort(a) - np.sort(b)) <= tol))


def expand(pairs) -> np.ndarray:
    return np.sort(np.repeat([v for v, _ in pairs], [m for _, m in pairs])) if pairs else np.zeros(0)


# --- curvature adaptedness ----------------------------------------------------------

def block_shape_operators(split: TangentNormalSplit) -> list[np.ndarray]:
    """A_{c_i} on T in tangent_basis coordinates, one per frame coordinate vector."""
    spec = split.spec
    out = []
    for i in range(spec.frame.rank):
        xi = tuple(Fraction(int(j == i)) for j in range(spec.frame.rank))
        diag = []
        for b in split.tangent_zero:
            diag += [0.0] * b.dim
        for blk, th in split.tangent_roots:
            diag += [-(float(blk.root.pair(xi)) / 2) * th.cot_half()] * blk.mult
        out.append(np.diag(diag))
    return out


def curvature_adapted_check(split: TangentNormalSplit, tangent_override: np.ndarray | None = None,
                            tol: float = 1e-8) -> dict:
    """Jacobi operators R_t = -1/4 ad(t)^2 preserve T and commute with the shape operators.

    ``tangent_override`` replaces the declared tangent basis (model coordinates,
    columns) while keeping the block shape operators; used as a negative control.
    """
    spec = split.spec
    model = spec.model
    r = model.to_orthonormal
    tb = split.tangent_basis if tangent_override is None else tangent_override
    t_on, _ = np.linalg.qr(r @ tb) if tangent_override is not None else (r @ tb, None)
    k = spec.frame.rank
    if t_on.shape[1] == 0:
        return {"pass": True, "k": k, "preserve_residual": 0.0, "commutator_residual": 0.0, "dim": 0}
    proj = t_on @ t_on.T
    jac = []
    preserve = 0.0
    for c in spec.frame.coord:
        a = r @ ad_operator(model, c) @ model.from_orthonormal
        rv = -0.25 * a @ a
        preserve = max(preserve, float(np.abs(rv @ t_on - proj @ rv @ t_on).max()))
        jac.append(t_on.T @ rv @ t_on)
    shapes = block_shape_operators(split)
    family = jac + shapes
    comm = 0.0
    for i in range(len(family)):
        for j in range(i + 1, len(family)):
            comm = max(comm, float(np.abs(family[i] @ family[j] - family[j] @ family[i]).max()))
    ok = preserve <= tol and comm <= tol
    return {"pass": bool(ok), "k": k, "dim": int(t_on.shape[1]),
            "preserve_residual": preserve, "commutator_residual": comm}


def corrupted_tangent_basis(split: TangentNormalSplit, rng=None, amount: float = 0.3) -> np.ndarray:
    """Mix a normal direction into the tangent basis (test fixture)."""
    rng = np.random.default_rng(7) if rng is None else rng
    tb = split.tangent_basis.copy()
    nb = split.normal_basis
    mix = nb @ rng.standard_normal((nb.shape[1], tb.shape[1]))
    rot = tb @ scipy.linalg.expm(amount * _skew(rng, tb.shape[1]))
    return rot + amount * mix


def _skew(rng, n):
    m = rng.standard_normal((n, n))
    return (m - m.T) / 2


# --- austere (finite) ---------------------------------------------------------------

def _line_key(root: Root):
    p = [Fraction(x) for x in root.pairing]
    lead = next(x for x in p if x != 0)
    return tuple(x / lead for x in p), lead


def austere_check_finite(split: TangentNormalSplit) -> dict:
    """Whether the nonzero curvature vectors form a multiset closed under v -> -v.

    Decided exactly: curvature vectors on one line of roots are k cot(theta/2) u
    for rational k and rational-in-pi theta, compared through cyclotomic
    arithmetic.  Inexact data yields verdict "undecidable".
    """
    spec = split.spec
    scope = "all normal directions" if split.principal else "section only"
    vecs = [cv for cv in split_curvature_vectors(split) if not cv.is_zero]
    if not all(cv.root.exact and cv.theta.exact for cv in vecs):
        return {"verdict": "undecidable", "austere": None, "scope": scope,
                "reason": "inexact root pairings or angles"}
    items = []
    for cv in vecs:
        key, lead = _line_key(cv.root)
        half = cv.theta.turns / 2
        items.extend([(key, lead, half, cv)] * cv.mult)
    used = [False] * len(items)
    pairs = []
    for i, (key, k1, h1, cv1) in enumerate(items):
        if used[i]:
            continue
        match = None
        for j in range(i + 1, len(items)):
            key2, k2, h2, _ = items[j]
            if used[j] or key2 != key:
                continue
            # lambda_i = -lambda_j  <=>  k1 cot(h1 pi) = -k2 cot(h2 pi)
            if cot_multiples_equal(k1, h1, -k2, h2):
                match = j
                break
        if match is None:
            return {
                "verdict": "not austere",
                "austere": False,
                "scope": scope,
                "unmatched": describe_curvature_vector(cv1),
                "pairs": [[describe_curvature_vector(a), describe_curvature_vector(b)] for a, b in pairs],
            }
        used[i] = used[match] = True
        pairs.append((cv1, items[match][3]))
    return {
        "verdict": "austere",
        "austere": True,
        "scope": scope,
        "pairs": [[describe_curvature_vector(a), describe_curvature_vector(b)] for a, b in pairs],
        "zero_vectors": sum(cv.mult for cv in split_curvature_vectors(split) if cv.is_zero),
    }


def split_curvature_vectors(split: TangentNormalSplit) -> tuple:
    return curvature_vectors(split)


def describe_curvature_vector(cv: CurvatureVector) -> dict:
    if cv.root is None:
        return {"root": None, "theta": None, "coeff": "0", "eps_angle": format_angle(cv.eps_angle)}
    return {
        "root": [str(p) for p in cv.root.pairing],
        "theta": format_angle(cv.theta),
        "eps_angle": format_angle(cv.eps_angle),
        "coeff": "-cot(theta/2)/2",
        "coeff_value": cv.coeff,
    }


# --- weakly reflective witness --------------------------------------------------------

@dataclass(frozen=True)
class IsometryStep:
    kind: str  # "left" | "right" | "inverse" | "automorphism"
    matrix: np.ndarray | None = None
    sigma: object = None


def compose_isometry(steps):
    """Callable g -> nu(g) applying ``steps`` left to right."""

    def nu(g):
        for st in steps:
            if st.kind == "left":
                g = st.matrix @ g
            elif st.kind == "right":
                g = g @ st.matrix
            elif st.kind == "inverse":
                g = g.conj().T
            elif st.kind == "automorphism":
                g = st.sigma.apply_group(g)
            else:
                raise OrbitError(f"unknown isometry step {st.kind!r}")
        return g

    return nu


def group_log(model, g) -> np.ndarray:
    """Coordinates of the principal logarithm of g (assumed near e)."""
    return model.coords(scipy.linalg.logm(g))


def distance_to_orbit(spec: OrbitSpec, q: np.ndarray, iterations: int = 60, tol: float = 1e-13) -> float:
    """Local distance from q to the orbit near a, by Gauss-Newton on b -> b a sigma(b)^-1."""
    model = spec.model
    a = spec.a
    b = np.eye(a.shape[0], dtype=complex)
    dmap = spec.sigma.algebra_map
    r = model.to_orthonormal
    best = math.inf
    for _ in range(iterations):
        c = b @ a @ spec.sigma.apply_group(b).conj().T
        res = group_log(model, c.conj().T @ q)
        dist = model.norm(res)
        best = min(best, dist)
        if dist <= tol:
            break
        cinv = c.conj().T
        ad_cinv = np.array([model.coords(cinv @ e @ c) for e in model.basis]).T
        jac = r @ (ad_cinv - dmap) @ model.from_orthonormal
        y_on = np.linalg.lstsq(jac, r @ res, rcond=1e-10)[0]
        y = model.from_orthonormal @ y_on
        b = exp_map(model, y) @ b
    return best


def weakly_reflective_witness(spec: OrbitSpec, xi, steps, samples: int = 200, radius: float = 0.5,
                              rng=None, h: float = 1e-5) -> dict:
    model = spec.model
    xi = _check_xi(spec, xi)
    xv = xi_vector(spec, xi)
    nu = compose_isometry(steps)
    a = spec.a
    fix = float(np.linalg.norm(nu(a) - a))
    ainv = np.linalg.inv(a)
    plus = nu(a @ exp_map(model, h * xv))
    minus = nu(a @ exp_map(model, -h * xv))
    dnu = model.coords(ainv @ (plus - minus) / (2 * h))
    flip = float(np.sqrt(max(0.0, (dnu + xv) @ model.gram @ (dnu + xv))))
    rng = np.random.default_rng(2024) if rng is None else rng
    worst = 0.0
    for _ in range(samples):
        x = rng.standard_normal(model.dim)
        x *= radius * rng.uniform() / max(model.norm(x), 1e-300)
        p = exp_map(model, x) @ a @ spec.sigma.apply_exp(-x)
        worst = max(worst, distance_to_orbit(spec, nu(p)))
        if worst > 1e-3:
            break
    ok = fix <= 1e-10 and flip <= 1e-8 and worst <= 1e-6
    return {
        "pass": bool(ok),
        "fixes_point_residual": fix,
        "reverses_xi_residual": flip,
        "max_orbit_distance": worst,
        "samples": samples,
        "label": "weakly reflective in direction xi (PF lift transfers)" if ok else "candidate rejected",
    }


__all__ = [
    "CurvatureVector",
    "FiniteSpectrum",
    "IsometryStep",
    "OrbitError",
    "OrbitSpec",
    "SpectrumEntry",
    "TangentNormalSplit",
    "austere_check_finite",
    "corrupted_tangent_basis",
    "curvature_adapted_check",
    "curvature_vectors",
    "distance_to_orbit",
    "numeric_shape_oracle",
    "shape_spectrum",
    "spectra_agree",
    "split_tangent_normal",
    "weakly_reflective_witness",
    "ZeroBlock",
]

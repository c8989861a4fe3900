"""Maximal abelian subspaces of g^sigma, the real root decomposition and its sigma refinement.

A frame carries two bases of the same abelian subspace t: ``coord`` is the
basis the user writes w and xi in (for su(n) typically i(E_jj - E_{j+1,j+1})),
``ortho`` is a gram-orthonormal basis used for all linear algebra.  Root data
is recorded as the pairings <alpha, c_i> against the coordinate basis, so it
is metric independent and usually rational.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .automorphism import AutomorphismModel, canonical_form, cluster_sorted, fixed_algebra, orthonormal_null_space
from .exact import Angle, SigmaPFError, format_angle, snap_rational
from .lie import ad_operator

CLUSTER_TOL = 1e-8
CLUSTER_GAP = 1e-6
RANK_TOL = 1e-8
RANK_GAP = 1e-6
RESIDUAL_TOL = 1e-9


class RootError(SigmaPFError):
    pass


def _gram_schmidt(model, vectors) -> np.ndarray:
    """Gram-orthonormal rows spanning ``vectors`` (rows, model coordinates)."""
    r = model.to_orthonormal
    q, rr = np.linalg.qr((r @ np.asarray(vectors, dtype=float).T))
    if np.any(np.abs(np.diag(rr)) < 1e-10):
        raise RootError("frame vectors are linearly dependent")
    return (model.from_orthonormal @ q).T


@dataclass(frozen=True, eq=False)
class AbelianFrame:
    sigma: AutomorphismModel
    coord: np.ndarray  # (k, d) user coordinate basis
    ortho: np.ndarray  # (k, d) gram-orthonormal basis of the same span
    certificate: dict = field(default_factory=dict)

    @property
    def model(self):
        return self.sigma.model

    @property
    def rank(self) -> int:
        return self.coord.shape[0]

    @property
    def coord_gram(self) -> np.ndarray:
        return self.coord @ self.model.gram @ self.coord.T

    def element(self, coords) -> np.ndarray:
        """Model coordinates of sum_i coords_i c_i."""
        return np.asarray([float(c) for c in coords]) @ self.coord

    def dual_vector(self, pairing) -> np.ndarray:
        """The element v of t with <v, c_i> = pairing_i."""
        p = np.array([float(x) for x in pairing])
        return np.linalg.solve(self.coord_gram, p) @ self.coord


def _certificate(sigma: AutomorphismModel, rows: np.ndarray, fixed: np.ndarray) -> dict:
    model = sigma.model
    comm = 0.0
    for i in range(rows.shape[0]):
        for j in range(rows.shape[0]):
            comm = max(comm, float(np.abs(ad_operator(model, rows[i]) @ rows[j]).max()))
    r = model.to_orthonormal
    fixed_on = r @ fixed
    stacked = np.vstack([r @ ad_operator(model, t) @ fixed for t in rows]) if len(rows) else np.zeros((0, fixed.shape[1]))
    sv = np.linalg.svd(stacked, compute_uv=False) if stacked.size else np.zeros(0)
    sv = np.concatenate([sv, np.zeros(fixed.shape[1] - len(sv))])
    centralizer = int(np.sum(sv <= RANK_TOL))
    ambiguous = bool(np.any((sv > RANK_TOL) & (sv < RANK_GAP)))
    sigma_res = float(np.abs(sigma.algebra_map @ rows.T - rows.T).max()) if len(rows) else 0.0
    return {
        "rank": int(rows.shape[0]),
        "fixed_dim": int(fixed_on.shape[1]),
        "centralizer_dim": centralizer,
        "maximal": centralizer == rows.shape[0],
        "ambiguous": ambiguous,
        "commutator_residual": comm,
        "fixed_residual": sigma_res,
    }


def frame_from_basis(sigma: AutomorphismModel, vectors, require_maximal: bool = True) -> AbelianFrame:
    """Validate a user basis of t (rows in model coordinates)."""
    model = sigma.model
    rows = np.atleast_2d(np.asarray(vectors, dtype=float))
    fixed = fixed_algebra(sigma)
    cert = _certificate(sigma, rows, fixed)
    scale = max(1.0, float(np.abs(rows).max()) ** 2)
    if cert["fixed_residual"] > 1e-10 * scale ** 0.5:
        raise RootError(f"frame is not fixed by sigma (residual {cert['fixed_residual']:.3g})")
    if cert["commutator_residual"] > 1e-12 * scale:
        raise RootError(f"frame is not abelian (residual {cert['commutator_residual']:.3g})")
    if cert["ambiguous"]:
        raise RootError("ambiguous centralizer rank")
    if require_maximal and not cert["maximal"]:
        raise RootError(
            f"frame of rank {cert['rank']} is not maximal: centralizer in g^sigma has dim {cert['centralizer_dim']}"
        )
    return AbelianFrame(sigma, rows, _gram_schmidt(model, rows), cert)


def find_maximal_abelian(sigma: AutomorphismModel, seed=None, rng=None, attempts: int = 5) -> AbelianFrame:
    """Greedy extension of ``seed`` (or a random fixed vector) to a maximal abelian subspace of g^sigma."""
    model = sigma.model
    rng = np.random.default_rng(0) if rng is None else rng
    fixed = fixed_algebra(sigma)
    if fixed.shape[1] == 0:
        raise RootError("g^sigma is trivial")
    r = model.to_orthonormal
    last = None
    for _ in range(attempts):
        if seed is not None:
            s = np.asarray(seed, dtype=float)
            s = fixed @ (fixed.T @ model.gram @ s)  # project into g^sigma
            if model.norm(s) < 1e-12:
                raise RootError("seed has no component in g^sigma")
        else:
            s = fixed @ rng.standard_normal(fixed.shape[1])
        rows = [s / model.norm(s)]
        ok = True
        while True:
            stacked = np.vstack([r @ ad_operator(model, t) @ fixed for t in rows])
            _u, sv, vt = np.linalg.svd(stacked)
            sv = np.concatenate([sv, np.zeros(fixed.shape[1] - len(sv))])
            if np.any((sv > RANK_TOL) & (sv < RANK_GAP)):
                ok = False
                break
            null = vt[sv <= RANK_TOL].T
            cent = fixed @ null
            span = np.array(rows)
            # remove the current span
            coef = np.linalg.lstsq(span @ model.gram @ span.T, span @ model.gram @ cent, rcond=None)[0]
            rest = cent - span.T @ coef
            rest_on = r @ rest
            uu, ss, _ = np.linalg.svd(rest_on, full_matrices=False)
            ext = uu[:, ss > 1e-6]
            if ext.shape[1] == 0:
                break
            x = model.from_orthonormal @ (ext @ rng.standard_normal(ext.shape[1]))
            rows.append(x / model.norm(x))
        if not ok:
            last = "ambiguous centralizer rank"
            seed = None
            continue
        rows = _gram_schmidt(model, np.array(rows))
        cert = _certificate(sigma, rows, fixed)
        if cert["maximal"] and not cert["ambiguous"]:
            return AbelianFrame(sigma, rows, rows, cert)
        last = f"certificate failed: {cert}"
        seed = None
    raise RootError(f"could not certify a maximal abelian subspace: {last}")


# --- coarse decomposition ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class Root:
    pairing: tuple  # <alpha, c_i>, Fraction when snapped
    vector: np.ndarray  # model coordinates
    basis: np.ndarray  # (d, m) gram-orthonormal columns spanning g_alpha
    complex_structure: np.ndarray  # J = ad(alpha)/|alpha|^2 on g_alpha, in basis coordinates

    @property
    def mult(self) -> int:
        return self.basis.shape[1]

    @property
    def exact(self) -> bool:
        return all(isinstance(p, Fraction) for p in self.pairing)

    def pair(self, coords):
        """<alpha, sum_i coords_i c_i>; exact when both sides are rational."""
        if self.exact and all(isinstance(c, (int, Fraction)) for c in coords):
            return sum((Fraction(c) * p for c, p in zip(coords, self.pairing)), Fraction(0))
        return float(sum(float(c) * float(p) for c, p in zip(coords, self.pairing)))

    def pair_angle(self, coords) -> Angle:
        """<alpha, w> for w with Angle coordinates."""
        total = Angle.zero
        for c, p in zip(coords, self.pairing):
            total = total + c * p if isinstance(p, Fraction) else total + Angle.rad(c.radians * float(p))
        return total


@dataclass(frozen=True, eq=False)
class CoarseRootData:
    frame: AbelianFrame
    zero_basis: np.ndarray  # (d, d0)
    roots: tuple
    eta: np.ndarray
    residual: float

    @property
    def dim_total(self) -> int:
        return self.zero_basis.shape[1] + sum(r.mult for r in self.roots)


def _ad_on(model, x) -> np.ndarray:
    r = model.to_orthonormal
    return r @ ad_operator(model, x) @ model.from_orthonormal


def _orient(pairing):
    for p in pairing:
        if abs(float(p)) > 1e-9:
            return 1 if float(p) > 0 else -1
    raise RootError("zero root")


def root_decomposition(frame: AbelianFrame, rng=None, attempts: int = 5) -> CoarseRootData:
    model = frame.model
    rng = np.random.default_rng(12345) if rng is None else rng
    ads = [_ad_on(model, c) for c in frame.coord]
    last_err = None
    for _ in range(attempts):
        coeffs = rng.uniform(0.5, 1.5, frame.rank) * rng.choice([-1, 1], frame.rank)
        eta = coeffs @ frame.ortho
        a_eta = _ad_on(model, eta)
        m = -(a_eta @ a_eta)
        m = (m + m.T) / 2
        vals, vecs = np.linalg.eigh(m)
        try:
            groups = cluster_sorted(vals, tol=CLUSTER_TOL * max(1.0, vals.max()), gap=CLUSTER_GAP)
        except SigmaPFError as exc:
            last_err = str(exc)
            continue
        zero, roots, bad = None, [], False
        residual = 0.0
        for grp in groups:
            v = vecs[:, grp]
            lam = float(np.mean(vals[grp]))
            if lam <= CLUSTER_TOL * max(1.0, vals.max()):
                zero = v
                continue
            a = math.sqrt(lam)
            pairing = []
            for ad_c in ads:
                p = float(np.trace((a_eta @ v).T @ (ad_c @ v))) / (a * v.shape[1])
                pairing.append(p)
            sign = _orient(pairing)
            pairing = [sign * p for p in pairing]
            # check ad(c)^2 = -<alpha, c>^2 on the block for every frame vector
            for ad_c, p in zip(ads, pairing):
                res = float(np.abs(ad_c @ ad_c @ v + p * p * v).max())
                residual = max(residual, res)
            if residual > RESIDUAL_TOL * max(1.0, lam):
                bad = True
                break
            pairing = tuple(snap_rational(p) for p in pairing)
            alpha = frame.dual_vector(pairing)
            a_alpha = _ad_on(model, alpha)
            n2 = float(alpha @ model.gram @ alpha)
            jmat = v.T @ a_alpha @ v / n2
            roots.append(Root(pairing, alpha, model.from_orthonormal @ v, jmat))
        if bad:
            last_err = f"ad(eta)^2 residual {residual:.3g}"
            continue
        if zero is None:
            zero = np.zeros((model.dim, 0))
        roots.sort(key=lambda rt: tuple(float(p) for p in rt.pairing))
        return CoarseRootData(frame, model.from_orthonormal @ zero, tuple(roots), eta, residual)
    raise RootError(f"root decomposition failed: {last_err}")


# --- sigma refinement --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ZeroBlock:
    angle: Angle  # in [0, pi]
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class RootBlock:
    root: Root
    angle: Angle  # arg epsilon in (-pi, pi]
    basis: np.ndarray

    @property
    def mult(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class RefinedRootData:
    coarse: CoarseRootData
    zero_blocks: tuple
    root_blocks: tuple
    sigma_residual: float

    @property
    def frame(self) -> AbelianFrame:
        return self.coarse.frame

    @property
    def roots(self) -> tuple:
        return self.coarse.roots

    @property
    def dim_total(self) -> int:
        return sum(b.dim for b in self.zero_blocks) + sum(b.mult for b in self.root_blocks)

    def blocks_of(self, root: Root) -> list:
        return [b for b in self.root_blocks if b.root is root]

    def is_reduced(self) -> bool:
        """No two positive roots are proportional (a root system with 2 alpha in it is not reduced)."""
        vecs = [np.array([float(p) for p in r.pairing]) for r in self.roots]
        for i in range(len(vecs)):
            for j in range(i + 1, len(vecs)):
                a, b = vecs[i], vecs[j]
                if abs(abs(a @ b) - np.linalg.norm(a) * np.linalg.norm(b)) <= 1e-9 * (a @ a + b @ b):
                    return False
        return True


def _joint_blocks(c: np.ndarray, t: np.ndarray) -> list[tuple[float, float, np.ndarray]]:
    """Jointly diagonalize commuting symmetric (c, t); returns (cos, sin, columns)."""
    out = []
    vals, vecs = np.linalg.eigh(c)
    for grp in cluster_sorted(vals, CLUSTER_TOL):
        q = vecs[:, grp]
        tv, tq = np.linalg.eigh(q.T @ t @ q)
        for g2 in cluster_sorted(tv, CLUSTER_TOL):
            out.append((float(np.mean(vals[grp])), float(np.mean(tv[g2])), q @ tq[:, g2]))
    return out


def refine_by_sigma(coarse: CoarseRootData) -> RefinedRootData:
    frame = coarse.frame
    model, sigma = frame.model, frame.sigma
    d_on = sigma.orthonormal_map
    r = model.to_orthonormal
    residual = 0.0

    def restrict(basis):
        nonlocal residual
        v = r @ basis
        dv = v.T @ d_on @ v
        residual = max(residual, float(np.abs(d_on @ v - v @ dv).max()) if v.size else 0.0)
        return v, dv

    zero_blocks = []
    v0, d0 = restrict(coarse.zero_basis)
    for theta, q in canonical_form(d0):
        zero_blocks.append(ZeroBlock(Angle.snap(theta), model.from_orthonormal @ (v0 @ q)))

    root_blocks = []
    for root in coarse.roots:
        v, dv = restrict(root.basis)
        j = root.complex_structure
        c = (dv + dv.T) / 2
        t = -j @ (dv - dv.T) / 2
        t = (t + t.T) / 2
        for cos_p, sin_p, q in _joint_blocks(c, t):
            phi = math.atan2(sin_p + 0.0, cos_p)
            ang = Angle.snap(phi)
            if ang.exact and ang.turns == -1:
                ang = Angle.pi(1)
            root_blocks.append(RootBlock(root, ang, model.from_orthonormal @ (v @ q)))
    if residual > RESIDUAL_TOL:
        raise RootError(f"root spaces are not sigma-invariant (residual {residual:.3g})")
    root_blocks.sort(key=lambda b: (tuple(float(p) for p in b.root.pairing), b.angle.sort_key()))
    return RefinedRootData(coarse, tuple(zero_blocks), tuple(root_blocks), residual)


def decompose(sigma: AutomorphismModel, frame: AbelianFrame | None = None, rng=None) -> RefinedRootData:
    if frame is None:
        frame = find_maximal_abelian(sigma, rng=rng)
    return refine_by_sigma(root_decomposition(frame, rng=rng))


# --- diagnostics -------------------------------------------------------------

def ad_eta_residual(data: RefinedRootData) -> float:
    """max over roots and frame vectors of |ad(eta)^2 x + <alpha, eta>^2 x|."""
    model = data.frame.model
    out = 0.0
    for root in data.roots:
        v = model.to_orthonormal @ root.basis
        for i, c in enumerate(data.frame.coord):
            a = _ad_on(model, c)
            p = float(root.pairing[i])
            out = max(out, float(np.abs(a @ a @ v + p * p * v).max()))
        for t in data.frame.ortho:
            a = _ad_on(model, t)
            p = float(root.vector @ model.gram @ t)
            out = max(out, float(np.abs(a @ a @ v + p * p * v).max()))
    zero = model.to_orthonormal @ data.coarse.zero_basis
    for t in data.frame.ortho:
        if zero.size:
            out = max(out, float(np.abs(_ad_on(model, t) @ zero).max()))
    return out


def sigma_rotation_residual(data: RefinedRootData) -> float:
    """max |sigma x - R_theta x| over all blocks, R_theta = cos + sin J on root blocks."""
    model, sigma = data.frame.model, data.frame.sigma
    r = model.to_orthonormal
    d_on = sigma.orthonormal_map
    out = 0.0
    for blk in data.root_blocks:
        v = r @ blk.basis
        a_alpha = _ad_on(model, blk.root.vector)
        n2 = float(blk.root.vector @ model.gram @ blk.root.vector)
        t = blk.angle.radians
        rot = math.cos(t) * v + math.sin(t) * (a_alpha @ v) / n2
        out = max(out, float(np.abs(d_on @ v - rot).max()))
    for blk in data.zero_blocks:
        v = r @ blk.basis
        t = blk.angle.radians
        if blk.dim == 0:
            continue
        if abs(math.sin(t)) < 1e-12:
            out = max(out, float(np.abs(d_on @ v - math.cos(t) * v).max()))
        else:
            for k in range(0, blk.dim, 2):
                x, y = v[:, k], v[:, k + 1]
                out = max(out, float(np.abs(d_on @ x - math.cos(t) * x - math.sin(t) * y).max()))
    return out


def orthogonality_residual(data: RefinedRootData) -> float:
    r = data.frame.model.to_orthonormal
    cols = [r @ b.basis for b in data.zero_blocks] + [r @ b.basis for b in data.root_blocks]
    full = np.hstack(cols)
    return float(np.abs(full.T @ full - np.eye(full.shape[1])).max())


def format_pairing(p) -> str:
    return str(p) if isinstance(p, Fraction) else repr(float(p))


def root_table_rows(data: RefinedRootData) -> list[list[str]]:
    k = data.frame.rank
    rows = []
    for blk in data.zero_blocks:
        rows.append(["zero"] + ["0"] * k + [format_angle(blk.angle), str(blk.dim)])
    for blk in data.root_blocks:
        rows.append(["root"] + [format_pairing(p) for p in blk.root.pairing]
                    + [format_angle(blk.angle), str(blk.mult)])
    return rows


def root_table_csv(data: RefinedRootData) -> str:
    k = data.frame.rank
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind"] + [f"alpha_{i}" for i in range(k)] + ["eps_angle", "multiplicity"])
    w.writerows(root_table_rows(data))
    return buf.getvalue()


__all__ = [
    "AbelianFrame",
    "CoarseRootData",
    "RefinedRootData",
    "Root",
    "RootBlock",
    "RootError",
    "ZeroBlock",
    "ad_eta_residual",
    "decompose",
    "find_maximal_abelian",
    "frame_from_basis",
    "orthogonality_residual",
    "orthonormal_null_space",
    "refine_by_sigma",
    "root_decomposition",
    "root_table_csv",
    "sigma_rotation_residual",
]

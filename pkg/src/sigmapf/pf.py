"""Symbolic principal-curvature spectra of the path-space lifts Phi^-1(N).

A spectrum in direction xi consists of the eigenvalue 0 with infinite
multiplicity, flat entries, hyperbolic families {numer / (offset + 2 m pi)}
and lattice families {numer / (2 n pi) : n != 0}.  Offsets are exact Angles in
(-pi, pi]; ``numer`` is <alpha, xi>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .exact import Angle, SigmaPFError, UndecidableError, format_angle
from .orbit import EXACT_ZERO_TOL, OrbitSpec, TangentNormalSplit, austere_check_finite, split_tangent_normal
from .roots import Root


class PFError(SigmaPFError):
    pass


INFINITE = "inf"


@dataclass(frozen=True)
class HyperbolicFamily:
    numer: object  # Fraction or float
    offset: Angle
    mult: int
    provenance: str

    def values(self, m_max: int) -> list[float]:
        return enumerate_family(self, m_max)


@dataclass(frozen=True)
class LatticeFamily:
    numer: object
    mult: int
    provenance: str

    def values(self, m_max: int) -> list[float]:
        return enumerate_family(self, m_max)


@dataclass(frozen=True)
class FlatEntry:
    value: object
    mult: int


@dataclass(frozen=True)
class PFSpectrum:
    """The zero eigenvalue always has infinite multiplicity (``zero_mult == INFINITE``)."""

    hyperbolic: tuple
    lattice: tuple
    flat: tuple
    xi: tuple
    zero_mult: str = INFINITE

    def canonical(self) -> tuple:
        """Sorted multiset form for exact comparison.

        Families with negative numerator are rewritten with positive numerator
        (x/(o + 2 m pi) = (-x)/(-o + 2 m' pi)); flat zeros merge into the
        infinite zero eigenvalue and are dropped.
        """
        hyp: dict = {}
        for f in self.hyperbolic:
            n, o = f.numer, f.offset
            if _is_zero(n):
                continue
            if float(n) < 0:
                n, o = -n, (-o).normalized()
            key = (_key_num(n), o)
            hyp[key] = hyp.get(key, 0) + f.mult
        lat: dict = {}
        for f in self.lattice:
            if _is_zero(f.numer):
                continue
            key = _key_num(abs(f.numer))
            lat[key] = lat.get(key, 0) + f.mult
        flat: dict = {}
        for e in self.flat:
            if _is_zero(e.value):
                continue
            key = _key_num(e.value)
            flat[key] = flat.get(key, 0) + e.mult
        return (
            tuple(sorted(((n, o, m) for (n, o), m in hyp.items()), key=lambda t: (_sortnum(t[0]), t[1].sort_key()))),
            tuple(sorted(lat.items(), key=lambda t: _sortnum(t[0]))),
            tuple(sorted(flat.items(), key=lambda t: _sortnum(t[0]))),
        )


def _is_zero(x) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return abs(float(x)) <= EXACT_ZERO_TOL


def _key_num(x):
    if isinstance(x, Fraction):
        return x
    return float(x)


def _sortnum(x) -> float:
    return float(x)


def _numer(root: Root, xi):
    v = root.pair(xi)
    if isinstance(v, float):
        if abs(v) <= EXACT_ZERO_TOL:
            return 0.0
        if abs(v) <= 1e-9:
            raise UndecidableError(f"<alpha, xi> = {v!r} is too close to 0 to decide")
    return v


def enumerate_family(family, m_max: int) -> list[float]:
    """Members with |m| <= m_max (hyperbolic) or 1 <= |n| <= m_max (lattice), sorted."""
    if m_max < 0:
        raise PFError("M must be non-negative")
    n = float(family.numer)
    if isinstance(family, LatticeFamily):
        vals = [n / (2 * k * math.pi) for k in range(-m_max, m_max + 1) if k != 0]
    else:
        o = family.offset.radians
        if family.offset.exact and family.offset.turns % 2 == 0:
            raise PFError("hyperbolic family with offset in 2piZ")
        vals = [n / (o + 2 * m * math.pi) for m in range(-m_max, m_max + 1)]
    return sorted(vals)


# --- curvature-adapted data ------------------------------------------------------

@dataclass(frozen=True)
class LambdaEntry:
    """A curvature vector lambda = -1/2 cot(theta/2) alpha in cot form."""

    root: Root | None
    theta: Angle | None
    mult: int

    @property
    def is_zero(self) -> bool:
        return self.root is None or (self.theta.exact and (self.theta.turns - 1) % 2 == 0)

    def key(self):
        if self.is_zero:
            return None
        return (self.root.pairing, self.theta.normalized())

    def pair(self, xi) -> float:
        if self.is_zero:
            return 0.0
        return -0.5 * self.theta.cot_half() * float(self.root.pair(xi))


@dataclass(frozen=True, eq=False)
class CurvatureAdaptedData:
    roots: tuple  # positive roots
    root_mult: dict  # pairing -> m(alpha)
    zero_dim: int
    lambda_zero: dict  # m(0, lambda) for lambda in Lambda_0 (key None is the zero vector)
    lambda_root: dict  # pairing -> {key: (LambdaEntry, m(alpha, lambda))}
    perp_root: dict  # pairing -> m(alpha, perp)
    perp_zero: int

    def validate(self) -> None:
        if sum(self.lambda_zero.values()) + self.perp_zero != self.zero_dim:
            raise PFError("multiplicities on g_0 do not add up")
        for root in self.roots:
            p = root.pairing
            tot = sum(m for _e, m in self.lambda_root.get(p, {}).values()) + self.perp_root.get(p, 0)
            if tot != self.root_mult[p]:
                raise PFError(f"multiplicities on g_alpha do not add up for {p}")

    def delta_xi(self, xi) -> list:
        return [r for r in self.roots if _is_zero(_numer(r, xi))]


def curvature_adapted_data(split: TangentNormalSplit) -> CurvatureAdaptedData:
    """Populate the curvature-adapted data of N at a from the orbit's exact spectrum."""
    data = split.spec.data
    roots = data.roots
    root_mult = {r.pairing: r.mult for r in roots}
    zero_dim = sum(b.dim for b in data.zero_blocks)
    lambda_zero = {}
    t0 = sum(b.dim for b in split.tangent_zero)
    if t0:
        lambda_zero[None] = t0
    perp_zero = sum(b.dim for b in split.normal_zero)
    lambda_root: dict = {}
    for blk, th in split.tangent_roots:
        ent = LambdaEntry(blk.root, th, blk.mult)
        bucket = lambda_root.setdefault(blk.root.pairing, {})
        k = ent.key()
        if k in bucket:
            old, m = bucket[k]
            bucket[k] = (old, m + blk.mult)
        else:
            bucket[k] = (ent, blk.mult)
    perp_root: dict = {}
    for blk, _th in split.normal_roots:
        perp_root[blk.root.pairing] = perp_root.get(blk.root.pairing, 0) + blk.mult
    out = CurvatureAdaptedData(tuple(roots), root_mult, zero_dim, lambda_zero, lambda_root, perp_root, perp_zero)
    out.validate()
    return out


def _arctan_offset(entry: LambdaEntry) -> Angle:
    """2 arctan(<alpha, xi> / (2 <lambda, xi>)) exactly, with the value pi when <lambda, xi> = 0.

    For lambda = -1/2 cot(theta/2) alpha the ratio is -tan(theta/2), whose
    principal arctan is -theta/2 reduced into (-pi/2, pi/2).
    """
    if entry.is_zero:
        return Angle.pi(1)
    half = (-entry.theta / 2)
    if half.exact:
        q = half.turns % 1  # reduce modulo pi into [0, 1)
        if q >= Fraction(1, 2):
            q -= 1
        return Angle.pi(2 * q)
    return Angle.rad(2 * math.atan(-math.tan(entry.theta.radians / 2)))


def pf_spectrum_general(data: CurvatureAdaptedData, xi) -> PFSpectrum:
    xi = tuple(xi)
    dxi = {r.pairing for r in data.delta_xi(xi)}
    flat = []
    zero_mult = sum(m for k, m in data.lambda_zero.items())
    if zero_mult:
        flat.append(FlatEntry(0, zero_mult))
    hyp, lat = [], []
    for root in data.roots:
        p = root.pairing
        bucket = data.lambda_root.get(p, {})
        if p in dxi:
            for ent, m in bucket.values():
                flat.append(FlatEntry(ent.pair(xi), m))
            continue
        numer = _numer(root, xi)
        for ent, m in bucket.values():
            hyp.append(HyperbolicFamily(numer, _arctan_offset(ent).normalized(), m,
                                        f"lambda on root {_fmt_pairing(p)}"))
        if data.perp_root.get(p, 0):
            lat.append(LatticeFamily(numer, data.perp_root[p], f"root {_fmt_pairing(p)} normal part"))
    return PFSpectrum(tuple(hyp), tuple(lat), tuple(flat), xi)


def pf_spectrum_sigma(split: TangentNormalSplit, xi) -> PFSpectrum:
    xi = tuple(xi)
    hyp, lat = [], []
    flat = []
    t0 = sum(b.dim for b in split.tangent_zero)
    if t0:
        flat.append(FlatEntry(0, t0))
    perp: dict = {}
    for blk, _th in split.normal_roots:
        perp.setdefault(blk.root.pairing, [blk.root, 0])
        perp[blk.root.pairing][1] += blk.mult
    for blk, th in split.tangent_roots:
        numer = _numer(blk.root, xi)
        if _is_zero(numer):
            flat.append(FlatEntry(0, blk.mult))
            continue
        hyp.append(HyperbolicFamily(numer, (-th).normalized(), blk.mult,
                                    f"root {_fmt_pairing(blk.root.pairing)}, eps {format_angle(blk.angle)}"))
    if not split.principal:
        for p, (root, m) in perp.items():
            numer = _numer(root, xi)
            if _is_zero(numer):
                continue
            lat.append(LatticeFamily(numer, m, f"root {_fmt_pairing(p)} normal part"))
    return PFSpectrum(tuple(hyp), tuple(lat), tuple(flat), xi)


def _fmt_pairing(p) -> str:
    return "(" + ", ".join(str(x) if isinstance(x, Fraction) else f"{float(x):.12g}" for x in p) + ")"


def describe_canonical(canon) -> dict:
    hyp, lat, flat = canon
    return {
        "hyperbolic": [{"numer": _num_str(n), "offset": format_angle(o), "mult": m} for n, o, m in hyp],
        "lattice": [{"numer": _num_str(n), "mult": m} for n, m in lat],
        "flat": [{"value": _num_str(v), "mult": m} for v, m in flat],
    }


def _num_str(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(float(x))


def consistency_check(split: TangentNormalSplit, xi) -> dict:
    """Compare the sigma-route and general-route spectra family by family, exactly."""
    a = pf_spectrum_sigma(split, xi).canonical()
    data = curvature_adapted_data(split)
    b = pf_spectrum_general(data, xi).canonical()
    ok = a == b
    report = {"pass": bool(ok), "sigma_route": describe_canonical(a), "general_route": describe_canonical(b)}
    if not ok:
        report["mismatch"] = _first_mismatch(a, b)
    return report


def _first_mismatch(a, b):
    for name, x, y in zip(("hyperbolic", "lattice", "flat"), a, b):
        sx, sy = set(x), set(y)
        diff = sorted(sx ^ sy, key=repr)
        if diff:
            return {"kind": name, "families": [repr(d) for d in diff[:4]]}
    return None


# --- austere (PF) ---------------------------------------------------------------------

def _line_data(roots):
    """Group exact roots by line; returns pairing -> (line key, integer K relative to the line unit)."""
    lines: dict = {}
    for r in roots:
        p = [Fraction(x) for x in r.pairing]
        lead = next(x for x in p if x != 0)
        key = tuple(x / lead for x in p)
        lines.setdefault(key, []).append((r.pairing, lead))
    out = {}
    for key, members in lines.items():
        unit = _fraction_gcd([lead for _p, lead in members])
        for p, lead in members:
            out[p] = (key, int(lead / unit))
    return out


def _fraction_gcd(values) -> Fraction:
    num, den = 0, 1
    for v in values:
        v = abs(Fraction(v))
        den = math.lcm(den, v.denominator)
    for v in values:
        num = math.gcd(num, int(abs(Fraction(v)) * den))
    return Fraction(num, den)


def pf_symmetry_certificate(split: TangentNormalSplit):
    """Multiset of (line, theta' mod 2pi, mult) over tangent blocks, theta' relative to the line unit.

    The family K <u, xi> / (-theta + 2 m pi) is the union over j < K of
    <u, xi> / (-(theta - 2 pi j)/K + 2 m pi), so every hyperbolic family is
    rewritten against the primitive unit u of its line before testing the
    theta' -> -theta' symmetry.
    """
    lines = _line_data([blk.root for blk, _ in split.tangent_roots])
    cert: dict = {}
    for blk, th in split.tangent_roots:
        if not (blk.root.exact and th.exact):
            raise UndecidableError("inexact root pairing or angle")
        key, k = lines[blk.root.pairing]
        for j in range(k):
            t = Fraction((th.turns - 2 * j) / k) % 2
            cert[(key, t)] = cert.get((key, t), 0) + blk.mult
    return cert


def negate_certificate(cert: dict) -> dict:
    return {(key, (-t) % 2): m for (key, t), m in cert.items()}


def austere_check_pf(split: TangentNormalSplit, simply_connected: bool | None = None) -> dict:
    spec = split.spec
    data = spec.data
    try:
        cert = pf_symmetry_certificate(split)
    except UndecidableError as exc:
        return {"verdict": "undecidable", "austere": None, "reason": str(exc)}
    neg = negate_certificate(cert)
    austere = cert == neg
    per_root = _per_root_symmetric(split)
    unmatched = None
    if not austere:
        for (key, t), m in sorted(cert.items(), key=lambda kv: (repr(kv[0][0]), kv[0][1])):
            if neg.get((key, t), 0) != m:
                unmatched = {"line": [str(x) for x in key], "theta": format_angle(Angle.pi(t)), "mult": m}
                break
    finite = austere_check_finite(split)
    reduced = data.is_reduced()
    sc = spec.model.simply_connected if simply_connected is None else simply_connected
    order = spec.sigma.declared_order
    labels = []
    if reduced:
        labels.append("reduced root system: (A) <=> (B)")
    if order is not None and order <= 2:
        labels.append("sigma of order <= 2: (A) => (B)")
    if sc:
        labels.append("simply connected G: (A) => (B) via sigma = Ad(b) o tau reduction")
    agree = None if finite["austere"] is None else finite["austere"] == austere
    implied = finite["austere"] is True and (reduced or (order is not None and order <= 2) or sc)
    report = {
        "verdict": "austere" if austere else "not austere",
        "austere": bool(austere),
        "per_root_symmetric": per_root,
        "certificate": [
            {"line": [str(x) for x in key], "theta": format_angle(Angle.pi(t)), "mult": m}
            for (key, t), m in sorted(cert.items(), key=lambda kv: (repr(kv[0][0]), kv[0][1]))
        ],
        "finite_verdict": finite["verdict"],
        "labels": labels,
        "reduced": reduced,
        "agrees_with_finite": agree,
    }
    if unmatched:
        report["unmatched"] = unmatched
    if reduced and agree is False:
        report["label_violation"] = "reduced root system but verdicts differ"
    if implied and not austere:
        report["label_violation"] = "finite austere with an applicable transfer, but PF check is not austere"
    return report


def _per_root_symmetric(split: TangentNormalSplit) -> bool | None:
    """The stricter per-root test: {(alpha, theta mod 2pi)} symmetric under theta -> -theta."""
    ms: dict = {}
    for blk, th in split.tangent_roots:
        if not th.exact:
            return None
        k = (blk.root.pairing, th.turns % 2)
        ms[k] = ms.get(k, 0) + blk.mult
    return all(ms.get((p, (-t) % 2), 0) == m for (p, t), m in ms.items())


def spectrum_for(spec: OrbitSpec, xi) -> PFSpectrum:
    return pf_spectrum_sigma(split_tangent_normal(spec), xi)


__all__ = [
    "CurvatureAdaptedData",
    "FlatEntry",
    "HyperbolicFamily",
    "INFINITE",
    "LatticeFamily",
    "PFSpectrum",
    "austere_check_pf",
    "consistency_check",
    "curvature_adapted_data",
    "enumerate_family",
    "negate_certificate",
    "pf_spectrum_general",
    "pf_spectrum_sigma",
    "pf_symmetry_certificate",
]

"""Scenario configs: a JSON document describing (G, sigma, t, w, xi) and the operations to run.

Schema (all keys except ``group`` optional)::

    {
      "name": "su2_identity_equator",
      "group": {"family": "su", "n": 2}                 # or {"product": [...]}
      "automorphism": {"inner": <matrix>|null, "outer": "complex_conjugation"|"dynkin_flip"|null,
                       "declared_order": 2},
      "frame": "cartan" | "random" | [<algebra matrix>, ...],
      "w": ["pi/2"],                                     # exact multiples of pi over the frame
      "xi": [["1"], ["1/2"]],                            # normal directions over the frame
      "operations": ["decompose", "orbit-spectrum", ...],
      "weakly_reflective": [{"xi": ["1"], "steps": [{"inverse": true}, {"left": "a"}]}],
      "expect": {"austere_finite": true, "austere_pf": true, "weakly_reflective": [true]},
      "grid": 256, "enumerate": 2, "seed": 0
    }

Group matrices: ``"e"``, ``"a"`` (= exp w), ``{"diag": [...]}`` with complex
entries such as ``"i"`` or ``"-1"``, ``{"diag_phase": ["1/3", ...]}`` for
diag(exp(i pi q_j)), or ``{"real": rows, "imag": rows}``.  Algebra matrices:
``{"idiag": [1, -1]}`` for i diag(...), ``{"real": rows, "imag": rows}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .automorphism import AutomorphismModel, automorphism
from .exact import SigmaPFError, parse_angle, parse_scalar
from .lie import LieAlgebraModel, ModelError, model_from_descriptor

OPERATIONS = (
    "decompose",
    "orbit-spectrum",
    "pf-spectrum",
    "check-austere",
    "check-weakly-reflective",
    "verify-pathspace",
)


class ConfigError(SigmaPFError):
    pass


def _complex_entry(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    s = str(x).strip().replace(" ", "")
    if s in ("i", "+i"):
        return 1j
    if s == "-i":
        return -1j
    if "/" in s and "i" not in s:
        return complex(float(Fraction(s)))
    try:
        return complex(s.replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"bad matrix entry {x!r}") from exc


def _real_rows(rows) -> np.ndarray:
    out = []
    for row in rows:
        out.append([float(parse_scalar(v)) for v in row])
    return np.array(out, dtype=float)


def parse_group_matrix(spec, size: int, a: np.ndarray | None = None) -> np.ndarray:
    if spec is None or spec == "none":
        return None
    if spec == "e":
        return np.eye(size, dtype=complex)
    if spec == "a":
        if a is None:
            raise ConfigError("matrix 'a' needs w")
        return a
    if isinstance(spec, dict):
        if "diag" in spec:
            m = np.diag([_complex_entry(v) for v in spec["diag"]])
        elif "diag_phase" in spec:
            m = np.diag([np.exp(1j * np.pi * float(Fraction(str(q)))) for q in spec["diag_phase"]])
        elif "real" in spec:
            m = _real_rows(spec["real"]) + 1j * (_real_rows(spec["imag"]) if "imag" in spec else 0)
        else:
            raise ConfigError(f"bad matrix spec {spec!r}")
        if m.shape != (size, size):
            raise ConfigError(f"matrix spec has shape {m.shape}, expected {(size, size)}")
        return m.astype(complex)
    raise ConfigError(f"bad matrix spec {spec!r}")


def parse_algebra_matrix(spec, model: LieAlgebraModel) -> np.ndarray:
    n = model.matrix_size
    if isinstance(spec, dict) and "idiag" in spec:
        vals = [float(parse_scalar(v)) for v in spec["idiag"]]
        if len(vals) != n:
            raise ConfigError(f"idiag needs {n} entries")
        m = 1j * np.diag(vals)
    elif isinstance(spec, dict) and "real" in spec:
        m = _real_rows(spec["real"]) + 1j * (_real_rows(spec["imag"]) if "imag" in spec else 0)
    else:
        raise ConfigError(f"bad algebra element spec {spec!r}")
    if m.shape != (n, n):
        raise ConfigError(f"algebra element has shape {m.shape}, expected {(n, n)}")
    x = model.coords(m)
    if np.linalg.norm(model.matrix(x) - m) > 1e-10:
        raise ConfigError("matrix is not in the Lie algebra")
    return x


def cartan_frame(model: LieAlgebraModel) -> np.ndarray:
    """Standard maximal torus basis in each simple factor."""
    rows = []
    size = model.matrix_size
    for _s, _e, r0, r1, tag, _c in model.factors:
        fam = tag.split("(")[0]
        k = r1 - r0
        if fam == "su":
            for j in range(k - 1):
                m = np.zeros((size, size), complex)
                m[r0 + j, r0 + j], m[r0 + j + 1, r0 + j + 1] = 1j, -1j
                rows.append(m)
        elif fam == "sp":
            half = k // 2
            for j in range(half):
                m = np.zeros((size, size), complex)
                m[r0 + j, r0 + j], m[r0 + half + j, r0 + half + j] = 1j, -1j
                rows.append(m)
        elif fam == "so":
            for j in range(k // 2):
                m = np.zeros((size, size), complex)
                m[r0 + 2 * j, r0 + 2 * j + 1], m[r0 + 2 * j + 1, r0 + 2 * j] = 1, -1
                rows.append(m)
        else:
            raise ConfigError(f"no Cartan frame for {tag}")
    return np.array([model.coords(m) for m in rows])


@dataclass
class Scenario:
    name: str
    model: LieAlgebraModel
    sigma: AutomorphismModel
    frame_spec: object
    w: tuple
    xis: list
    operations: list
    weakly_reflective: list = field(default_factory=list)
    expect: dict = field(default_factory=dict)
    grid: int = 256
    enumerate: int = 2
    seed: int = 0
    oracle: bool = True
    raw: dict = field(default_factory=dict)
    description: str = ""


def _parse_sigma(desc, model: LieAlgebraModel) -> AutomorphismModel:
    if desc is None:
        desc = {}
    if not isinstance(desc, dict):
        raise ConfigError("automorphism must be an object")
    inner = parse_group_matrix(desc.get("inner"), model.matrix_size)
    outer = desc.get("outer")
    if outer == "none":
        outer = None
    order = desc.get("declared_order")
    if order is not None and order != "unverified":
        order = int(order)
    else:
        order = None
    if inner is None and outer is None and order is None:
        order = 1
    try:
        return automorphism(model, inner=inner, outer=outer, declared_order=order)
    except SigmaPFError as exc:
        raise ConfigError(f"invalid automorphism: {exc}") from exc


def parse_scenario(raw: dict, name: str | None = None) -> Scenario:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    try:
        model = model_from_descriptor(raw["group"])
    except KeyError as exc:
        raise ConfigError("config needs a 'group'") from exc
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc
    sigma = _parse_sigma(raw.get("automorphism"), model)
    frame_spec = raw.get("frame", "cartan" if sigma.declared_order == 1 else "random")
    w = tuple(parse_angle(c) for c in raw.get("w", []))
    xis = [tuple(parse_scalar(c) for c in xi) for xi in raw.get("xi", [])]
    ops = raw.get("operations", list(OPERATIONS))
    bad = [op for op in ops if op not in OPERATIONS]
    if bad:
        raise ConfigError(f"unknown operations {bad}")
    return Scenario(
        name=raw.get("name", name or "scenario"),
        model=model,
        sigma=sigma,
        frame_spec=frame_spec,
        w=w,
        xis=xis,
        operations=list(ops),
        weakly_reflective=list(raw.get("weakly_reflective", [])),
        expect=dict(raw.get("expect", {})),
        grid=int(raw.get("grid", 256)),
        enumerate=int(raw.get("enumerate", 2)),
        seed=int(raw.get("seed", 0)),
        oracle=bool(raw.get("oracle", True)),
        raw=raw,
        description=str(raw.get("description", "")),
    )


def load_config(path) -> Scenario:
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: invalid JSON ({exc})") from exc
    try:
        return parse_scenario(raw, name=p.stem)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{p}: {exc}") from exc


def bundled_scenario_paths() -> list[Path]:
    from importlib import resources

    root = resources.files("sigmapf") / "scenarios"
    return sorted((Path(str(p)) for p in root.iterdir() if p.name.endswith(".json")), key=lambda p: p.name)


def bundled_scenario(name: str) -> Scenario:
    for p in bundled_scenario_paths():
        if p.stem == name:
            return load_config(p)
    raise ConfigError(f"no bundled scenario {name!r}")


def build_frame(sc: Scenario, rng):
    from .roots import find_maximal_abelian, frame_from_basis

    spec = sc.frame_spec
    if spec == "random":
        return find_maximal_abelian(sc.sigma, rng=rng)
    if spec == "cartan":
        return frame_from_basis(sc.sigma, cartan_frame(sc.model))
    if isinstance(spec, list):
        return frame_from_basis(sc.sigma, [parse_algebra_matrix(m, sc.model) for m in spec])
    raise ConfigError(f"bad frame spec {spec!r}")


def isometry_steps(steps, sc: Scenario, a: np.ndarray):
    from .orbit import IsometryStep

    out = []
    for st in steps:
        if not isinstance(st, dict) or len(st) != 1:
            raise ConfigError(f"bad isometry step {st!r}")
        (kind, val), = st.items()
        if kind in ("left", "right"):
            out.append(IsometryStep(kind, parse_group_matrix(val, sc.model.matrix_size, a)))
        elif kind == "inverse":
            out.append(IsometryStep("inverse"))
        elif kind == "automorphism":
            out.append(IsometryStep("automorphism", sigma=sc.sigma if val == "sigma" else _parse_sigma(val, sc.model)))
        else:
            raise ConfigError(f"unknown isometry step {kind!r}")
    return out


__all__ = [
    "ConfigError",
    "OPERATIONS",
    "Scenario",
    "build_frame",
    "bundled_scenario",
    "bundled_scenario_paths",
    "cartan_frame",
    "load_config",
    "parse_scenario",
]

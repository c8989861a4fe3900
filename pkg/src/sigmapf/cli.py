"""Command-line front end: run scenario configs and write CSV/JSON artifacts.

Exit codes: 0 all requested checks pass, 1 a check failed, 2 config error,
3 a verdict was undecidable on inexact input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .automorphism import eigen_angles, fixed_algebra
from .exact import SigmaPFError, UndecidableError, format_angle
from .orbit import (
    OrbitSpec,
    austere_check_finite,
    curvature_adapted_check,
    curvature_vectors,
    describe_curvature_vector,
    numeric_shape_oracle,
    shape_spectrum,
    spectra_agree,
    split_tangent_normal,
    weakly_reflective_witness,
)
from .paths import verify_path_diagrams
from .pf import austere_check_pf, consistency_check, pf_spectrum_sigma
from .report import emit_spectrum_table, num_str, pf_spectrum_record, write_csv, write_json
from .roots import (
    RootError,
    ad_eta_residual,
    orthogonality_residual,
    refine_by_sigma,
    root_decomposition,
    root_table_csv,
    sigma_rotation_residual,
)
from .scenario import (
    OPERATIONS,
    ConfigError,
    Scenario,
    build_frame,
    bundled_scenario_paths,
    isometry_steps,
    load_config,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_UNDECIDABLE = 0, 1, 2, 3


class Run:
    def __init__(self, sc: Scenario, out: Path):
        self.sc = sc
        self.out = out
        self.checks: list[dict] = []

    def check(self, name: str, ok, detail=None):
        status = "undecidable" if ok is None else ("pass" if ok else "fail")
        self.checks.append({"name": name, "status": status, "detail": detail})
        return ok

    def exit_code(self) -> int:
        st = {c["status"] for c in self.checks}
        if "fail" in st:
            return EXIT_FAIL
        if "undecidable" in st:
            return EXIT_UNDECIDABLE
        return EXIT_OK


def _decompose(run: Run, rng):
    sc = run.sc
    try:
        frame = build_frame(sc, rng)
    except RootError as exc:
        if isinstance(sc.frame_spec, list) or sc.frame_spec == "cartan":
            raise ConfigError(f"frame rejected: {exc}") from exc
        raise
    coarse = root_decomposition(frame, rng=rng)
    return refine_by_sigma(coarse)


def _write_decomposition(run: Run, data):
    sc = run.sc
    (run.out / "roots.csv").write_text(root_table_csv(data))
    d = sc.model.dim
    total = data.dim_total
    res_ad = ad_eta_residual(data)
    res_rot = sigma_rotation_residual(data)
    res_orth = orthogonality_residual(data)
    run.check("decomposition completeness", total == d, {"sum": total, "dim": d})
    run.check("ad(eta)^2 residual <= 1e-9", res_ad <= 1e-9, res_ad)
    run.check("sigma block rotation residual <= 1e-9", res_rot <= 1e-9, res_rot)
    run.check("block orthogonality <= 1e-9", res_orth <= 1e-9, res_orth)
    eig = eigen_angles(sc.sigma)
    write_json(run.out / "decomposition.json", {
        "group": sc.model.family,
        "dim": d,
        "metric_scale": [num_str(c) for c in sc.model.metric_scale],
        "sigma": sc.sigma.describe(),
        "sigma_eigen_angles": [{"angle": format_angle(b.angle), "dim": b.dim} for b in eig.blocks],
        "fixed_dim": int(fixed_algebra(sc.sigma).shape[1]),
        "frame_certificate": data.frame.certificate,
        "rank": data.frame.rank,
        "reduced": data.is_reduced(),
        "zero_blocks": [{"eps_angle": format_angle(b.angle), "dim": b.dim} for b in data.zero_blocks],
        "root_blocks": [
            {"alpha": [num_str(p) for p in b.root.pairing], "eps_angle": format_angle(b.angle), "mult": b.mult}
            for b in data.root_blocks
        ],
        "residuals": {"ad_eta": res_ad, "sigma_rotation": res_rot, "orthogonality": res_orth},
    })


def _orbit_spectrum(run: Run, split):
    sc = run.sc
    rows, oracle = [], []
    for i, xi in enumerate(sc.xis):
        spec = shape_spectrum(split, xi)
        for e in spec.entries:
            rows.append([
                str(i),
                "0" if e.root is None else " ".join(num_str(p) for p in e.root),
                format_angle(e.eps_angle),
                "" if e.theta is None else format_angle(e.theta),
                num_str(e.eigenvalue),
                str(e.mult),
                "zero block" if e.root is None else "root block",
            ])
        if sc.oracle and split.dim > 0:
            num = numeric_shape_oracle(split.spec, xi)
            ok = spectra_agree(spec.multiset(), num, 1e-5)
            run.check(f"oracle agreement xi[{i}]", ok)
            oracle.append({"xi": [num_str(x) for x in xi], "exact": spec.multiset(), "numeric": num, "agree": ok})
    write_csv(run.out / "orbit_spectrum.csv",
              ["xi_index", "alpha", "eps_angle", "theta", "eigenvalue", "multiplicity", "provenance"], rows)
    ca = curvature_adapted_check(split)
    run.check("curvature adapted", ca["pass"], ca)
    run.check("tangent span residual <= 1e-8", split.span_residual <= 1e-8, split.span_residual)
    write_json(run.out / "orbit.json", {
        "w": [format_angle(c) for c in sc.w],
        "dim": split.dim,
        "codim": split.codim,
        "principal": split.principal,
        "span_residual": split.span_residual,
        "curvature_vectors": [dict(describe_curvature_vector(cv), mult=cv.mult) for cv in curvature_vectors(split)],
        "curvature_adapted": ca,
        "oracle": oracle,
    })


def _pf_spectrum(run: Run, split):
    sc = run.sc
    records = []
    for i, xi in enumerate(sc.xis):
        spec = pf_spectrum_sigma(split, xi)
        cons = consistency_check(split, xi)
        run.check(f"formula-route consistency xi[{i}]", cons["pass"], cons.get("mismatch"))
        emit_spectrum_table(spec, sc.enumerate, run.out / f"pf_spectrum_xi{i}.csv")
        records.append({"spectrum": pf_spectrum_record(spec, sc.enumerate), "consistency": cons})
    write_json(run.out / "pf_spectrum.json", {"principal": split.principal, "directions": records})


def _austere(run: Run, split):
    sc = run.sc
    fin = austere_check_finite(split)
    pf = austere_check_pf(split)
    write_json(run.out / "austere.json", {"finite": fin, "pf": pf})
    if fin["verdict"] == "undecidable" or pf["verdict"] == "undecidable":
        run.check("austere verdicts decidable", None, {"finite": fin["verdict"], "pf": pf["verdict"]})
        return
    run.check("austere labels consistent", "label_violation" not in pf, pf.get("label_violation"))
    if "austere_finite" in sc.expect:
        run.check("expected finite austere verdict", fin["austere"] == sc.expect["austere_finite"], fin["verdict"])
    if "austere_pf" in sc.expect:
        run.check("expected PF austere verdict", pf["austere"] == sc.expect["austere_pf"], pf["verdict"])


def _weakly_reflective(run: Run, spec: OrbitSpec):
    sc = run.sc
    out = []
    expected = sc.expect.get("weakly_reflective")
    for i, cand in enumerate(sc.weakly_reflective):
        try:
            steps = isometry_steps(cand.get("steps", []), sc, spec.a)
            xi = tuple(_parse_xi(cand.get("xi", sc.xis[0] if sc.xis else [])))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad weakly reflective candidate {cand!r}") from exc
        rep = weakly_reflective_witness(spec, xi, steps, rng=np.random.default_rng(sc.seed + 1000 + i))
        rep["xi"] = [num_str(x) for x in xi]
        rep["steps"] = cand.get("steps", [])
        out.append(rep)
        if expected is not None and i < len(expected):
            run.check(f"weakly reflective candidate {i} as expected", rep["pass"] == expected[i],
                      rep["label"])
    write_json(run.out / "weakly_reflective.json", {"candidates": out})


def _parse_xi(xi):
    from .exact import parse_scalar

    return [x if not isinstance(x, str) else parse_scalar(x) for x in xi]


def _pathspace(run: Run, grid: int):
    sc = run.sc
    if grid % 4:
        raise ConfigError("--grid must be divisible by 4")
    grids = (grid // 4, grid // 2, grid)
    rep = verify_path_diagrams(sc.model, grids=grids, seed=sc.seed)
    run.check("path-space diagrams", rep["pass"], rep["slopes"])
    write_json(run.out / "pathspace.json", rep)


def run_scenario(sc: Scenario, out: Path, ops=None, grid: int | None = None, m_enum: int | None = None,
                 seed: int | None = None, quiet: bool = False) -> int:
    if seed is not None:
        sc.seed = seed
    if m_enum is not None:
        sc.enumerate = m_enum
    grid = sc.grid if grid is None else grid
    ops = list(sc.operations) if ops is None else list(ops)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    run = Run(sc, out)
    rng = np.random.default_rng(sc.seed)
    try:
        data = _decompose(run, rng)
        if "decompose" in ops:
            _write_decomposition(run, data)
        orbit_ops = {"orbit-spectrum", "pf-spectrum", "check-austere", "check-weakly-reflective"}
        if orbit_ops & set(ops):
            if not sc.w:
                raise ConfigError("orbit operations need w")
            rank = data.frame.rank
            if len(sc.w) != rank or any(len(xi) != rank for xi in sc.xis):
                raise ConfigError(f"w and every xi need {rank} coordinates over the frame")
            spec = OrbitSpec(data, sc.w)
            split = None
            try:
                split = split_tangent_normal(spec)
            except UndecidableError as exc:
                run.check("tangent/normal split decidable", None, str(exc))
            if split is not None:
                if "orbit-spectrum" in ops:
                    _orbit_spectrum(run, split)
                if "pf-spectrum" in ops:
                    try:
                        _pf_spectrum(run, split)
                    except UndecidableError as exc:
                        run.check("PF spectrum decidable", None, str(exc))
                if "check-austere" in ops:
                    _austere(run, split)
            if "check-weakly-reflective" in ops:
                _weakly_reflective(run, spec)
        if "verify-pathspace" in ops:
            _pathspace(run, grid)
    except ConfigError:
        raise
    except UndecidableError as exc:
        run.check("decidable", None, str(exc))
    code = run.exit_code()
    write_json(out / "summary.json", {
        "scenario": sc.name,
        "operations": ops,
        "seed": sc.seed,
        "checks": run.checks,
        "exit_code": code,
    })
    if not quiet:
        for c in run.checks:
            print(f"[{sc.name}] {c['status'].upper():11s} {c['name']}")
    return code


def _combine(codes) -> int:
    codes = set(codes)
    for c in (EXIT_CONFIG, EXIT_FAIL, EXIT_UNDECIDABLE):
        if c in codes:
            return c
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sigmapf", description="Principal curvature spectra of sigma-action orbits.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in OPERATIONS + ("run-all",):
        s = sub.add_parser(name)
        s.add_argument("--config", required=name != "run-all", help="scenario JSON file")
        s.add_argument("--out", default="out", help="output root; artifacts go to OUT/<scenario name>")
        s.add_argument("--grid", type=int, default=None, help="finest path grid N (divisible by 4)")
        s.add_argument("--enumerate", type=int, default=None, dest="enumerate_m", help="family members |m| <= M")
        s.add_argument("--seed", type=int, default=None)
    sub.add_parser("list", help="list bundled scenarios")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list":
        for path in bundled_scenario_paths():
            print(path.stem)
        return EXIT_OK
    try:
        if args.command == "run-all" and args.config is None:
            scenarios = [load_config(p) for p in bundled_scenario_paths()]
        else:
            scenarios = [load_config(args.config)]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    ops = None if args.command == "run-all" else [args.command]
    codes = []
    for sc in scenarios:
        try:
            codes.append(run_scenario(sc, Path(args.out) / sc.name, ops=ops, grid=args.grid,
                                      m_enum=args.enumerate_m, seed=args.seed))
        except ConfigError as exc:
            print(f"[{sc.name}] config error: {exc}", file=sys.stderr)
            codes.append(EXIT_CONFIG)
        except SigmaPFError as exc:
            print(f"[{sc.name}] check failed: {exc}", file=sys.stderr)
            codes.append(EXIT_FAIL)
    return _combine(codes)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: ``design``, ``simulate``, ``sweep``, ``gram``.

Exit codes: 0 success, 2 configuration error, 3 infeasible design,
4 numeric fault.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import config as cfgmod
from .diagnostics import certificate_check, fit_decay, floor_norm
from .errors import ConfigError, HeatStabError, NoFitError
from .gram import gram_matrix, spectral_constant
from .simulator import build_plant, reconstruct_field, run
from .spectral import DomainSpec, enumerate_modes, select_N

MAX_SWEEP_CELLS = 10_000
FIELD_GRID = {1: 201, 2: 41, 3: 17}


def atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def design_report(rc: cfgmod.RunConfig) -> dict:
    plant = build_plant(rc.sim)
    p = plant.params
    rep = {"M": plant.modes.M, **p.report(), "dt": plant.dt, "t_end": plant.t_end}
    notes = []
    if p.shifted:
        notes.append(
            f"unstable potential: smallest effective eigenvalue {p.tau1_eff:.6g}; "
            "shifted gains gamma = (lambda - tau1)/C, mu = gamma**2/lambda**2"
        )
    if plant.modes.effective[p.N - 1] > p.lam:
        notes.append("no eigenvalue below lambda; N floored at 1")
    rep["notes"] = notes
    return rep


def field_csv(y, plant) -> str:
    dom = plant.cfg.domain
    axes, vals = reconstruct_field(y, plant.modes, dom, [FIELD_GRID[dom.dim]] * dom.dim)
    mesh = np.meshgrid(*axes, indexing="ij")
    names = ["x", "y", "z"][: dom.dim]
    lines = [",".join(names + ["value"])]
    for row in zip(*(m.ravel() for m in mesh), vals.ravel()):
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def simulate(rc: cfgmod.RunConfig) -> tuple[dict, dict]:
    """Run and post-process in memory; returns (manifest, files-to-write)."""
    start = time.perf_counter()
    traj = run(rc.sim)
    plant = traj.plant
    p = plant.params
    tol = 0.05 * p.lam if rc.certificate_tol is None else rc.certificate_tol
    try:
        decay = fit_decay(traj, p).to_dict()
        fit_error = None
    except NoFitError as exc:
        decay = None
        fit_error = str(exc)
    passed, margin = certificate_check(traj, p, tol)
    files = {
        "trajectory.csv": traj.to_csv(),
        "field_final.csv": field_csv(traj.states[-1], plant),
    }
    manifest = {
        "tool": "heatstab",
        "version": __version__,
        "config": cfgmod.to_dict(rc),
        "design": design_report(rc),
        "decay": decay,
        "fit_error": fit_error,
        "floor_norm": floor_norm(traj, p),
        "certificate": {"passed": bool(passed), "margin": margin, "tol": tol},
        "files": sorted(files),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "wall_clock_s": time.perf_counter() - start,
    }
    return manifest, files


def write_outputs(out: Path, manifest: dict, files: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        atomic_write(out / name, text)
    atomic_write(out / "manifest.json", json.dumps(manifest, indent=2, allow_nan=True) + "\n")


def _cell_config(rc: cfgmod.RunConfig, values: dict) -> cfgmod.RunConfig:
    sim = rc.sim
    if "lambda" in values:
        sim = replace(sim, lam=values["lambda"])
    if "sigma" in values:
        sim = replace(sim, sigma=values["sigma"])
    if "D" in values:
        sim = replace(sim, D=values["D"])
    if "omega" in values:
        sim = replace(sim, domain=DomainSpec.box(sim.domain.lengths, values["omega"]))
    return replace(rc, sim=sim, sweep={})


def sweep_cells(rc: cfgmod.RunConfig) -> list[dict]:
    """Cartesian product of the sweep lists, refusing oversized products."""
    sw = rc.sweep
    keys = [k for k in ("lambda", "sigma", "D", "omega") if k in sw]
    count = int(np.prod([len(sw[k]) for k in keys])) if keys else 1
    if count > MAX_SWEEP_CELLS:
        raise ConfigError(f"sweep has {count} cells, above the limit of {MAX_SWEEP_CELLS}")
    return [dict(zip(keys, combo)) for combo in itertools.product(*(sw[k] for k in keys))]


def _run_cell(args):
    i, values, rc, out = args
    try:
        manifest, files = simulate(_cell_config(rc, values))
    except HeatStabError as exc:
        return i, values, None, f"{type(exc).__name__}: {exc}"
    write_outputs(Path(out) / f"cell_{i:04d}", manifest, files)
    return i, values, manifest, None


def sweep(rc: cfgmod.RunConfig, out: Path, workers=None) -> str:
    cells = sweep_cells(rc)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(i, v, rc, str(out)) for i, v in enumerate(cells)]
    if workers == 1 or len(jobs) == 1:
        results = [_run_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["cell", "lambda", "sigma", "D", "omega", "fitted_rate", "floor_norm", "certificate_margin", "pass", "error"])
    base = rc.sim
    for i, values, man, err in sorted(results, key=lambda r: r[0]):
        lam = values.get("lambda", base.lam)
        D = values.get("D", base.D)
        omega = values.get("omega", base.domain.to_dict()["omega"])
        omega = json.dumps([list(b) for b in omega] if omega is not None else None)
        if man is None:
            wr.writerow([i, lam, values.get("sigma", base.sigma), D, omega, "", "", "", False, err])
            continue
        rate = man["decay"]["fitted_rate"] if man["decay"] else float("nan")
        wr.writerow([
            i,
            lam,
            man["design"]["sigma"],
            D,
            omega,
            repr(rate),
            "" if man["floor_norm"] is None else repr(man["floor_norm"]),
            repr(man["certificate"]["margin"]),
            man["certificate"]["passed"],
            "",
        ])
    text = buf.getvalue()
    atomic_write(out / "summary.csv", text)
    return text


def gram_report(rc: cfgmod.RunConfig) -> tuple[dict, str]:
    sim = rc.sim
    modes = enumerate_modes(sim.domain, sim.M, sim.c)
    N = select_N(modes, sim.lam)
    G = gram_matrix(modes, sim.domain)
    C = spectral_constant(G, N)
    rep = {
        "M": modes.M,
        "N": N,
        "C_lambda": C.value,
        "domain_hash": G.domain_hash,
        "modes": [list(map(int, k)) for k in modes.indices[:N]],
        "eigenvalues": modes.effective[:N].tolist(),
    }
    return rep, G.to_csv()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heatstab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"heatstab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("design", "print the controller design report"),
        ("simulate", "run one closed-loop simulation"),
        ("sweep", "run a parameter sweep"),
        ("gram", "inspect the Gram matrix and spectral constant"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path, required=name in ("simulate", "sweep"))
        p.add_argument("--seed", type=int)
        p.add_argument("--dt", type=float)
        p.add_argument("--t-end", type=float, dest="t_end")
        if name == "sweep":
            p.add_argument("--workers", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = cfgmod.with_overrides(cfgmod.load(args.config), args.seed, args.dt, args.t_end)
        if args.command == "design":
            rep = design_report(rc)
            text = json.dumps(rep, indent=2)
            print(text)
            if args.out:
                args.out.mkdir(parents=True, exist_ok=True)
                atomic_write(args.out / "design.json", text + "\n")
        elif args.command == "gram":
            rep, gcsv = gram_report(rc)
            print(json.dumps(rep, indent=2))
            if args.out:
                args.out.mkdir(parents=True, exist_ok=True)
                atomic_write(args.out / "gram.csv", gcsv)
        elif args.command == "simulate":
            manifest, files = simulate(rc)
            write_outputs(args.out, manifest, files)
            print(json.dumps({k: manifest[k] for k in ("design", "decay", "certificate")}, indent=2))
        else:
            print(sweep(rc, args.out, args.workers), end="")
    except HeatStabError as exc:
        print(f"heatstab: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())

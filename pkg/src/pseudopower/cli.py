"""``pseudopower <powers|kernels|verify|expand|approx> --config FILE``.

Exit status: 0 when every requested check passes, 1 when a check fails,
2 on an error (a JSON error record is printed to stderr).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from . import io
from .approximation import fit_samples, rectangle_boundary_mask, taylor_coefficients
from .bicomplex import BicomplexArray
from .config import RunConfig, load_config, validate
from .dirac import derive_potential_data
from .errors import GridMismatch, IllConditioned, PseudopowerError
from .formal_powers import iter_closed_powers
from .grids import BicomplexField2D
from .transmutation import OperatorSet, dress_kernel, goursat_kernel
from .verification import run_verification

log = logging.getLogger("pseudopower")

COMMANDS = ("powers", "kernels", "verify", "expand", "approx")
EQUATION_NAMES = {0: "main", 1: "succeeding"}


def _operators(cfg: RunConfig, data):
    tol = cfg.tolerances
    return OperatorSet.build(data.f, data.g, data.q, data.q_tilde, data.df, data.dg,
                             tol=tol.picard_tol, max_iter=tol.picard_max_iter)


def _target(cfg: RunConfig, data, ops) -> BicomplexField2D:
    """The configured target: ``T0[1/(z - pole)]`` or a field CSV."""
    target = cfg.expansion.target
    if target == "pole":
        z = data.grid.z()
        w = (z - BicomplexArray.full(data.grid.shape, cfg.pole)).inverse()
        return ops.T0(BicomplexField2D(data.grid, w))
    path = Path(target)
    if not path.is_absolute() and cfg.source is not None:
        path = cfg.source.parent / path
    W = io.read_field_csv(path)
    if W.grid.shape != data.grid.shape:
        raise GridMismatch(f"target grid {W.grid.shape} != configured {data.grid.shape}")
    return W


def cmd_powers(cfg: RunConfig, out: Path) -> dict:
    data = derive_potential_data(cfg.potential_spec(), cfg.domain())
    files = []
    for n, unit, m, Z in iter_closed_powers(data, cfg.n_max, cfg.tolerances.eps_f):
        name = f"Z_{EQUATION_NAMES[m]}_n{n}_{unit}.csv"
        io.write_field_csv(out / name, Z)
        files.append(name)
    return {"command": "powers", "files": files, "pass": True}


def cmd_kernels(cfg: RunConfig, out: Path) -> dict:
    data = derive_potential_data(cfg.potential_spec(), cfg.domain())
    tol = cfg.tolerances
    files = {}
    info = {}
    for label, q, fn, dfn in (("K", data.q, data.f, data.df),
                              ("K_tilde", data.q_tilde, data.g, data.dg)):
        kern = goursat_kernel(q, tol.picard_tol, tol.picard_max_iter)
        dressed = dress_kernel(kern, complex(dfn[fn.grid.center]))
        io.write_kernel_csv(out / f"{label}.csv", kern.grid, kern.values)
        io.write_kernel_csv(out / f"{label}_dressed.csv", kern.grid, dressed.values)
        files[label] = [f"{label}.csv", f"{label}_dressed.csv"]
        info[label] = {"iterations": kern.iterations, "last_change": kern.last_change}
    return {"command": "kernels", "files": files, "picard": info, "pass": True}


def cmd_verify(cfg: RunConfig, out: Path) -> dict:
    records = run_verification(cfg.potential_spec(), cfg.domain(), cfg.n_max,
                               cfg.tolerances, seed=cfg.seed)
    io.write_json(out / "verify.json", records)
    return {"command": "verify", "checks": records,
            "pass": all(r["pass"] for r in records)}


def _coefficient_record(a) -> dict:
    return {"re": a.re, "im_i": a.im_i, "im_k": a.im_k, "im_ik": a.im_ik}


def cmd_expand(cfg: RunConfig, out: Path) -> dict:
    data = derive_potential_data(cfg.potential_spec(), cfg.domain())
    ops = _operators(cfg, data)
    W = _target(cfg, data, ops)
    exp = taylor_coefficients(W, cfg.expansion.n_max, cfg.radius, ops,
                              b_coef=data.dbar_log_phi())
    report = {"command": "expand", "sample_radius": cfg.radius,
              "radius_estimate": exp.radius_estimate,
              "radius_plus": exp.radius_plus, "radius_minus": exp.radius_minus,
              "coefficients": [_coefficient_record(a) for a in exp.coefficients],
              "pass": True}
    io.write_json(out / "expand.json", report)
    return report


def cmd_approx(cfg: RunConfig, out: Path) -> dict:
    data = derive_potential_data(cfg.potential_spec(), cfg.domain())
    ops = _operators(cfg, data)
    W = _target(cfg, data, ops)
    mask = rectangle_boundary_mask(data.grid)
    target = (W.u[mask], W.v[mask])
    del W, ops
    degrees = sorted(cfg.approx.degrees)
    top = degrees[-1] if degrees else 0
    # only the fitting nodes of each power are kept
    family = [(Z.u[mask], Z.v[mask]) for _, _, _, Z
              in iter_closed_powers(data, top, cfg.tolerances.eps_f, equations=(0,))]
    table = []
    for d in degrees:
        try:
            fit = fit_samples(target, family, d)
            rec = fit.record()
        except IllConditioned as exc:
            rec = exc.result.record()
            rec["ill_conditioned"] = True
        table.append(rec)
    sups = [r["sup_error"] for r in table]
    decreasing = all(b < a for a, b in zip(sups, sups[1:]))
    report = {"command": "approx", "table": table, "strictly_decreasing": decreasing,
              "pass": decreasing}
    io.write_json(out / "approx.json", report)
    return report


HANDLERS = {"powers": cmd_powers, "kernels": cmd_kernels, "verify": cmd_verify,
            "expand": cmd_expand, "approx": cmd_approx}


def run_command(command: str, cfg: RunConfig, out: Path | None = None) -> tuple[int, dict]:
    out = Path(cfg.outputs if out is None else out)
    out.mkdir(parents=True, exist_ok=True)
    log.info("running %s on a %dx%d grid", command, cfg.grid.nx, cfg.grid.ny)
    report = HANDLERS[command](cfg, out)
    return (0 if report.get("pass", False) else 1), report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pseudopower", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--out", type=Path, default=None)
    parser.add_argument("--n-max", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _error_record(exc: Exception) -> dict:
    code = getattr(exc, "code", type(exc).__name__)
    return {"error": code, "type": type(exc).__name__, "message": str(exc)}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.n_max is not None:
            overrides["n_max"] = args.n_max
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            cfg = validate(dataclasses.replace(cfg, **overrides))
        status, report = run_command(args.command, cfg, args.out)
    except (PseudopowerError, OSError) as exc:
        print(json.dumps(_error_record(exc)), file=sys.stderr)
        return 2
    summary = {k: v for k, v in report.items() if k in ("command", "pass", "files")}
    print(io.dumps(summary))
    return status


if __name__ == "__main__":
    sys.exit(main())

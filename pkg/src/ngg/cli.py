"""Command-line interface.

Subcommands:
  simulate       run seeded Monte Carlo estimation experiments, write reports
  estimate       fit an envelope to a real graph given as an edge list
  coefs          print reference expansion coefficients of an envelope
  eval-envelope  sample an envelope (builtin, coefficient file, or fitted) on a grid

All outputs are deterministic given --seed; JSON files embed the resolved
configuration and render floats with 17 significant digits.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .adapt import AdaptConfig, fit_all_resolutions, select_resolution
from .edgelist import read_adjacency, read_edge_list, write_adjacency
from .errors import NggError
from .harness import (
    ExperimentConfig,
    build_identifier,
    run_experiment,
    true_coefficients,
)
from .model import builtin_envelope, envelope_from_coefficients, generate_graph, sample_latent
from .reports import write_csv, write_json
from .spaces import (
    LatentSpace,
    SpaceKind,
    cumulative_dim,
    harmonic_basis,
    sphere,
)
from .spectral import eigenvalues_symmetric

_BUILTIN_IDS = {f"p{i}": i for i in range(1, 7)}
_SPACE_ALIASES = {
    "sphere": SpaceKind.SPHERE,
    "rp": SpaceKind.REAL_PROJECTIVE,
    "real-projective": SpaceKind.REAL_PROJECTIVE,
    "cp": SpaceKind.COMPLEX_PROJECTIVE,
    "complex-projective": SpaceKind.COMPLEX_PROJECTIVE,
}


class UsageError(Exception):
    pass


def _parse_space(text: str) -> LatentSpace:
    name, _, dim = text.partition(":")
    kind = _SPACE_ALIASES.get(name.strip().lower())
    if kind is None or not dim:
        raise UsageError(f"cannot parse space {text!r}; expected e.g. sphere:3")
    try:
        return LatentSpace(kind, int(dim))
    except (ValueError, NggError) as exc:
        raise UsageError(str(exc)) from exc


def _parse_coeffs_file(path: str):
    pairs = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("%"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise UsageError(f"{path}:{lineno}: expected 'degree value'")
        pairs.append((int(parts[0]), float(parts[1])))
    if not pairs:
        raise UsageError(f"{path}: no coefficients found")
    return pairs


def _resolve_envelope(name_or_path: str, basis):
    if name_or_path in _BUILTIN_IDS:
        return builtin_envelope(_BUILTIN_IDS[name_or_path])
    path = Path(name_or_path)
    if not path.exists():
        raise UsageError(
            f"unknown envelope {name_or_path!r}: not one of p1..p6 and not a file"
        )
    return envelope_from_coefficients(basis, _parse_coeffs_file(name_or_path), name=path.stem)


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise UsageError(f"cannot parse --n {text!r}") from exc
    if not values:
        raise UsageError("--n must list at least one size")
    return values


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--r-max", type=int, default=4, help="largest candidate resolution")
    p.add_argument("--kappa", type=float, default=0.25, help="selection penalty constant")
    p.add_argument("--include-r0", action="store_true",
                   help="add the constant model R=0 to the candidate grid")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ngg", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo estimation experiments")
    sim.add_argument("--space", default="sphere:3", help="latent space, e.g. sphere:3")
    sim.add_argument("--envelope", required=True,
                     help="p1..p6 or a coefficients file ('degree value' lines)")
    sim.add_argument("--n", required=True, help="graph size(s), comma separated")
    sim.add_argument("--replicates", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="report JSON path (CSV written alongside)")
    sim.add_argument("--dump-adjacency", default=None,
                     help="also dump sampled adjacency matrices to this path")
    sim.add_argument("--dump-format", choices=("rle", "dense"), default="rle")
    _add_common(sim)

    est = sub.add_parser("estimate", help="estimate an envelope from an edge list")
    est.add_argument("--input", required=True, help="edge list or adjacency dump")
    est.add_argument("--dim", type=int, default=3, help="sphere ambient dimension")
    est.add_argument("--grid", type=int, default=201, help="envelope sample points")
    est.add_argument("--out", required=True, help="output JSON path")
    _add_common(est)

    coefs = sub.add_parser("coefs", help="reference coefficients of an envelope")
    coefs.add_argument("--envelope", required=True)
    coefs.add_argument("--dim", type=int, default=3)
    coefs.add_argument("--degree", type=int, default=8)
    coefs.add_argument("--out", default=None, help="CSV path (default: stdout)")

    ev = sub.add_parser("eval-envelope", help="sample an envelope on a grid")
    ev.add_argument("--envelope", default=None, help="p1..p6 or a coefficients file")
    ev.add_argument("--from-report", default=None,
                    help="take the fitted envelope from an estimate report JSON")
    ev.add_argument("--dim", type=int, default=3)
    ev.add_argument("--grid", type=int, default=201)
    ev.add_argument("--clamp", action="store_true", help="clamp values into [0, 1]")
    ev.add_argument("--out", default=None, help="CSV path (default: stdout)")
    return parser


def _cmd_simulate(args) -> int:
    space = _parse_space(args.space)
    basis = harmonic_basis(space, max(args.r_max, 8))
    envelope = _resolve_envelope(args.envelope, basis)
    n_values = _parse_n_list(args.n)
    config = ExperimentConfig(
        space=space,
        envelope=envelope,
        n_values=n_values,
        replicates=args.replicates,
        r_max=args.r_max,
        kappa=args.kappa,
        base_seed=args.seed,
        include_r0=args.include_r0,
    )
    report = run_experiment(config)
    report.write(args.out)
    if args.dump_adjacency:
        if len(n_values) != 1:
            raise UsageError("--dump-adjacency requires a single --n value")
        n = n_values[0]
        for rep in range(args.replicates):
            latent = sample_latent(space, n, args.seed + rep)
            from .harness import _graph_seed  # same derivation as the experiment

            graph = generate_graph(latent, envelope, _graph_seed(args.seed + rep),
                                   keep_theta=False)
            path = (
                args.dump_adjacency
                if args.replicates == 1
                else f"{args.dump_adjacency}.rep{rep}"
            )
            write_adjacency(path, graph.adjacency_bool(), fmt=args.dump_format)
    print(f"report written to {args.out}")
    return 0


def _cmd_estimate(args) -> int:
    path = Path(args.input)
    if not path.exists():
        print(f"error: input file {args.input!r} not found", file=sys.stderr)
        return 1
    warnings: list[str] = []
    head = path.read_text(encoding="utf-8", errors="replace")[:64]
    if head.startswith("ngg-adjacency"):
        adjacency = read_adjacency(path)
    else:
        data = read_edge_list(path)
        warnings.extend(data.warnings)
        adjacency = data.adjacency()
    n = adjacency.shape[0]
    basis = harmonic_basis(sphere(args.dim), max(args.r_max, 8))
    model_dim = cumulative_dim(sphere(args.dim), args.r_max)
    if n < model_dim:
        raise UsageError(
            f"graph has n = {n} nodes but the resolution-{args.r_max} model needs "
            f"{model_dim}; pass a smaller --r-max"
        )
    if n < 2 * model_dim:
        warnings.append(
            f"n = {n} is below twice the model dimension ({2 * model_dim}); "
            "selection may be unstable"
        )
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    spectrum = eigenvalues_symmetric(adjacency / n)
    adapt_cfg = AdaptConfig(n=n, r_max=args.r_max, kappa=args.kappa,
                            include_r0=args.include_r0)
    estimates = fit_all_resolutions(spectrum, basis, adapt_cfg)
    result = select_resolution(estimates, adapt_cfg, basis)
    grid = np.linspace(-1.0, 1.0, args.grid)
    values = result.envelope(grid)
    out = {
        "schema": 1,
        "kind": "estimate",
        "build": build_identifier(),
        "config": {
            "input": str(args.input),
            "dim": args.dim,
            "r_max": args.r_max,
            "kappa": args.kappa,
            "include_r0": args.include_r0,
            "grid": args.grid,
        },
        "n": n,
        "warnings": warnings,
        "spectrum": [float(v) for v in spectrum.values],
        "per_r": [
            {
                "r": row.r,
                "bias": row.bias,
                "penalty": row.penalty,
                "objective": row.objective,
                "stages": [float(v) for v in estimates[row.r].stage_values],
                "score": float(estimates[row.r].score),
                "ordering": list(estimates[row.r].ordering),
            }
            for row in result.rows
        ],
        "selected_r": result.selected_r,
        "stages": [float(v) for v in estimates[result.selected_r].stage_values],
        "envelope_grid": {
            "t": [float(v) for v in grid],
            "value": [float(v) for v in values],
        },
    }
    write_json(args.out, out)
    print(f"selected resolution {result.selected_r}; report written to {args.out}")
    return 0


def _cmd_coefs(args) -> int:
    basis = harmonic_basis(sphere(args.dim), max(args.degree, 8))
    envelope = _resolve_envelope(args.envelope, basis)
    coeffs = true_coefficients(basis, envelope, max_degree=args.degree, tail_tol=0.0)
    header = ["degree", "dim", "coefficient"]
    rows = [[ell, basis.dims[ell], float(coeffs[ell])] for ell in range(args.degree + 1)]
    if args.out:
        write_csv(args.out, header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(f"{row[0]},{row[1]},{row[2]:.17g}")
    return 0


def _cmd_eval_envelope(args) -> int:
    if (args.envelope is None) == (args.from_report is None):
        raise UsageError("pass exactly one of --envelope / --from-report")
    clamp = args.clamp
    if args.from_report:
        import json

        report = json.loads(Path(args.from_report).read_text(encoding="utf-8"))
        if report.get("kind") != "estimate":
            raise UsageError(f"{args.from_report}: not an estimate report")
        dim = report["config"]["dim"]
        stages = report["stages"]
        basis = harmonic_basis(sphere(dim), max(len(stages) - 1, 1))
        fn = lambda t: basis.reconstruct(np.asarray(stages, float), t)
        clamp = True  # fitted envelopes are always clamped
    else:
        basis = harmonic_basis(sphere(args.dim), 64)
        envelope = _resolve_envelope(args.envelope, basis)
        fn = envelope
    grid = np.linspace(-1.0, 1.0, args.grid)
    values = np.asarray(fn(grid), dtype=float)
    if clamp:
        values = np.clip(values, 0.0, 1.0)
    header = ["t", "value"]
    rows = [[float(t), float(v)] for t, v in zip(grid, values)]
    if args.out:
        write_csv(args.out, header, rows)
    else:
        print(",".join(header))
        for t, v in rows:
            print(f"{t:.17g},{v:.17g}")
    return 0


_DISPATCH = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "coefs": _cmd_coefs,
    "eval-envelope": _cmd_eval_envelope,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except NggError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

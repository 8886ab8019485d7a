"""Command-line front end.

Every subcommand resolves its inputs into a RunConfig before any numerics
run, emits a JSON report (or a flat CSV table with --csv) to stdout or
--out, and exits 0 on success, 1 on a numerical check failure, 2 on bad
input. Reports are byte-identical for identical configuration and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .certificate import (
    build_certificate,
    certificate_parts,
    check_swap_transpose_identity,
    upsilon_spectrum_check,
    verify_dual_feasibility,
)
from .measures import fef, negativity
from .protocol import (
    incomplete_bounds,
    sample_protocol_success,
    simulate_protocol,
    teleport_residuals,
)
from .sdp import SDPProblem, sandwich_report, solve_primal_ppt
from .states import (
    MaxEntBasis,
    ResourceSpectrum,
    build_ensemble,
    dump_basis_file,
    load_basis_file,
    random_spectrum,
    validate_basis,
    weyl_basis,
)
from .tensor import frobenius

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_INPUT = 2

_PRESETS = ("uniform", "product", "random")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved inputs for one subcommand invocation."""

    command: str
    dim: int
    spec: ResourceSpectrum | None
    spectrum_label: str
    n_states: int
    basis: MaxEntBasis
    tol: float
    accuracy: float
    max_iters: int
    seed: int
    out: str | None
    csv: bool
    strategy: str
    threads: int
    shots: int
    dump: str | None


def _parse_spectrum(text: str, dim: int, amplitudes: bool, seed: int) -> ResourceSpectrum:
    if text == "uniform":
        return ResourceSpectrum.uniform(dim)
    if text == "product":
        return ResourceSpectrum.product(dim)
    if text == "random":
        return random_spectrum(dim, np.random.default_rng(seed))
    try:
        values = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise ValueError(
            f"spectrum must be one of {_PRESETS} or comma-separated numbers, "
            f"got {text!r}"
        ) from exc
    if len(values) != dim:
        raise ValueError(f"spectrum has {len(values)} entries, expected {dim}")
    if amplitudes:
        return ResourceSpectrum.from_amplitudes(values)
    return ResourceSpectrum.from_probabilities(values)


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    """Validate and resolve CLI arguments; raises ValueError on bad input."""
    environ = os.environ if environ is None else environ

    if args.basis_file is not None:
        basis = load_basis_file(args.basis_file)
        if args.dim is not None and args.dim != basis.dim:
            raise ValueError(
                f"--dim {args.dim} contradicts basis file dimension {basis.dim}"
            )
        dim = basis.dim
    else:
        dim = 2 if args.dim is None else args.dim
        if dim < 2:
            raise ValueError(f"dimension must be at least 2, got {dim}")
        basis = weyl_basis(dim)

    spectrum_label = args.spectrum if args.spectrum is not None else "uniform"
    if args.command == "verify" and args.spectrum is None:
        spec = None
        spectrum_label = "presets"
    else:
        spec = _parse_spectrum(spectrum_label, dim, args.amplitudes, args.seed)

    n_states = dim * dim if args.n_states is None else args.n_states
    if not 1 <= n_states <= dim * dim:
        raise ValueError(f"--n-states must lie in [1, {dim * dim}], got {n_states}")

    raw_threads = environ.get("ENTDIST_THREADS", "1")
    try:
        threads = int(raw_threads)
    except ValueError as exc:
        raise ValueError(f"ENTDIST_THREADS must be an integer, got {raw_threads!r}") from exc
    if threads < 1:
        raise ValueError(f"ENTDIST_THREADS must be >= 1, got {threads}")

    for name in ("tol", "accuracy"):
        if getattr(args, name) <= 0:
            raise ValueError(f"--{name} must be positive")
    if args.max_iters < 1:
        raise ValueError("--max-iters must be at least 1")

    return RunConfig(
        command=args.command,
        dim=dim,
        spec=spec,
        spectrum_label=spectrum_label,
        n_states=n_states,
        basis=basis,
        tol=args.tol,
        accuracy=args.accuracy,
        max_iters=args.max_iters,
        seed=args.seed,
        out=args.out,
        csv=args.csv,
        strategy=args.strategy,
        threads=threads,
        shots=getattr(args, "shots", 0),
        dump=getattr(args, "dump", None),
    )


def _plain(obj):
    """Recursively coerce numpy scalars and arrays into JSON-safe values."""
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def emit(config: RunConfig, payload: dict, rows: list[dict]) -> None:
    if config.csv:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow(_plain(row))
        text = buffer.getvalue()
    else:
        text = json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"
    if config.out:
        with open(config.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _spectrum_fields(spec: ResourceSpectrum) -> dict:
    return {
        "amplitudes": list(spec.coeffs),
        "probabilities": [a * a for a in spec.coeffs],
    }


def cmd_fef(config: RunConfig):
    spec = config.spec
    f = fef(spec)
    neg = negativity(spec)
    relation_defect = abs(f - (1.0 + 2.0 * neg) / spec.dim)
    payload = {
        "command": "fef",
        "dim": spec.dim,
        **_spectrum_fields(spec),
        "fef": f,
        "negativity": neg,
        "relation_defect": relation_defect,
        "relation_ok": relation_defect <= 1e-12,
    }
    rows = [
        {
            "dim": spec.dim,
            "fef": f,
            "negativity": neg,
            "relation_defect": relation_defect,
        }
    ]
    return EXIT_OK, payload, rows


def cmd_basis(config: RunConfig):
    report = validate_basis(config.basis.unitaries)
    payload = {"command": "basis", **report.to_dict()}
    if config.dump:
        dump_basis_file(config.basis, config.dump)
        payload["dumped_to"] = config.dump
    rows = [report.to_dict()]
    code = EXIT_OK if report.accepted else EXIT_NUMERICAL
    return code, payload, rows


def cmd_protocol(config: RunConfig):
    run = simulate_protocol(config.basis, config.spec)
    payload = {
        "command": "protocol",
        "dim": run.dim,
        **_spectrum_fields(config.spec),
        "value": run.value,
        "fef": run.expected,
        "deviation_from_fef": abs(run.value - run.expected),
        "max_term_deviation": run.max_term_deviation,
        "per_state": list(run.per_state),
    }
    if config.shots > 0:
        rng = np.random.default_rng(config.seed)
        sampled = sample_protocol_success(config.basis, config.spec, config.shots, rng)
        payload["shots"] = config.shots
        payload["seed"] = config.seed
        payload["sampled_value"] = sampled
        payload["sampling_error"] = abs(sampled - run.value)
    rows = [
        {"state": i, "success": p, "deviation": abs(p - run.expected)}
        for i, p in enumerate(run.per_state)
    ]
    return EXIT_OK, payload, rows


def cmd_certificate(config: RunConfig):
    cert = build_certificate(config.basis, config.spec, config.n_states)
    ens = build_ensemble(config.basis, config.spec, config.n_states)
    feas = verify_dual_feasibility(
        cert,
        ens,
        config.tol,
        basis=config.basis,
        spec=config.spec,
        workers=config.threads,
    )
    ups = upsilon_spectrum_check(config.basis)
    passed = feas.passed and ups.passed
    payload = {
        "command": "certificate",
        "dim": cert.dim,
        "n_states": cert.n_states,
        "scale": cert.scale,
        "trace_value": cert.trace_value,
        "fef": fef(config.spec),
        "feasibility": feas.to_dict(),
        "upsilon": ups.to_dict(),
        "passed": passed,
    }
    rows = [
        {
            "k": k,
            "lambda_min": feas.lambda_mins[k],
            "decomposition_residual": feas.decomposition_residuals[k],
        }
        for k in range(len(feas.lambda_mins))
    ]
    return EXIT_OK if passed else EXIT_NUMERICAL, payload, rows


def cmd_sdp(config: RunConfig):
    ens = build_ensemble(config.basis, config.spec, config.n_states)
    result = solve_primal_ppt(
        SDPProblem.from_ensemble(
            ens, accuracy=config.accuracy, max_iters=config.max_iters
        )
    )
    payload = {
        "command": "sdp",
        "dim": config.dim,
        "n_states": config.n_states,
        "accuracy": config.accuracy,
        "max_iters": config.max_iters,
        **result.to_dict(),
    }
    rows = list(result.trace)
    return EXIT_OK, payload, rows


def cmd_bounds(config: RunConfig):
    bounds = incomplete_bounds(
        config.basis, config.spec, config.n_states, strategy=config.strategy
    )
    payload = {"command": "bounds", **bounds.to_dict()}
    rows = [
        {
            "completion_index": i,
            "assigned_state": bounds.assignments[i],
            "overlap": bounds.overlaps[i],
        }
        for i in range(len(bounds.assignments))
    ] or [{"completion_index": -1, "assigned_state": -1, "overlap": 0.0}]
    return EXIT_OK, payload, rows


def cmd_sandwich(config: RunConfig):
    report = sandwich_report(
        config.basis,
        config.spec,
        config.n_states,
        accuracy=config.accuracy,
        max_iters=config.max_iters,
        tol=config.tol,
        strategy=config.strategy,
        workers=config.threads,
    )
    payload = {"command": "sandwich", **report.to_dict()}
    rows = [
        {
            "dim": report.dim,
            "n_states": report.n_states,
            "lower": report.lower,
            "sdp": report.sdp_value,
            "upper": report.upper,
            "fef": report.fef_value,
            "agreement": report.agreement,
        }
    ]
    code = EXIT_OK if report.agreement else EXIT_NUMERICAL
    return code, payload, rows


def _verify_one(config: RunConfig, label: str, spec: ResourceSpectrum) -> list[dict]:
    """Invariant suite for one spectrum; one dict per named check."""
    basis = config.basis
    d = basis.dim
    checks = []

    def check(name: str, passed: bool, detail: float | str) -> None:
        checks.append(
            {"check": f"{label}:{name}", "passed": bool(passed), "detail": detail}
        )

    run = simulate_protocol(basis, spec)
    check(
        "protocol_equals_fef",
        abs(run.value - run.expected) <= 1e-10,
        abs(run.value - run.expected),
    )
    check("protocol_per_term", run.max_term_deviation <= 1e-10, run.max_term_deviation)

    res = teleport_residuals(basis, spec)
    gram_diag = float(np.max(np.abs(np.diag(res.gram) - 1.0)))
    check("gram_normalized", gram_diag <= 1e-12, gram_diag)

    cert = build_certificate(basis, spec)
    ens = build_ensemble(basis, spec, d * d)
    feas = verify_dual_feasibility(
        cert, ens, config.tol, basis=basis, spec=spec, workers=config.threads
    )
    check(
        "certificate_trace",
        abs(cert.trace_value - fef(spec)) <= 1e-12,
        abs(cert.trace_value - fef(spec)),
    )
    check("dual_feasibility", feas.passed, feas.worst_lambda_min)
    check(
        "decomposition_residual",
        feas.worst_decomposition_residual <= 1e-12,
        feas.worst_decomposition_residual,
    )

    parts = certificate_parts(basis, spec)
    total = sum(parts.diag) + sum(parts.sym) + sum(parts.antisym)
    completeness = frobenius(total - np.eye(d * d))
    check("projector_completeness", completeness <= 1e-12, completeness)

    bounds_ok = True
    worst = 0.0
    for n in range(d + 1, d * d + 1):
        b = incomplete_bounds(basis, spec, n)
        slack = max(fef(spec) - b.lower, b.lower - b.upper, b.upper - 1.0)
        worst = max(worst, slack)
        bounds_ok = bounds_ok and slack <= 1e-12
    check("bound_ordering", bounds_ok, worst)
    return checks


def cmd_verify(config: RunConfig):
    basis = config.basis
    d = basis.dim
    checks: list[dict] = []

    report = validate_basis(basis.unitaries)
    checks.append(
        {
            "check": "basis_validation",
            "passed": report.accepted and report.complete,
            "detail": max(report.unitarity_defect, report.orthogonality_defect),
        }
    )

    ups = upsilon_spectrum_check(basis)
    checks.append(
        {
            "check": "upsilon_spectra",
            "passed": ups.passed,
            "detail": max(ups.spectrum_defect, ups.complement_defect),
        }
    )

    rng = np.random.default_rng(config.seed)
    worst = 0.0
    for _ in range(100):
        lam = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
        xi = rng.standard_normal((d * d, d * d)) + 1j * rng.standard_normal((d * d, d * d))
        worst = max(worst, check_swap_transpose_identity(lam, xi))
    checks.append(
        {
            "check": "swap_transpose_identity",
            "passed": worst <= 1e-12,
            "detail": worst,
        }
    )

    if config.spec is not None:
        spectra = [(config.spectrum_label, config.spec)]
    else:
        spectra = [
            ("uniform", ResourceSpectrum.uniform(d)),
            ("product", ResourceSpectrum.product(d)),
            ("random", random_spectrum(d, rng)),
        ]
    for label, spec in spectra:
        checks.extend(_verify_one(config, label, spec))

    passed = all(c["passed"] for c in checks)
    payload = {
        "command": "verify",
        "dim": d,
        "seed": config.seed,
        "checks": checks,
        "passed": passed,
    }
    return EXIT_OK if passed else EXIT_NUMERICAL, payload, checks


_HANDLERS = {
    "fef": cmd_fef,
    "basis": cmd_basis,
    "protocol": cmd_protocol,
    "certificate": cmd_certificate,
    "sdp": cmd_sdp,
    "bounds": cmd_bounds,
    "sandwich": cmd_sandwich,
    "verify": cmd_verify,
}

_COMMAND_HELP = {
    "fef": "fully entangled fraction and negativity of a spectrum",
    "basis": "validate (and optionally dump) a maximally entangled basis",
    "protocol": "exact simulation of the teleportation protocol",
    "certificate": "build the dual certificate and verify feasibility",
    "sdp": "solve the primal PPT discrimination program",
    "bounds": "lower and upper bounds for an incomplete set",
    "sandwich": "protocol lower bound, SDP value, certificate upper bound",
    "verify": "run the full invariant suite at one dimension",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="local dimension d (default 2)")
    common.add_argument(
        "--spectrum",
        default=None,
        help="comma-separated squared Schmidt weights, or uniform|product|random",
    )
    common.add_argument(
        "--amplitudes",
        action="store_true",
        help="interpret --spectrum entries as Schmidt coefficients instead",
    )
    common.add_argument("--n-states", type=int, default=None, help="ensemble size N (default d^2)")
    common.add_argument("--basis-file", default=None, help="JSON basis file instead of the built-in basis")
    common.add_argument("--tol", type=float, default=1e-9, help="feasibility tolerance (default 1e-9)")
    common.add_argument("--accuracy", type=float, default=1e-4, help="solver target accuracy (default 1e-4)")
    common.add_argument("--max-iters", type=int, default=50000, help="solver iteration cap (default 50000)")
    common.add_argument("--seed", type=int, default=0, help="seed for random spectra and sampling")
    common.add_argument("--out", default=None, help="write the report to this path instead of stdout")
    common.add_argument("--csv", action="store_true", help="emit a flat CSV table instead of JSON")
    common.add_argument(
        "--strategy",
        choices=("completion", "projector"),
        default="completion",
        help="incomplete-set measurement strategy",
    )

    parser = argparse.ArgumentParser(
        prog="entdist",
        description="three independent routes to the entanglement-assisted "
        "discrimination probability of a maximally entangled basis",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in _COMMAND_HELP.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "protocol":
            p.add_argument(
                "--shots",
                type=int,
                default=0,
                help="also Monte-Carlo sample the measurement this many times",
            )
        if name == "basis":
            p.add_argument(
                "--dump",
                default=None,
                help="write the resolved basis to this path as a basis file",
            )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        code, payload, rows = _HANDLERS[config.command](config)
        emit(config, payload, rows)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return code


if __name__ == "__main__":
    sys.exit(main())

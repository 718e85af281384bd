"""Command-line surface: reproducible runs with stable file outputs.

Subcommands: generate, estimate, sweep, classify, scan, ingest, profile.
Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numeric or estimation
failure.  Diagnostics go to stderr; data goes to files or stdout only.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .errors import CaptureFormatError, HurstbenchError
from .estimators import METHODS, make_estimator
from .fgn import FgnModel
from .generator import GeneratorSpec, generate_fgn
from .manifest import RunManifest, file_digest
from .seriesfile import atomic_write_text, read_series, write_series
from .sweep import (
    MetricsRow,
    PrecisionLabel,
    SweepConfig,
    classify_precision,
    determine_min_length,
    metrics_to_csv,
    paper_config,
    quick_config,
    read_metrics_csv,
    run_sweep,
    write_findings_json,
    write_metrics_csv,
)
from .traces import (
    ScanPlan,
    convergence_profile,
    ingest_capture_csv,
    profile_to_csv,
    sliding_scan,
    write_profile_csv,
    write_scan_csv,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

_CRITERIA = {
    "acceptable": PrecisionLabel.ACCEPTABLE,
    "high-precision": PrecisionLabel.HIGH_PRECISION,
}


def _comma_floats(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part.strip())


def _comma_ints(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part.strip())


def _comma_names(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hurstbench",
        description="fGn synthesis, Hurst estimation and minimum-length benchmarking",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--verbose", action="store_true", help="info-level diagnostics on stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="synthesize an fGn series file")
    p.add_argument("--h", type=float, required=True, help="Hurst exponent in (0, 1)")
    p.add_argument("--sigma2", type=float, default=1.0, help="process variance")
    p.add_argument("--n", type=int, required=True, help="series length")
    p.add_argument("--seed", type=int, required=True, help="64-bit generator seed")
    p.add_argument("--out", required=True, help="output series file")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("estimate", help="estimate H on one series file")
    p.add_argument("--in", dest="input", required=True, help="input series file")
    p.add_argument(
        "--method",
        action="append",
        help=f"estimator tag(s), comma-separable; choices: {', '.join(METHODS)}",
    )
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("sweep", help="Monte-Carlo benchmark over (H, N) grid")
    p.add_argument(
        "--base-seed", type=int, required=True, help="root seed; required for reproducibility"
    )
    preset = p.add_mutually_exclusive_group()
    preset.add_argument(
        "--paper-defaults",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="H in {0.5..0.9}, N = 2^6..2^16, 200 replications, all estimators",
    )
    preset.add_argument(
        "--quick",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="CI preset: N up to 2^13, 20 replications",
    )
    p.add_argument("--h-values", type=_comma_floats, help="nominal H list, e.g. 0.5,0.7")
    p.add_argument("--log2-n-values", type=_comma_ints, help="exponents i with N=2^i")
    p.add_argument("--replications", type=int, help="replications per cell")
    p.add_argument("--estimators", type=_comma_names, help="subset of estimator tags")
    p.add_argument("--sigma2", type=float, default=1.0, help="generator variance")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument(
        "--criterion",
        choices=sorted(_CRITERIA),
        default="acceptable",
        help="precision band for the minimum-length findings",
    )
    p.add_argument("--out", required=True, help="metrics CSV path")
    p.add_argument(
        "--findings", help="findings JSON path (default: <out>.findings.json)"
    )
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("classify", help="precision label for bias/sigma or a metrics CSV")
    p.add_argument("--bias", type=float, help="bias of a single cell")
    p.add_argument("--sigma", type=float, help="deviation of a single cell")
    p.add_argument("--in", dest="input", help="metrics CSV to relabel")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("scan", help="sliding-window H scan over a series file")
    p.add_argument("--in", dest="input", required=True, help="input series file")
    p.add_argument("--window", type=int, default=256, help="window length in samples")
    p.add_argument("--stride", type=int, help="window start spacing (default window/2)")
    p.add_argument("--method", default="whittle", choices=METHODS)
    p.add_argument("--out", required=True, help="scan CSV path")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("ingest", help="bin a capture CSV into a series file")
    p.add_argument("--in", dest="input", required=True, help="capture CSV (timestamp,frame_bytes)")
    p.add_argument("--bin-width", type=float, default=0.010, help="bin width in seconds")
    p.add_argument(
        "--count",
        action=argparse.BooleanOptionalAction,
        default=False,
        help="count packets per bin instead of summing bytes",
    )
    p.add_argument("--out", required=True, help="output series file")
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("profile", help="convergence profile by phase disaggregation")
    p.add_argument("--in", dest="input", required=True, help="input series file")
    p.add_argument("--method", default="whittle", choices=METHODS)
    p.add_argument(
        "--m-values", type=_comma_ints, default=(1, 2, 4, 8), help="factors, e.g. 1,2,4,8"
    )
    p.add_argument("--out", help="profile CSV path (default stdout)")
    p.set_defaults(handler=cmd_profile)

    return parser


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    spec = GeneratorSpec(FgnModel(args.h, args.sigma2), args.n, args.seed)
    series = generate_fgn(spec)
    metadata = {
        "h": repr(args.h),
        "sigma2": repr(args.sigma2),
        "n": args.n,
        "seed": args.seed,
        "generator": "davies-harte",
        "command": "generate",
        "version": __version__,
    }
    write_series(args.out, series, metadata)
    return EXIT_OK


def _requested_methods(raw) -> tuple[str, ...]:
    if not raw:
        return ("whittle",)
    methods = []
    for item in raw:
        methods.extend(_comma_names(item))
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise ValueError(f"unknown method(s) {unknown}; choices: {METHODS}")
    return tuple(dict.fromkeys(methods))


def cmd_estimate(args) -> int:
    series, _ = read_series(args.input)
    methods = _requested_methods(args.method)
    estimates = {}
    for method in methods:
        result = make_estimator(method)(series)
        estimates[method] = {
            "h_hat": result.h_hat,
            "ci_low": result.ci_low,
            "ci_high": result.ci_high,
            "aux": result.aux,
        }
    payload = {
        "input": args.input,
        "n": len(series),
        "estimates": estimates,
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        atomic_write_text(args.out, text)
        manifest = RunManifest(
            command="estimate",
            version=__version__,
            flags={"in": args.input, "method": list(methods)},
        )
        manifest.add_input(args.input)
        manifest.add_output(args.out)
        manifest.write_sidecar(args.out)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _sweep_config(args) -> SweepConfig:
    explicit = {
        "--h-values": args.h_values,
        "--log2-n-values": args.log2_n_values,
        "--replications": args.replications,
    }
    if args.paper_defaults or args.quick:
        clashes = [name for name, value in explicit.items() if value is not None]
        if clashes:
            raise ValueError(f"{', '.join(clashes)} cannot be combined with a preset")
        estimators = args.estimators or tuple(METHODS)
        if args.paper_defaults:
            return paper_config(args.base_seed, estimators)
        return quick_config(args.base_seed, estimators)
    defaults = SweepConfig(base_seed=args.base_seed)
    return SweepConfig(
        h_values=args.h_values or defaults.h_values,
        log2_n_values=args.log2_n_values or defaults.log2_n_values,
        replications=args.replications or defaults.replications,
        estimators=args.estimators or defaults.estimators,
        base_seed=args.base_seed,
        sigma2=args.sigma2,
    )


def cmd_sweep(args) -> int:
    if args.threads < 1:
        raise ValueError("--threads must be at least 1")
    config = _sweep_config(args)
    criterion = _CRITERIA[args.criterion]
    log.info(
        "sweep: %d cells x %d replications, %d estimator(s), %d worker(s)",
        len(config.h_values) * len(config.log2_n_values),
        config.replications,
        len(config.estimators),
        args.threads,
    )
    rows = run_sweep(config, threads=args.threads)
    write_metrics_csv(args.out, rows)
    findings = [
        determine_min_length(rows, estimator, criterion)
        for estimator in config.estimators
    ]
    findings_path = args.findings or f"{args.out}.findings.json"
    write_findings_json(findings_path, findings)
    manifest = RunManifest(
        command="sweep",
        version=__version__,
        flags={
            "h_values": list(config.h_values),
            "log2_n_values": list(config.log2_n_values),
            "replications": config.replications,
            "estimators": list(config.estimators),
            "sigma2": config.sigma2,
            "criterion": args.criterion,
            "threads": args.threads,
        },
        base_seed=config.base_seed,
    )
    manifest.add_output(args.out)
    manifest.add_output(findings_path)
    manifest.write_sidecar(args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    pair_given = args.bias is not None or args.sigma is not None
    if pair_given and args.input:
        raise ValueError("give either --bias/--sigma or --in, not both")
    if pair_given:
        if args.bias is None or args.sigma is None:
            raise ValueError("--bias and --sigma must be given together")
        sys.stdout.write(classify_precision(args.bias, args.sigma).value + "\n")
        return EXIT_OK
    if not args.input:
        raise ValueError("need --bias/--sigma or --in metrics.csv")
    rows = read_metrics_csv(args.input)
    relabeled = []
    for row in rows:
        if row.bias is not None and row.sigma is not None:
            label = classify_precision(row.bias, row.sigma)
        else:
            label = PrecisionLabel.INCONCLUSIVE
        relabeled.append(
            MetricsRow(
                estimator=row.estimator,
                h0=row.h0,
                log2_n=row.log2_n,
                replications=row.replications,
                failures=row.failures,
                mean_estimate=row.mean_estimate,
                bias=row.bias,
                sigma=row.sigma,
                mse=row.mse,
                label=label,
            )
        )
    text = metrics_to_csv(relabeled)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_scan(args) -> int:
    series, _ = read_series(args.input)
    stride = args.stride if args.stride is not None else max(args.window // 2, 1)
    plan = ScanPlan(window=args.window, stride=stride, estimator=args.method)
    points = sliding_scan(series, plan)
    write_scan_csv(args.out, points, plan, series)
    manifest = RunManifest(
        command="scan",
        version=__version__,
        flags={"window": plan.window, "stride": plan.stride, "method": plan.estimator},
    )
    manifest.add_input(args.input)
    manifest.add_output(args.out)
    manifest.write_sidecar(args.out)
    return EXIT_OK


def cmd_ingest(args) -> int:
    series = ingest_capture_csv(
        args.input, bin_width=args.bin_width, count_packets=args.count
    )
    metadata = {
        "source": args.input,
        "source_sha256": file_digest(args.input),
        "bin_width": repr(args.bin_width),
        "mode": "packets" if args.count else "bytes",
        "command": "ingest",
        "version": __version__,
    }
    write_series(args.out, series, metadata)
    return EXIT_OK


def cmd_profile(args) -> int:
    series, _ = read_series(args.input)
    rows = convergence_profile(series, args.method, args.m_values)
    if args.out:
        write_profile_csv(args.out, rows)
        manifest = RunManifest(
            command="profile",
            version=__version__,
            flags={"method": args.method, "m_values": list(args.m_values)},
        )
        manifest.add_input(args.input)
        manifest.add_output(args.out)
        manifest.write_sidecar(args.out)
    else:
        sys.stdout.write(profile_to_csv(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Config file expansion and entry point
# ---------------------------------------------------------------------------


def _config_tokens(path) -> list[str]:
    tokens = []
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if value.lower() in ("true", "false"):
                tokens.append(f"--{key}" if value.lower() == "true" else f"--no-{key}")
            else:
                tokens.extend([f"--{key}", value])
    return tokens


def _expand_config(argv: list[str]) -> list[str]:
    if not any(a == "--config" or a.startswith("--config=") for a in argv):
        return argv
    rest: list[str] = []
    expanded: list[str] = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg == "--config":
            if i + 1 >= len(argv):
                raise ValueError("--config needs a file argument")
            expanded.extend(_config_tokens(argv[i + 1]))
            i += 2
        elif arg.startswith("--config="):
            expanded.extend(_config_tokens(arg.split("=", 1)[1]))
            i += 1
        else:
            rest.append(arg)
            i += 1
    # Config tokens go right after the subcommand so explicit flags override.
    return rest[:1] + expanded + rest[1:]


def main(argv=None) -> int:
    raw_argv = list(sys.argv[1:] if argv is None else argv)
    try:
        full_argv = _expand_config(raw_argv)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = build_parser().parse_args(full_argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except CaptureFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except HurstbenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

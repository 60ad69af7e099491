"""Command-line front end: reproducible kernel experiments with JSON/CSV reports.

Commands: classify | threshold | cpv | norm | holder | scan | teodorescu |
verify-all. Every run emits a report

    {"command": ..., "config": ..., "seed": ..., "result": ..., "runtime_ms": ...}

whose embedded config replays the run exactly (`sklab --replay report.json`).
Flags mirror config keys one-to-one and win over the config file. Exit codes:
0 success, 2 validation error, 3 divergence where a finite value was
requested, 4 numeric budget exhausted without a verdict.

SKL_THREADS caps internal parallelism (default: machine parallelism).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

from . import serialize
from .domains import DomainKind, RadialDomain, WeightedMeasure
from .kernels import KernelFamily, KernelSpec, classify, homogeneity_degree
from .norms import grid_norm, holder_check, kernel_lp_norm, norm_limit_scan
from .quadrature import (
    DEFAULT_SEED,
    DoublingStatus,
    closed_form_lp_integral,
    cpv_limit,
    geometric_schedule,
    numeric_lp_integral,
)
from .rational import as_fraction, format_fraction
from .thresholds import (
    full_order_boundary_p_star,
    report_from_p_star,
    reference_sweep,
    threshold_report,
    verify_threshold_numerically,
)
from .transforms import ConvolutionPlan, mapping_property_probe, teodorescu
from .norms import GridFunction

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIVERGENT = 3
EXIT_BUDGET = 4

COMMANDS = (
    "classify",
    "threshold",
    "cpv",
    "norm",
    "holder",
    "scan",
    "teodorescu",
    "verify-all",
)


class ValidationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Config assembly: config file -> flag overrides -> typed objects


_KERNEL_KEYS = ("family", "n", "l", "alpha", "theta")
_MEASURE_KEYS = ("weight_exponent",)
_DOMAIN_KEYS = ("kind", "n", "r_in", "r_out", "r_max")
_NUMERIC_KEYS = ("seed", "samples", "delta", "refine")
_OUTPUT_KEYS = ("format", "path")


def _merge_section(config: dict, section: str, updates: dict) -> None:
    if not updates:
        return
    merged = dict(config.get(section) or {})
    merged.update(updates)
    config[section] = merged


def build_config(args: argparse.Namespace) -> dict:
    config: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as handle:
            config = json.load(handle)
    _merge_section(
        config,
        "kernel",
        {
            k: v
            for k, v in (
                ("family", args.family),
                ("n", args.n),
                ("l", args.l),
                ("alpha", args.alpha),
                ("theta", args.theta),
            )
            if v is not None
        },
    )
    _merge_section(
        config,
        "measure",
        {"weight_exponent": args.weight} if getattr(args, "weight", None) is not None else {},
    )
    _merge_section(
        config,
        "domain",
        {
            k: v
            for k, v in (
                ("kind", args.domain),
                ("r_in", args.r_in),
                ("r_out", args.r_out),
                ("r_max", args.r_max),
            )
            if v is not None
        },
    )
    _merge_section(
        config,
        "numeric",
        {
            k: v
            for k, v in (
                ("seed", args.seed),
                ("samples", args.samples),
                ("delta", args.delta),
                ("refine", args.refine),
            )
            if v is not None
        },
    )
    _merge_section(
        config,
        "output",
        {
            k: v
            for k, v in (("format", args.format), ("path", args.output))
            if v is not None
        },
    )
    extra = {}
    for key in (
        "p",
        "q",
        "k",
        "target_q",
        "q_star",
        "steps",
        "input",
        "input2",
        "schedule",
        "j",
        "allow_l_equal_n",
        "max_n",
        "transform_out",
        "probe_q",
        "method",
    ):
        value = getattr(args, key, None)
        if value is not None:
            extra[key] = value
    _merge_section(config, "args", extra)
    return config


def _kernel_from(config: dict) -> KernelSpec:
    data = config.get("kernel")
    if not data or "family" not in data or "n" not in data:
        raise ValidationError("a kernel requires at least --family and --n")
    try:
        return serialize.kernel_spec_from_json(data)
    except (ValueError, KeyError) as exc:
        raise ValidationError(str(exc)) from exc


def _measure_from(config: dict) -> WeightedMeasure:
    try:
        return serialize.measure_from_json(config.get("measure") or {})
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _domain_from(config: dict, default_n: int | None = None) -> RadialDomain:
    data = dict(config.get("domain") or {})
    if "n" not in data and default_n is not None:
        data["n"] = default_n
    if "kind" not in data:
        raise ValidationError("a domain requires --domain (interval|annulus|punctured_ball|exterior)")
    try:
        return serialize.domain_from_json(data)
    except (ValueError, KeyError) as exc:
        raise ValidationError(str(exc)) from exc


def _numeric_from(config: dict) -> dict:
    numeric = {"seed": DEFAULT_SEED, "samples": 1_000_000, "delta": 0.1, "refine": 8}
    numeric.update(config.get("numeric") or {})
    numeric["seed"] = int(numeric["seed"])
    numeric["samples"] = int(numeric["samples"])
    numeric["delta"] = float(numeric["delta"])
    numeric["refine"] = int(numeric["refine"])
    return numeric


def _args_from(config: dict) -> dict:
    return dict(config.get("args") or {})


def _load_grid(path) -> GridFunction:
    try:
        grid, _ = serialize.load_grid_function(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ValidationError(f"cannot load grid function {path!r}: {exc}") from exc
    return grid


# ---------------------------------------------------------------------------
# Command handlers: each returns (result_dict, exit_code)


def _run_classify(config: dict) -> tuple[dict, int]:
    spec = _kernel_from(config)
    measure = _measure_from(config)
    verdict = classify(spec, measure.weight_exponent)
    return (
        {
            "class": verdict.value,
            "homogeneity_degree": format_fraction(homogeneity_degree(spec)),
            "effective_degree": format_fraction(
                homogeneity_degree(spec) - measure.weight_exponent
            ),
        },
        EXIT_OK,
    )


def _run_threshold(config: dict) -> tuple[dict, int]:
    measure = _measure_from(config)
    extra = _args_from(config)
    j = int(extra.get("j", 0))
    kernel_data = config.get("kernel") or {}
    if extra.get("allow_l_equal_n") and kernel_data.get("l") == kernel_data.get("n"):
        # Boundary case l = n: the odd-order numerator cancels all decay, so
        # the threshold comes from the raw inverse power n - l + 1.
        n = int(kernel_data["n"])
        p_star = full_order_boundary_p_star(n, int(kernel_data["l"]))
        report = report_from_p_star(p_star, measure.weight_exponent, j)
    else:
        spec = _kernel_from(config)
        try:
            report = threshold_report(spec, measure.weight_exponent, j)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
    result = serialize.threshold_report_to_json(report)
    result["p_range"] = f"({format_fraction(report.p_star)}, inf)"
    result["q_range"] = f"(1/1, {format_fraction(report.q_star)})"
    target_q = _args_from(config).get("target_q")
    if target_q is not None:
        result["target_q"] = str(target_q)
        result["viable"] = report.admits_q(as_fraction(target_q))
    return result, EXIT_OK


def _run_cpv(config: dict) -> tuple[dict, int]:
    spec = _kernel_from(config)
    measure = _measure_from(config)
    extra = _args_from(config)
    r_out = float((config.get("domain") or {}).get("r_out", 1.0))
    if extra.get("schedule"):
        schedule = [float(s) for s in str(extra["schedule"]).split(",")]
    else:
        schedule = geometric_schedule()

    def evaluator(eps: float) -> float:
        if spec.n == 1:
            domain = RadialDomain(DomainKind.INTERVAL, 1, r_in=eps, r_out=r_out)
        else:
            domain = RadialDomain(DomainKind.ANNULUS, spec.n, r_in=eps, r_out=r_out)
        return closed_form_lp_integral(spec, 1, measure, domain).value

    try:
        report = cpv_limit(evaluator, schedule)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    result = {
        "converged": report.converges,
        "limit": report.value,
        "divergence_end": report.divergence_end.value,
        "rate": report.tail_exponent,
        "last_punctured_value": report.numeric_estimate,
        "schedule": schedule,
    }
    return result, EXIT_OK if report.converges else EXIT_DIVERGENT


def _run_norm(config: dict) -> tuple[dict, int]:
    measure = _measure_from(config)
    extra = _args_from(config)
    p = float(extra.get("p", 2.0))
    if extra.get("input"):
        grid = _load_grid(extra["input"])
        k = int(extra.get("k", 0))
        try:
            res = grid_norm(grid, p, k, measure)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        result = {
            "method": res.method.value,
            "p": res.p,
            "k": res.derivative_order,
            "weight_exponent": res.weight_exponent,
            "value": res.value,
        }
        return result, EXIT_OK
    spec = _kernel_from(config)
    domain = _domain_from(config, default_n=spec.n)
    try:
        res = kernel_lp_norm(spec, p, measure, domain)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    result = {
        "method": res.method.value,
        "p": res.p,
        "k": res.derivative_order,
        "weight_exponent": res.weight_exponent,
        "value": res.value if math.isfinite(res.value) else "inf",
        "divergence_end": res.divergence_end.value,
    }
    return result, EXIT_OK if math.isfinite(res.value) else EXIT_DIVERGENT


def _run_holder(config: dict) -> tuple[dict, int]:
    measure = _measure_from(config)
    extra = _args_from(config)
    if not extra.get("input") or not extra.get("input2"):
        raise ValidationError("holder requires --input (g) and --input2 (f)")
    g = _load_grid(extra["input"])
    f = _load_grid(extra["input2"])
    p = float(extra.get("p", 2.0))
    q = float(extra.get("q", p / (p - 1.0) if p > 1 else math.inf))
    try:
        check = holder_check(g, f, p, q, measure)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    return (
        {"p": check.p, "q": check.q, "lhs": check.lhs, "rhs": check.rhs, "holds": check.holds},
        EXIT_OK,
    )


def _run_scan(config: dict) -> tuple[dict, int]:
    spec = _kernel_from(config)
    measure = _measure_from(config)
    domain = _domain_from(config, default_n=spec.n)
    extra = _args_from(config)
    if not extra.get("input"):
        raise ValidationError("scan requires --input (the density grid f)")
    f = _load_grid(extra["input"])
    steps = int(extra.get("steps", 8))
    if extra.get("q_star") is not None:
        q_star = float(as_fraction(extra["q_star"]))
    else:
        report = threshold_report(spec, measure.weight_exponent)
        if report.q_star is None:
            raise ValidationError(
                "the conjugate range is (1, inf); pass an explicit --q-star for the scan"
            )
        q_star = float(report.q_star)
    try:
        table = norm_limit_scan(spec, f, measure, domain, q_star, steps)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    return serialize.scan_table_to_json(table), EXIT_OK


def _run_teodorescu(config: dict) -> tuple[dict, int]:
    spec = _kernel_from(config)
    measure = _measure_from(config)
    numeric = _numeric_from(config)
    extra = _args_from(config)
    if not extra.get("input"):
        raise ValidationError("teodorescu requires --input (the density grid)")
    psi = _load_grid(extra["input"])
    try:
        plan = ConvolutionPlan(
            spec,
            refine=numeric["refine"],
            weight_exponent=measure.weight_exponent,
            source_shape=psi.shape,
        )
        method = str(extra.get("method", "fft"))
        if extra.get("probe_q") is not None:
            probe = mapping_property_probe(
                psi, spec, float(extra["probe_q"]), measure, plan
            )
            result = {
                "q": probe.q,
                "threshold": serialize.threshold_report_to_json(probe.threshold),
                "source_norm_k0": probe.source_norm_k0.value,
                "source_norm_k1": probe.source_norm_k1.value,
                "transform_norm_k0": probe.transform_norm_k0.value,
                "transform_norm_k1": probe.transform_norm_k1.value,
                "left_inverse_residual": probe.left_inverse_residual,
                "box": [list(b) for b in probe.box],
            }
            transform = None
        else:
            transform = teodorescu(psi, spec, plan, method=method)
            result = {
                "shape": list(transform.shape),
                "box": [[lo, hi] for lo, hi in zip(transform.lo, transform.hi)],
                "transform_l2": grid_norm(transform, 2, 0, measure).value,
            }
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    if extra.get("transform_out"):
        if transform is None:
            transform = teodorescu(psi, spec, plan, method=str(extra.get("method", "fft")))
        serialize.save_grid_function(extra["transform_out"], transform, measure)
        result["transform_path"] = extra["transform_out"]
    return result, EXIT_OK


def _run_verify_all(config: dict) -> tuple[dict, int]:
    numeric = _numeric_from(config)
    extra = _args_from(config)
    max_n = int(extra.get("max_n", 8))
    delta = numeric["delta"]
    lines = []
    all_ok = True
    budget_exhausted = False
    for case in reference_sweep(max_n):
        report = threshold_report(case.spec, case.weight_exponent)
        exact_ok = (
            report.p_star == case.expected_p_star
            and report.q_star == case.expected_q_star
        )
        witness = verify_threshold_numerically(case.spec, case.weight_exponent, delta)
        numeric_ok = witness.passed
        if (
            witness.finite_side.status is DoublingStatus.UNDECIDED
            or witness.divergent_side.status is DoublingStatus.UNDECIDED
        ):
            budget_exhausted = True
        ok = exact_ok and numeric_ok
        all_ok &= ok
        line = (
            f"{'PASS' if ok else 'FAIL'} {case.label}: "
            f"p*={format_fraction(report.p_star)} q*={format_fraction(report.q_star)} "
            f"[exact {'ok' if exact_ok else 'MISMATCH'}; "
            f"witness finite@p*+{delta:g}={witness.finite_side.status.value}, "
            f"divergent@p*-{delta:g}={witness.divergent_side.status.value}]"
        )
        lines.append(
            {
                "label": case.label,
                "passed": ok,
                "p_star": format_fraction(report.p_star),
                "q_star": format_fraction(report.q_star),
                "line": line,
            }
        )
        print(line)
    result = {
        "cases": lines,
        "total": len(lines),
        "passed": sum(1 for entry in lines if entry["passed"]),
    }
    if budget_exhausted:
        return result, EXIT_BUDGET
    return result, EXIT_OK if all_ok else 1


_HANDLERS = {
    "classify": _run_classify,
    "threshold": _run_threshold,
    "cpv": _run_cpv,
    "norm": _run_norm,
    "holder": _run_holder,
    "scan": _run_scan,
    "teodorescu": _run_teodorescu,
    "verify-all": _run_verify_all,
}


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file; flags override its keys")
    kernel = sub.add_argument_group("kernel")
    kernel.add_argument("--family", choices=[f.value for f in KernelFamily])
    kernel.add_argument("--n", type=int, help="ambient dimension")
    kernel.add_argument("--l", type=int, help="iterate order (dirac_iterate)")
    kernel.add_argument("--alpha", help="power-model exponent (float or num/den)")
    kernel.add_argument("--theta", type=float, help="dirac_iterate normalization")
    measure = sub.add_argument_group("measure")
    measure.add_argument("--weight", help="radial weight exponent w (float or num/den)")
    domain = sub.add_argument_group("domain")
    domain.add_argument("--domain", choices=[k.value for k in DomainKind])
    domain.add_argument("--r-in", dest="r_in", type=float)
    domain.add_argument("--r-out", dest="r_out", type=float)
    domain.add_argument("--r-max", dest="r_max", type=float, help="truncation radius for numerics")
    numeric = sub.add_argument_group("numeric")
    numeric.add_argument("--seed", type=int)
    numeric.add_argument("--samples", type=int)
    numeric.add_argument("--delta", type=float)
    numeric.add_argument("--refine", type=int)
    out = sub.add_argument_group("output")
    out.add_argument("--output", help="write the report to this path")
    out.add_argument("--format", choices=["json", "csv"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sklab",
        description="Singular-kernel laboratory: thresholds, norms, principal values, transforms.",
    )
    parser.add_argument("--replay", help="re-run the command embedded in a report file")
    subs = parser.add_subparsers(dest="command")
    helptexts = {
        "classify": "weak/singular/hyper classification of a kernel under a weighted measure",
        "threshold": "exact critical exponent p*, conjugate q*, viability verdicts",
        "cpv": "Cauchy principal value of the kernel integral by puncture extrapolation",
        "norm": "closed-form kernel norm or grid-function Sobolev norm",
        "holder": "Hoelder inequality check on two grid functions (CSV columns in report)",
        "scan": "norm-product scan on a q-grid up to q* (csv: q,p,kernel_norm,f_norm,product)",
        "teodorescu": "kernel convolution of a grid function (+ optional mapping probe)",
        "verify-all": "run the full threshold-identity and numeric-witness sweep",
    }
    for name in COMMANDS:
        sub = subs.add_parser(name, help=helptexts[name])
        _add_common_flags(sub)
        if name == "threshold":
            sub.add_argument("--j", type=int, help="derivative order shift")
            sub.add_argument("--target-q", dest="target_q", help="index to test for viability")
            sub.add_argument(
                "--allow-l-equal-n",
                dest="allow_l_equal_n",
                action="store_const",
                const=True,
                help="permit the boundary case l == n; the kernel norm itself no longer "
                "decays there, so the threshold uses the raw inverse power n-l+1",
            )
        if name == "cpv":
            sub.add_argument("--schedule", help="comma-separated decreasing puncture radii")
        if name in ("norm", "holder", "scan", "teodorescu"):
            sub.add_argument("--input", help="grid-function JSON file")
        if name == "holder":
            sub.add_argument("--input2", help="second grid-function JSON file")
            sub.add_argument("--p", type=float)
            sub.add_argument("--q", type=float)
        if name == "norm":
            sub.add_argument("--p", type=float)
            sub.add_argument("--k", type=int, help="derivative order (grid mode)")
        if name == "scan":
            sub.add_argument("--steps", type=int)
            sub.add_argument("--q-star", dest="q_star", help="endpoint override (float or num/den)")
        if name == "teodorescu":
            sub.add_argument("--transform-out", dest="transform_out", help="write transform grid here")
            sub.add_argument("--probe-q", dest="probe_q", type=float, help="run the mapping probe at this q")
            sub.add_argument("--method", choices=["fft", "direct"])
        if name == "verify-all":
            sub.add_argument("--max-n", dest="max_n", type=int, help="sweep dimensions up to this n")
    return parser


def _emit(report: dict, config: dict) -> None:
    output = config.get("output") or {}
    fmt = output.get("format", "json")
    text: str
    if fmt == "csv" and report["command"] == "scan":
        rows = report["result"]["rows"]
        lines = [",".join(serialize.SCAN_CSV_COLUMNS)]
        for row in rows:
            lines.append(",".join(repr(row[c]) for c in serialize.SCAN_CSV_COLUMNS))
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(report, indent=2, default=str) + "\n"
    path = output.get("path")
    if path:
        with open(path, "w") as handle:
            handle.write(text)
    if report["command"] != "verify-all":
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.replay:
        try:
            with open(args.replay) as handle:
                prior = json.load(handle)
            command = prior["command"]
            config = prior["config"]
        except (OSError, ValueError, KeyError) as exc:
            print(f"error: cannot replay {args.replay!r}: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
    elif args.command:
        command = args.command
        try:
            config = build_config(args)
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
    else:
        parser.print_help()
        return EXIT_VALIDATION
    if command not in _HANDLERS:
        print(f"error: unknown command {command!r}", file=sys.stderr)
        return EXIT_VALIDATION
    started = time.perf_counter()
    try:
        result, code = _HANDLERS[command](config)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    runtime_ms = (time.perf_counter() - started) * 1000.0
    seed = _numeric_from(config)["seed"]
    report = {
        "command": command,
        "config": config,
        "seed": seed,
        "result": result,
        "runtime_ms": runtime_ms,
    }
    _emit(report, config)
    return code


if __name__ == "__main__":
    sys.exit(main())

"""JSON / CSV codecs for the published wire formats.

Formats:
  Multivector        {"n": int, "coeffs": [float x 2^n]}  (ascending mask order)
  KernelSpec         {"family": str, "n": int, "l": int?, "alpha": float?, "theta": float?}
  RadialDomain       {"kind": str, "n": int, "r_in": float?, "r_out": float?, "r_max": float?}
  WeightedMeasure    {"weight_exponent": float}
  ThresholdReport    {"p_star": "num/den", "q_star": "num/den"|"inf", "w": "num/den",
                      "j": int, "hilbert_viable": bool}
  GridFunction file  {"n", "box": [[lo, hi] x axis], "shape", "weight"?, "values":
                      flat row-major list of coefficient arrays}
  Scan CSV           columns q,p,kernel_norm,f_norm,product

Rationals serialize as "num/den" strings; floats rely on shortest
round-trip repr, which re-parses to the identical value.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import numpy as np

from .clifford import Multivector
from .domains import DomainKind, RadialDomain, WeightedMeasure
from .kernels import KernelFamily, KernelSpec
from .norms import GridFunction, ScanTable
from .rational import as_fraction, format_fraction, parse_fraction
from .thresholds import ThresholdReport


def multivector_to_json(a: Multivector) -> dict:
    return {"n": a.dimension, "coeffs": [float(c) for c in a.coefficients]}


def multivector_from_json(data: dict) -> Multivector:
    return Multivector(int(data["n"]), np.asarray(data["coeffs"], dtype=float))


def kernel_spec_to_json(spec: KernelSpec) -> dict:
    data: dict = {"family": spec.family.value, "n": spec.n}
    if spec.l is not None:
        data["l"] = spec.l
    if spec.alpha is not None:
        data["alpha"] = float(spec.alpha)
    if spec.theta != 1.0:
        data["theta"] = spec.theta
    return data


def kernel_spec_from_json(data: dict) -> KernelSpec:
    return KernelSpec(
        family=KernelFamily(data["family"]),
        n=int(data["n"]),
        l=int(data["l"]) if data.get("l") is not None else None,
        alpha=as_fraction(data["alpha"]) if data.get("alpha") is not None else None,
        theta=float(data.get("theta", 1.0)),
    )


def measure_to_json(measure: WeightedMeasure) -> dict:
    return {"weight_exponent": float(measure.weight_exponent)}


def measure_from_json(data: dict) -> WeightedMeasure:
    return WeightedMeasure(as_fraction(data.get("weight_exponent", 0)))


def domain_to_json(domain: RadialDomain) -> dict:
    data: dict = {"kind": domain.kind.value, "n": domain.n}
    if domain.r_in is not None:
        data["r_in"] = domain.r_in
    if domain.r_out is not None:
        data["r_out"] = domain.r_out
    if domain.truncation_radius is not None:
        data["r_max"] = domain.truncation_radius
    return data


def domain_from_json(data: dict) -> RadialDomain:
    return RadialDomain(
        kind=DomainKind(data["kind"]),
        n=int(data["n"]),
        r_in=float(data["r_in"]) if data.get("r_in") is not None else None,
        r_out=float(data["r_out"]) if data.get("r_out") is not None else None,
        truncation_radius=float(data["r_max"]) if data.get("r_max") is not None else None,
    )


def threshold_report_to_json(report: ThresholdReport) -> dict:
    return {
        "p_star": format_fraction(report.p_star),
        "q_star": format_fraction(report.q_star),
        "w": format_fraction(report.weight_exponent),
        "j": report.derivative_order,
        "hilbert_viable": report.hilbert_viable,
    }


def threshold_report_from_json(data: dict) -> ThresholdReport:
    p_star = parse_fraction(data["p_star"])
    if p_star is None:
        raise ValueError("p_star must be a finite rational")
    return ThresholdReport(
        p_star=p_star,
        q_star=parse_fraction(data["q_star"]),
        weight_exponent=parse_fraction(data["w"]) or Fraction(0),
        derivative_order=int(data["j"]),
    )


def grid_function_to_json(f: GridFunction, measure: WeightedMeasure | None = None) -> dict:
    data: dict = {
        "n": f.n,
        "box": [[lo, hi] for lo, hi in zip(f.lo, f.hi)],
        "shape": list(f.shape),
        "values": f.values.reshape(-1, 1 << f.n).tolist(),
    }
    if measure is not None:
        data["weight"] = float(measure.weight_exponent)
    return data


def grid_function_from_json(data: dict) -> tuple[GridFunction, WeightedMeasure | None]:
    n = int(data["n"])
    box = data["box"]
    shape = tuple(int(s) for s in data["shape"])
    values = np.asarray(data["values"], dtype=float).reshape(*shape, 1 << n)
    grid = GridFunction(
        n=n,
        lo=tuple(float(b[0]) for b in box),
        hi=tuple(float(b[1]) for b in box),
        shape=shape,
        values=values,
    )
    weight = data.get("weight")
    measure = WeightedMeasure(as_fraction(weight)) if weight is not None else None
    return grid, measure


def save_grid_function(path, f: GridFunction, measure: WeightedMeasure | None = None) -> None:
    with open(path, "w") as handle:
        json.dump(grid_function_to_json(f, measure), handle)


def load_grid_function(path) -> tuple[GridFunction, WeightedMeasure | None]:
    with open(path) as handle:
        return grid_function_from_json(json.load(handle))


SCAN_CSV_COLUMNS = ("q", "p", "kernel_norm", "f_norm", "product")


def scan_table_to_csv(table: ScanTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCAN_CSV_COLUMNS)
    for row in table.rows:
        writer.writerow(
            [repr(row.q), repr(row.p), repr(row.kernel_norm), repr(row.f_norm), repr(row.product)]
        )
    return buffer.getvalue()


def scan_table_to_json(table: ScanTable) -> dict:
    return {
        "q_star": table.q_star,
        "limit": table.limit,
        "rows": [
            {
                "q": row.q,
                "p": row.p,
                "kernel_norm": row.kernel_norm,
                "f_norm": row.f_norm,
                "product": row.product,
            }
            for row in table.rows
        ],
    }

"""Bit-stable report formatting: JSON, CSV, OEIS b-file and aligned text."""

import csv
import io
import json
from dataclasses import asdict
from fractions import Fraction

from . import CheckResult, EigenSystem, ModuliPoint, ThresholdVerdict, VerifyReport
from .exactnum import RatMatrix, RatPolynomial, format_polynomial


def format_fraction(x) -> str:
    """Reduced "p/q", or "p" when the denominator is 1."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def jsonable(obj):
    """Integers stay integers, other rationals become "p/q" strings, containers recurse."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else format_fraction(obj)
    if isinstance(obj, RatPolynomial):
        return [jsonable(c) for c in obj.coeffs]
    if isinstance(obj, RatMatrix):
        return [[jsonable(e) for e in row] for row in obj.to_rows()]
    if isinstance(obj, dict):
        return {str(key): jsonable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(v) for v in items]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_json(k: int | None, N: int | None, data, anchors: list[str]) -> str:
    payload = {"k": k, "N": N, "data": jsonable(data), "anchors": list(anchors)}
    return json.dumps(payload, indent=2)


def format_csv(rows: list[dict], headers: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=headers, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({h: _cell(row.get(h)) for h in headers})
    return buf.getvalue()


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        return format_fraction(value)
    return str(value)


def format_bfile(sequence: list[int], offset: int = 0) -> str:
    """One "index value" line per term."""
    return "".join(f"{offset + i} {v}\n" for i, v in enumerate(sequence))


def _vector(values) -> str:
    return "[" + ", ".join(format_fraction(v) for v in values) + "]"


def format_matrix(m: RatMatrix) -> str:
    cells = [[format_fraction(e) for e in row] for row in m.to_rows()]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("  " + " ".join(c.rjust(width) for c in row) for row in cells)


def format_spectrum(k: int, N: int, pi_scaled: list[int], eigenvalues: list[Fraction]) -> str:
    lines = [f"=== Holte spectrum k={k} N={N} ==="]
    lines.append(f"  pi * {k}!      {_vector(pi_scaled)}")
    lines.append(f"  eigenvalues  {_vector(eigenvalues)}")
    return "\n".join(lines)


def format_eigensystem(system: EigenSystem, scale: int) -> str:
    """One row per j: scaled u_j, v_j and Q_j."""
    lines = [f"=== Biorthogonal system k={system.k} ==="]
    header = f"  {'j':>2}  {f'{scale}*u_j':<28}  {'v_j':<32}  Q_j"
    lines.append(header)
    for j in range(system.k):
        u = _vector(scale * x for x in system.left[j])
        v = _vector(system.right[j])
        q = format_polynomial(system.quotients[j])
        lines.append(f"  {j:>2}  {u:<28}  {v:<32}  {q}")
    lines.append(f"  c_kj         {_vector(system.constants)}")
    return "\n".join(lines)


def format_holte(k: int, N: int, count: RatMatrix, facts: dict) -> str:
    lines = [f"=== Holte count matrix k={k} N={N} ===", format_matrix(count), ""]
    for key, value in facts.items():
        lines.append(f"  {key}: {_text_value(value)}")
    return "\n".join(lines)


def _text_value(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (Fraction, int)):
        return format_fraction(value)
    if isinstance(value, RatPolynomial):
        return format_polynomial(value, "z")
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_text_value(v) for v in value) + "]"
    return str(value)


def format_sequence(sequence: list[int]) -> str:
    return " ".join(str(v) for v in sequence)


def threshold_data(verdict: ThresholdVerdict) -> dict:
    data = asdict(verdict)
    data["charpoly"] = verdict.charpoly
    data["parameters"] = dict(verdict.parameters)
    return data


def format_threshold(verdict: ThresholdVerdict) -> str:
    lines = [f"=== Threshold: {verdict.kind} (d={verdict.d}) ==="]
    if verdict.charpoly is not None:
        lines.append(f"  chi: {format_polynomial(verdict.charpoly, 'lambda')}")
    for key, value in verdict.parameters.items():
        lines.append(f"  {key}: {_text_value(value)}")
    if verdict.h1 is not None:
        lines.append(f"  H1 simple spectrum: {_text_value(verdict.h1)}")
        lines.append(f"  H2 non-vanishing residues: {_text_value(verdict.h2)}")
        lines.append(f"  reduced denominator degree: {verdict.reduced_degree}")
    for note in verdict.notes:
        lines.append(f"  note: {note}")
    return "\n".join(lines)


MODULI_HEADERS = ["N", "d", "status", "g", "t"]


def moduli_rows(points: list[ModuliPoint]) -> list[dict]:
    return [{"N": p.N, "d": p.d, "status": p.status,
             "g": p.witness[0] if p.witness else None,
             "t": p.witness[1] if p.witness else None} for p in points]


def format_moduli(points: list[ModuliPoint]) -> str:
    """Grid with '#' achievable, 'o' AM-GM-only excluded, '.' below AM-GM."""
    marks = {"Achievable": "#", "AMGMOnlyExcluded": "o", "BelowAMGM": "."}
    by_row: dict[int, list[ModuliPoint]] = {}
    for p in points:
        by_row.setdefault(p.N, []).append(p)
    d_max = max((p.d for p in points), default=0)
    lines = ["   N | d=0.." + str(d_max)]
    for N in sorted(by_row):
        row = "".join(marks[p.status] for p in sorted(by_row[N], key=lambda p: p.d))
        lines.append(f"  {N:>2} | {row}")
    return "\n".join(lines)


def _check_line(c: CheckResult) -> str:
    where = " ".join(f"{key}={value}" for key, value in (("k", c.k), ("N", c.N)) if value is not None)
    line = f"  {c.status:4s}  [{c.anchor}] {c.name}"
    if where:
        line += f" ({where})"
    if c.detail:
        line += f": {c.detail}"
    return line


def format_verify(report: VerifyReport) -> str:
    lines = [f"=== Verify: k <= {report.grid_kmax}, N in {report.grid_bases} ==="]
    lines.extend(_check_line(c) for c in report.checks)
    counts = {s: sum(1 for c in report.checks if c.status == s) for s in ("PASS", "FAIL", "SKIP")}
    lines.append("")
    lines.append(f"=== {'OK' if report.ok else 'FAILED'}: "
                 f"{counts['PASS']} passed, {counts['FAIL']} failed, {counts['SKIP']} skipped ===")
    return "\n".join(lines)


VERIFY_HEADERS = ["name", "anchor", "status", "k", "N", "detail"]


def verify_rows(report: VerifyReport) -> list[dict]:
    return [asdict(c) for c in report.checks]

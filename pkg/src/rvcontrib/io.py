"""CSV ingestion and report serialization.

Report files are JSON. Floats are written with 17 significant digits so
they read back bit-exactly; see ``docs/report-schema.md`` for the layout.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from .analysis import AnalysisReport
from .errors import DuplicateName, InvalidMatrix, MissingValue, ParseError, RaggedRow
from .matrix import DataMatrix
from .metrics import ContributionProfile
from .permutation import TestResult

REPORT_FORMAT = "rvcontrib-report/1"

MISSING_TOKENS = frozenset({"", "na", "nan", "n/a", "null", "none", "."})


def load_matrix_csv(path) -> DataMatrix:
    """Read a numeric matrix from a CSV file with a header row.

    If the first header cell is ``id`` that column supplies the row ids;
    otherwise rows are numbered from 1. Blank lines are ignored. Line and
    column numbers in errors are 1-based and refer to the file.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8-sig") as fh:
        rows = [(i, row) for i, row in enumerate(csv.reader(fh), start=1) if row]
    if not rows:
        raise ParseError("file is empty", path=path)

    header_line, header = rows[0]
    header = [h.strip() for h in header]
    has_ids = header[0] == "id"
    names = header[1:] if has_ids else header
    offset = 1 if has_ids else 0
    seen = {}
    for j, name in enumerate(header):
        if name in seen:
            raise DuplicateName(f"duplicate column name {name!r}", path=path, row=header_line, col=j + 1)
        seen[name] = j
    if not names:
        raise ParseError("header has no data columns", path=path, row=header_line)

    width = len(header)
    row_ids, values, id_seen = [], [], set()
    for line, row in rows[1:]:
        if len(row) != width:
            raise RaggedRow(f"expected {width} fields, found {len(row)}", path=path, row=line)
        if has_ids:
            rid = row[0].strip()
            if rid in id_seen:
                raise DuplicateName(f"duplicate row id {rid!r}", path=path, row=line, col=1)
            id_seen.add(rid)
            row_ids.append(rid)
        out = []
        for j, cell in enumerate(row[offset:], start=offset + 1):
            token = cell.strip()
            if token.lower() in MISSING_TOKENS:
                raise MissingValue(f"missing value {cell!r}", path=path, row=line, col=j)
            try:
                v = float(token)
            except ValueError:
                raise ParseError(f"cannot parse {cell!r} as a number", path=path, row=line, col=j) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite value {cell!r}", path=path, row=line, col=j)
            out.append(v)
        values.append(out)
    if not has_ids:
        row_ids = [str(i + 1) for i in range(len(values))]
    try:
        return DataMatrix(np.array(values, dtype=np.float64).reshape(len(values), len(names)),
                          tuple(row_ids), tuple(names))
    except InvalidMatrix as exc:
        raise InvalidMatrix(f"{path}: {exc}") from None


def write_matrix_csv(m: DataMatrix, path, with_ids: bool = True) -> None:
    """Write ``m`` as CSV; floats use ``repr`` so they read back exactly."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow((["id"] if with_ids else []) + list(m.col_names))
        for rid, row in zip(m.row_ids, m.values):
            w.writerow(([rid] if with_ids else []) + [repr(float(v)) for v in row])


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


# -- report tree -------------------------------------------------------------

def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            raise ValueError(f"cannot serialize non-finite value {v}")
        return format(v, "#.17g")
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _dump(obj, depth=0) -> str:
    pad = "  " * (depth + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_dump(v, depth + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * depth + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_scalar(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + _dump(v, depth + 1) for v in seq) + "\n" + "  " * depth + "]"
    return _scalar(obj)


def report_to_tree(report: AnalysisReport) -> dict:
    t, prof = report.test, report.profile
    return {
        "format": REPORT_FORMAT,
        "test": {
            "grid": list(t.grid),
            "observed": [float(v) for v in t.observed],
            "p_values": [float(v) for v in t.p_values],
            "alpha_m": t.alpha_m,
            "aspc_p": float(t.aspc_p),
            "n_perms": t.n_perms,
        },
        "profile": {
            "alpha": prof.alpha,
            "variable_names": list(prof.variable_names),
            "contributions": [float(v) for v in prof.contributions],
            "threshold": prof.threshold,
            "flagged": list(prof.flagged),
            "flagged_names": prof.flagged_names,
        },
        "response_names": list(report.response_names),
        "per_response": {k: [float(v) for v in vec] for k, vec in report.per_response.items()},
        "provenance": report.provenance,
    }


def report_from_tree(tree: dict) -> AnalysisReport:
    if tree.get("format") != REPORT_FORMAT:
        raise ValueError(f"unsupported report format {tree.get('format')!r}")
    t = tree["test"]
    test = TestResult(
        grid=tuple(t["grid"]),
        observed=tuple(float(v) for v in t["observed"]),
        p_values=tuple(float(v) for v in t["p_values"]),
        alpha_m=int(t["alpha_m"]),
        aspc_p=float(t["aspc_p"]),
        n_perms=int(t["n_perms"]),
    )
    p = tree["profile"]
    profile = ContributionProfile(
        int(p["alpha"]),
        np.array(p["contributions"], dtype=np.float64),
        tuple(p["variable_names"]),
        None if p["threshold"] is None else float(p["threshold"]),
    )
    per_response = {k: np.array(v, dtype=np.float64) for k, v in tree["per_response"].items()}
    return AnalysisReport(test, profile, per_response, tuple(tree["response_names"]), tree["provenance"])


def dumps_report(report: AnalysisReport) -> str:
    return _dump(report_to_tree(report)) + "\n"


def write_report(report: AnalysisReport, path) -> None:
    """Serialize ``report`` to ``path`` as JSON."""
    text = dumps_report(report)
    tmp = Path(str(path) + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def read_report(path) -> AnalysisReport:
    with open(path, encoding="utf-8") as fh:
        return report_from_tree(json.load(fh))

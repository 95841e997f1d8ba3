"""Writers for the report files and the pairs reader used by ``analyze``.

Every text file starts with ``#`` comment lines naming the tool version and
echoing the run configuration as sorted, compact JSON. JSON files carry the
same echo under a ``"config"`` key. Floats are written with ``repr`` so files
round-trip exactly and are byte-identical across re-runs.
"""

from __future__ import annotations

import csv
import io
import json
import os
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

from . import __version__
from .analysis import CountFactorPairs, RegressionSummary
from .dataset import DataError
from .model_selection import CvCurve
from .screening import ScreeningReport

TOOL = "sparsescreen"


def header_lines(config: Mapping[str, object]) -> str:
    echo = json.dumps(dict(config), sort_keys=True, separators=(",", ":"))
    return f"# {TOOL} {__version__}\n# config: {echo}\n"


def _fmt(x) -> str:
    return repr(float(x))


def write_text(path: str, text: str, overwrite: bool = False) -> None:
    if os.path.exists(path) and not overwrite:
        raise FileExistsError(f"{path} exists; pass --overwrite to replace it")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv(rows: Iterable[Sequence[object]], delimiter: str = ",") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def render_table(config, row_ids, names, values, id_header="unit") -> str:
    rows: List[List[str]] = [[id_header, *names]]
    for uid, row in zip(row_ids, values):
        rows.append([uid, *(_fmt(v) for v in row)])
    return header_lines(config) + _csv(rows)


def render_report_csv(report: ScreeningReport, config) -> str:
    rows = [["response", "local_factor", "lambda", "rule", "n_nonzero", "selected_predictors"]]
    for r in report.per_response:
        rows.append([
            r.response_name,
            "" if r.local_factor is None else str(r.local_factor),
            _fmt(r.lambda_selected),
            r.rule_used,
            str(r.n_nonzero),
            ";".join(r.selected_names),
        ])
    return header_lines(config) + _csv(rows)


def render_predictor_counts(report: ScreeningReport, config) -> str:
    rows = [["predictor", "count"]]
    rows += [[name, str(count)] for name, count in report.predictor_counts.items()]
    return header_lines(config) + _csv(rows)


def render_report_json(report: ScreeningReport, config) -> str:
    doc = {
        "tool": TOOL,
        "version": __version__,
        "config": dict(config),
        "excluded_predictors": [list(e) for e in report.excluded_predictors],
        "responses": [
            {
                "response": r.response_name,
                "local_factor": r.local_factor,
                "lambda": r.lambda_selected,
                "rule": r.rule_used,
                "seed": r.seed,
                "n_nonzero": r.n_nonzero,
                "converged": r.converged,
                "intercept": r.intercept,
                "kkt_max_violation": r.kkt_max_violation,
                "note": r.note,
                "coefficients": [
                    {"predictor": name, "raw": raw, "standardized": std}
                    for name, raw, std in r.selected
                ],
            }
            for r in report.per_response
        ],
        "predictor_counts": report.predictor_counts,
        "totals": {
            "sum_n_nonzero": report.total_selected,
            "sum_predictor_counts": sum(report.predictor_counts.values()),
        },
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def render_cv_curve(curve: CvCurve, config) -> str:
    rows = [["lambda", "mean_error", "std_error"]]
    for lam, m, s in zip(curve.lambdas, curve.mean_error, curve.std_error):
        rows.append([_fmt(lam), _fmt(m), _fmt(s)])
    return header_lines(config) + _csv(rows, delimiter="\t")


def render_summary_json(summary: RegressionSummary, config) -> str:
    doc = {"tool": TOOL, "version": __version__, "config": dict(config)}
    doc.update(summary.to_dict())
    return json.dumps(doc, indent=2) + "\n"


def render_figure1(pairs: CountFactorPairs, config) -> str:
    rows = [["local_factor", "n_nonzero"]]
    rows += [[str(f), str(c)] for f, c, _ in pairs.pairs]
    return header_lines(config) + _csv(rows, delimiter="\t")


def read_pairs(path: str) -> CountFactorPairs:
    """Read ``local_factor``/``n_nonzero`` columns from a CSV.

    Accepts both the Table-1 style fixture (``response,local_factor,n_nonzero``)
    and a ``report.csv`` written by ``screen``. Comment lines are skipped.
    """
    if not os.path.isfile(path):
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    fields = reader.fieldnames or []
    for col in ("local_factor", "n_nonzero"):
        if col not in fields:
            raise DataError(f"{path}: missing column {col!r}")
    pairs = []
    for i, row in enumerate(reader):
        name = row.get("response") or f"row{i + 1}"
        try:
            pairs.append((int(row["local_factor"]), int(row["n_nonzero"]), name))
        except (TypeError, ValueError):
            raise DataError(f"{path}: non-integer factor/count for {name!r}") from None
    return CountFactorPairs(tuple(pairs))

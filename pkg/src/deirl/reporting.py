"""Report persistence: conditioning tables, iteration series, and figures.

The delimited outputs mirror the conditioning-table layout (algorithm,
loop, peak and minimum condition number, final gain gap) with condition
numbers printed at two decimals; the JSON carries full precision plus the
value and gain matrices of every iteration. Field order is fixed, so a
given configuration reproduces its files byte for byte. Figures render
the per-iteration condition-number series alongside the delimited output.
"""

import json
import os
from dataclasses import asdict

import numpy as np

TABLE_HEADER = "algorithm,loop,max_kappa,min_kappa,final_gain_gap"
SERIES_HEADER = "algorithm,loop,iteration,kappa"


def format_table_csv(report):
    if not report.records:
        raise ValueError("report %r has no records" % (report.name,))
    lines = [TABLE_HEADER]
    for row in report.rows():
        lines.append("%s,%d,%.2f,%.2f,%.3e"
                     % (row["algorithm"], row["loop"], row["kappa_max"],
                        row["kappa_min"], row["final_gain_gap"]))
    return "\n".join(lines) + "\n"


def format_series_csv(report):
    if not report.records:
        raise ValueError("report %r has no records" % (report.name,))
    lines = [SERIES_HEADER]
    for rec in report.records:
        for step in rec.steps:
            lines.append("%s,%d,%d,%s" % (rec.algorithm, rec.loop_index,
                                          step.iteration, repr(step.kappa)))
    return "\n".join(lines) + "\n"


def _matrix(M):
    return np.asarray(M, dtype=float).tolist()


def _jsonable(value):
    # canonical JSON types so an emitted report re-ingests comparison-equal
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    return value


def report_to_dict(report):
    """Full-precision nested structure with every iterate's matrices."""
    if not report.records:
        raise ValueError("report %r has no records" % (report.name,))
    records = []
    for rec in report.records:
        records.append({
            "algorithm": rec.algorithm,
            "loop": rec.loop_index,
            "kappa_max": rec.kappa_max,
            "kappa_min": rec.kappa_min,
            "final_gain_gap": rec.final_gap,
            "K_final": _matrix(rec.K_final),
            "steps": [{"iteration": s.iteration,
                       "kappa": s.kappa,
                       "residual": s.residual,
                       "gap_to_reference": s.gap_to_kleinman,
                       "P": _matrix(s.P),
                       "K": _matrix(s.K),
                       "K_next": _matrix(s.K_next)}
                      for s in rec.steps],
        })
    return {"study": report.name,
            "config": _jsonable(asdict(report.config)),
            "records": records,
            "timings": {k: float(v) for k, v in sorted(report.timings.items())}}


def load_report(path):
    """Re-ingest an emitted JSON report as the same nested structure."""
    with open(path) as fh:
        return json.load(fh)


def render_kappa_figure(report, path):
    """Condition number against iteration, one line per record."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    for rec in report.records:
        ax.semilogy(range(len(rec.kappa_series)), rec.kappa_series,
                    marker="o", markersize=3.5,
                    label="%s loop %d" % (rec.algorithm, rec.loop_index))
    ax.set_xlabel("iteration")
    ax.set_ylabel("condition number")
    ax.set_title("%s conditioning" % report.name)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def emit_report(report, outdir, formats=("csv", "json"), figures=True):
    """Write the report files under outdir; returns the paths written."""
    if not report.records:
        raise ValueError("report %r has no records" % (report.name,))
    os.makedirs(outdir, exist_ok=True)
    written = []

    def _write(name, text):
        path = os.path.join(outdir, name)
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as err:
            raise OSError("failed writing report file %s: %s" % (path, err))
        written.append(path)
        return path

    if "csv" in formats:
        _write("%s_table.csv" % report.name, format_table_csv(report))
        _write("%s_series.csv" % report.name, format_series_csv(report))
    if "json" in formats:
        _write("%s_report.json" % report.name,
               json.dumps(report_to_dict(report), indent=2) + "\n")
    if figures:
        written.append(render_kappa_figure(
            report, os.path.join(outdir, "%s_kappa.png" % report.name)))
    return written

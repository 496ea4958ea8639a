"""CSV emission, plain-text reports, and figure rendering for sweep tables.

CSV format: header row ``h,lhs,rhs,ratio,abs_err``, comma separator,
decimal point, scientific notation with 12 significant digits, UTF-8, LF
line endings.  Metadata lines start with '#' and round-trip through the
reader.  The report path renders a matplotlib figure next to every table
it writes.
"""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import ConfigError  # noqa: E402
from .harness import ConvergenceTable, extrapolate  # noqa: E402

CSV_COLUMNS = ("h", "lhs", "rhs", "ratio", "abs_err")


def _fmt(x: float) -> str:
    return f"{x:.11e}"  # 12 significant digits


def table_to_csv_text(table: ConvergenceTable) -> str:
    out = io.StringIO()
    out.write(f"# experiment = {table.experiment}\n")
    out.write(",".join(CSV_COLUMNS) + "\n")
    for r in table.rows:
        out.write(",".join(_fmt(v) for v in
                           (r.h, r.lhs, r.rhs, r.ratio, r.abs_err)) + "\n")
    return out.getvalue()


def write_table_csv(table: ConvergenceTable, path) -> Path:
    path = Path(path)
    path.write_text(table_to_csv_text(table), encoding="utf-8", newline="\n")
    return path


def read_table_csv(path) -> ConvergenceTable:
    """Re-read an emitted CSV; numeric content round-trips losslessly at
    the emitted 12 significant digits."""
    path = Path(path)
    experiment = path.stem
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "experiment" in line and "=" in line:
                experiment = line.split("=", 1)[1].strip()
            continue
        if line.startswith("h,"):
            if line != ",".join(CSV_COLUMNS):
                raise ConfigError(f"{path}: unexpected CSV header {line!r}")
            continue
        parts = line.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise ConfigError(f"{path}: malformed row {line!r}")
        rows.append([float(p) for p in parts])
    table = ConvergenceTable(experiment=experiment,
                             metadata={"source": str(path)})
    for h, lhs, rhs, ratio, abs_err in rows:
        table.add_row(h, lhs, rhs, certificates={"source": str(path)})
    return table


def render_table_figure(table: ConvergenceTable, path) -> Path:
    """Two-panel convergence figure: values against h, and the error with
    the fitted rate on log-log axes."""
    path = Path(path)
    h = table.h
    lhs = table.lhs
    rhs = table.rhs
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.semilogx(h, lhs, "o-", label="model spectrum")
    ax1.semilogx(h, rhs, "s--", label="semiclassical coefficient")
    ax1.set_xlabel("h")
    ax1.set_ylabel("value")
    ax1.invert_xaxis()
    ax1.legend(fontsize=8)
    ax1.set_title(table.experiment)

    err = abs(lhs - rhs)
    plot2 = ax2.loglog if np.any(err > 0) else ax2.plot
    plot2(h, err, "o-", label="|lhs - rhs|")
    if len(table.rows) >= 3 and err[-1] > 0:
        fit = extrapolate(table)
        if fit.fitted_rate is not None:
            ref = err[-1] * (h / h[-1]) ** fit.fitted_rate
            plot2(h, ref, ":", label=f"h^{fit.fitted_rate:.2f} (fit)")
    ax2.set_xlabel("h")
    ax2.set_ylabel("error")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def format_report(table: ConvergenceTable, checks=None,
                  with_certificates=False) -> str:
    """Plain-text report with per-check pass/fail lines."""
    lines = [f"experiment: {table.experiment}",
             f"rows: {len(table.rows)}"]
    for r in table.rows:
        lines.append(
            f"  h={_fmt(r.h)}  lhs={_fmt(r.lhs)}  rhs={_fmt(r.rhs)}  "
            f"ratio={r.ratio:.6f}  abs_err={_fmt(r.abs_err)}"
        )
        if with_certificates:
            certs = ", ".join(f"{k}={v}" for k, v in r.certificates.items())
            lines.append(f"    certificates: {certs}")
    if len(table.rows) >= 3:
        fit = extrapolate(table)
        rate = "n/a" if fit.fitted_rate is None else f"{fit.fitted_rate:.4f}"
        lines.append(f"extrapolated limit: {_fmt(fit.limit_estimate)} "
                     f"(rate {rate}, fit residual {fit.residual:.3e})")
    flags = table.error_trend_flags(noise_floor=0.0)
    if flags:
        lines.append(f"warning: error grew at rows {flags} "
                     f"(noise or pre-asymptotic regime)")
    undiff = table.metadata.get("undifferenced_rows")
    if undiff:
        lines.append("secondary (undifferenced) comparison:")
        for h, lhs, rhs in undiff:
            lines.append(f"  h={_fmt(h)}  lhs={_fmt(lhs)}  rhs={_fmt(rhs)}")
    for name, ok, detail in checks or ():
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return "\n".join(lines) + "\n"


def write_report(table: ConvergenceTable, out_dir, stem=None, checks=None):
    """Write CSV + text report + figure for a table; returns the paths.

    The text report carries the per-row truncation certificates; the CSV
    keeps the fixed five-column schema.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = stem or table.experiment
    csv_path = write_table_csv(table, out_dir / f"{stem}.csv")
    txt_path = out_dir / f"{stem}.txt"
    txt_path.write_text(format_report(table, checks, with_certificates=True),
                        encoding="utf-8")
    fig_path = render_table_figure(table, out_dir / f"{stem}.png")
    return csv_path, txt_path, fig_path

"""CSV and gnuplot-script output for scenario runs.

Nothing is plotted in-process: every figure is a plain-text gnuplot script
next to the CSV files it reads, so outputs stay diff-able.
"""

from __future__ import annotations

from dataclasses import fields
from pathlib import Path
from typing import Mapping

import numpy as np

from .scenario import RunResult, TimeSeriesRecord

CSV_FIELDS = tuple(f.name for f in fields(TimeSeriesRecord))


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.12g}"


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def emit_csv(records, path) -> Path:
    """Header naming every record field, then one row per record."""
    lines = [",".join(CSV_FIELDS)]
    lines += [",".join(_fmt(getattr(r, name)) for name in CSV_FIELDS) for r in records]
    return _write(Path(path), "\n".join(lines) + "\n")


def emit_snapshot_csv(x, u, path) -> Path:
    lines = ["x,u"] + [f"{_fmt(xi)},{_fmt(ui)}" for xi, ui in zip(x, u)]
    return _write(Path(path), "\n".join(lines) + "\n")


def _time_label(t: float) -> str:
    return f"{t:g}"


def _col(name: str) -> int:
    return CSV_FIELDS.index(name) + 1


_COLORS = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd")


def _color(i: int) -> str:
    return f"lc rgb '{_COLORS[i % len(_COLORS)]}'"


def _timeseries_script(stem: str, csvs: Mapping[str, str]) -> str:
    out = [
        "set datafile separator ','",
        "set terminal pngcairo size 1200,500",
        f"set output '{stem}.png'",
        "set multiplot layout 1,2",
        "set xlabel 't [s]'",
        "set title 'V (solid) and B (dashed)'",
    ]
    curves = []
    for i, (label, csv) in enumerate(csvs.items()):
        style = _color(i)
        curves.append(f"'{csv}' using {_col('time')}:{_col('V')} with lines {style} dt 1 title 'V {label}'")
        curves.append(f"'{csv}' using {_col('time')}:{_col('B')} with lines {style} dt 2 title 'B {label}'")
    out.append("plot " + ", \\\n     ".join(curves))
    out.append("set title 'boundary controls (solid: omega_a, dashed: omega_b)'")
    curves = []
    for i, (label, csv) in enumerate(csvs.items()):
        style = _color(i)
        curves.append(f"'{csv}' using {_col('time')}:{_col('omega_a')} with lines {style} dt 1 title 'omega_a {label}'")
        curves.append(f"'{csv}' using {_col('time')}:{_col('omega_b')} with lines {style} dt 2 title 'omega_b {label}'")
    out.append("plot " + ", \\\n     ".join(curves))
    out.append("unset multiplot")
    return "\n".join(out) + "\n"


def _snapshot_script(stem: str, t: float, csvs: Mapping[str, str]) -> str:
    curves = [
        f"'{csv}' using 1:2 with lines {_color(i)} dt {i + 1} title '{label}'"
        for i, (label, csv) in enumerate(csvs.items())
    ]
    return "\n".join([
        "set datafile separator ','",
        "set terminal pngcairo size 600,450",
        f"set output '{stem}.png'",
        f"set title 't = {_time_label(t)} s'",
        "set xlabel 'x'",
        "set ylabel 'u'",
        "plot " + ", \\\n     ".join(curves),
    ]) + "\n"


def emit_plots(runs, path_prefix, snapshot_times=None) -> list[Path]:
    """Write CSV data and gnuplot scripts for one run or several overlaid runs.

    ``runs`` is a RunResult or a mapping label -> RunResult (labels default to
    the run's mode).  With several runs each script draws one curve per run.
    ``snapshot_times=None`` uses every snapshot the runs captured; an empty
    sequence emits time-series plots only.
    """
    if isinstance(runs, RunResult):
        runs = {runs.config.mode: runs}
    prefix = Path(path_prefix)
    written: list[Path] = []

    def stem(mode, what, ext):
        # snapshot labels like "0.3" contain dots, so no Path.with_suffix
        return prefix.parent / f"{prefix.name}_{mode}_{what}.{ext}"

    series = {}
    for label, run in runs.items():
        path = emit_csv(run.records, stem(label, "timeseries", "csv"))
        written.append(path)
        series[label] = path.name
    if snapshot_times is None:
        times = sorted({t for run in runs.values() for t in run.snapshots})
    else:
        times = sorted(snapshot_times)

    snaps: dict[float, dict[str, str]] = {t: {} for t in times}
    for label, run in runs.items():
        for t in times:
            if t not in run.snapshots:
                continue
            x, u = run.snapshots[t]
            path = emit_snapshot_csv(x, u, stem(label, f"snapshot_{_time_label(t)}", "csv"))
            written.append(path)
            snaps[t][label] = path.name

    tag = "+".join(runs)
    ts = stem(tag, "timeseries", "plt")
    written.append(_write(ts, _timeseries_script(ts.name[:-4], series)))
    for t in times:
        if snaps[t]:
            sp = stem(tag, f"snapshot_{_time_label(t)}", "plt")
            written.append(_write(sp, _snapshot_script(sp.name[:-4], t, snaps[t])))
    return written

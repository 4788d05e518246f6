"""CSV tables and matplotlib plot scripts for experiment results."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable

from .experiments import ComplexityRow, TrialRecord

CSV_HEADER = ("method", "snr_db", "sigma_z_db", "delta_deg", "trial", "se_bits", "complexity", "seed")
COMPLEXITY_HEADER = ("method", "n_y", "n_z", "n_total", "complexity", "baseline_ratio")


def _num(x) -> str:
    # repr round-trips floats exactly
    if x is None:
        return ""
    return repr(x) if isinstance(x, float) else str(x)


def _write(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def format_csv(records: Iterable[TrialRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in sorted(records, key=TrialRecord.sort_key):
        writer.writerow([
            r.method, _num(float(r.snr_db)), _num(None if r.sigma_z_db is None else float(r.sigma_z_db)),
            _num(float(r.delta_deg)), r.trial, _num(float(r.se_bits)), _num(r.complexity), r.seed,
        ])
    return buf.getvalue()


def emit_csv(records: Iterable[TrialRecord], path) -> Path:
    """Write trial records (sorted) to ``path``; an empty table gives the header only."""
    path = Path(path)
    _write(path, format_csv(records))
    return path


def _parse_number(text: str):
    return int(text) if text.lstrip("-").isdigit() else float(text)


def read_csv(path) -> list[TrialRecord]:
    path = Path(path)
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if tuple(header or ()) != CSV_HEADER:
                raise ValueError(f"{path}: unexpected header {header}")
            return [
                TrialRecord(
                    method=row[0],
                    snr_db=float(row[1]),
                    sigma_z_db=float(row[2]) if row[2] else None,
                    delta_deg=float(row[3]),
                    trial=int(row[4]),
                    se_bits=float(row[5]),
                    complexity=_parse_number(row[6]),
                    seed=int(row[7]),
                )
                for row in reader
            ]
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc


def emit_complexity_csv(rows: Iterable[ComplexityRow], path) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPLEXITY_HEADER)
    for r in rows:
        writer.writerow([r.method, _num(r.n_y), _num(r.n_z), _num(r.n_total),
                         _num(r.complexity), _num(float(r.baseline_ratio))])
    path = Path(path)
    _write(path, buf.getvalue())
    return path


_SE_SCRIPT = '''\
"""Plot mean SE per method from {csv_name}."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path!r}
x_col, other_col = {x_col!r}, {other_col!r}
acc = defaultdict(list)
ref = defaultdict(list)
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        label = row["method"] + (f" @ {{row[other_col]}} dB" if row[other_col] else "")
        if row[x_col] == "":
            ref[label].append(float(row["se_bits"]))
        else:
            acc[label, float(row[x_col])].append(float(row["se_bits"]))

fig, ax = plt.subplots()
for label in sorted({{k for k, _ in acc}}):
    xs = sorted(x for k, x in acc if k == label)
    ax.plot(xs, [sum(acc[label, x]) / len(acc[label, x]) for x in xs], marker="o", label=label)
for label, values in sorted(ref.items()):
    ax.axhline(sum(values) / len(values), linestyle="--", color="k", label=label)
ax.set_xlabel({x_label!r})
ax.set_ylabel("mean SE [bit/s/Hz]")
ax.grid(True)
ax.legend()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''

_COMPLEXITY_SCRIPT = '''\
"""Plot model operation counts against the IRS size from {csv_name}."""
import csv
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else {csv_path!r}
series = defaultdict(list)
with open(path, newline="") as fh:
    for row in csv.DictReader(fh):
        series[row["method"]].append((float(row["n_total"]), float(row["complexity"])))

fig, ax = plt.subplots()
for method, pts in sorted(series.items()):
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=method)
ax.set_xlabel("IRS elements N")
ax.set_ylabel("model operations")
ax.set_yscale("log")
ax.grid(True)
ax.legend()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
'''


def emit_plot_script(csv_path, script_path, kind: str = "snr") -> Path:
    """Write a standalone matplotlib script plotting ``csv_path``.

    ``kind`` is ``"snr"`` (SE vs SNR), ``"sigma"`` (SE vs estimation noise)
    or ``"complexity"``.
    """
    csv_path = Path(csv_path)
    if kind == "complexity":
        text = _COMPLEXITY_SCRIPT.format(csv_name=csv_path.name, csv_path=str(csv_path))
    elif kind in ("snr", "sigma"):
        if kind == "snr":
            x_col, other_col, x_label = "snr_db", "sigma_z_db", "SNR [dB]"
        else:
            x_col, other_col, x_label = "sigma_z_db", "snr_db", "estimation noise variance [dB]"
        text = _SE_SCRIPT.format(csv_name=csv_path.name, csv_path=str(csv_path),
                                 x_col=x_col, other_col=other_col, x_label=x_label)
    else:
        raise ValueError(f"unknown plot kind {kind!r}")
    script_path = Path(script_path)
    _write(script_path, text)
    return script_path

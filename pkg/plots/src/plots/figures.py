"""Figure construction from the tracker's CSV outputs.

Four figure kinds, one canonical input file each:

  trajectories  truth.csv        ground-truth paths per target
  tracks        tracks.csv       estimated tracks colored by label
  ospa          ospa.csv         distance versus scan, per run and mean
  cardinality   cardinality.csv  mean estimate with a one-sigma band vs truth

Every path is drawn as a polyline with an unfilled circle at its first
point and an unfilled triangle at its last. Colors are keyed by a hash of
the track label, so a label keeps its color across runs, figures, and
processes. Rendering the same CSVs twice gives byte-identical images.
"""

import csv
import hashlib
import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import hsv_to_rgb
from matplotlib.figure import Figure

FIGURE_KINDS = ("trajectories", "tracks", "ospa", "cardinality")

KIND_INPUTS = {
    "trajectories": "truth.csv",
    "tracks": "tracks.csv",
    "ospa": "ospa.csv",
    "cardinality": "cardinality.csv",
}

_POINT_COLUMNS = ("run", "scan", "label_birth_time", "label_birth_index", "p_x", "p_y")
_CARDINALITY_COLUMNS = ("scan", "truth", "est_mean", "est_std")
_RUN_COLUMN = re.compile(r"run_\d+$")

START_MARKER = "o"
STOP_MARKER = "^"


class SchemaError(ValueError):
    """A CSV does not carry the documented header or cell types."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSV paths, output image path, figure kind."""

    inputs: tuple[str, ...]
    output: str
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"kind must be one of {FIGURE_KINDS}, got {self.kind!r}")
        inputs = tuple(str(p) for p in self.inputs)
        if len(inputs) != 1:
            raise ValueError(f"{self.kind} takes exactly one input CSV, got {len(inputs)}")
        object.__setattr__(self, "inputs", inputs)


def _read_table(path: Path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="", encoding="ascii") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise SchemaError(f"{path}: file not found") from None
    if not rows:
        raise SchemaError(f"{path.name}: empty file, no header")
    return rows[0], rows[1:]


def _check_columns(name: str, got: list[str], want: tuple[str, ...]) -> None:
    for column in want:
        if column not in got:
            raise SchemaError(f"{name}: missing column '{column}'")
    for column in got:
        if column not in want:
            raise SchemaError(f"{name}: unexpected column '{column}'")
    for position, (g, w) in enumerate(zip(got, want)):
        if g != w:
            raise SchemaError(
                f"{name}: column '{g}' in position {position}, expected '{w}'"
            )


def _cell(name: str, column: str, row_number: int, value: str, kind: type) -> float:
    try:
        return kind(value)
    except ValueError:
        raise SchemaError(
            f"{name}: column '{column}' row {row_number}: expected {kind.__name__}, got {value!r}"
        ) from None


def _label_color(birth_time: int, birth_index: int) -> tuple[float, float, float]:
    """Stable color from the label identity, not from encounter order."""
    digest = hashlib.blake2b(f"{birth_time}:{birth_index}".encode("ascii"), digest_size=8).digest()
    hue = int.from_bytes(digest[:4], "big") / 2.0**32
    return tuple(hsv_to_rgb((hue, 0.85, 0.80)))


def _read_points(path: Path) -> dict[tuple[int, int, int], list[tuple[int, float, float]]]:
    """Rows grouped into per-(run, label) paths, each sorted by scan."""
    header, rows = _read_table(path)
    _check_columns(path.name, header, _POINT_COLUMNS)
    paths: dict[tuple[int, int, int], list[tuple[int, float, float]]] = defaultdict(list)
    for i, row in enumerate(rows, start=1):
        if len(row) != len(_POINT_COLUMNS):
            raise SchemaError(f"{path.name}: row {i} has {len(row)} cells, expected {len(_POINT_COLUMNS)}")
        run = int(_cell(path.name, "run", i, row[0], int))
        scan = int(_cell(path.name, "scan", i, row[1], int))
        bt = int(_cell(path.name, "label_birth_time", i, row[2], int))
        bi = int(_cell(path.name, "label_birth_index", i, row[3], int))
        px = _cell(path.name, "p_x", i, row[4], float)
        py = _cell(path.name, "p_y", i, row[5], float)
        paths[(run, bt, bi)].append((scan, px, py))
    for pts in paths.values():
        pts.sort()
    return dict(paths)


def _point_figure(path: Path, title: str) -> Figure:
    fig, ax = plt.subplots(figsize=(6.4, 6.0), dpi=110)
    for (run, bt, bi), pts in sorted(_read_points(path).items()):
        xs = [p[1] for p in pts]
        ys = [p[2] for p in pts]
        color = _label_color(bt, bi)
        ax.plot(xs, ys, color=color, linewidth=1.3)
        ax.plot(
            xs[:1], ys[:1],
            linestyle="none", marker=START_MARKER,
            markerfacecolor="none", markeredgecolor=color, markersize=7,
        )
        ax.plot(
            xs[-1:], ys[-1:],
            linestyle="none", marker=STOP_MARKER,
            markerfacecolor="none", markeredgecolor=color, markersize=7,
        )
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, alpha=0.3)
    return fig


def _ospa_figure(path: Path) -> Figure:
    header, rows = _read_table(path)
    if not header or header[0] != "scan":
        offender = header[0] if header else "scan"
        raise SchemaError(f"{path.name}: expected column 'scan' first, got '{offender}'")
    if len(header) < 2 or header[1] != "mean_ospa":
        offender = header[1] if len(header) > 1 else "mean_ospa"
        raise SchemaError(f"{path.name}: expected column 'mean_ospa' second, got '{offender}'")
    for column in header[2:]:
        if not _RUN_COLUMN.match(column):
            raise SchemaError(f"{path.name}: unexpected column '{column}'")
    table = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows, start=1):
        if len(row) != len(header):
            raise SchemaError(f"{path.name}: row {i} has {len(row)} cells, expected {len(header)}")
        for j, column in enumerate(header):
            table[i - 1, j] = _cell(path.name, column, i, row[j], float)
    fig, ax = plt.subplots(figsize=(7.0, 4.2), dpi=110)
    if len(rows):
        scans = table[:, 0]
        for j in range(2, len(header)):
            ax.plot(scans, table[:, j], color="0.75", linewidth=0.8)
        ax.plot(scans, table[:, 1], color="#1f4e8c", linewidth=1.8, label="mean")
        ax.legend(loc="upper right")
    ax.set_xlabel("scan")
    ax.set_ylabel("OSPA (m)")
    ax.set_title("OSPA distance")
    ax.grid(True, alpha=0.3)
    return fig


def _cardinality_figure(path: Path) -> Figure:
    header, rows = _read_table(path)
    _check_columns(path.name, header, _CARDINALITY_COLUMNS)
    table = np.empty((len(rows), 4))
    for i, row in enumerate(rows, start=1):
        if len(row) != 4:
            raise SchemaError(f"{path.name}: row {i} has {len(row)} cells, expected 4")
        for j, column in enumerate(_CARDINALITY_COLUMNS):
            table[i - 1, j] = _cell(path.name, column, i, row[j], float)
    fig, ax = plt.subplots(figsize=(7.0, 4.2), dpi=110)
    if len(rows):
        scans, truth, mean, std = table.T
        ax.plot(scans, truth, color="black", linestyle="--", drawstyle="steps-post", label="truth")
        ax.fill_between(scans, mean - std, mean + std, color="#1f4e8c", alpha=0.2, linewidth=0)
        ax.plot(scans, mean, color="#1f4e8c", linewidth=1.6, label="estimate")
        ax.legend(loc="upper left")
    ax.set_xlabel("scan")
    ax.set_ylabel("cardinality")
    ax.set_title("Cardinality estimate")
    ax.grid(True, alpha=0.3)
    return fig


def build(spec: FigureSpec) -> Figure:
    """The figure for a spec, not yet written anywhere. Caller closes it."""
    path = Path(spec.inputs[0])
    if spec.kind == "trajectories":
        return _point_figure(path, "Ground truth trajectories")
    if spec.kind == "tracks":
        return _point_figure(path, "Estimated tracks")
    if spec.kind == "ospa":
        return _ospa_figure(path)
    return _cardinality_figure(path)


def render(spec: FigureSpec) -> Path:
    """Write the figure to spec.output and return that path."""
    fig = build(spec)
    try:
        out = Path(spec.output)
        if out.parent != Path(""):
            out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out)
    finally:
        plt.close(fig)
    return out

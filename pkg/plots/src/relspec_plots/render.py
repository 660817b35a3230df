"""Figure generation for relspec CSV/JSON artifacts.

Three one-shot plot kinds, each consuming exactly one relspec CLI
output schema:

    overlay    billiard compare CSV        two densities on shared axes,
                                           rel_L2 annotation from the sidecar
    staircase  billiard exact CSV          monotone spectral counting function
    levels     coulomb spectrum CSV        horizontal level diagram grouped by l

Rendering draws the CSV columns as they are; no smoothing, rescaling or
resampling happens here.  Exit codes: 0 success, 1 bad arguments,
missing files or a CSV whose header does not match the kind.
"""

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.fonttype"] = "none"  # keep annotation text as text

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["PlotJob", "SchemaError", "render", "main"]

_KINDS = ("overlay", "staircase", "levels")

_SCHEMAS = {
    "overlay": ["eps", "g_exact_broadened", "g_semiclassical"],
    "staircase": ["n1", "n2", "n3", "degeneracy", "eps", "E"],
    "levels": ["n", "l", "E_over_mc2"],
}


class SchemaError(Exception):
    """Input file does not match the schema the plot kind expects."""


@dataclass(frozen=True)
class PlotJob:
    """One rendering request: input data, optional sidecar, output figure."""

    kind: str
    csv_path: Path
    out_path: Path
    sidecar: Path | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SchemaError("unknown plot kind %r (expected one of %s)" % (self.kind, ", ".join(_KINDS)))
        if not Path(self.csv_path).is_file():
            raise SchemaError("input CSV not found: %s" % self.csv_path)
        if self.kind == "overlay":
            if self.sidecar is None:
                raise SchemaError("overlay needs --sidecar for the rel_L2 annotation")
            if not Path(self.sidecar).is_file():
                raise SchemaError("sidecar not found: %s" % self.sidecar)


def _read_columns(path, kind):
    """Parse the CSV into named float columns, enforcing the kind's header."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("%s is empty" % path)
        rows = list(reader)
    if header != _SCHEMAS[kind]:
        raise SchemaError(
            "%s has columns %s; kind %r expects %s"
            % (path, ",".join(header), kind, ",".join(_SCHEMAS[kind]))
        )
    if not rows:
        raise SchemaError("%s has a header but no data rows" % path)
    try:
        data = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError:
        raise SchemaError("%s contains a non-numeric cell" % path)
    if data.shape[1] != len(header):
        raise SchemaError("%s has ragged rows" % path)
    return {name: data[:, i] for i, name in enumerate(header)}


def _read_rel_l2(sidecar):
    try:
        payload = json.loads(Path(sidecar).read_text(encoding="utf-8"))
        return float(payload["results"]["rel_L2"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError):
        raise SchemaError("%s does not carry results.rel_L2" % sidecar)


def _draw_overlay(ax, cols, rel_l2):
    ax.plot(cols["eps"], cols["g_exact_broadened"], label="exact, broadened", lw=1.6)
    ax.plot(
        cols["eps"],
        cols["g_semiclassical"],
        label="semiclassical",
        lw=1.1,
        ls="--",
    )
    ax.set_xlabel("pseudoenergy")
    ax.set_ylabel("density of states")
    ax.legend(loc="upper left")
    ax.text(
        0.98,
        0.02,
        "rel_L2 = %.4f" % rel_l2,
        transform=ax.transAxes,
        ha="right",
        va="bottom",
    )


def _draw_staircase(ax, cols):
    eps = cols["eps"]
    counts = np.cumsum(cols["degeneracy"])
    # anchor the first step at zero so the counting function starts flat
    ax.step(np.concatenate(([eps[0]], eps)), np.concatenate(([0.0], counts)), where="post")
    ax.set_xlabel("pseudoenergy")
    ax.set_ylabel("level count")


def _draw_levels(ax, cols):
    l_vals = cols["l"].astype(int)
    for l in np.unique(l_vals):
        sel = l_vals == l
        e = cols["E_over_mc2"][sel]
        ax.hlines(e, l - 0.35, l + 0.35, lw=1.4)
    ax.set_xticks(np.unique(l_vals))
    ax.set_xlabel("l")
    ax.set_ylabel("E / mc^2")


def render(job: PlotJob):
    """Render one job to its output path and return the Figure."""
    cols = _read_columns(job.csv_path, job.kind)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        if job.kind == "overlay":
            _draw_overlay(ax, cols, _read_rel_l2(job.sidecar))
        elif job.kind == "staircase":
            _draw_staircase(ax, cols)
        else:
            _draw_levels(ax, cols)
        fig.tight_layout()
        fig.savefig(job.out_path)
    except Exception:
        plt.close(fig)
        raise
    return fig


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="relspec-plots",
        description="render a relspec CSV artifact as a figure",
    )
    parser.add_argument("kind", choices=_KINDS)
    parser.add_argument("csv_path", metavar="csv")
    parser.add_argument("--sidecar", default=None, help="JSON sidecar (overlay only)")
    parser.add_argument("-o", "--output", required=True, help="figure file to write")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; normalize
        return 0 if exc.code == 0 else 1
    try:
        job = PlotJob(
            kind=args.kind,
            csv_path=Path(args.csv_path),
            out_path=Path(args.output),
            sidecar=Path(args.sidecar) if args.sidecar is not None else None,
        )
        fig = render(job)
        plt.close(fig)
    except (SchemaError, OSError) as exc:
        print("relspec-plots: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Human-readable tables, delimited output, and figures for evaluation reports."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .annotations import EntityType
from .evaluation import EvalReport, Outcome

_COLUMNS = [
    "n",
    "ok",
    "orig%",
    "sub%",
    "other%",
    "M_R",
]


def _rows(report: EvalReport, label: str) -> list[tuple[str, EvalReport]]:
    rows = [(label, report)]
    if report.strata:
        rows.extend(report.strata.items())
    return rows


def _fmt_ratio(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.3f}"


def _fmt_pct(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.1f}"


def render_report_table(report: EvalReport, label: str = "all") -> str:
    """Aligned-column text: one row per report plus one per stratum."""
    rows = _rows(report, label)
    name_width = max(len("set"), *(len(name) for name, _ in rows))
    out = io.StringIO()

    header = f"{'set':<{name_width}}  " + "".join(f"{c:>8}" for c in _COLUMNS)
    out.write(header + "\n")
    out.write("-" * len(header) + "\n")
    for name, rep in rows:
        cells = [
            f"{rep.n_total:>8}",
            f"{rep.n_correct_on_original:>8}",
            f"{_fmt_pct(rep.percent[Outcome.ORIGINAL]):>8}",
            f"{_fmt_pct(rep.percent[Outcome.SUBSTITUTE]):>8}",
            f"{_fmt_pct(rep.percent[Outcome.OTHER]):>8}",
            f"{_fmt_ratio(rep.memorization_ratio):>8}",
        ]
        out.write(f"{name:<{name_width}}  " + "".join(cells) + "\n")

    if any(rep.confidence_gt for _, rep in rows):
        out.write("\nconfidence greater on original, % of scored pairs\n")
        header = f"{'set':<{name_width}}  " + "".join(
            f"{c:>8}" for c in ("orig.", "other", "sub.", "avg.")
        )
        out.write(header + "\n")
        out.write("-" * len(header) + "\n")
        for name, rep in rows:
            conf = rep.confidence_gt or {}
            cells = [
                f"{_fmt_pct(conf.get('original')):>8}",
                f"{_fmt_pct(conf.get('other')):>8}",
                f"{_fmt_pct(conf.get('substitute')):>8}",
                f"{_fmt_pct(conf.get('overall')):>8}",
            ]
            out.write(f"{name:<{name_width}}  " + "".join(cells) + "\n")
    return out.getvalue()


def write_report_tsv(report: EvalReport, target, label: str = "all") -> None:
    """Tab-delimited counts and ratios, one row per report/stratum."""
    close = False
    if isinstance(target, (str, Path)):
        handle = open(target, "w", encoding="utf-8", newline="")
        close = True
    else:
        handle = target
    try:
        writer = csv.writer(handle, delimiter="\t", lineterminator="\n")
        writer.writerow(
            [
                "set",
                "n_total",
                "n_correct_on_original",
                "count_original",
                "count_substitute",
                "count_other",
                "pct_original",
                "pct_substitute",
                "pct_other",
                "memorization_ratio",
            ]
        )
        for name, rep in _rows(report, label):
            writer.writerow(
                [
                    name,
                    rep.n_total,
                    rep.n_correct_on_original,
                    rep.counts[Outcome.ORIGINAL],
                    rep.counts[Outcome.SUBSTITUTE],
                    rep.counts[Outcome.OTHER],
                    f"{rep.percent[Outcome.ORIGINAL]:.6g}",
                    f"{rep.percent[Outcome.SUBSTITUTE]:.6g}",
                    f"{rep.percent[Outcome.OTHER]:.6g}",
                    "" if rep.memorization_ratio is None else f"{rep.memorization_ratio:.6g}",
                ]
            )
    finally:
        if close:
            handle.close()


def _is_type_pair_strata(report: EvalReport) -> bool:
    if not report.strata:
        return False
    names = {t.value for t in EntityType}
    for key in report.strata:
        parts = key.split("->")
        if len(parts) != 2 or parts[0] not in names or parts[1] not in names:
            return False
    return True


def _categories_figure(report: EvalReport, label: str, path: Path) -> None:
    rows = _rows(report, label)
    names = [name for name, _ in rows]
    orig = [rep.percent[Outcome.ORIGINAL] for _, rep in rows]
    sub = [rep.percent[Outcome.SUBSTITUTE] for _, rep in rows]
    other = [rep.percent[Outcome.OTHER] for _, rep in rows]

    fig, ax = plt.subplots(figsize=(7, 1.2 + 0.5 * len(rows)))
    y = range(len(rows))
    left = [0.0] * len(rows)
    for values, name, color in (
        (orig, "original", "#c0392b"),
        (sub, "substitute", "#27ae60"),
        (other, "other", "#7f8c8d"),
    ):
        ax.barh(y, values, left=left, label=name, color=color)
        left = [a + b for a, b in zip(left, values)]
    ax.set_yticks(list(y))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlabel("share of predictions on substituted examples (%)")
    ax.set_xlim(0, 100)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _memorization_figure(report: EvalReport, path: Path) -> None:
    assert report.strata
    names = list(report.strata)
    values = [
        0.0 if rep.memorization_ratio is None else rep.memorization_ratio
        for rep in report.strata.values()
    ]
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.bar(range(len(names)), values, color="#2c3e50")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("memorization ratio")
    ax.set_ylim(0, 1)
    ax.grid(axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _typeswap_figure(report: EvalReport, path: Path) -> None:
    assert report.strata
    types = list(EntityType)
    grid = [[float("nan")] * len(types) for _ in types]
    for key, rep in report.strata.items():
        orig_name, sub_name = key.split("->")
        i = types.index(EntityType(orig_name))
        j = types.index(EntityType(sub_name))
        if rep.memorization_ratio is not None:
            grid[i][j] = rep.memorization_ratio

    fig, ax = plt.subplots(figsize=(5.5, 4.8))
    im = ax.imshow(grid, cmap="Reds", vmin=0, vmax=1)
    ax.set_xticks(range(len(types)))
    ax.set_xticklabels([t.value for t in types])
    ax.set_yticks(range(len(types)))
    ax.set_yticklabels([t.value for t in types])
    ax.set_xlabel("substitute answer type")
    ax.set_ylabel("original answer type")
    for i in range(len(types)):
        for j in range(len(types)):
            value = grid[i][j]
            if value == value:  # not nan
                ax.text(j, i, f"{value:.2f}", ha="center", va="center", fontsize=8)
    fig.colorbar(im, ax=ax, label="memorization ratio")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_figures(report: EvalReport, out_dir, label: str = "all") -> list[Path]:
    """Write PNG figures for a report into ``out_dir``; returns the paths written.

    Always draws the category breakdown; adds a per-stratum memorization bar
    chart when strata are present, and the 5x5 type-pair heatmap when the
    strata are keyed like "NUM->PER".
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    categories_path = out_dir / "categories.png"
    _categories_figure(report, label, categories_path)
    written.append(categories_path)

    if report.strata:
        memorization_path = out_dir / "memorization.png"
        _memorization_figure(report, memorization_path)
        written.append(memorization_path)
        if _is_type_pair_strata(report):
            matrix_path = out_dir / "typeswap_matrix.png"
            _typeswap_figure(report, matrix_path)
            written.append(matrix_path)
    return written

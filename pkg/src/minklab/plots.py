"""Figure rendering for the report path.

matplotlib is imported lazily with the Agg backend so plain CSV runs never
touch it; figures land as PNG files next to the delimited output.
"""

from __future__ import annotations

import os
from fractions import Fraction


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_frequency_plots(report, outdir: str, stem: str = "report") -> list[str]:
    """Error-vs-cutoff and occurrence-breakdown figures for a FrequencyReport."""
    plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    blocks = sorted({row.block for row in report.rows})
    written = []

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for b in blocks:
        rows = sorted((r for r in report.rows if r.block == b), key=lambda r: r.n_digits)
        ax.plot([r.n_digits for r in rows], [r.abs_err for r in rows],
                marker="o", label="block " + ",".join(map(str, b)))
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("digits analyzed")
    ax.set_ylabel("|frequency - target|")
    ax.set_title(f"block frequency error ({report.meta.get('order', '?')})")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    path = os.path.join(outdir, f"{stem}_error.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    last_n = max(r.n_digits for r in report.rows)
    labels, parts = [], ([], [], [], [])
    for b in blocks:
        row = next(r for r in report.rows if r.block == b and r.n_digits == last_n)
        labels.append(",".join(map(str, b)))
        for i, v in enumerate((row.start, row.middle, row.end, row.divided)):
            parts[i].append(v / row.count if row.count else 0.0)
    bottoms = [0.0] * len(labels)
    for name, series in zip(("start", "middle", "end", "divided"), parts):
        ax.bar(labels, series, bottom=bottoms, label=name)
        bottoms = [a + b for a, b in zip(bottoms, series)]
    ax.set_xlabel("block")
    ax.set_ylabel("share of occurrences")
    ax.set_title(f"occurrence positions at n={last_n}")
    ax.legend()
    path = os.path.join(outdir, f"{stem}_breakdown.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written


def save_cdf_plot(points, targets, outdir: str, stem: str = "cdf") -> str:
    """Empirical distribution values against the exact limit curve."""
    from .qmark import qmark_rational

    plt = _pyplot()
    os.makedirs(outdir, exist_ok=True)
    grid = [Fraction(i, 256) for i in range(1, 256)]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot([float(x) for x in grid], [float(qmark_rational(x)) for x in grid],
            lw=1, label="limit distribution")
    ax.plot([float(x) for x, _ in points], [float(f) for _, f in points],
            "o", label="empirical")
    ax.plot([float(x) for x, _ in points], [float(t) for t in targets],
            "x", ms=9, label="target")
    ax.set_xlabel("x")
    ax.set_ylabel("F(x)")
    ax.set_title("empirical distribution of the ordering")
    ax.grid(True, alpha=0.3)
    ax.legend()
    path = os.path.join(outdir, f"{stem}.png")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path

"""Static charts from a suite summary: T-count, reduction and plan length per strategy."""
from __future__ import annotations

import csv
from collections import defaultdict


def plot_summary(summary_csv: str, out: str) -> str:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with open(summary_csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    panels = (("mean_t_count", "mean final T-count"),
              ("mean_reduction_pct", "T-count reduction (%)"),
              ("mean_plan_length", "plan length"))
    fig, axes = plt.subplots(1, 3, figsize=(13, 3.8))
    by_strategy = defaultdict(list)
    for r in rows:
        by_strategy[(r["backend"], r["strategy"])].append(r)
    tasks = sorted({r["task"] for r in rows})
    for ax, (col, label) in zip(axes, panels):
        for (backend, strategy), rs in sorted(by_strategy.items()):
            vals = {r["task"]: float(r[col]) for r in rs}
            xs = [i for i, t in enumerate(tasks) if t in vals]
            ax.plot(xs, [vals[tasks[i]] for i in xs], marker="o", label=f"{backend} / {strategy}")
        ax.set_xticks(range(len(tasks)))
        ax.set_xticklabels(tasks, rotation=30, ha="right", fontsize=7)
        ax.set_ylabel(label)
    axes[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out

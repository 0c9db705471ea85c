"""Render benchmark results to figure files.

Used by the CLI report paths; the library itself only emits CSV/JSON.
All figures are written with the Agg backend so rendering is headless
and byte-deterministic.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SOLVER_LABELS = {"exact": "exact", "rand": "random-order greedy",
                  "avg": "average-cost greedy"}
_SOLVER_COLORS = {"exact": "tab:blue", "rand": "tab:orange", "avg": "tab:green"}


def _j_values(rows):
    return sorted({row["j"] for row in rows})


def _solvers(rows):
    order = [s for s in ("exact", "rand", "avg")]
    present = {row["solver"] for row in rows}
    return [s for s in order if s in present]


def save_cost_boxplots(rows, path, title="Total cost vs number of services"):
    """One box per (service count, solver) of the run totals."""
    rows = [r for r in rows if r["total"] != ""]
    js = _j_values(rows)
    solvers = _solvers(rows)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    width = 0.8 / max(1, len(solvers))
    for n, solver in enumerate(solvers):
        data = [[r["total"] for r in rows if r["j"] == j and r["solver"] == solver]
                for j in js]
        positions = [j + (n - (len(solvers) - 1) / 2) * width for j in js]
        bp = ax.boxplot(data, positions=positions, widths=width * 0.9,
                        patch_artist=True, manage_ticks=False)
        for box in bp["boxes"]:
            box.set_facecolor(_SOLVER_COLORS[solver])
            box.set_alpha(0.6)
        ax.plot([], [], color=_SOLVER_COLORS[solver], label=_SOLVER_LABELS[solver])
    ax.set_xticks(js)
    ax.set_xlabel("number of services")
    ax.set_ylabel("total cost")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_splits(rows, path, title="Splits per service vs number of services"):
    """Mean splits-per-service curve per solver."""
    rows = [r for r in rows if r["splits_per_service"] != ""]
    js = _j_values(rows)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for solver in _solvers(rows):
        means = []
        for j in js:
            vals = [r["splits_per_service"] for r in rows
                    if r["j"] == j and r["solver"] == solver]
            means.append(sum(vals) / len(vals) if vals else float("nan"))
        ax.plot(js, means, marker="o", color=_SOLVER_COLORS[solver],
                label=_SOLVER_LABELS[solver])
    ax.set_xticks(js)
    ax.set_xlabel("number of services")
    ax.set_ylabel("mean splits per service")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_cost_ratio(rows, path, title="Heuristic / exact cost ratio"):
    """Box plots of per-run heuristic-to-optimal cost ratios."""
    rows = [r for r in rows if r["gap"] != "" and r["total"] != ""]
    js = _j_values(rows)
    heuristics = [s for s in _solvers(rows) if s != "exact"]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    width = 0.8 / max(1, len(heuristics))
    for n, solver in enumerate(heuristics):
        data = []
        for j in js:
            ratios = [r["total"] / (r["total"] - r["gap"]) for r in rows
                      if r["j"] == j and r["solver"] == solver
                      and r["total"] - r["gap"] > 0]
            data.append(ratios)
        positions = [j + (n - (len(heuristics) - 1) / 2) * width for j in js]
        bp = ax.boxplot(data, positions=positions, widths=width * 0.9,
                        patch_artist=True, manage_ticks=False)
        for box in bp["boxes"]:
            box.set_facecolor(_SOLVER_COLORS[solver])
            box.set_alpha(0.6)
        ax.plot([], [], color=_SOLVER_COLORS[solver], label=_SOLVER_LABELS[solver])
    ax.axhline(1.0, color="gray", linewidth=0.8, linestyle="--")
    ax.set_xticks(js)
    ax.set_xlabel("number of services")
    ax.set_ylabel("cost ratio")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_sweep(sweep, path, label="exact", title="Total cost vs rounds"):
    """Line plot of total cost against the number of rounds."""
    rs = [r for r, _ in sweep]
    totals = [result.cost.total for _, result in sweep]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(rs, totals, marker="o", label=label)
    ax.set_xticks(rs)
    ax.set_xlabel("rounds")
    ax.set_ylabel("total cost")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)

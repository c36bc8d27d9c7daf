"""Figure rendering for the report path.

Figures are companions to the delimited reports, not replacements: every
number shown is also in the CSV/JSON next to it.  Rendering uses the Agg
backend and produces byte-stable PNGs for identical inputs.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    return plt


def save_experiment_figures(result, out_dir) -> list[Path]:
    """One figure per measured global coefficient: pooled estimates with
    jackknife error bars against the matching limit values, by cell."""
    plt = _pyplot()
    out_dir = Path(out_dir)
    written: list[Path] = []
    for name in ("dicc", "trcc"):
        if name not in result.spec.measurements:
            continue
        cells = result.cells
        xs = np.arange(len(cells))
        values, errors, refs = [], [], []
        for cell in cells:
            est = getattr(cell, name)
            values.append(est.value if est is not None else None)
            errors.append(est.std_error if est is not None else None)
            refs.append(getattr(cell, f"{name}_reference"))
        if all(v is None for v in values) and all(r is None for r in refs):
            continue

        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        have = [i for i, v in enumerate(values) if v is not None]
        if have:
            ax.errorbar(
                [xs[i] for i in have],
                [values[i] for i in have],
                yerr=[errors[i] if errors[i] is not None else 0.0 for i in have],
                fmt="o", capsize=3, label="pooled estimate",
            )
        ref_have = [i for i, r in enumerate(refs) if r is not None]
        if ref_have:
            ax.plot([xs[i] for i in ref_have], [refs[i] for i in ref_have],
                    "x--", label="limit value")
        ax.set_xticks(xs)
        ax.set_xticklabels([f"{c.params.alpha:.4g}" for c in cells])
        ax.set_xlabel("link intensity x attribute count (per cell)")
        ax.set_ylabel(name)
        ax.set_ylim(bottom=0.0)
        ax.legend()
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = out_dir / f"experiment_{name}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written


def save_degree_figure(comparison, out_dir, stem: str = "degree_pmf") -> Path:
    """Side-by-side bars of the pooled empirical degree pmf and its limit."""
    plt = _pyplot()
    out_dir = Path(out_dir)
    emp = comparison.empirical.probs
    lim = comparison.limit.probs
    size = max(emp.size, lim.size)
    e = np.zeros(size)
    l = np.zeros(size)
    e[: emp.size] = emp
    l[: lim.size] = lim
    rs = np.arange(size)

    fig, ax = plt.subplots(figsize=(6.8, 4.2))
    width = 0.4
    ax.bar(rs - width / 2, e, width=width, label="empirical (pooled)")
    ax.bar(rs + width / 2, l, width=width, label="limit law")
    ax.set_xlabel(f"{comparison.direction}-degree")
    ax.set_ylabel("probability")
    ax.set_title(f"TV distance = {comparison.tv:.4f}")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    path = out_dir / f"{stem}.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path

"""Figure rendering for the CLI report paths (file output only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["save_radii_figure", "save_scan_figure"]

_SERIES = (
    ("r2_closed_form", "dichotomic radius (closed form)", "tab:purple", "-"),
    ("r2_solver", "dichotomic radius (solver)", "tab:blue", "--"),
    ("r_pvm", "projective radius", "tab:green", "-"),
    ("povm_lower_bound", "POVM model lower bound", "tab:red", "-"),
    ("separability", "separability limit", "tab:orange", "-"),
)


def save_radii_figure(rows: list[dict], family: str, path: str) -> None:
    """Render the radii table as threshold curves over the dimension axis."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    dims = [row["d"] for row in rows]
    for key, label, color, style in _SERIES:
        values = [row.get(key) for row in rows]
        if all(v is None for v in values):
            continue
        ax.plot(dims, values, style, color=color, label=label, linewidth=1.4)
    ax.set_xlabel("local dimension d")
    ax.set_ylabel("critical mixing parameter")
    ax.set_ylim(0.0, 1.02)
    ax.set_title(f"{family} family steering thresholds")
    ax.legend(fontsize=8, loc="best")
    ax.grid(alpha=0.3, linewidth=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_scan_figure(rows: list[dict], path: str) -> None:
    """Render the per-rank minimality scan: best radius vs the rank-1 radius."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    families = sorted({row["family"] for row in rows})
    colors = {"werner": "tab:purple", "isotropic": "tab:blue"}
    for fam in families:
        sub = [row for row in rows if row["family"] == fam]
        dims = [row["d"] for row in sub]
        ax.plot(dims, [row["r2_rank1"] for row in sub], "-", color=colors.get(fam, "k"),
                label=f"{fam}: rank-1 radius", linewidth=1.4)
        ax.plot(dims, [row["r2_min"] for row in sub], ":", color=colors.get(fam, "k"),
                label=f"{fam}: minimized radius", linewidth=2.0)
        flagged = [row["d"] for row in sub if row["achieving_rank"] != 1]
        if flagged:
            ax.scatter(flagged, [row["r2_min"] for row in sub if row["achieving_rank"] != 1],
                       color="red", marker="x", label=f"{fam}: argmin != 1", zorder=3)
    ax.set_xlabel("local dimension d")
    ax.set_ylabel("dichotomic critical radius")
    ax.set_title("rank minimality scan")
    ax.legend(fontsize=8, loc="best")
    ax.grid(alpha=0.3, linewidth=0.5)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)

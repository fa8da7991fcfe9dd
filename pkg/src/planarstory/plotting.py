"""SVG charts: frame sizes of one story, and optimality gap against crossing
count for a bench table.  Output bytes depend only on the input."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["frame_size_svg", "gap_scatter_svg", "bench_points"]

_RC = {
    "svg.hashsalt": "planarstory",
    "svg.fonttype": "none",
    "path.simplify": False,
}


def _render(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)
    return buf.getvalue()


def _empty(ax, what: str):
    ax.text(0.5, 0.5, f"no data: {what}", ha="center", va="center",
            transform=ax.transAxes, gid="empty-caption")
    ax.set_xticks([])
    ax.set_yticks([])


def frame_size_svg(frame_sizes, title: str = "", free_edge_count: int = 0) -> str:
    """Line chart of frame size against frame index (1-based)."""
    sizes = list(frame_sizes)
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        if not sizes:
            _empty(ax, "empty trace")
        else:
            xs = list(range(1, len(sizes) + 1))
            ax.plot(xs, sizes, marker="o", markersize=3, gid="frame-sizes")
            mu = min(sizes)
            ax.axhline(mu, color="grey", linestyle=":", linewidth=1, gid="min-frame")
            ax.set_xlabel("frame")
            ax.set_ylabel("edges in frame" + (f" (+{free_edge_count} free)" if free_edge_count else ""))
            ax.set_xlim(0.5, len(sizes) + 0.5)
            ax.set_ylim(bottom=0)
        ax.set_title(title or (f"frame sizes, mu = {min(sizes)}" if sizes else "frame sizes"))
        fig.tight_layout()
        return _render(fig)


def bench_points(rows: list[dict[str, str]]) -> list[tuple[int, float]]:
    """One (crossings, gap) point per instance; rows without a gap are
    skipped."""
    seen: dict[str, tuple[int, float]] = {}
    for r in rows:
        if r.get("gap", "") != "" and r["instance_id"] not in seen:
            seen[r["instance_id"]] = (int(r["crossings"]), float(r["gap"]))
    return [seen[k] for k in sorted(seen)]


def gap_scatter_svg(rows: list[dict[str, str]], title: str = "optimality gap") -> str:
    """Scatter of gap against crossing count, one point per instance."""
    pts = bench_points(rows)
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 3.5))
        if not pts:
            _empty(ax, "no instances with a gap")
        else:
            ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=12, gid="gap-points")
            ax.set_xlabel("crossings")
            ax.set_ylabel("gap (UB - best) / UB")
            ax.set_ylim(-0.05, 1.05)
        ax.set_title(title)
        fig.tight_layout()
        return _render(fig)

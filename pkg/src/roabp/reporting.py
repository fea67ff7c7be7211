"""Figure rendering for CLI reports.

Every function writes one PNG next to the delimited output and returns the
path.  matplotlib is imported lazily with the Agg backend so headless runs
work and library users who never render pay nothing.
"""

from __future__ import annotations

import os


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_hitting_map_figure(hs, out_dir: str, stem: str = "hitting-map") -> str:
    """Coordinate curves of the evaluation points against the node index."""
    plt = _plt()
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, stem + ".png")
    points = list(hs.points)
    n = len(points[0]) if points else 0
    fig, ax = plt.subplots(figsize=(7, 4))
    xs = list(range(len(points)))
    for i in range(n):
        ax.plot(xs, [pt[i] for pt in points], marker=".", linewidth=1,
                label="coordinate %d" % i)
    ax.set_xlabel("evaluation index")
    ax.set_ylabel("residue")
    ax.set_title("hitting set: %s" % ", ".join(
        "%s=%s" % (k, v) for k, v in sorted(hs.meta.items()) if k != "kind"
    ))
    if n:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_probe_figure(first_hits, all_zero_count: int, out_dir: str,
                      stem: str = "probe") -> str:
    """Histogram of the first exponent that certifies nonzeroness."""
    plt = _plt()
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, stem + ".png")
    fig, ax = plt.subplots(figsize=(7, 4))
    if first_hits:
        top = max(first_hits)
        ax.hist(first_hits, bins=range(1, top + 2), align="left",
                rwidth=0.85, color="#4878d0")
    ax.set_xlabel("first exponent r with a nonzero image")
    ax.set_ylabel("instances")
    title = "order-oblivious probe"
    if all_zero_count:
        title += " (%d all-zero candidates)" % all_zero_count
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_selftest_figure(results, out_dir: str, stem: str = "selftest") -> str:
    """Pass/fail bars with runtimes for the acceptance criteria."""
    plt = _plt()
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, stem + ".png")
    fig, ax = plt.subplots(figsize=(8, 0.5 * max(len(results), 4) + 1.5))
    names = ["%d: %s" % (r.cid, r.name) for r in results]
    times = [r.seconds for r in results]
    colors = ["#55a868" if r.passed else "#c44e52" for r in results]
    ypos = range(len(results))
    ax.barh(list(ypos), times, color=colors)
    ax.set_yticks(list(ypos))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("seconds")
    ax.set_title("acceptance criteria (green = pass)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path

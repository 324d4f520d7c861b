"""Static figures for the CLI report path.

Figures are rendered with the Agg backend and saved as SVG with a fixed hash
salt and no date, so identical inputs give byte-identical files.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["save_lines"]

_HASH_SALT = "freeconv-b"


def save_lines(
    path: str,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    *,
    xlabel: str,
    ylabel: str,
    title: str = "",
    caption: str = "",
    logy: bool = False,
) -> None:
    """Plot each series against ``x`` and save the figure to ``path``."""
    with matplotlib.rc_context({"svg.hashsalt": _HASH_SALT, "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        try:
            for label, ys in series.items():
                ax.plot(x, ys, label=label, linewidth=1.2)
            if logy:
                ax.set_yscale("log")
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            if title:
                ax.set_title(title)
            if caption:
                fig.text(0.01, 0.01, caption, fontsize=7, ha="left", va="bottom")
            if len(series) > 1:
                ax.legend(fontsize=8)
            fig.tight_layout(rect=(0, 0.04, 1, 1) if caption else None)
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)

"""Static SVG overlays of truth, reconstruction and samples."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# fixed ids and no timestamp so reruns produce identical files
matplotlib.rcParams["svg.hashsalt"] = "koopman-sampling"


def overlay_svg(path, times, truth, recon, samples=None, title: str = ""):
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(times, truth, color="black", lw=1.2, label="truth")
    ax.plot(times, recon, color="tab:red", lw=1.0, ls="--", label="reconstruction")
    if samples is not None:
        ax.plot(samples.times, samples.values, "o", ms=3.5, color="tab:blue", label="samples")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("g(t)")
    if title:
        ax.set_title(title, fontsize=9)
    ax.legend(fontsize=8, loc="best")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)

"""Result serialization: JSON payloads, delimited curves, and rendered figures.

Curves go out twice from the report path: as CSV (gnuplot-friendly `#`
header comments, columns documented per curve type) and as a log-log PNG
with the fitted and predicted slopes drawn alongside the samples.
"""

from __future__ import annotations

import json
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .norm_engine import NormCurve


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_curve_csv(curve: NormCurve, path) -> None:
    curve.to_csv(path)


def render_curve_png(curve: NormCurve, path, info: dict | None = None,
                     title: str = "") -> None:
    """Log-log scatter of a norm curve with fitted and predicted slope lines."""
    params = curve.parameters()
    norms = curve.norms()
    pos = (params > 0) & (norms > 0)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.loglog(params[pos], norms[pos], "o", ms=5, color="#1f77b4",
              label="samples")
    trunc = curve.truncated_mask() & pos
    if np.any(trunc):
        ax.loglog(params[trunc], norms[trunc], "x", ms=9, color="#d62728",
                  label="sup at last mode")
    info = info or {}
    if pos.any():
        span = np.geomspace(params[pos].min(), params[pos].max(), 64)
        if "fitted_exponent" in info and "log_constant" in info:
            fit_line = np.exp(info["log_constant"]) * span**(-info["fitted_exponent"])
            ax.loglog(span, fit_line, "-", color="#2ca02c",
                      label=f"fit slope -{info['fitted_exponent']:.3f}")
        if "predicted_exponent" in info:
            scale = norms[pos][0] * params[pos][0]**info["predicted_exponent"]
            pred_line = scale * span**(-info["predicted_exponent"])
            ax.loglog(span, pred_line, "--", color="#7f7f7f",
                      label=f"predicted slope -{info['predicted_exponent']:.3f}")
    ax.set_xlabel(curve.parameter_name)
    ax.set_ylabel("operator norm")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(True, which="both", alpha=0.25)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def emit_curve(curve: NormCurve, out_dir, stem: str, info: dict | None = None,
               title: str = "") -> dict:
    """Write CSV and PNG for one curve; returns the relative file names."""
    csv_name = f"{stem}.csv"
    png_name = f"{stem}.png"
    write_curve_csv(curve, os.path.join(out_dir, csv_name))
    render_curve_png(curve, os.path.join(out_dir, png_name), info, title)
    return {"csv": csv_name, "png": png_name}

"""Render scatter, radial-histogram, and edge-CDF figures from run outputs."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("scatter_bulk", "radial_histogram", "edge_cdf_overlay")


class FigureInputError(ValueError):
    """Missing or malformed input file / manifest."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: input CSV(s) plus the manifest that produced them."""

    input: str
    manifest: str
    kind: str
    out: str
    overlay: Optional[str] = None  # law grid CSV for edge_cdf_overlay
    bins: Optional[int] = None  # histogram bins; Freedman-Diaconis if None
    title: Optional[str] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureInputError(f"kind must be one of {KINDS}, got {self.kind!r}")


def _read_csv_columns(path, expected_header):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FigureInputError(f"cannot read {path}: {exc}") from exc
    if not rows or rows[0] != expected_header:
        raise FigureInputError(
            f"{path}: expected header {expected_header}, got {rows[:1]}")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]], dtype=float)
    except ValueError as exc:
        raise FigureInputError(f"{path}: non-numeric payload: {exc}") from exc
    if data.size == 0:
        raise FigureInputError(f"{path}: no data rows")
    return data


def load_params(manifest_path):
    """(lambda, R) from a manifest; fails loudly rather than guessing axes."""
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FigureInputError(f"cannot parse manifest {manifest_path}: {exc}") from exc
    params = manifest.get("config", {}).get("params")
    if not params:
        raise FigureInputError(
            f"{manifest_path}: manifest carries no params section")
    try:
        lam = float(params["alpha"]) / float(params["n"])
        R = float(params["R"])
    except (KeyError, TypeError, ZeroDivisionError) as exc:
        raise FigureInputError(
            f"{manifest_path}: params must contain n, alpha, R: {exc}") from exc
    return lam, R


def equilibrium_radial_density(lam, R, r):
    """2 lambda r / R^2 on [0, R/sqrt(lambda)], zero beyond."""
    r = np.asarray(r, dtype=float)
    edge = R / math.sqrt(lam)
    return np.where(r <= edge, 2.0 * lam * r / (R * R), 0.0)


def _scatter_bulk(spec, ax):
    data = _read_csv_columns(spec.input, ["trial_id", "particle_id", "x", "y"])
    lam, R = load_params(spec.manifest)
    edge = R / math.sqrt(lam)
    ax.scatter(data[:, 2], data[:, 3], s=2.0, alpha=0.35, linewidths=0,
               color="#1f3b73", rasterized=True)
    theta = np.linspace(0.0, 2.0 * math.pi, 512)
    ax.plot(R * np.cos(theta), R * np.sin(theta), "--", color="0.4", lw=1.0,
            label="background disc R")
    ax.plot(edge * np.cos(theta), edge * np.sin(theta), "-", color="#b03030",
            lw=1.2, label=r"equilibrium edge $R/\sqrt{\lambda}$")
    lim = 1.1 * R
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="upper right", fontsize=8, framealpha=0.9)


def _freedman_diaconis_bins(values):
    q75, q25 = np.percentile(values, [75, 25])
    iqr = q75 - q25
    if iqr <= 0:
        return 10
    width = 2.0 * iqr / len(values) ** (1.0 / 3.0)
    return max(1, int(math.ceil((values.max() - values.min()) / width)))


def _radial_histogram(spec, ax):
    data = _read_csv_columns(spec.input, ["trial_id", "particle_id", "x", "y"])
    lam, R = load_params(spec.manifest)
    moduli = np.hypot(data[:, 2], data[:, 3])
    bins = spec.bins if spec.bins else _freedman_diaconis_bins(moduli)
    ax.hist(moduli, bins=bins, density=True, color="#7d9fd1",
            edgecolor="white", linewidth=0.3, label="sampled radii")
    edge = R / math.sqrt(lam)
    rr = np.linspace(0.0, edge, 400)
    ax.plot(rr, equilibrium_radial_density(lam, R, rr), "-", color="#b03030",
            lw=1.6, label="equilibrium radial density")
    ax.set_xlabel("r")
    ax.set_ylabel("density")
    ax.legend(loc="upper left", fontsize=8)


def _edge_cdf_overlay(spec, ax):
    if spec.overlay is None:
        raise FigureInputError("edge_cdf_overlay needs an overlay law CSV")
    maxima = _read_csv_columns(spec.input, ["trial_id", "max_modulus"])[:, 1]
    law = _read_csv_columns(spec.overlay, ["t", "cdf"])
    xs = np.sort(maxima)
    ecdf = np.arange(1, xs.size + 1) / xs.size
    ax.step(xs, ecdf, where="post", color="#1f3b73", lw=1.2,
            label=f"empirical maxima ({xs.size} trials)")
    ax.plot(law[:, 0], law[:, 1], "-", color="#b03030", lw=1.4,
            label="reference law")
    lo = min(xs[0], law[0, 0])
    hi = max(xs[-1], law[-1, 0])
    ax.set_xlim(lo, hi)
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("t")
    ax.set_ylabel("CDF")
    ax.legend(loc="lower right", fontsize=8)


def render(spec: FigureSpec):
    """Write the figure described by spec; returns the matplotlib Figure."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5), dpi=150)
    try:
        if spec.kind == "scatter_bulk":
            _scatter_bulk(spec, ax)
        elif spec.kind == "radial_histogram":
            _radial_histogram(spec, ax)
        else:
            _edge_cdf_overlay(spec, ax)
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        fig.savefig(spec.out, metadata={"Software": "jellium2d-figures"})
    finally:
        plt.close(fig)
    return fig

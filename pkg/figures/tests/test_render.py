import json
import math

import numpy as np
import pytest

from jellium_figures.cli import main
from jellium_figures.render import (
    FigureInputError,
    FigureSpec,
    equilibrium_radial_density,
    load_params,
    render,
)


def write_manifest(path, n=8, alpha=32.0, R=2.0):
    path.write_text(json.dumps({
        "command": "sample",
        "config": {"params": {"n": n, "beta": 2.0, "alpha": alpha, "R": R},
                   "seed": 7},
        "version": "0.1.0",
    }))


def write_configs(path, n_points=64, radius=0.9, n=8):
    rng = np.random.default_rng(0)
    rows = ["trial_id,particle_id,x,y"]
    r = radius * np.sqrt(rng.random(n_points))
    th = 2 * math.pi * rng.random(n_points)
    for i in range(n_points):
        rows.append(f"{i // n},{i % n},{float(r[i] * math.cos(th[i]))!r},"
                    f"{float(r[i] * math.sin(th[i]))!r}")
    path.write_text("\n".join(rows) + "\n")


def write_maxima(path, m=100):
    rng = np.random.default_rng(1)
    rows = ["trial_id,max_modulus"]
    for i, v in enumerate(1.0 + rng.random(m)):
        rows.append(f"{i},{float(v)!r}")
    path.write_text("\n".join(rows) + "\n")


def write_law(path):
    ts = np.linspace(1.0, 3.0, 50)
    rows = ["t,cdf"] + [f"{float(t)!r},{min(1.0, max(0.0, float(t - 1.0) / 1.5))!r}"
                        for t in ts]
    path.write_text("\n".join(rows) + "\n")


def test_equilibrium_overlay_support():
    rr = np.linspace(0, 2, 201)
    dens = equilibrium_radial_density(4.0, 2.0, rr)
    assert dens[rr > 1.0].max() == 0.0  # support edge R/sqrt(lambda) = 1
    inside = rr <= 1.0
    np.testing.assert_allclose(dens[inside], 2 * 4.0 * rr[inside] / 4.0)
    # overlay integrates to one over its support (grid ends at the edge,
    # keeping the jump out of the quadrature)
    support = np.linspace(0.0, 1.0, 2001)
    assert np.trapezoid(equilibrium_radial_density(4.0, 2.0, support),
                        support) == pytest.approx(1.0, abs=1e-9)


def test_load_params_and_failures(tmp_path):
    m = tmp_path / "manifest.json"
    write_manifest(m)
    assert load_params(m) == (4.0, 2.0)

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"config": {}}))
    with pytest.raises(FigureInputError):
        load_params(bad)
    with pytest.raises(FigureInputError):
        load_params(tmp_path / "missing.json")


def test_scatter_and_histogram_render(tmp_path):
    manifest = tmp_path / "manifest.json"
    configs = tmp_path / "configs.csv"
    write_manifest(manifest)
    write_configs(configs)
    for kind in ("scatter_bulk", "radial_histogram"):
        out = tmp_path / f"{kind}.png"
        render(FigureSpec(input=str(configs), manifest=str(manifest),
                          kind=kind, out=str(out)))
        assert out.exists() and out.stat().st_size > 0


def test_histogram_overlay_clipped_to_support(tmp_path):
    manifest = tmp_path / "manifest.json"
    configs = tmp_path / "configs.csv"
    write_manifest(manifest)  # lambda = 4, R = 2: edge at 1
    write_configs(configs)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots()
    try:
        from jellium_figures.render import _radial_histogram

        spec = FigureSpec(input=str(configs), manifest=str(manifest),
                          kind="radial_histogram", out=str(tmp_path / "x.png"))
        _radial_histogram(spec, ax)
        overlay = ax.get_lines()[0]
        assert overlay.get_xdata().max() == pytest.approx(1.0, rel=1e-12)
    finally:
        plt.close(fig)


def test_edge_cdf_overlay_requires_law(tmp_path):
    manifest = tmp_path / "manifest.json"
    maxima = tmp_path / "maxima.csv"
    write_manifest(manifest)
    write_maxima(maxima)
    spec = FigureSpec(input=str(maxima), manifest=str(manifest),
                      kind="edge_cdf_overlay", out=str(tmp_path / "o.png"))
    with pytest.raises(FigureInputError):
        render(spec)

    law = tmp_path / "law.csv"
    write_law(law)
    out = tmp_path / "overlay.png"
    render(FigureSpec(input=str(maxima), manifest=str(manifest),
                      kind="edge_cdf_overlay", out=str(out), overlay=str(law)))
    assert out.exists() and out.stat().st_size > 0


def test_render_deterministic_bytes(tmp_path):
    manifest = tmp_path / "manifest.json"
    configs = tmp_path / "configs.csv"
    write_manifest(manifest)
    write_configs(configs)
    outs = []
    for name in ("a.png", "b.png"):
        out = tmp_path / name
        render(FigureSpec(input=str(configs), manifest=str(manifest),
                          kind="scatter_bulk", out=str(out)))
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_cli_error_paths(tmp_path):
    manifest = tmp_path / "manifest.json"
    write_manifest(manifest)
    code = main(["--input", str(tmp_path / "missing.csv"),
                 "--manifest", str(manifest), "--kind", "scatter_bulk",
                 "--out", str(tmp_path / "o.png")])
    assert code == 2

    garbled = tmp_path / "garbled.csv"
    garbled.write_text("not,a,real,header\n1,2,3,4\n")
    code = main(["--input", str(garbled), "--manifest", str(manifest),
                 "--kind", "scatter_bulk", "--out", str(tmp_path / "o.png")])
    assert code == 2


def test_cli_success(tmp_path):
    manifest = tmp_path / "manifest.json"
    configs = tmp_path / "configs.csv"
    write_manifest(manifest)
    write_configs(configs)
    out = tmp_path / "fig.png"
    code = main(["--input", str(configs), "--manifest", str(manifest),
                 "--kind", "radial_histogram", "--out", str(out), "--bins", "20"])
    assert code == 0 and out.exists()

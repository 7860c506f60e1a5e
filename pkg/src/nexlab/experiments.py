"""Experiment presets and report-bundle generation.

Each preset writes a self-describing bundle into the output directory:
config.json (the exact configuration), results.json / results.csv, and
preset-specific PGM/SVG artifacts.  JSON and CSV are byte-deterministic
for a fixed config and seed; the wall-clock timing goes to a separate
timing.txt so it never perturbs the deterministic artifacts.
"""

from __future__ import annotations

import csv
import json
import os
import time

import numpy as np

from . import __version__
from .config import ExperimentConfig
from .deepness import deepness_profile, distance_transform, fit_power_law
from .dynamics import (GOLDEN_MEAN, QuadraticMap, RotationNumber, escapes,
                       postcritical_cloud)
from .errors import FitError, NexlabError
from .extension import (extend_backward, leaf_type_report, regularity_probe,
                        BackwardOrbit)
from .feigenbaum import derive_feigenbaum_parameter
from .raster import fill_raster, load_raster, save_raster, write_pgm
from .rays import Ray, enumerate_lifts, lifts_to_svg


def map_from_config(config):
    """QuadraticMap selected by the config (theta wins over c)."""
    if config.theta is not None:
        theta = GOLDEN_MEAN if config.theta == "golden" else float(config.theta)
        return QuadraticMap.siegel(theta)
    return QuadraticMap.centered(complex(config.c[0], config.c[1]))


def _dump_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=1)
        fh.write("\n")


def _dump_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v
                             for v in row])


def cache_roundtrip(raster, path):
    """Write then re-read the NEXR1 cache; returns the readback."""
    save_raster(path, raster)
    return load_raster(path)


def run_experiment(config, out_dir=None):
    """Execute one preset and write its report bundle.

    Returns the results dict.  On failure, whatever was produced is left
    in place next to a failure.json marker.
    """
    config.validate()
    out_dir = out_dir or config.out
    os.makedirs(out_dir, exist_ok=True)
    t0 = time.monotonic()
    # The bundle location is not part of the experiment; leaving it out
    # keeps artifacts byte-identical across output directories.
    cfg_dict = {k: v for k, v in config.to_dict().items() if k != "out"}
    _dump_json(os.path.join(out_dir, "config.json"), cfg_dict)
    runner = _PRESET_RUNNERS[config.preset]
    try:
        results = runner(config, out_dir)
    except NexlabError as exc:
        _dump_json(os.path.join(out_dir, "failure.json"),
                   {"error": type(exc).__name__, "message": str(exc)})
        raise
    results = {"schema": "nexlab.results/1", "version": __version__,
               "preset": config.preset, "seed": config.seed,
               "config": cfg_dict, **results}
    _dump_json(os.path.join(out_dir, "results.json"), results)
    with open(os.path.join(out_dir, "timing.txt"), "w") as fh:
        fh.write(f"wall_seconds = {time.monotonic() - t0:.3f}\n")
    return results


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _boundary_points(f, count):
    """The first `count` critical-orbit points, used as boundary samples."""
    from .rays import critical_orbit
    return critical_orbit(f, count)


def _fill_or_load(f, config, out_dir):
    """Fill the raster, reusing a matching NEXR1 cache in the out dir.

    A present-but-corrupt cache raises FormatError rather than being
    silently recomputed; a readable cache with different parameters is
    ignored and overwritten.
    """
    path = os.path.join(out_dir, "raster.nexr")
    if os.path.exists(path):
        cached = load_raster(path)
        if (cached.window == tuple(config.window)
                and cached.width == config.res
                and cached.height == config.res
                and cached.max_iter == config.max_iter
                and cached.escape_radius == config.escape_radius):
            return cached
    raster = fill_raster(f, config.window, config.res, config.max_iter,
                         config.escape_radius)
    save_raster(path, raster)
    return raster


def _run_raster(config, out_dir):
    f = map_from_config(config)
    raster = _fill_or_load(f, config, out_dir)
    write_pgm(os.path.join(out_dir, "raster.pgm"), raster)
    return {"inside_fraction": raster.inside_fraction(),
            "cells": raster.width * raster.height}


def _deepness_common(f, config, out_dir):
    raster = _fill_or_load(f, config, out_dir)
    field = distance_transform(raster)
    points = _boundary_points(f, config.n_points)
    profiles = [deepness_profile(x, config.radii, raster, field)
                for x in points]
    rows = [row for p in profiles for row in p.as_rows()]
    _dump_csv(os.path.join(out_dir, "profiles.csv"),
              ("x_re", "x_im", "r", "delta_over_r", "density"), rows)
    write_pgm(os.path.join(out_dir, "raster.pgm"), raster)
    results = {"n_points": len(points), "radii": list(config.radii)}
    try:
        fit = fit_power_law(profiles)
        results["power_law"] = {"C": fit.C, "alpha": fit.alpha,
                                "residual": fit.residual,
                                "points_used": fit.points_used}
    except FitError as exc:
        results["power_law"] = {"error": str(exc)}
    return profiles, results


def _run_siegel_deepness(config, out_dir):
    f = map_from_config(config)
    _, results = _deepness_common(f, config, out_dir)
    return results


def _run_feigenbaum_deepness(config, out_dir):
    param = derive_feigenbaum_parameter(config.m)
    f = QuadraticMap.centered(param.c_limit)
    _, results = _deepness_common(f, config, out_dir)
    results["c_limit"] = param.c_limit
    results["cascade"] = {"cs": list(param.cs), "ratios": list(param.ratios)}
    return results


def _sample_outside_points(f, count, rng, max_iter, escape_radius):
    """Random points verified (by escape) to lie outside the filled set."""
    out = []
    while len(out) < count:
        r = rng.uniform(1.5, 2.5)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        z = r * np.exp(1j * phi)
        if escapes(f, z, max_iter, escape_radius):
            out.append(complex(z))
    return out


def _run_leafcheck(config, out_dir):
    f = map_from_config(config)
    cloud = postcritical_cloud(f, config.cloud)
    rng = np.random.default_rng(config.seed)
    z0s = _sample_outside_points(f, config.n_orbits, rng, config.max_iter,
                                 config.escape_radius)
    reports = []
    rows = []
    for i, z0 in enumerate(z0s):
        orbit = extend_backward(f, z0, config.strategy, config.depth,
                                cloud=cloud, rng=rng,
                                max_iter=config.max_iter,
                                escape_radius=config.escape_radius)
        report = leaf_type_report(f, orbit, cloud, s=config.s,
                                  samples=config.samples)
        reports.append(report.to_jsonable(meta={"orbit": i,
                                                "z0": [z0.real, z0.imag]}))
        for row in report.csv_rows():
            rows.append((i,) + row)
    _dump_csv(os.path.join(out_dir, "leafcheck.csv"),
              ("orbit", "n", "R", "D", "v", "product", "ratio",
               "univalent", "koebe_ok"), rows)
    return {"reports": reports}


def _run_rays(config, out_dir):
    f = map_from_config(config)
    ray = Ray(z0=complex(config.z0[0], config.z0[1]), theta=config.angle)
    lifts = enumerate_lifts(f, ray, config.n, config.eps)
    _dump_json(os.path.join(out_dir, "lifts.json"),
               {"schema": "nexlab.lifts/1",
                "lifts": [l.to_jsonable() for l in lifts]})
    lifts_to_svg(os.path.join(out_dir, "lifts.svg"), lifts)
    return {"n": config.n, "count": len(lifts),
            "terminations": sorted({l.termination for l in lifts})}


def _run_regularity(config, out_dir):
    f = map_from_config(config)
    # Default probe orbit: constant at the repelling fixed point.
    beta = 1.0 - f.lam if f.theta is not None else \
        0.5 + np.sqrt(0.25 - complex(config.c[0], config.c[1]))
    orbit = BackwardOrbit.from_points(
        f, np.full(config.depth + 1, complex(beta)), strategy="explicit-word")
    probe = regularity_probe(f, orbit, config.radii, samples=config.samples)
    return {"note": "truncated evidence only, not a certification",
            "max_univalent_radius": probe.max_univalent_radius,
            "first_failures": {repr(r): probe.first_failures[r]
                               for r in probe.radii}}


def _run_feigenbaum(config, out_dir):
    param = derive_feigenbaum_parameter(config.m)
    rows = [(k + 1, c, res) for k, (c, res)
            in enumerate(zip(param.cs, param.residuals))]
    _dump_csv(os.path.join(out_dir, "cascade.csv"),
              ("k", "c_k", "return_residual"), rows)
    return {"cs": list(param.cs), "ratios": list(param.ratios),
            "c_limit": param.c_limit}


_PRESET_RUNNERS = {
    "raster": _run_raster,
    "siegel-deepness": _run_siegel_deepness,
    "feigenbaum-deepness": _run_feigenbaum_deepness,
    "leafcheck": _run_leafcheck,
    "rays": _run_rays,
    "regularity": _run_regularity,
    "feigenbaum": _run_feigenbaum,
}

"""Python bindings for the multitype contact process library."""

import json

from ._core import (
    CapExceeded,
    ConfigError,
    HarrisSystem,
    InfectionPath,
    LatticeWindow,
    Trajectory,
    ancestor_at,
    classify,
    cone_experiment,
    enumerate_paths,
    evolve,
    find_fbip,
    find_rfbip,
    reverse,
    sample_harris,
)
from ._core import run_command as _run_command
from ._core import simulate_walk as _simulate_walk


def run(subcommand, config, out_dir, threads=1):
    """Run a CLI subcommand with a config dict; returns the manifest."""
    return json.loads(_run_command(subcommand, json.dumps(config), str(out_dir), threads))


def simulate_walk(x, tau, x0=0, t0=0.0, n_steps=100, seed=0):
    return json.loads(_simulate_walk(x, tau, x0, t0, n_steps, seed))


__all__ = [
    "CapExceeded",
    "ConfigError",
    "HarrisSystem",
    "InfectionPath",
    "LatticeWindow",
    "Trajectory",
    "ancestor_at",
    "classify",
    "cone_experiment",
    "enumerate_paths",
    "evolve",
    "find_fbip",
    "find_rfbip",
    "reverse",
    "run",
    "sample_harris",
    "simulate_walk",
]

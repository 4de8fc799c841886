"""Noisy quantum reservoir computing simulator."""

import json
from pathlib import Path

from ._core import (
    Error,
    NoiseProfile,
    export_qasm,
    gen_input,
    gen_narma,
    load_noise_profile,
    nmse,
    parse_noise_profile,
    preset_names,
    preset_profile,
    run_reservoir,
)
from ._core import run_experiment as _run_experiment

__all__ = [
    "Error",
    "NoiseProfile",
    "export_qasm",
    "gen_input",
    "gen_narma",
    "load_noise_profile",
    "nmse",
    "parse_noise_profile",
    "preset_names",
    "preset_profile",
    "run",
    "run_reservoir",
]


def run(config, output=None, seed=None):
    """Run an experiment from an INI path or INI text.

    Returns (files, summary) where files are relative to the output directory
    and summary is the parsed summary.json.
    """
    path = Path(config) if "\n" not in str(config) else None
    if path is not None and path.is_file():
        text, base = path.read_text(), path.parent
    else:
        text, base = str(config), Path()
    files, summary = _run_experiment(text, base, output, seed)
    return [str(f) for f in files], json.loads(summary)

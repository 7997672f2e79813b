"""Shared artifacts: generated once per session through the estimation
CLI, so these tests exercise only its external interfaces."""

import subprocess

import numpy as np
import pytest


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("artifacts")
    subprocess.run(
        ["lctails", "simulate", "--family", "uniform", "--n", "150",
         "--reps", "200", "--grid", "0.0:1.0:0.05", "--seed", "7",
         "--out", str(root / "uniform_n150.csv")],
        check=True, capture_output=True,
    )
    rng = np.random.default_rng(3)
    sample = rng.normal(size=120)
    sample_path = root / "sample.txt"
    sample_path.write_text("\n".join(repr(float(v)) for v in sample) + "\n")
    subprocess.run(
        ["lctails", "fit", str(sample_path), "--out", str(root / "fit.txt")],
        check=True, capture_output=True,
    )
    return root

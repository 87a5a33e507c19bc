"""Fixture CSVs produced by the netgrowth CLI (the upstream interface).

By default the runs are miniature (seconds) but keep the full panel-grid
shape: 3x3 decay/shape combinations and 50 tracked ranks.  Set
FIGPLOTS_CI_SCALE=1 to regenerate at the upstream CI preset instead.
"""

import os
import subprocess
import sys

import pytest

FULL_SCALE = os.environ.get("FIGPLOTS_CI_SCALE", "") == "1"

SCALE = {"T0": 1000, "T": 10000, "R": 10} if FULL_SCALE else \
        {"T0": 120, "T": 480, "R": 2}


def run_netgrowth(command, config_text, out_dir):
    config_path = out_dir / "run.cfg"
    config_path.write_text(config_text)
    subprocess.run([sys.executable, "-m", "netgrowth.cli", command,
                    "--config", str(config_path), "--out", str(out_dir)],
                   check=True, capture_output=True, text=True)


def config(model, alpha, seed, extra=""):
    return (f"model={model}\nalpha_p={alpha}\nseed={seed}\n"
            f"T0={SCALE['T0']}\nT={SCALE['T']}\nR={SCALE['R']}\n{extra}")


@pytest.fixture(scope="session")
def topk_csvs(tmp_path_factory):
    out = tmp_path_factory.mktemp("topk")
    paths = []
    for alpha in (1, 2, 3):
        run_netgrowth("exp-topk", config("mf", alpha, seed=5, extra="ranks=1-50\n"), out)
        paths.append(out / f"topk_mf_ap{alpha}.csv")
    run_netgrowth("exp-topk", config("ba", 2, seed=5, extra="ranks=1-50\n"), out)
    paths.append(out / "topk_ba_ap2.csv")
    return paths


@pytest.fixture(scope="session")
def spatial_csvs(tmp_path_factory):
    out = tmp_path_factory.mktemp("spatial")
    paths = []
    ranks = "ranks=1,5,10,30,50\n" if not FULL_SCALE else "ranks=1,5,10,30,50,100,200\n"
    for gamma in (5, 10, 50):
        for alpha in (1, 2, 3):
            run_netgrowth("exp-spatial",
                          config("spatial", alpha, seed=5, extra=f"gamma={gamma}\n{ranks}"),
                          out)
            paths.append(out / f"spatial_ap{alpha}_g{gamma}.csv")
    return paths


@pytest.fixture(scope="session")
def inject_csvs(tmp_path_factory):
    out = tmp_path_factory.mktemp("inject")
    paths = []
    for model, alpha in (("af", 2), ("gf", 2), ("mf", 3)):
        run_netgrowth("exp-inject", config(model, alpha, seed=5), out)
        paths.append(out / f"inject_{model}_ap{alpha}.csv")
    return paths

from __future__ import annotations

import pytest

from assetowner.dataset import build_table
from assetowner.features import default_directory, engineer_all
from assetowner.synth import default_benchmark_config, generate_inventory

import reference


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if reference.GATE_LINES:
        terminalreporter.section("release gate")
        for line in reference.GATE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def oui_dir():
    return default_directory()


@pytest.fixture(scope="session")
def small_bench():
    """600-row benchmark inventory: (table, records, provenance, config)."""
    config = default_benchmark_config(seed=7, n_rows=600)
    records, provenance = generate_inventory(config)
    table = build_table(engineer_all(records))
    return table, records, provenance, config


@pytest.fixture(scope="session")
def small_table(small_bench):
    return small_bench[0]

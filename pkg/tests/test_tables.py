"""Regression-table harness: fixtures, grouping of split levels, echo tables."""
import json
import math

import numpy as np
import pytest

from fpdesign.config import ConfigError, parse_config
from fpdesign.information import Design
from fpdesign.tables import TABLE_IDS, Cell, group_levels, load_fixture, run_table


@pytest.mark.parametrize("tid", TABLE_IDS)
def test_every_fixture_loads_and_parses(tid):
    fx = load_fixture(tid)
    assert fx["id"] == tid and fx["title"]
    if "config" in fx:
        parse_config(fx["config"])


def test_unknown_table_rejected():
    with pytest.raises(ConfigError):
        load_fixture("t0")


def test_priors_table_is_echoed_exactly():
    res = run_table("t16")
    assert res.n_ok == len(res.cells) == 20
    data = json.loads(res.render("json"))["data"]
    assert data["priors"] == load_fixture("t16")["paper"]["priors"]
    for masses in data["priors"].values():
        assert math.fsum(masses) == pytest.approx(1.0, abs=1e-12)


def test_group_levels_merges_split_points():
    d = Design([0.1, 0.18, 0.19, 0.52, 1.0], [3, 2, 2, 2, 3])
    got = group_levels(d, [0.1, 0.1895, 0.5225, 1.0])
    np.testing.assert_allclose(got, [0.1, 0.185, 0.52, 1.0])
    assert math.isnan(group_levels(Design([0.1, 1.0], [1, 1]), [0.1, 0.5, 1.0])[1])


def test_cell_tolerance():
    assert Cell("r", "c", 93.0, 93.9, 5).ok
    assert not Cell("r", "c", 80.0, 93.9, 5).ok
    assert not Cell("r", "c", math.nan, 93.9, 5).ok


def test_roster_table_structure():
    res = run_table("t3", tries=1)
    rows = res.table.rows
    assert rows[0][0] == "optimal (this run)"
    effs = [float(r[4]) for r in rows]
    assert max(effs) == pytest.approx(100.0)
    assert all(e <= 100.0 + 1e-9 for e in effs)
    assert res.summary().startswith("t3: cells within tolerance")
    assert run_table("t3", tries=1).render("csv") == res.render("csv")

"""Standard comparison designs against the printed level sets."""
import numpy as np
import pytest

from fpdesign import catalog
from fpdesign.config import parse_config
from fpdesign.onefactor import CANONICAL_POWERS, FactorRange, fp_transform
from fpdesign.tables import TABLE_IDS, load_fixture


def printed_family_rows():
    for tid in TABLE_IDS:
        fx = load_fixture(tid)
        if fx["kind"] != "roster":
            continue
        for row in fx["rows"]:
            ref = row["design"]
            if "family" in ref and ref["family"] != "locally_optimal":
                yield pytest.param(fx["config"], row, id=f"{tid}-{row['label']}")


@pytest.mark.parametrize("config,row", list(printed_family_rows()))
def test_family_reproduces_printed_levels_and_reps(config, row):
    design = parse_config(config).resolve_design(row["design"])
    np.testing.assert_allclose(design.levels, row["paper"]["levels"], atol=5e-4)
    assert design.reps.tolist() == row["paper"]["reps"]


def test_five_level_raw_projection():
    d = catalog.ccd_projection(5, 1, 12)
    np.testing.assert_allclose(d.levels, [0.1, 0.232, 0.55, 0.868, 1.0], atol=5e-4)
    assert d.reps.tolist() == [1, 2, 6, 2, 1]
    assert catalog.ccd_projection(5, 1, 20).reps.tolist() == [1, 4, 10, 4, 1]


@pytest.mark.parametrize("alpha", CANONICAL_POWERS)
def test_levels_are_equally_spaced_in_the_metric(alpha):
    rng = FactorRange(0.1)
    x = catalog.metric_levels(np.linspace(0, 1, 6), alpha, rng)
    t = fp_transform(x, alpha)
    want = np.linspace(fp_transform(0.1, alpha), fp_transform(1.0, alpha), 6)
    np.testing.assert_allclose(t, want, rtol=1e-12, atol=1e-12)


def test_infeasible_replication_rejected():
    with pytest.raises(ValueError):
        catalog.equally_spaced(5, 1, 12)
    with pytest.raises(ValueError):
        catalog.ccd_projection(3, 1, 10)
    with pytest.raises(ValueError):
        catalog.ccd_projection(4, 1, 12)


def test_locally_optimal_three_point_design():
    from fpdesign.onefactor import FirstOrderFP, FirstOrderParams
    model = FirstOrderFP()
    d = catalog.locally_optimal(model, FirstOrderParams(0, 2.5, 0), 12)
    assert len(d.levels) == 3 and d.levels[0] == 0.1 and d.levels[-1] == 1.0

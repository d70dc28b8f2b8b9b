import json

import numpy as np
import pytest

from branchforge.scenarios import (
    TheoremRow,
    UnknownScenarioError,
    case3_cubic,
    case3_cubic_as_printed,
    compare_tree_vs_continuation,
    hausdorff,
    matches_elimination,
    printed_system_matches,
    run_scenario,
    scenario_ids,
    theorem_table,
)

IDS = ["fig2", "fig3", "fig4-N3", "fig4-N4", "fig4-N9", "fig5-zoom", "fig6-perturbation", "appendix-case1",
       "appendix-case2", "appendix-case3", "appendix-case4", "appendix-case5", "order4-scan"]


@pytest.fixture(scope="module")
def reports(tmp_path_factory):
    base = tmp_path_factory.mktemp("scenarios")
    return {sid: (run_scenario(sid, base / sid), base / sid) for sid in scenario_ids()}


def test_ids():
    assert scenario_ids() == IDS
    with pytest.raises(UnknownScenarioError):
        run_scenario("nosuch")


@pytest.mark.parametrize("sid", IDS)
def test_scenario_passes(reports, sid):
    report, out = reports[sid]
    assert report.passed, [c.to_dict() for c in report.failures()]
    assert all(c.reference for c in report.claims)
    doc = json.loads((out / "report.json").read_text())
    assert doc["scenario"] == sid and doc["pass"] is True
    for name in report.artifacts:
        assert (out / name).exists()


def test_claim_coverage(reports):
    keys = {sid: {c.key for c in r.claims} for sid, (r, _) in reports.items()}
    assert {"lower_sq", "upper_sq"} <= keys["fig2"]
    assert "interval" in keys["fig3"]
    assert "branches" in keys["fig4-N3"] and "branches" in keys["fig4-N4"] and "branches" in keys["fig4-N9"]
    assert "pert_loop" in keys["fig6-perturbation"]
    for k in range(1, 6):
        assert "theorem" in keys[f"appendix-case{k}"]


def test_fig4_counts(reports):
    computed = {sid: {c.key: c.computed for c in reports[sid][0].claims} for sid in ("fig4-N3", "fig4-N4", "fig4-N9")}
    assert computed["fig4-N3"]["branches"] == 1
    assert computed["fig4-N4"]["branches"] == 3
    assert computed["fig4-N9"]["branches"] == 30


def test_fig2_records_caption_discrepancy(reports):
    report, _ = reports["fig2"]
    assert any("(m,n)=(1,2)" in n.replace(" ", "") for n in report.notes)


def test_case2_never_crosses(reports):
    claim = next(c for c in reports["appendix-case2"][0].claims if c.key == "never_crosses")
    assert claim.passed and claim.computed > 0


def test_case5_domain_empty(reports):
    claim = next(c for c in reports["appendix-case5"][0].claims if c.key == "empty")
    assert claim.passed


def test_order4_types(reports):
    claim = next(c for c in reports["order4-scan"][0].claims if c.key == "through_35")
    assert claim.computed == [[[0, 0], [1, 2], [5, 9], [20, 35]], [[0, 0], [1, 3], [3, 8], [14, 35]]]


def test_fig6_loops(reports):
    values = {c.key: c.computed for c in reports["fig6-perturbation"][0].claims}
    assert values["pert_loop"] is True and values["ladder_loop"] is True and values["v10_loop"] is False


def test_overlay_datasets(reports):
    _, out = reports["fig4-N3"]
    rows = np.loadtxt(out / "fig4-N3_overlay.csv", delimiter=",", skiprows=1)
    tree_elements = set(rows[rows[:, 0] == 1, 1].astype(int))
    assert tree_elements == {0, 1}  # primary trunk and its one branch
    assert np.any(rows[:, 0] == 0)
    _, out9 = reports["fig4-N9"]
    head = (out9 / "fig4-N9_tree.csv").read_text().splitlines()[0]
    assert head == "element,omega,energy"


def test_deterministic_reports(tmp_path):
    for sid in ("fig2", "fig3", "appendix-case4", "fig4-N9"):
        a = run_scenario(sid, tmp_path / "a")
        b = run_scenario(sid, tmp_path / "b")
        assert a.to_dict() == b.to_dict()
        for name in a.artifacts:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_compare_rejects_other_truncations():
    with pytest.raises(ValueError):
        compare_tree_vs_continuation(5)


def test_hausdorff_basics():
    a = np.column_stack([np.linspace(1, 2, 11), np.ones(11)])
    b = a + [0, 0.1]
    assert hausdorff(a, a, (1, 2)) == 0.0
    assert hausdorff(a, b, (1, 2), relative=False) == pytest.approx(0.1)
    assert hausdorff(a, b, (1.2, 1.5), relative=False) <= hausdorff(a, b, (1, 2), relative=False)


def test_theorem_table_complete():
    rows = theorem_table(5)
    assert len(rows) == 35 and all(isinstance(r, TheoremRow) for r in rows)
    assert all(r.holds for r in rows)
    for r in rows:
        assert r.expected == (r.mode.m >= 1 and r.mode.n >= 1 and r.mode.n > r.mode.m)
    assert {r.case for r in rows} == {"1", "2", "3", "4", "5", "reducible"}


def test_printed_systems_and_case3_typo():
    for name in ("pert", "v11", "v10", "ladder"):
        assert printed_system_matches(name)
    assert matches_elimination((1, 0), case3_cubic)
    assert not matches_elimination((1, 0), case3_cubic_as_printed)

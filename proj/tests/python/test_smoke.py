import pytest

import cclab


def test_gallery_lists_entries():
    names = cclab.gallery()
    assert "even-zero" in names
    assert "separation" in names


def test_dump_round_trips_through_run():
    cfg = cclab.dump("even-zero")
    assert cfg["name"] == "even-zero"
    out = cclab.run("criterion", cfg, which="I")
    assert out["exit_code"] == 0
    assert out["records"][-1]["record"] == "summary"
    assert out["records"][-1]["all_pass"] is True


def test_recursive_counterexample_fails_condition_3():
    out = cclab.run("criterion", cclab.dump("recursive-counterexample"), which="II")
    assert out["exit_code"] == 1
    assert out["records"][-1]["cond3"]["first_landing_index"] == 2


def test_build_and_density():
    cfg = cclab.dump("even-zero")
    assert cclab.run("build", cfg)["exit_code"] == 0
    assert cclab.run("density", cfg, threads=2)["exit_code"] == 0


def test_constant_intervals_build_is_infeasible():
    out = cclab.run("build", cclab.dump("constant-intervals"))
    assert out["exit_code"] == 1
    assert out["records"][-1]["status"] == "infeasible"


def test_verify_matches_gallery():
    checks = cclab.verify(cclab.dump("wide-gaps"))
    assert checks and all(c["ok"] for c in checks)


def test_eval_poly_on_backward_shift():
    op = {"kind": "scale", "lambda": 2.0, "inner": {"kind": "backward_shift", "weight": 1.0}}
    # (0.5 + 0.5 (2B)^2) e_2 = 0.5 e_2 + 2 e_0
    assert cclab.eval_poly([0.5, 0.0, 0.5], op, [0, 0, 1, 0]) == pytest.approx([2.0, 0, 0.5, 0])


def test_errors_surface_as_exceptions():
    cfg = cclab.dump("even-zero")
    cfg["dim"] = "sixteen"
    with pytest.raises(cclab.Error, match="dim"):
        cclab.run("density", cfg)
    with pytest.raises(cclab.Error):
        cclab.run("bogus", cclab.dump("even-zero"))
    with pytest.raises(cclab.Error):
        cclab.eval_poly([1.0], {"kind": "identity"}, [])
    with pytest.raises(cclab.JsonError):
        cclab.run("density", "{ not json")

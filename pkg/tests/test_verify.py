import json

import numpy as np
import pytest

from fibgrowth import mealy, verify


def test_identity_exhaustive_w6():
    report = verify.check_identity(6)
    assert report.ok and report.cases == 1882


def test_identity_examples():
    s, f = mealy.table("s", 8), mealy.table("f", 8)
    assert s.power(6) == s.power(4) == mealy.identity_table(8)
    assert f.power(3) == f and f.power(6) == f.power(4)


def test_identity_random_strengthened():
    report = verify.check_identity(10, mode="random", count=200, max_len=15, seed=3)
    assert report.ok and report.cases == 200 * 7


def test_identity_is_not_vacuous():
    # g^5 = g^3 already fails for some g, so the sixth/fourth power check has teeth
    tables = verify.enumerate_Wn(6).tables.astype(np.int64)
    assert not verify._powers_equal(tables, 2, 1).all()
    assert not verify._powers_equal(tables, 4, 2).all()


def test_relations():
    report = verify.check_relations(12, 14)
    assert report.ok and report.cases == 12


def test_no_solution():
    report = verify.check_no_solution(10, 12)
    assert report.verdict == verify.PASS
    I = mealy.automaton_I()
    assert mealy.separating_level(I, "sfsff", "f", 6) is not None
    assert mealy.separating_level(I, "sf", "fs", 2) is not None


def test_no_solution_inconclusive_when_level_too_low():
    report = verify.check_no_solution(4, 1)
    assert report.verdict == verify.INCONCLUSIVE
    assert "verified up to level 1" in report.summary()


def test_contraction():
    report = verify.check_contraction(14)
    assert report.ok
    with pytest.raises(ValueError):
        verify.check_contraction(15)


def test_lemma_suite():
    report = verify.check_lemma_suite(12)
    assert report.ok, report.failures
    assert any("f_4" in note for note in report.notes)


def test_report_round_trips_to_json():
    report = verify.check_relations(3, 6)
    report.record(False, "sf", 6, "forced")
    data = json.loads(json.dumps(report.to_dict()))
    assert data["verdict"] == "fail" and data["failures"][0]["witness"] == "sf"
    # replay the witness through tables alone
    assert mealy.table("sf", 6) != mealy.table("fs", 6)


def test_unknown_suite():
    with pytest.raises(KeyError):
        verify.run_suite("nope")

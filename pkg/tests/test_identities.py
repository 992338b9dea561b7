from __future__ import annotations

import json
import logging
from dataclasses import replace
from fractions import Fraction

import pytest

from hyperbinom import identities
from hyperbinom.errors import DomainError, OutOfDomain, UnknownIdentity, UnknownLemma
from hyperbinom.hyper import naive_sum, recognize, term_value
from hyperbinom.identities import (
    IDENTITIES,
    LEMMAS,
    GridConfig,
    Mode,
    Status,
    catalan,
    lah,
    verify_all,
    verify_identity,
    verify_lemma,
)
from hyperbinom.rules import ClosedValue


def test_lah_numbers():
    assert lah(0, 0) == 1
    assert lah(3, 2) == 6
    assert lah(4, 1) == 24
    assert lah(4, 5) == 0


def test_catalan_numbers():
    assert [catalan(n) for n in range(6)] == [1, 1, 2, 5, 14, 42]


@pytest.mark.parametrize(
    ("identity_id", "params", "expected"),
    [
        ("S0", {"n": 1}, Fraction(8, 3)),
        ("S1", {"n": 0}, Fraction(1, 2)),
        ("S2", {"n": 0}, Fraction(1, 2)),
        ("S3", {"n": 0}, Fraction(1, 2)),
        ("S4", {"n": 2, "m": 2}, Fraction(5)),
        ("S6", {"n": 2, "k": 1}, Fraction(6)),
        ("S7", {"n": 2}, Fraction(5)),
        ("S8", {"n": 2}, Fraction(4)),
    ],
)
def test_identity_spot_values(identity_id, params, expected):
    report = verify_identity(identity_id, **params)
    assert report.mode is Mode.EXACT
    assert report.lhs == expected
    assert report.rhs == expected
    assert report.passed


@pytest.mark.parametrize("identity_id", ["S0", "S1", "S2", "S3", "S7", "S8"])
@pytest.mark.parametrize("n", range(1, 9))
def test_exact_identities_small_n(identity_id, n):
    assert verify_identity(identity_id, n=n).status is Status.PASS


def test_s4_and_s6_small_grids():
    for n in range(2, 7):
        for m in range(2, n + 1):
            assert verify_identity("S4", n=n, m=m).passed
    for n in range(0, 6):
        for k in range(0, n + 1):
            assert verify_identity("S6", n=n, k=k).passed


def test_numeric_mode_on_an_exact_identity():
    report = verify_identity("S1", n=4, mode="numeric", digits=40)
    assert report.mode is Mode.NUMERIC
    assert report.passed
    assert report.abs_diff <= report.tolerance


def test_numeric_identities():
    s9 = verify_identity("S9")
    assert s9.mode is Mode.NUMERIC
    assert s9.passed
    s5 = verify_identity("S5")
    assert s5.passed
    assert s5.bracket is not None
    assert min(s5.bracket) <= s5.rhs <= max(s5.bracket)


def test_exact_mode_is_refused_for_numeric_identities():
    with pytest.raises(OutOfDomain):
        verify_identity("S5", mode="exact")


@pytest.mark.parametrize(
    ("identity_id", "params"),
    [("S0", {}), ("S0", {"n": 1, "m": 1}), ("S0", {"n": -1}), ("S4", {"n": 3, "m": 4})],
)
def test_out_of_domain_parameters(identity_id, params):
    with pytest.raises(OutOfDomain):
        verify_identity(identity_id, **params)


def test_points_outside_the_domain_are_informational(caplog):
    with caplog.at_level(logging.WARNING, logger="hyper-binom"):
        report = verify_identity("S4", n=3, m=1)
    assert report.informational
    assert "outside its stated domain" in caplog.text


def test_unknown_ids():
    with pytest.raises(UnknownIdentity):
        verify_identity("S10", n=1)
    with pytest.raises(UnknownLemma):
        verify_lemma("9.9")


def test_failed_identity_is_reported(monkeypatch):
    wrong = replace(IDENTITIES["S8"], rhs=lambda params: ClosedValue.of(2 ** int(params["n"]) + 1))
    monkeypatch.setitem(IDENTITIES, "S8", wrong)
    report = verify_identity("S8", n=2)
    assert report.status is Status.FAIL
    assert report.rhs == 5


def test_chain_replay_attaches_the_rule_trace():
    report = verify_identity("S8", n=3, chain=True)
    assert report.passed
    assert report.trace == ("recognize", "split", "binom-1f0", "gauss-second-half")


def test_s8_chain_closes_at_n_zero():
    # the tail here is 2F1(2, 1; 2; 1/2), whose upper and lower 2 would cancel
    report = verify_lemma("S8-chain", n=0)
    assert report.passed, report.message
    assert report.rhs == 1
    assert verify_identity("S8", n=0, chain=True).passed


def test_failed_chain_marks_the_identity(monkeypatch):
    broken = replace(
        LEMMAS["S8-chain"],
        evaluate=lambda params, digits: identities._Sides(Fraction(1), Fraction(2)),
    )
    monkeypatch.setitem(LEMMAS, "S8-chain", broken)
    report = verify_identity("S8", n=2, chain=True)
    assert report.status is Status.FAIL
    assert report.message == "step chain disagrees"


_N_LEMMAS = [
    "3.2",
    "3.4",
    "aux-induction",
    "8.2",
    "8.3",
    "8.4",
    "8.5",
    "8.6",
    "8.7",
    "S0-chain",
    "S1-chain",
    "S2-chain",
    "S3-chain",
    "S7-chain",
    "S8-chain",
]


@pytest.mark.parametrize("lemma_id", _N_LEMMAS)
@pytest.mark.parametrize("n", range(1, 9))
def test_lemmas_small_n(lemma_id, n):
    report = verify_lemma(lemma_id, n=n)
    assert report.passed, report.message


def test_two_parameter_chains():
    assert verify_lemma("S4-chain", n=4, m=2).passed
    assert verify_lemma("S4-chain", n=6, m=5).passed
    assert verify_lemma("S6-chain", n=2, k=1).passed
    assert verify_lemma("S6-chain", n=5, k=3).passed


@pytest.mark.parametrize("lemma_id", ["10.3", "10.4", "table-entry"])
def test_dilogarithm_lemmas(lemma_id):
    report = verify_lemma(lemma_id)
    assert report.mode is Mode.NUMERIC
    assert report.passed, report.message


@pytest.mark.parametrize("tag", ["(1-sqrt5)/2", "(sqrt5-1)/2", "-1"])
def test_tabulated_dilogarithm_values(tag):
    assert verify_lemma("li2-values", x=tag).passed


def test_s5_chain_passes_with_its_bracket():
    report = verify_lemma("S5-chain")
    assert report.passed, report.message
    assert report.digits == 128


def test_lemma_domain_is_enforced():
    with pytest.raises(OutOfDomain):
        verify_lemma("8.2", n=0)
    with pytest.raises(OutOfDomain):
        verify_lemma("li2-values", x="2")


def test_report_serializes_to_json():
    exact = verify_identity("S0", n=1).to_dict()
    assert exact["lhs"] == "8/3"
    assert exact["status"] == "pass"
    numeric = json.loads(json.dumps(verify_identity("S9").to_dict()))
    assert numeric["mode"] == "numeric"
    assert "abs_diff" in numeric
    assert "tolerance" in numeric


def test_verify_all_small_grid():
    config = GridConfig(identities=("S8", "S0"), lemmas=("8.7",), ranges={"n": (0, 5)})
    reports = verify_all(config, enable_progress=False)
    assert len(reports) == 18
    assert [r.id for r in reports[:6]] == ["S8"] * 6
    assert [r.params["n"] for r in reports[:6]] == list(range(6))
    assert all(report.passed for report in reports)


def test_verify_all_skips_points_outside_the_domain_unless_asked():
    config = GridConfig(identities=("S4",), lemmas=(), ranges={"n": (3, 3), "m": (0, 3)})
    assert len(verify_all(config, enable_progress=False)) == 2
    widened = replace(config, outside_domain=True)
    reports = verify_all(widened, enable_progress=False)
    assert len(reports) == 4
    assert [r.informational for r in reports] == [True, True, False, False]


def test_verify_all_records_errors_and_continues(monkeypatch):
    def explode(identity_id, **kwargs):
        raise DomainError("boom")

    monkeypatch.setattr(identities, "verify_identity", explode)
    config = GridConfig(identities=("S7",), lemmas=(), ranges={"n": (0, 2)})
    reports = verify_all(config, enable_progress=False)
    assert [r.status for r in reports] == [Status.ERROR, Status.ERROR]
    assert reports[0].message == "boom"


def test_verify_all_with_worker_processes_keeps_order():
    config = GridConfig(identities=("S8",), lemmas=(), ranges={"n": (0, 7)}, jobs=2)
    reports = verify_all(config, enable_progress=False)
    assert [r.params["n"] for r in reports] == list(range(8))
    assert all(report.passed for report in reports)


@pytest.mark.parametrize(
    "kwargs",
    [{"ranges": {"n": (5, 3)}}, {"jobs": 0}, {"identities": ("S11",)}, {"lemmas": ("nope",)}],
)
def test_grid_config_validation(kwargs):
    with pytest.raises((OutOfDomain, UnknownIdentity, UnknownLemma)):
        GridConfig(**kwargs)


@pytest.mark.slow
def test_full_grid():
    reports = verify_all(GridConfig(jobs=4), enable_progress=False)
    assert all(report.passed for report in reports)


def _round_trip_points():
    for n in range(3, 31):
        for identity_id in ("S0", "S1", "S2", "S3", "S7", "S8"):
            yield identity_id, {"n": n}
        for m in sorted({2, n // 2 + 1, n}):
            yield "S4", {"n": n, "m": m}
        for k in sorted({1, n // 2, n}):
            yield "S6", {"n": n, "k": k}


def test_recognition_round_trip_on_every_finite_summand():
    for identity_id, params in _round_trip_points():
        spec = IDENTITIES[identity_id].sum_spec(params)
        assert recognize(spec).total() == naive_sum(spec), (identity_id, params)


@pytest.mark.parametrize("identity_id", ["S5", "S9"])
def test_recognition_reproduces_infinite_summands(identity_id):
    spec = IDENTITIES[identity_id].sum_spec({})
    found = recognize(spec)
    for k in range(25):
        expected = term_value(spec.term, spec.start + k, spec.n, spec.m)
        assert found.prefactor * found.series.term(k) == expected

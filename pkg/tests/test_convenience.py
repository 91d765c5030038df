"""Saved-effort and saved-time arithmetic plus trace replay."""

import pytest

from habitminer.clustering import ProbabilisticCompositionPattern
from habitminer.convenience import (
    WaitTable,
    evaluate,
    saving_efforts,
    saving_time,
)
from habitminer.errors import DataError
from habitminer.events import EventDatabase, EventSequence, ServiceEvent
from habitminer.periodic import RepresentativeInterval
from habitminer.predict import PeriodicPattern, PredictionModel
from habitminer.relations import AllenRelation, TemporalCell, TemporalMatrix

MIN = 60


def test_saving_efforts_identity_and_disjoint():
    assert saving_efforts({"a", "b"}, {"a", "b"}) == 1.0
    assert saving_efforts({"a"}, {"b"}) == 0.0
    assert saving_efforts({"a", "b"}, {"a", "b", "c"}) == pytest.approx(2 / 3)


def test_saving_efforts_empty_actual_excluded():
    assert saving_efforts({"a"}, set()) is None


def test_saving_time_sums_waits():
    waits = WaitTable({"a": 5, "b": 3})
    assert saving_time({"a", "b"}, waits) == 8
    assert saving_time(set(), waits) == 0
    assert saving_time({"unknown"}, waits) == 0


def test_saving_time_heater_preheat():
    waits = WaitTable({"heater": 5})
    assert saving_time({"heater"}, waits) == 5


def test_wait_table_rejects_negative():
    with pytest.raises(DataError):
        WaitTable({"a": -1})


def _chain_model():
    def pattern(pid, svc, start, end):
        return PeriodicPattern(
            pid,
            ProbabilisticCompositionPattern(((svc, 1.0),)),
            (
                RepresentativeInterval(
                    start=start, end=end, location="kitchen", probability=1.0,
                    tolerance=120, support_count=1, total_count=1,
                ),
            ),
        )

    patterns = (
        pattern("pa", "stove", 7 * 60, 7 * 60 + 30),
        pattern("pb", "radio", 8 * 60, 8 * 60 + 20),
        pattern("pc", "fan", 9 * 60, 9 * 60 + 15),
    )
    cells = {
        (0, 1): TemporalCell(1.0, {AllenRelation.BEFORE: 1.0}),
        (1, 2): TemporalCell(1.0, {AllenRelation.BEFORE: 1.0}),
    }
    matrix = TemporalMatrix(("pa", "pb", "pc"), cells)
    return PredictionModel(patterns, matrix, ("fan", "radio", "stove"))


def _scripted_trace(days=1):
    sequences = []
    for day in range(days):
        base = day * 1440
        events = (
            ServiceEvent("stove", (base + 7 * 60) * MIN, (base + 7 * 60 + 30) * MIN, "kitchen"),
            ServiceEvent("radio", (base + 8 * 60) * MIN, (base + 8 * 60 + 20) * MIN, "kitchen"),
            ServiceEvent("fan", (base + 9 * 60) * MIN, (base + 9 * 60 + 15) * MIN, "kitchen"),
        )
        sequences.append(EventSequence(day, events))
    return EventDatabase(tuple(sequences))


def test_evaluate_hand_scripted_day():
    report = evaluate(
        _scripted_trace(),
        _chain_model(),
        WaitTable({"stove": 5, "radio": 3, "fan": 2}),
        window=60,
    )
    # boundaries at 07:30 and 08:20 predict the actual next service; the
    # 09:15 window sees nothing actual and is excluded from the average
    scored = [w for w in report.windows if w.efforts is not None]
    assert [w.efforts for w in scored] == [1.0, 1.0]
    assert [w.correct for w in scored] == [("radio",), ("fan",)]
    assert report.days[0].saving_efforts == pytest.approx(1.0)
    assert report.days[0].saving_time == 3 + 2
    assert report.overall_efforts == pytest.approx(1.0)
    assert report.overall_time == 5


def test_evaluate_oracle_predictor_saves_all_waits():
    waits = WaitTable({"stove": 5, "radio": 3, "fan": 2})
    report = evaluate(_scripted_trace(days=3), _chain_model(), waits, window=60)
    # every followed service (radio, fan) is correctly predicted every day
    assert report.overall_efforts == pytest.approx(1.0)
    assert report.overall_time == 3 * (3 + 2)
    assert [d.saving_time for d in report.days] == [5, 5, 5]


def test_evaluate_counts_misses():
    # an extra unmodelled service in the last window scores zero effort
    base_db = _scripted_trace()
    seq = base_db.sequences[0]
    extra = ServiceEvent("lamp", 10 * 3600, 10 * 3600 + 600, "kitchen")
    db = EventDatabase((EventSequence(0, seq.events + (extra,)),))
    report = evaluate(db, _chain_model(), WaitTable({}), window=60)
    efforts = [w.efforts for w in report.windows if w.efforts is not None]
    assert efforts == [1.0, 1.0, 0.0]
    assert report.overall_efforts == pytest.approx(2 / 3)


def test_evaluate_involvement_threshold():
    model = _chain_model()
    # raising the cutoff above 1.0 empties every predicted set
    report = evaluate(
        _scripted_trace(), model, WaitTable({}), window=60, involvement_threshold=1.1
    )
    assert all(w.efforts == 0.0 for w in report.windows if w.efforts is not None)


def test_report_as_dict_shape():
    report = evaluate(_scripted_trace(), _chain_model(), WaitTable({"radio": 3}), window=60)
    doc = report.as_dict()
    assert set(doc) == {"days", "overall"}
    assert doc["overall"]["saved_time_min"] == 3
    assert doc["days"][0]["day"] == 0

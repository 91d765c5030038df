"""Shared fixtures: the running-example database and planted traces."""

import pytest

from habitminer.events import EventDatabase, EventSequence, ServiceEvent
from habitminer.relations import AllenRelation
from habitminer.synth import ActivitySpec, SuccessorLink

_COORDS = {
    "A": (3, 3), "B": (5, 1), "C": (5, 2), "D": (6, 2), "E": (1, 2),
    "F": (2, 4), "M": (4, 4), "K": (4, 5), "G": (7, 1),
}


def _ev(svc, start_min, end_min, day):
    coord = _COORDS[svc]
    return ServiceEvent(
        svc,
        (day * 1440 + start_min) * 60,
        (day * 1440 + end_min) * 60,
        "room",
        start_coord=coord,
        end_coord=coord,
    )


def build_running_example() -> EventDatabase:
    """Three day-sequences whose endpoint lists reproduce the mining
    walk-through: pair supports A:3 B:3 C:3 E:2 F:3 and the interleaved
    pattern <A+ A- B+ C+ C- B-> at support 3; the E/F pattern averages a
    temporal proximity of 0.879 and the interleaved one 0.494."""
    days = [
        [_ev("A", 1, 3, 0), _ev("B", 5, 23, 0), _ev("C", 8, 15, 0),
         _ev("D", 12, 30, 0), _ev("E", 60, 75, 0), _ev("F", 61, 73, 0)],
        [_ev("A", 0, 13, 1), _ev("B", 13, 60, 1), _ev("M", 13, 62, 1),
         _ev("C", 14, 59, 1), _ev("K", 61, 63, 1), _ev("E", 70, 151, 1),
         _ev("F", 75, 133, 1)],
        [_ev("A", 2, 10, 2), _ev("B", 12, 40, 2), _ev("C", 15, 35, 2),
         _ev("G", 45, 55, 2), _ev("F", 70, 90, 2)],
    ]
    return EventDatabase(
        tuple(
            EventSequence(
                sid,
                tuple(sorted(evs, key=lambda e: (e.start_time, e.end_time, e.service_id))),
            )
            for sid, evs in enumerate(days)
        )
    )


@pytest.fixture(scope="session")
def running_example() -> EventDatabase:
    return build_running_example()


def planted_household() -> list:
    """Five activities with regular schedules; two share the kitchen."""
    return [
        ActivitySpec("breakfast", "kitchen", ("stove", "toaster", "fridge"),
                     optional=(("radio", 0.4), ("cupboard", 0.35)),
                     start_mean=6 * 60 + 30, start_jitter=10,
                     duration=(35, 45), daily_probability=1.0),
        ActivitySpec("shower", "bathroom", ("heater", "shower", "fan"),
                     optional=(("speaker", 0.3),),
                     start_mean=7 * 60 + 30, start_jitter=10,
                     duration=(25, 35), daily_probability=0.9),
        ActivitySpec("lunch", "kitchen", ("microwave", "sink", "kettle"),
                     start_mean=12 * 60, start_jitter=15,
                     duration=(30, 40), daily_probability=0.85),
        ActivitySpec("tv", "livingroom", ("tv", "lamp", "console"),
                     optional=(("blinds", 0.35),),
                     start_mean=20 * 60, start_jitter=15,
                     duration=(40, 50), daily_probability=0.95),
        ActivitySpec("bed", "bedroom", ("lights", "alarm", "blind"),
                     start_mean=22 * 60 + 45, start_jitter=10,
                     duration=(20, 30), daily_probability=1.0),
    ]


def planted_chain() -> list:
    """A deterministic cook -> dishes link for transition recovery."""
    return [
        ActivitySpec("cook", "kitchen", ("stove", "hood", "light"),
                     start_mean=18 * 60, start_jitter=10,
                     duration=(30, 40), daily_probability=1.0,
                     successors=(SuccessorLink("dishes", AllenRelation.BEFORE, 1.0),)),
        ActivitySpec("dishes", "scullery", ("sink", "rack", "soap"),
                     start_mean=19 * 60, duration=(15, 20), daily_probability=0.0),
    ]

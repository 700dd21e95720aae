import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pismg import (
    ActionSpec,
    GameFormatError,
    GameSpec,
    GameValidationError,
    SojournModel,
    StateSpec,
    Transition,
    expected_sojourn,
    parse_game,
    serialize_game,
    validate,
)

import _corpus


MINIMAL = """
{"name": "loop", "states": [
  {"id": 1, "player": "I", "actions": [
    {"label": "stay", "reward": 2.0,
     "sojourn": {"kind": "deterministic", "t": 0.5},
     "transitions": [{"to": 1, "prob": 1.0}]}]}]}
"""


def _patch_example(example_path, mutate):
    obj = json.loads(example_path.read_text())
    mutate(obj)
    return json.dumps(obj)


class TestParsing:
    def test_example_shape(self, example_spec):
        assert example_spec.name == "example_s5"
        assert example_spec.n == 4
        assert [st_.controller for st_ in example_spec.states] == ["I", "I", "II", "II"]
        assert [len(st_.actions) for st_ in example_spec.states] == [2, 2, 2, 2]
        assert example_spec.reference_values == (2.2985, 2.2985, 2.9, 0.9)

    def test_minimal_game(self):
        spec = parse_game(MINIMAL)
        assert spec.n == 1
        assert spec.state(1).actions[0].default_sojourn == SojournModel(
            "deterministic", (0.5,)
        )

    def test_syntax_error_reports_position(self):
        with pytest.raises(GameFormatError, match=r"line 2 column"):
            parse_game('{"name": "x",\n "states": [}')

    def test_missing_field(self, example_path):
        text = _patch_example(example_path, lambda o: o["states"][0].pop("actions"))
        with pytest.raises(GameFormatError, match="missing field 'actions'"):
            parse_game(text)

    def test_rejects_unknown_player_tag(self, example_path):
        def mutate(o):
            o["states"][2]["player"] = "both"

        with pytest.raises(GameFormatError, match="player must be 'I' or 'II'"):
            parse_game(_patch_example(example_path, mutate))

    def test_rejects_unknown_sojourn_kind(self, example_path):
        def mutate(o):
            o["states"][0]["actions"][0]["sojourn"] = {"kind": "pareto", "alpha": 2}

        with pytest.raises(GameFormatError, match="unknown sojourn kind"):
            parse_game(_patch_example(example_path, mutate))

    def test_reward_must_be_numeric(self, example_path):
        def mutate(o):
            o["states"][0]["actions"][0]["reward"] = "high"

        with pytest.raises(GameFormatError, match="expected a number"):
            parse_game(_patch_example(example_path, mutate))


class TestValidation:
    def test_row_sum_violation_names_state(self, example_path):
        def mutate(o):
            o["states"][0]["actions"][0]["transitions"][0]["prob"] = 0.4

        with pytest.raises(GameValidationError, match="state 1 action 1"):
            parse_game(_patch_example(example_path, mutate))

    def test_row_sum_within_tolerance_accepted(self, example_path):
        def mutate(o):
            o["states"][0]["actions"][0]["transitions"][0]["prob"] = 0.5 + 4e-10

        spec = parse_game(_patch_example(example_path, mutate))
        # stored verbatim, not renormalized in place
        assert spec.state(1).actions[0].transitions[0].prob == 0.5 + 4e-10

    def test_unknown_destination(self, example_path):
        def mutate(o):
            o["states"][0]["actions"][0]["transitions"][0]["to"] = 9

        with pytest.raises(GameValidationError, match="unknown state 9"):
            parse_game(_patch_example(example_path, mutate))

    def test_duplicate_destination(self, example_path):
        def mutate(o):
            o["states"][0]["actions"][0]["transitions"][1]["to"] = 1

        with pytest.raises(GameValidationError, match="duplicate transition"):
            parse_game(_patch_example(example_path, mutate))

    def test_ids_must_be_consecutive(self, example_path):
        def mutate(o):
            o["states"][1]["id"] = 5

        with pytest.raises(GameValidationError, match="position 2 holds id 5"):
            parse_game(_patch_example(example_path, mutate))

    def test_nonpositive_sojourn_rejected(self, example_path):
        def mutate(o):
            o["states"][0]["actions"][0]["sojourn"] = {"kind": "mean", "value": 0.0}

        with pytest.raises(GameValidationError, match="nonpositive sojourn"):
            parse_game(_patch_example(example_path, mutate))

    def test_missing_sojourn_coverage(self, example_path):
        def mutate(o):
            del o["states"][0]["actions"][0]["sojourn"]

        with pytest.raises(GameValidationError, match="no sojourn model"):
            parse_game(_patch_example(example_path, mutate))

    def test_reference_values_length_checked(self, example_path):
        def mutate(o):
            o["reference_values"] = [1.0, 2.0]

        with pytest.raises(GameValidationError, match="reference_values"):
            parse_game(_patch_example(example_path, mutate))

    def test_report_partition(self, example_spec):
        report = validate(example_spec)
        assert report.s1 == (1, 2)
        assert report.s2 == (3, 4)
        assert report.player1_action_counts == (2, 2)
        assert report.player2_action_counts == (2, 2)
        assert report.d1 == 4
        assert report.d2 == 4
        assert report.warnings == ()

    def test_one_sided_game_has_trivial_opponent_count(self):
        spec = parse_game(MINIMAL)
        report = validate(spec)
        assert report.s2 == ()
        assert report.d2 == 1

    def test_duplicate_labels_warn(self):
        trans = (Transition(1, 1.0),)
        soj = SojournModel("mean", (1.0,))
        spec = GameSpec(
            "dup",
            (
                StateSpec(
                    1,
                    "I",
                    (
                        ActionSpec("a", 1.0, trans, soj),
                        ActionSpec("a", 2.0, trans, soj),
                    ),
                ),
            ),
        )
        report = validate(spec)
        assert any("duplicate action labels" in w for w in report.warnings)


class TestExpectedSojourn:
    def test_default_only_is_exact(self, example_spec):
        act = example_spec.state(1).actions[1]
        assert expected_sojourn(act) == 0.9

    def test_weighted_mix(self):
        act = ActionSpec(
            "a",
            0.0,
            (
                Transition(1, 0.5, SojournModel("exponential", (2.0,))),
                Transition(2, 0.5, SojournModel("uniform", (0.0, 3.0))),
            ),
        )
        # 0.5 * (1/2) + 0.5 * 1.5
        assert expected_sojourn(act) == pytest.approx(1.0, abs=1e-15)

    def test_transition_model_overrides_default(self):
        act = ActionSpec(
            "a",
            0.0,
            (
                Transition(1, 0.25, SojournModel("deterministic", (4.0,))),
                Transition(2, 0.75),
            ),
            default_sojourn=SojournModel("mean", (2.0,)),
        )
        assert expected_sojourn(act) == pytest.approx(0.25 * 4.0 + 0.75 * 2.0, abs=1e-15)

    def test_model_means(self):
        assert SojournModel("mean", (1.3,)).mean == 1.3
        assert SojournModel("deterministic", (0.7,)).mean == 0.7
        assert SojournModel("exponential", (4.0,)).mean == 0.25
        assert SojournModel("uniform", (1.0, 2.0)).mean == 1.5


class TestRoundTrip:
    def test_example_round_trips_exactly(self, example_path, example_spec):
        assert parse_game(serialize_game(example_spec)) == example_spec

    def test_serialize_is_idempotent(self, example_spec):
        once = serialize_game(example_spec)
        assert serialize_game(parse_game(once)) == once

    def test_corpus_round_trips(self):
        for spec in _corpus.game_corpus(10, seed=424242):
            assert parse_game(serialize_game(spec)) == spec


# hypothesis-driven all-float round trip

_finite = dict(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def _sojourns(draw):
    kind = draw(st.sampled_from(("mean", "deterministic", "exponential", "uniform")))
    if kind == "uniform":
        a = draw(st.floats(0.0, 2.0, **_finite))
        return SojournModel("uniform", (a, a + draw(st.floats(0.25, 3.0, **_finite))))
    return SojournModel(kind, (draw(st.floats(0.05, 5.0, **_finite)),))


@st.composite
def _games(draw):
    n = draw(st.integers(1, 4))
    states = []
    for sid in range(1, n + 1):
        actions = []
        for a in range(draw(st.integers(1, 2))):
            dests = draw(
                st.lists(st.integers(1, n), min_size=1, max_size=n, unique=True)
            )
            weights = draw(
                st.lists(
                    st.integers(1, 9), min_size=len(dests), max_size=len(dests)
                )
            )
            total = sum(weights)
            actions.append(
                ActionSpec(
                    label=f"a{a + 1}",
                    reward=draw(st.floats(-5.0, 5.0, **_finite)),
                    transitions=tuple(
                        Transition(d, w / total) for d, w in zip(dests, weights)
                    ),
                    default_sojourn=draw(_sojourns()),
                )
            )
        states.append(
            StateSpec(sid, draw(st.sampled_from(("I", "II"))), tuple(actions))
        )
    return GameSpec("hyp", tuple(states))


@settings(max_examples=60, deadline=None)
@given(_games())
def test_round_trip_property(spec):
    validate(spec)
    assert parse_game(serialize_game(spec)) == spec


@settings(max_examples=60, deadline=None)
@given(_games())
def test_expected_sojourn_is_convex_combination(spec):
    for state in spec.states:
        for act in state.actions:
            means = [
                (tr.sojourn or act.default_sojourn).mean for tr in act.transitions
            ]
            tau = expected_sojourn(act)
            assert min(means) - 1e-12 <= tau <= max(means) + 1e-12

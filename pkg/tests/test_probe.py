"""Belief-probe tests: square ordering, normalization, metrics, and the
heatmap exports."""

import csv
import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from chesstags.core import BoardState, Color, PieceKind
from chesstags.errors import NonFiniteScore
from chesstags.probe import (
    SQUARE_NAMES,
    ProbePrompt,
    belief_state,
    build_prompts,
    emit_heatmap,
    probe_metrics,
    render_heatmap_png,
    uniform_oracle,
)

INITIAL = BoardState.initial()
WHITE_KING = ProbePrompt.default(Color.WHITE, PieceKind.KING)


def one_hot_oracle(square):
    index = SQUARE_NAMES.index(square)

    def oracle(prompt, continuations):
        return [0.0 if i == index else -20.0 for i in range(len(continuations))]

    return oracle


# -- square order ------------------------------------------------------------

def test_square_names_are_file_major():
    assert SQUARE_NAMES[0] == "a1"
    assert SQUARE_NAMES[7] == "a8"
    assert SQUARE_NAMES[8] == "b1"
    assert SQUARE_NAMES[63] == "h8"
    assert len(set(SQUARE_NAMES)) == 64


# -- prompts -----------------------------------------------------------------

def test_build_prompts_initial_position():
    prompts = build_prompts(INITIAL)
    assert len(prompts) == 12
    assert prompts[0].template == "White's pawn on " or any(
        p.template == "White's king on " for p in prompts
    )


def test_build_prompts_skips_absent_pieces():
    board = BoardState.from_fen("k7/8/8/8/8/8/8/4K3 w - - 0 1")
    prompts = build_prompts(board)
    assert {(p.color, p.kind) for p in prompts} == {
        (Color.WHITE, PieceKind.KING),
        (Color.BLACK, PieceKind.KING),
    }


# -- distributions -----------------------------------------------------------

def test_uniform_oracle_gives_exact_uniform_distribution():
    state = belief_state(uniform_oracle, WHITE_KING, INITIAL)
    assert all(p == 1.0 / 64.0 for p in state.distribution)
    assert math.fsum(state.distribution) == pytest.approx(1.0, abs=1e-15)
    assert state.valid_squares == {"e1"}


def test_uniform_weight_is_valid_count_over_64():
    pawn = ProbePrompt.default(Color.WHITE, PieceKind.PAWN)
    state = belief_state(uniform_oracle, pawn, INITIAL)
    weight, _ = probe_metrics([state])
    assert weight == 8.0 / 64.0


def test_one_hot_oracle_argmax():
    state = belief_state(one_hot_oracle("e1"), WHITE_KING, INITIAL)
    assert state.argmax_square == "e1"
    assert state.probability("e1") > 0.99
    weight, accuracy = probe_metrics([state])
    assert accuracy == 1.0


def test_argmax_tie_breaks_file_major():
    state = belief_state(uniform_oracle, WHITE_KING, INITIAL)
    assert state.argmax_square == "a1"


def test_context_prepended_to_prompt():
    seen = {}

    def recording_oracle(prompt, continuations):
        seen["prompt"] = prompt
        return [0.0] * len(continuations)

    belief_state(recording_oracle, WHITE_KING, INITIAL, context="[v1] [PGN]")
    assert seen["prompt"] == "[v1] [PGN] White's king on "


def test_non_finite_scores_rejected():
    with pytest.raises(NonFiniteScore):
        belief_state(lambda p, c: [float("nan")] * 64, WHITE_KING, INITIAL)
    with pytest.raises(NonFiniteScore):
        belief_state(lambda p, c: [0.0] * 63, WHITE_KING, INITIAL)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=-30, max_value=30), min_size=64, max_size=64))
def test_distribution_normalized_for_any_finite_scores(scores):
    state = belief_state(lambda p, c: scores, WHITE_KING, INITIAL)
    assert math.fsum(state.distribution) == pytest.approx(1.0, abs=1e-9)
    assert all(p >= 0.0 for p in state.distribution)


# -- metrics -----------------------------------------------------------------

def test_probe_metrics_averages():
    hit = belief_state(one_hot_oracle("e1"), WHITE_KING, INITIAL)
    miss = belief_state(one_hot_oracle("h8"), WHITE_KING, INITIAL)
    weight, accuracy = probe_metrics([hit, miss])
    assert accuracy == 0.5
    assert weight == pytest.approx((hit.probability("e1") + miss.probability("e1")) / 2)


def test_probe_metrics_empty_rejected():
    with pytest.raises(ValueError):
        probe_metrics([])


# -- export ------------------------------------------------------------------

def test_heatmap_csv_round_trip(tmp_path):
    state = belief_state(one_hot_oracle("c2"), ProbePrompt.default(Color.WHITE, PieceKind.PAWN), INITIAL)
    path = emit_heatmap(state, tmp_path / "pawn.csv")
    with open(path, newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert len(rows) == 8 and all(len(r) == 8 for r in rows)
    # rank 8 comes first; c2 is row 6 (rank 2), column 2 (file c)
    assert float(rows[6][2]) == state.probability("c2")
    flattened = {
        f"{file_char}{8 - row_idx}": float(rows[row_idx][col])
        for row_idx in range(8)
        for col, file_char in enumerate("abcdefgh")
    }
    for name in SQUARE_NAMES:
        assert flattened[name] == state.probability(name)

    sidecar = json.loads((tmp_path / "pawn.csv.json").read_text(encoding="utf-8"))
    assert sidecar["color"] == "White" and sidecar["piece"] == "P"
    assert sidecar["valid_squares"] == sorted(f"{f}2" for f in "abcdefgh")


def test_heatmap_png_rendered(tmp_path):
    state = belief_state(uniform_oracle, WHITE_KING, INITIAL)
    path = render_heatmap_png(state, tmp_path / "king.png")
    data = path.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 1000

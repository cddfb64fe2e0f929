"""Input-assembly tests: byte-exact tokens, ablation layouts, spans, and
round-trip recovery."""

import pytest
from hypothesis import given, settings, strategies as st

from chesstags.core import BoardState, GameRecord, parse_pgn, parse_san, replay
from chesstags.errors import InconsistentState
from chesstags.representation import (
    Ablation,
    RepresentationConfig,
    UNCONDITIONED_TOKEN,
    assemble_input,
    render_game_state,
    render_tags,
    split_input,
)
from chesstags.tags import (
    CommentaryType,
    LengthTag,
    MoveQuality,
    SuggestedLine,
    TagSet,
)

INITIAL = BoardState.initial()


def fen_record(board):
    return GameRecord(headers=(("FEN", board.to_fen()),))


def game_after(*sans):
    board = BoardState.initial()
    plies = []
    for san in sans:
        move = parse_san(board, san)
        plies.append(move)
        from chesstags.core import apply_move

        board = apply_move(board, move)
    return GameRecord(plies=tuple(plies)), board


# -- piece and attack tokens -------------------------------------------------

def test_piece_token_format():
    board = BoardState.from_fen("k7/8/2R5/8/8/8/8/4K3 w - - 0 1")
    segments = dict(render_game_state(fen_record(board), board, RepresentationConfig.fully()))
    assert "White R_c6" in segments["PIECES"]
    board2 = BoardState.from_fen("k7/8/8/2R5/8/8/8/4K3 w - - 0 1")
    segments2 = dict(render_game_state(fen_record(board2), board2, RepresentationConfig.fully()))
    assert "White R_c5" in segments2["PIECES"]


def test_piece_listing_order():
    # per color: king, queen, rooks, bishops, knights, pawns; white first
    segments = dict(render_game_state(fen_record(INITIAL), INITIAL, RepresentationConfig.fully()))
    tokens = segments["PIECES"].split(" ")
    assert tokens[0:2] == ["White", "K_e1"]
    assert tokens[2:4] == ["White", "Q_d1"]
    assert "Black K_e8" in segments["PIECES"]
    assert segments["PIECES"].index("White K_e1") < segments["PIECES"].index("Black K_e8")


def test_attack_token_format():
    board = BoardState.from_fen("k7/8/8/8/8/8/p7/R3K3 w - - 0 1")
    segments = dict(render_game_state(fen_record(board), board, RepresentationConfig.fully()))
    assert segments["ATTACKS"] == "White R_a1$P_a2"


def test_initial_position_has_no_attacks():
    segments = dict(render_game_state(fen_record(INITIAL), INITIAL, RepresentationConfig.fully()))
    assert segments["ATTACKS"] == ""


def test_inconsistent_board_rejected():
    record, board = game_after("e4")
    with pytest.raises(InconsistentState):
        render_game_state(record, INITIAL, RepresentationConfig.fully())


# -- tag rendering -----------------------------------------------------------

def test_render_tag_fixtures():
    tags = TagSet(
        commentary_type=CommentaryType.MOVE_QUALITY,
        move_quality=MoveQuality.GOOD,
        suggested=(SuggestedLine(sans=("Ne4",), anchor=INITIAL),),
        pronouns=("he",),
        proper_nouns=("Carlsen",),
        length=LengthTag.SHORT,
    )
    assert render_tags(tags) == (
        "[Commentary Type] Move Quality [Move Quality] Good "
        "[Suggested Move] Ne4 [Pronoun] he [Proper Noun] Carlsen [short]"
    )


@pytest.mark.parametrize("length,token", [
    (LengthTag.SHORT, "[short]"),
    (LengthTag.MEDIUM, "[medium]"),
    (LengthTag.LONG, "[long]"),
])
def test_length_token_is_bare(length, token):
    assert render_tags(TagSet(length=length)) == token


def test_render_tags_family_subset():
    tags = TagSet(
        commentary_type=CommentaryType.GENERAL,
        move_quality=MoveQuality.BLUNDER,
        length=LengthTag.LONG,
    )
    assert render_tags(tags, families=("Move Quality",)) == "[Move Quality] Blunder"


def test_render_tags_multiple_suggested_lines():
    tags = TagSet(
        suggested=(
            SuggestedLine(sans=("e4", "e5"), anchor=INITIAL),
            SuggestedLine(sans=("d4",), anchor=INITIAL),
        )
    )
    assert render_tags(tags) == "[Suggested Move] e4 e5 [Suggested Move] d4"


def test_absent_tags_omitted():
    assert render_tags(TagSet()) == ""


# -- assembly ----------------------------------------------------------------

def full_input(record, board, move_san, tags):
    move = parse_san(board, move_san)
    config = RepresentationConfig.fully()
    segments = render_game_state(record, board, config)
    return assemble_input(segments, move, tags, config, board=board)


def test_unconditioned_is_single_token():
    config = RepresentationConfig.unconditioned()
    text = assemble_input([], None, None, config)
    assert text.text == UNCONDITIONED_TOKEN == "[Unconditioned]"
    assert text.segment_spans == ()


def test_move_only_is_bare_san():
    config = RepresentationConfig.move_only()
    move = parse_san(INITIAL, "Nf3")
    text = assemble_input([], move, None, config)
    assert text.text == "Nf3"
    assert text.segment("MOVE") == "Nf3"


def test_fully_conditioned_layout():
    record, board = game_after("e4", "e5")
    tags = TagSet(
        commentary_type=CommentaryType.MOVE_DESCRIPTION,
        move_quality=MoveQuality.GOOD,
        length=LengthTag.MEDIUM,
    )
    text = full_input(record, board, "Nf3", tags)
    assert text.text.startswith("[v1] [PGN] 1. e4 e5 [PIECES] ")
    assert " [ATTACKS] " in text.text
    assert " [MOVE] Nf3 [Commentary Type] Move Description [Move Quality] Good [medium]" in text.text


def test_segment_spans_slice_correctly():
    record, board = game_after("e4", "e5")
    tags = TagSet(move_quality=MoveQuality.GOOD, length=LengthTag.SHORT)
    text = full_input(record, board, "Nf3", tags)
    spans = dict((name, text.text[a:b]) for name, a, b in text.segment_spans)
    assert spans["PGN"] == "1. e4 e5"
    assert spans["MOVE"] == "Nf3"
    assert spans["TAGS"] == "[Move Quality] Good [short]"
    assert spans["PIECES"].startswith("White K_e1")


def test_split_input_round_trip():
    record, board = game_after("d4", "d5")
    tags = TagSet(move_quality=MoveQuality.MISTAKE, length=LengthTag.LONG)
    text = full_input(record, board, "c4", tags)
    parts = split_input(text.text)
    assert parts["PGN"] == "1. d4 d5"
    assert parts["MOVE"] == "c4"
    assert parts["TAGS"] == "[Move Quality] Mistake [long]"
    assert parts["PIECES"] == text.segment("PIECES")
    assert parts["ATTACKS"] == text.segment("ATTACKS")


def test_split_input_special_forms():
    assert split_input(UNCONDITIONED_TOKEN) == {}
    assert split_input("Nf3") == {"MOVE": "Nf3"}


def test_game_state_ablation_has_no_tags():
    record, board = game_after("e4")
    config = RepresentationConfig.game_state()
    segments = render_game_state(record, board, config)
    move = parse_san(board, "e5")
    tags = TagSet(move_quality=MoveQuality.GOOD, length=LengthTag.SHORT)
    text = assemble_input(segments, move, tags, config, board=board)
    assert "[Move Quality]" not in text.text
    assert "[short]" not in text.text


def test_fully_config_requires_everything():
    with pytest.raises(ValueError):
        RepresentationConfig(ablation=Ablation.FULLY, attacks=False)
    with pytest.raises(ValueError):
        RepresentationConfig(ablation=Ablation.FULLY, tag_families=("Length",))
    with pytest.raises(ValueError):
        RepresentationConfig(ablation=Ablation.WITH_TAGS, tag_families=("Nope",))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.sampled_from(["e4", "d4", "Nf3", "c4"]), max_size=1),
       st.sampled_from(list(LengthTag)))
def test_assembly_deterministic(first, length):
    sans = first or ["e4"]
    record, board = game_after(*sans)
    move_san = "e5" if board.side_to_move.value == "Black" else "e4"
    tags = TagSet(length=length)
    a = full_input(record, board, move_san, tags)
    b = full_input(record, board, move_san, tags)
    assert a == b

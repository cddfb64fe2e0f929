"""Tag extractor tests: quality markers, type routing, suggested-move
legality, entity heuristics, and length cutoffs."""

import pytest
from hypothesis import given, strategies as st

from chesstags.core import BoardState
from chesstags.tags import (
    Commentary,
    CommentaryType,
    LengthTag,
    MoveQuality,
    SHORT_MAX_TOKENS,
    MEDIUM_MAX_TOKENS,
    annotate,
    extract_commentary_type,
    extract_entities,
    extract_move_quality_text,
    extract_suggested_moves,
    tag_length,
)

INITIAL = BoardState.initial()


def c(text):
    return Commentary(text=text)


# -- move quality ------------------------------------------------------------

@pytest.mark.parametrize(
    "text,quality",
    [
        ("!! What a move", MoveQuality.EXCELLENT),
        ("! Strong choice", MoveQuality.GOOD),
        ("!? Interesting but dubious", MoveQuality.INACCURACY),
        ("? This loses a pawn", MoveQuality.MISTAKE),
        ("?? Hangs the queen", MoveQuality.BLUNDER),
    ],
)
def test_quality_markers(text, quality):
    assert extract_move_quality_text(c(text)) is quality


@pytest.mark.parametrize(
    "text,quality",
    [
        ("That was a huge blunder by white.", MoveQuality.BLUNDER),
        ("A clear mistake in the opening.", MoveQuality.MISTAKE),
        ("This is an inaccuracy.", MoveQuality.INACCURACY),
        ("An excellent resource!", MoveQuality.EXCELLENT),
        ("A brilliant sacrifice.", MoveQuality.EXCELLENT),
        ("A solid move keeping the tension.", MoveQuality.GOOD),
    ],
)
def test_quality_lexicon(text, quality):
    assert extract_move_quality_text(c(text)) is quality


def test_quality_absent():
    assert extract_move_quality_text(c("The game continues quietly.")) is None


def test_two_char_markers_beat_one_char_prefixes():
    # "!?" must not be read as "!", nor "??" as "?"
    assert extract_move_quality_text(c("!?")) is MoveQuality.INACCURACY
    assert extract_move_quality_text(c("??")) is MoveQuality.BLUNDER


# -- commentary type ---------------------------------------------------------

@pytest.mark.parametrize(
    "text,ctype",
    [
        ("?? Hangs the queen", CommentaryType.MOVE_QUALITY),
        ("Better was Nf3 here.", CommentaryType.MOVE_COMPARISON),
        ("White is trying to open the center.", CommentaryType.PLANNING),
        ("Nf3", CommentaryType.MOVE_DESCRIPTION),
        ("The knight moves to f3.", CommentaryType.MOVE_DESCRIPTION),
        ("White has a clear advantage now.", CommentaryType.CONTEXTUAL),
        ("These two have met many times before.", CommentaryType.GENERAL),
    ],
)
def test_type_fixtures(text, ctype):
    got, confidence = extract_commentary_type(c(text))
    assert got is ctype
    assert 0.0 < confidence <= 1.0


def test_type_san_only_sequence():
    got, confidence = extract_commentary_type(c("e4 e5 Nf3 Nc6"))
    assert got is CommentaryType.MOVE_DESCRIPTION
    assert confidence == pytest.approx(0.9)


def test_quality_outranks_comparison():
    got, _ = extract_commentary_type(c("?? Better was Nf3."))
    assert got is CommentaryType.MOVE_QUALITY


# -- suggested moves ---------------------------------------------------------

def test_suggested_single_run():
    lines = extract_suggested_moves(c("Better was Nf3 in this position."), INITIAL)
    assert lines is not None and len(lines) == 1
    assert lines[0].sans == ("Nf3",)
    assert lines[0].anchor == INITIAL


def test_suggested_sequential_line():
    lines = extract_suggested_moves(c("Try e4 e5 Nf3 instead."), INITIAL)
    assert lines[0].sans == ("e4", "e5", "Nf3")


def test_suggested_numbered_moves():
    lines = extract_suggested_moves(c("1.e4 e5 2.Nf3 was the main line."), INITIAL)
    assert lines[0].sans == ("e4", "e5", "Nf3")


def test_suggested_illegal_run_dropped_with_warning():
    warnings = []
    lines = extract_suggested_moves(c("Maybe Qh5 wins."), INITIAL, warnings)
    assert lines is None
    assert warnings and "Qh5" in warnings[0]


def test_suggested_bare_square_after_preposition_skipped():
    lines = extract_suggested_moves(c("The bishop on g7 is strong."), INITIAL)
    assert lines is None


def test_suggested_bare_square_as_pawn_push_kept():
    lines = extract_suggested_moves(c("Play e4 immediately."), INITIAL)
    assert lines[0].sans == ("e4",)


def test_suggested_annotation_suffix_stripped():
    lines = extract_suggested_moves(c("Nf3! was best."), INITIAL)
    assert lines[0].sans == ("Nf3",)


# -- entities ----------------------------------------------------------------

def test_pronouns_closed_class():
    pronouns, _ = extract_entities(c("I think he missed his chance."))
    assert pronouns == ("I", "he", "his")


def test_proper_nouns_with_allow_list_masking():
    _, proper = extract_entities(c("Kasparov played the Sicilian Defense against Anand."))
    assert proper == ("Kasparov", "Anand")


def test_possessive_proper_noun_kept():
    _, proper = extract_entities(c("Carlsen's preparation was deep."))
    assert proper == ("Carlsen's",)


def test_piece_words_and_colors_not_entities():
    _, proper = extract_entities(c("White moves the Knight while Black waits."))
    assert proper == ()


def test_san_tokens_not_entities():
    _, proper = extract_entities(c("After Nf3 the game is equal."))
    assert proper == ()


def test_recognizer_override():
    recognizer = lambda text: (["we"], ["Fischer"])
    pronouns, proper = extract_entities(c("anything"), recognizer=recognizer)
    assert pronouns == ("we",) and proper == ("Fischer",)


# -- length ------------------------------------------------------------------

@pytest.mark.parametrize(
    "count,tag",
    [
        (1, LengthTag.SHORT),
        (SHORT_MAX_TOKENS, LengthTag.SHORT),
        (SHORT_MAX_TOKENS + 1, LengthTag.MEDIUM),
        (MEDIUM_MAX_TOKENS, LengthTag.MEDIUM),
        (MEDIUM_MAX_TOKENS + 1, LengthTag.LONG),
        (100, LengthTag.LONG),
    ],
)
def test_length_boundaries(count, tag):
    assert tag_length(c(" ".join(["word"] * count))) is tag


@given(st.integers(min_value=0, max_value=200))
def test_length_total_and_consistent(count):
    tag = tag_length(c(" ".join(["x"] * count)))
    if count <= SHORT_MAX_TOKENS:
        assert tag is LengthTag.SHORT
    elif count <= MEDIUM_MAX_TOKENS:
        assert tag is LengthTag.MEDIUM
    else:
        assert tag is LengthTag.LONG


# -- composition -------------------------------------------------------------

def test_annotate_full():
    result = annotate(c("? A mistake; better was Nf3."), INITIAL)
    tags = result.tags
    assert tags.commentary_type is CommentaryType.MOVE_QUALITY
    assert tags.move_quality is MoveQuality.MISTAKE
    assert tags.suggested[0].sans == ("Nf3",)
    assert tags.length is LengthTag.SHORT
    assert result.warnings == []


def test_annotate_empty_text_length_only():
    result = annotate(c("   "), INITIAL)
    assert result.tags.commentary_type is None
    assert result.tags.move_quality is None
    assert result.tags.suggested is None
    assert result.tags.length is LengthTag.SHORT


def test_annotate_warning_does_not_drop():
    result = annotate(c("Maybe Qh5 wins."), INITIAL)
    assert result.warnings
    assert result.tags.commentary_type is not None

"""Tag types plus rule-based extractors for the five tag families.

The extractors are deliberately simple lexicon/pattern scorers; a learned
classifier can be plugged in through :class:`ExternalClassifier`, which
speaks the same JSON contract as the generation backend's score endpoint.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from importlib import resources

from .core import BoardState, apply_move, parse_san
from .core.board import Color, PieceKind
from .errors import ChessTagsError

__all__ = [
    "Commentary",
    "CommentaryType",
    "MoveQuality",
    "LengthTag",
    "SuggestedLine",
    "TagSet",
    "ExternalClassifier",
    "extract_commentary_type",
    "extract_move_quality_text",
    "extract_suggested_moves",
    "extract_entities",
    "tag_length",
    "annotate",
    "SHORT_MAX_TOKENS",
    "MEDIUM_MAX_TOKENS",
]

# Length cutoffs (token counts): short iff <= 7, long iff > 20.
SHORT_MAX_TOKENS = 7
MEDIUM_MAX_TOKENS = 20


class CommentaryType(enum.Enum):
    MOVE_DESCRIPTION = "Move Description"
    MOVE_QUALITY = "Move Quality"
    MOVE_COMPARISON = "Move Comparison"
    PLANNING = "Planning/Rationale"
    CONTEXTUAL = "Contextual"
    GENERAL = "General"


class MoveQuality(enum.Enum):
    EXCELLENT = "Excellent"
    GOOD = "Good"
    INACCURACY = "Inaccuracy"
    MISTAKE = "Mistake"
    BLUNDER = "Blunder"


class LengthTag(enum.Enum):
    SHORT = "short"
    MEDIUM = "medium"
    LONG = "long"


@dataclass(frozen=True)
class Commentary:
    text: str
    ply_index: int | None = None
    game_id: str | None = None

    @property
    def token_count(self) -> int:
        return len(self.text.split())


@dataclass(frozen=True)
class SuggestedLine:
    sans: tuple[str, ...]
    anchor: BoardState
    # Reserved: whether the line was offered as better or worse than the
    # played move; the extractor does not distinguish the two yet.
    polarity: str | None = None


@dataclass(frozen=True)
class TagSet:
    commentary_type: CommentaryType | None = None
    move_quality: MoveQuality | None = None
    suggested: tuple[SuggestedLine, ...] | None = None
    pronouns: tuple[str, ...] = ()
    proper_nouns: tuple[str, ...] = ()
    length: LengthTag | None = None


# -- external classifier escape hatch ---------------------------------------


class ExternalClassifier:
    """Calls a score-endpoint-style service: {"task", "text"} -> {"label",
    "confidence"}.  Used to swap a learned model in for any lexicon rule."""

    def __init__(self, url: str, timeout: float = 10.0):
        self.url = url
        self.timeout = timeout

    def classify(self, task: str, text: str) -> tuple[str, float]:
        import requests

        from .errors import BackendUnreachable, MalformedResponse

        try:
            response = requests.post(
                self.url, json={"task": task, "text": text}, timeout=self.timeout
            )
            payload = response.json()
        except requests.RequestException as exc:
            raise BackendUnreachable(str(exc)) from exc
        except ValueError as exc:
            raise MalformedResponse(str(exc)) from exc
        if "label" not in payload or "confidence" not in payload:
            raise MalformedResponse(f"missing fields in {payload!r}")
        return str(payload["label"]), float(payload["confidence"])


# -- move quality ------------------------------------------------------------

# Two-character markers must be tried before their one-character prefixes.
QUALITY_MARKERS: tuple[tuple[str, MoveQuality], ...] = (
    ("!!", MoveQuality.EXCELLENT),
    ("!?", MoveQuality.INACCURACY),
    ("??", MoveQuality.BLUNDER),
    ("!", MoveQuality.GOOD),
    ("?", MoveQuality.MISTAKE),
)

_QUALITY_LEXICON: tuple[tuple[str, MoveQuality], ...] = (
    (r"\bblunder(s|ed|ing)?\b", MoveQuality.BLUNDER),
    (r"\bmistake\b", MoveQuality.MISTAKE),
    (r"\binaccura(cy|te)\b", MoveQuality.INACCURACY),
    (r"\bexcellent\b", MoveQuality.EXCELLENT),
    (r"\bbrilliant\b", MoveQuality.EXCELLENT),
    (r"\b(strong|great|good|fine|solid) move\b", MoveQuality.GOOD),
)


def extract_move_quality_text(c: Commentary) -> MoveQuality | None:
    text = c.text.strip()
    for marker, quality in QUALITY_MARKERS:
        if text.startswith(marker):
            return quality
    lowered = text.lower()
    for pattern, quality in _QUALITY_LEXICON:
        if re.search(pattern, lowered):
            return quality
    return None


# -- commentary type ---------------------------------------------------------

_COMPARISON_CUES = (
    r"\bbetter (was|is|would)\b",
    r"\bwould have been\b",
    r"\bshould have\b",
    r"\bpreferred\b",
    r"\binstead of\b",
    r"\b(stronger|superior) (was|is)\b",
    r"\ban alternative\b",
)
_DESCRIPTION_CUES = (
    r"\b(knight|bishop|rook|queen|king|pawn) (to|takes|captures|moves)\b",
    r"\bcastles\b",
    r"\b(develops|developing|advances|retreats|recaptures|captures|takes|plays|moves)\b",
    r"\bto [a-h][1-8]\b",
)
_PLANNING_CUES = (
    r"\btrying to\b",
    r"\bin order to\b",
    r"\bplan(s|ning)?\b",
    r"\bprevent(s|ing)?\b",
    r"\bthreat(en(s|ing))?\b",
    r"\bpreparing\b",
    r"\bwith the idea\b",
)
_CONTEXTUAL_CUES = (
    r"\b(clear |slight |decisive )?advantage\b",
    r"\b(winning|lost|equal|drawn) (position|game|endgame)\b",
    r"\bis (winning|losing|better|worse|equal)\b",
    r"\bposition is\b",
)

_SAN_TOKEN_RE = re.compile(
    r"^(O-O(-O)?|[KQRBN][a-h]?[1-8]?x?[a-h][1-8]|[a-h]x[a-h][1-8](=[QRBN])?"
    r"|[a-h][1-8](=[QRBN])?)[+#]?[!?]*$"
)


def _count_cues(patterns, lowered: str) -> int:
    return sum(1 for p in patterns if re.search(p, lowered))


def extract_commentary_type(
    c: Commentary, classifier: ExternalClassifier | None = None
) -> tuple[CommentaryType, float]:
    """Six-way classification; the external classifier, when given, wins."""
    if classifier is not None:
        label, confidence = classifier.classify("commentary_type", c.text)
        return CommentaryType(label), confidence

    lowered = c.text.lower()
    if extract_move_quality_text(c) is not None:
        return CommentaryType.MOVE_QUALITY, 0.9
    comparison = _count_cues(_COMPARISON_CUES, lowered)
    if comparison:
        return CommentaryType.MOVE_COMPARISON, min(0.6 + 0.2 * comparison, 0.95)
    planning = _count_cues(_PLANNING_CUES, lowered)
    if planning:
        return CommentaryType.PLANNING, min(0.5 + 0.15 * planning, 0.9)
    tokens = c.text.split()
    san_only = tokens and all(_SAN_TOKEN_RE.match(t.strip(".,;:")) for t in tokens)
    description = _count_cues(_DESCRIPTION_CUES, lowered)
    if san_only or description:
        return CommentaryType.MOVE_DESCRIPTION, 0.9 if san_only else min(0.5 + 0.15 * description, 0.9)
    if _count_cues(_CONTEXTUAL_CUES, lowered):
        return CommentaryType.CONTEXTUAL, 0.6
    return CommentaryType.GENERAL, 0.3


# -- suggested moves ---------------------------------------------------------


def extract_suggested_moves(
    c: Commentary, anchor: BoardState, warnings: list[str] | None = None
) -> tuple[SuggestedLine, ...] | None:
    """SAN token runs in the text, validated for sequential legality from
    ``anchor``.  Illegal or unparseable runs are dropped with a warning."""
    tokens = c.text.split()
    runs: list[list[str]] = []
    current: list[str] = []
    previous = ""
    for token in tokens:
        candidate = token.strip(".,;:()\"'")
        candidate = re.sub(r"^\d+\.+", "", candidate)  # "21.Qxd4" style
        is_san = bool(candidate) and _SAN_TOKEN_RE.match(candidate) is not None
        if is_san and _is_bare_square(candidate) and previous in _SQUARE_PREPOSITIONS:
            # "the bishop on g7": a location mention, not a pawn push
            is_san = False
        if is_san:
            current.append(candidate)
        else:
            if current:
                runs.append(current)
            current = []
        previous = candidate.lower()
    if current:
        runs.append(current)

    lines: list[SuggestedLine] = []
    for run in runs:
        board = anchor
        sans: list[str] = []
        ok = True
        for san in run:
            try:
                move = parse_san(board, san)
            except ChessTagsError as exc:
                if warnings is not None:
                    warnings.append(f"dropped suggested run {' '.join(run)!r}: {exc}")
                ok = False
                break
            board = apply_move(board, move)
            sans.append(san.rstrip("!?"))
        if ok and sans:
            lines.append(SuggestedLine(sans=tuple(sans), anchor=anchor))
    return tuple(lines) if lines else None


_SQUARE_PREPOSITIONS = frozenset({"on", "at", "to", "from", "square", "via"})


def _is_bare_square(token: str) -> bool:
    return re.fullmatch(r"[a-h][1-8]", token) is not None


# -- pronouns and proper nouns ----------------------------------------------

PRONOUNS = frozenset(
    "i me my mine we us our ours you your yours he him his she her hers "
    "they them their theirs myself himself herself".split()
)

_CAP_STOPWORDS = frozenset(
    "the a an this that these those it its if but and or so as at on in of "
    "to for with after before when while however although also then there "
    "here now not no yes white black whites blacks".split()
)

_PIECE_WORDS = frozenset(
    "pawn knight bishop rook queen king pawns knights bishops rooks queens kings".split()
)


def _load_allow_list() -> frozenset[str]:
    text = resources.files("chesstags.data").joinpath("proper_noun_allow_list.txt").read_text(
        encoding="utf-8"
    )
    terms = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            terms.add(line.lower())
    return frozenset(terms)


_ALLOW_LIST: frozenset[str] | None = None


def proper_noun_allow_list() -> frozenset[str]:
    global _ALLOW_LIST
    if _ALLOW_LIST is None:
        _ALLOW_LIST = _load_allow_list()
    return _ALLOW_LIST


def extract_entities(
    c: Commentary, recognizer=None, allow_list: frozenset[str] | None = None
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(pronouns, proper nouns).  ``recognizer`` may be any callable
    text -> (pronouns, proper_nouns) and overrides the heuristics."""
    if recognizer is not None:
        pronouns, proper = recognizer(c.text)
        return tuple(pronouns), tuple(proper)
    allow = allow_list if allow_list is not None else proper_noun_allow_list()

    pronouns = []
    for token in c.text.split():
        word = token.strip(".,;:!?()\"'")
        if word.lower() in PRONOUNS:
            pronouns.append(word)

    # Mask allow-listed phrases (possibly multi-word) before scanning for
    # capitalized tokens.
    masked = c.text
    for phrase in sorted(allow, key=len, reverse=True):
        masked = re.sub(re.escape(phrase), " ", masked, flags=re.IGNORECASE)
    proper = []
    for token in masked.split():
        word = token.strip(".,;:!?()\"'")
        stem = word[:-2] if word.endswith("'s") else word
        if not stem or not stem[0].isupper() or not stem.isalpha():
            continue
        if stem.lower() in _CAP_STOPWORDS or stem.lower() in _PIECE_WORDS:
            continue
        if stem.lower() in PRONOUNS or _SAN_TOKEN_RE.match(word):
            continue
        proper.append(word)
    return tuple(pronouns), tuple(proper)


# -- length ------------------------------------------------------------------


def tag_length(c: Commentary) -> LengthTag:
    count = c.token_count
    if count <= SHORT_MAX_TOKENS:
        return LengthTag.SHORT
    if count <= MEDIUM_MAX_TOKENS:
        return LengthTag.MEDIUM
    return LengthTag.LONG


# -- composition -------------------------------------------------------------


@dataclass
class AnnotationResult:
    tags: TagSet
    warnings: list[str] = field(default_factory=list)


def annotate(c: Commentary, anchor: BoardState, classifier=None, recognizer=None) -> AnnotationResult:
    """Run all five extractors against one commentary."""
    warnings: list[str] = []
    if not c.text.strip():
        return AnnotationResult(tags=TagSet(length=tag_length(c)))
    ctype, _ = extract_commentary_type(c, classifier)
    quality = extract_move_quality_text(c)
    suggested = extract_suggested_moves(c, anchor, warnings)
    pronouns, proper_nouns = extract_entities(c, recognizer)
    tags = TagSet(
        commentary_type=ctype,
        move_quality=quality,
        suggested=suggested,
        pronouns=pronouns,
        proper_nouns=proper_nouns,
        length=tag_length(c),
    )
    return AnnotationResult(tags=tags, warnings=warnings)

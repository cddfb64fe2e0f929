"""Dataset plumbing: triplet ingestion, forum filtering, PII scrubbing,
corpus annotation, deterministic splits, and extractor metrics.

Triplet JSONL schema, one record per line:
    {"moves": ["e4", "e5", ...], "move": "Nf3", "commentary": "...",
     "source": "game-id"}
``moves`` is the SAN history before the commented move.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .core import BoardState, GameRecord, MoveRecord, apply_move, parse_san
from .errors import IllegalMove, JsonSyntax, LengthMismatch
from .representation import InputText, RepresentationConfig, assemble_input, render_game_state
from .tags import Commentary, TagSet, annotate

__all__ = [
    "TripletRecord",
    "ForumPost",
    "SplitSpec",
    "load_triplets",
    "triplet_from_json",
    "filter_forum_post",
    "scrub_pii",
    "annotate_corpus",
    "split_dataset",
    "evaluate_extractor",
    "EVENT_TOKENS",
]


@dataclass(frozen=True)
class TripletRecord:
    prefix: tuple[MoveRecord, ...]  # plies before the commented move
    move: MoveRecord
    commentary: Commentary
    source: str
    anchor: BoardState  # position in which ``move`` is played

    @property
    def record(self) -> GameRecord:
        return GameRecord(plies=self.prefix)


@dataclass(frozen=True)
class ForumPost:
    context: tuple[str, ...]
    response: str
    votes: int | None = None
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class SplitSpec:
    ratios: tuple[int, int, int] = (85, 10, 5)
    seed: int = 0

    def __post_init__(self):
        if any(r < 0 for r in self.ratios) or sum(self.ratios) != 100:
            raise ValueError(f"split ratios must be nonnegative and sum to 100: {self.ratios}")


# -- ingestion ---------------------------------------------------------------


def triplet_from_json(payload: dict) -> TripletRecord:
    board = BoardState.initial()
    prefix = []
    for san in payload["moves"]:
        move = parse_san(board, san)
        board = apply_move(board, move)
        prefix.append(move)
    move = parse_san(board, payload["move"])
    return TripletRecord(
        prefix=tuple(prefix),
        move=move,
        commentary=Commentary(
            text=payload["commentary"],
            ply_index=len(prefix),
            game_id=payload.get("source"),
        ),
        source=payload.get("source", ""),
        anchor=board,
    )


def load_triplets(
    path, strict: bool = False, problems: list[str] | None = None
) -> Iterator[TripletRecord]:
    """Stream records from a JSONL file; invalid lines are reported with
    their line number and skipped (or abort the stream in strict mode)."""
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                yield triplet_from_json(payload)
            except Exception as exc:
                message = f"line {lineno}: {exc}"
                if strict:
                    if isinstance(exc, json.JSONDecodeError):
                        raise JsonSyntax(message) from exc
                    raise IllegalMove(message) from exc
                if problems is not None:
                    problems.append(message)


# -- forum filter (pattern ids: san, move-number, event, piece) --------------

EVENT_TOKENS = (
    "exchange",
    "castle",
    "capture",
    "blunder",
    "mate",
    "check",
    "checkmate",
    "discovered attack",
    "en passant",
    "fianchetto",
    "gambit",
    "pin",
    "sacrifice",
    "stalemate",
    "threat",
    "trap",
    "variation",
)

_PIECE_TOKENS = ("pawn", "knight", "bishop", "rook", "queen", "king")

_URL_RE = re.compile(r"https?://\S+|www\.\S+", re.IGNORECASE)
_SAN_IN_TEXT_RE = re.compile(
    r"(?:^|\s)(?:\d+\.{1,3}\s*)?"
    r"(O-O(?:-O)?|[KQRBN][a-h]?[1-8]?x?[a-h][1-8]|[a-h]x[a-h][1-8](?:=[QRBN])?"
    r"|[a-h][1-8](?:=[QRBN]))[+#]?[!?]*(?=[\s.,;:!?)]|$)"
)
_MOVE_NUMBER_RE = re.compile(r"\bmoves?\s+\d+\b", re.IGNORECASE)


def filter_forum_post(post: ForumPost) -> tuple[bool, tuple[str, ...]]:
    """(keep, matched pattern ids).  Threads with external links are
    dropped outright; otherwise any one pattern match keeps the post."""
    everything = " ".join((*post.context, post.response))
    if _URL_RE.search(everything):
        return False, ("external-link",)

    text = post.response
    lowered = text.lower()
    matched = []
    if _SAN_IN_TEXT_RE.search(text):
        matched.append("san")
    if _MOVE_NUMBER_RE.search(text):
        matched.append("move-number")
    if any(re.search(rf"\b{re.escape(tok)}\b", lowered) for tok in EVENT_TOKENS):
        matched.append("event")
    if any(re.search(rf"\b{tok}s?\b", lowered) for tok in _PIECE_TOKENS):
        matched.append("piece")
    return bool(matched), tuple(matched)


# -- PII scrubbing -----------------------------------------------------------

_EMAIL_RE = re.compile(r"\b[\w.+-]+@[\w-]+\.[\w.-]+\b")
_HANDLE_RE = re.compile(r"(?<![\w.])@\w+\b")
_USERNAME_RE = re.compile(r"\b/?u/[\w-]+\b")


def scrub_pii(text: str) -> str:
    """Replace emails, URLs, @-handles and u/-names with placeholders.
    Idempotent; chess notation is untouched."""
    text = _EMAIL_RE.sub("[EMAIL]", text)
    text = _URL_RE.sub("[URL]", text)
    text = _USERNAME_RE.sub("[USER]", text)
    text = _HANDLE_RE.sub("[USER]", text)
    return text


# -- annotation --------------------------------------------------------------


@dataclass
class AnnotatedRecord:
    record: TripletRecord
    tags: TagSet
    inputs: dict[str, InputText]  # ablation name -> assembled input
    warnings: list[str] = field(default_factory=list)


def annotate_corpus(
    records: Iterable[TripletRecord],
    configs: Iterable[RepresentationConfig],
    classifier=None,
) -> Iterator[AnnotatedRecord]:
    """Annotate every record and emit one InputText per configured
    ablation.  Warnings never drop records."""
    configs = list(configs)
    for record in records:
        result = annotate(record.commentary, record.anchor, classifier=classifier)
        inputs = {}
        for config in configs:
            segments = []
            if config.wants_game_state:
                segments = render_game_state(record.record, record.anchor, config)
            inputs[config.ablation.value] = assemble_input(
                segments, record.move, result.tags, config, board=record.anchor
            )
        yield AnnotatedRecord(
            record=record, tags=result.tags, inputs=inputs, warnings=result.warnings
        )


# -- splits ------------------------------------------------------------------


def _group_key(seed: int, game_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{game_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def split_dataset(records: list, spec: SplitSpec, game_id=None) -> tuple[list, list, list]:
    """Deterministic grouped split.

    Groups records by game id (``game_id`` extracts it; defaults to the
    ``source`` attribute), orders groups by a pure hash of (seed, id), and
    fills train, then valid, then test quotas; the remainder goes to
    train.  Records from one game never straddle splits.
    """
    if game_id is None:
        game_id = lambda r: getattr(r, "source", str(r))
    groups: dict[str, list] = {}
    for record in records:
        groups.setdefault(str(game_id(record)), []).append(record)
    ordered = sorted(groups.items(), key=lambda kv: (_group_key(spec.seed, kv[0]), kv[0]))

    total = len(records)
    quota_valid = total * spec.ratios[1] // 100
    quota_test = total * spec.ratios[2] // 100
    quota_train = total - quota_valid - quota_test

    train: list = []
    valid: list = []
    test: list = []
    for _, members in ordered:
        if len(train) < quota_train:
            train.extend(members)
        elif len(valid) < quota_valid:
            valid.extend(members)
        elif len(test) < quota_test:
            test.extend(members)
        else:
            train.extend(members)
    return train, valid, test


# -- metrics -----------------------------------------------------------------


def evaluate_extractor(predictions: list, gold: list, generative: bool = False) -> dict:
    """Macro F1 over classes, or per-example all-token exact match for
    generative tags."""
    if len(predictions) != len(gold):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(gold)} gold")
    if not predictions:
        raise LengthMismatch("empty evaluation set")

    if generative:
        matches = sum(
            1
            for p, g in zip(predictions, gold)
            if str(p).split() == str(g).split()
        )
        return {"exact_match": matches / len(gold)}

    labels = sorted({str(x) for x in predictions} | {str(x) for x in gold})
    per_class = {}
    f1_sum = 0.0
    for label in labels:
        tp = sum(1 for p, g in zip(predictions, gold) if str(p) == label and str(g) == label)
        fp = sum(1 for p, g in zip(predictions, gold) if str(p) == label and str(g) != label)
        fn = sum(1 for p, g in zip(predictions, gold) if str(p) != label and str(g) == label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = {"precision": precision, "recall": recall, "f1": f1}
        f1_sum += f1
    return {"macro_f1": f1_sum / len(labels), "per_class": per_class}

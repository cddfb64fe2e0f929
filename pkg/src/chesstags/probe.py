"""Prompted belief-state probing: per-piece square distributions under a
likelihood oracle, summary metrics, and heatmap export."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .core import BoardState, Color, PieceKind, Square
from .errors import NonFiniteScore

__all__ = [
    "ProbePrompt",
    "BeliefState",
    "SQUARE_NAMES",
    "build_prompts",
    "belief_state",
    "probe_metrics",
    "emit_heatmap",
    "render_heatmap_png",
]

# The 64 two-character continuations, file-major ("a1", "a2", ... "h8").
SQUARE_NAMES = tuple(
    f"{file_char}{rank}" for file_char in "abcdefgh" for rank in range(1, 9)
)

_PIECE_WORDS = {
    PieceKind.PAWN: "pawn",
    PieceKind.KNIGHT: "knight",
    PieceKind.BISHOP: "bishop",
    PieceKind.ROOK: "rook",
    PieceKind.QUEEN: "queen",
    PieceKind.KING: "king",
}

# Oracle: (prompt, continuations) -> one log-probability per continuation.
Oracle = Callable[[str, Sequence[str]], Sequence[float]]


@dataclass(frozen=True)
class ProbePrompt:
    color: Color
    kind: PieceKind
    template: str  # ends expecting a square token

    @classmethod
    def default(cls, color: Color, kind: PieceKind) -> "ProbePrompt":
        return cls(color, kind, f"{color.value}'s {_PIECE_WORDS[kind]} on ")


@dataclass(frozen=True)
class BeliefState:
    distribution: tuple[float, ...]  # 64 entries, file-major square order
    prompt: ProbePrompt
    valid_squares: frozenset[str]

    def probability(self, square: str) -> float:
        return self.distribution[SQUARE_NAMES.index(square)]

    @property
    def argmax_square(self) -> str:
        # ties break to the earliest square in file-major order
        best = max(range(64), key=lambda i: (self.distribution[i], -i))
        return SQUARE_NAMES[best]


def build_prompts(board: BoardState) -> list[ProbePrompt]:
    """Up to 12 prompts: one per (color, piece kind) present on the board."""
    present = {(piece.color, piece.kind) for piece, _ in board.pieces()}
    return [
        ProbePrompt.default(color, kind)
        for color in (Color.WHITE, Color.BLACK)
        for kind in PieceKind
        if (color, kind) in present
    ]


def belief_state(
    oracle: Oracle, prompt: ProbePrompt, board: BoardState, context: str = ""
) -> BeliefState:
    """Normalized distribution over the 64 squares for one prompt.

    ``context`` (typically the game-state input text) is prepended to the
    prompt template before scoring.
    """
    full_prompt = (context + " " + prompt.template) if context else prompt.template
    logprobs = list(oracle(full_prompt, SQUARE_NAMES))
    if len(logprobs) != 64:
        raise NonFiniteScore(f"oracle returned {len(logprobs)} scores, wanted 64")
    if any(not math.isfinite(lp) for lp in logprobs):
        raise NonFiniteScore("oracle returned a non-finite log-probability")
    peak = max(logprobs)
    weights = [math.exp(lp - peak) for lp in logprobs]
    total = sum(weights)
    distribution = tuple(w / total for w in weights)
    valid = frozenset(
        sq.name
        for piece, sq in board.pieces(prompt.color)
        if piece.kind is prompt.kind
    )
    return BeliefState(distribution=distribution, prompt=prompt, valid_squares=valid)


def probe_metrics(states: list[BeliefState]) -> tuple[float, float]:
    """(weight_on_valid, argmax_accuracy) averaged over the prompt list."""
    if not states:
        raise ValueError("no belief states to aggregate")
    weight_total = 0.0
    hits = 0
    for state in states:
        weight_total += sum(
            p for name, p in zip(SQUARE_NAMES, state.distribution) if name in state.valid_squares
        )
        if state.argmax_square in state.valid_squares:
            hits += 1
    return weight_total / len(states), hits / len(states)


def emit_heatmap(state: BeliefState, path: str | Path) -> Path:
    """8x8 CSV (rank 8 first) plus a JSON sidecar with prompt metadata."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        for rank in range(8, 0, -1):
            writer.writerow(
                [repr(state.probability(f"{file_char}{rank}")) for file_char in "abcdefgh"]
            )
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(
        json.dumps(
            {
                "color": state.prompt.color.value,
                "piece": state.prompt.kind.value,
                "template": state.prompt.template,
                "valid_squares": sorted(state.valid_squares),
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return path


def render_heatmap_png(state: BeliefState, path: str | Path) -> Path:
    """Matplotlib board heatmap rendered next to the CSV output."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    grid = np.zeros((8, 8))
    for i, name in enumerate(SQUARE_NAMES):
        file_idx = "abcdefgh".index(name[0])
        rank_idx = int(name[1]) - 1
        grid[7 - rank_idx, file_idx] = state.distribution[i]

    fig, ax = plt.subplots(figsize=(5, 5))
    image = ax.imshow(grid, cmap="viridis", vmin=0.0)
    ax.set_xticks(range(8), list("abcdefgh"))
    ax.set_yticks(range(8), [str(r) for r in range(8, 0, -1)])
    for square_name in state.valid_squares:
        file_idx = "abcdefgh".index(square_name[0])
        rank_idx = int(square_name[1]) - 1
        ax.add_patch(
            plt.Rectangle(
                (file_idx - 0.5, 7 - rank_idx - 0.5), 1, 1,
                fill=False, edgecolor="red", linewidth=2,
            )
        )
    ax.set_title(f"{state.prompt.color.value} {_PIECE_WORDS[state.prompt.kind]}")
    fig.colorbar(image, ax=ax, fraction=0.046)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def uniform_oracle(prompt: str, continuations: Sequence[str]) -> list[float]:
    """Every continuation equally likely; handy baseline and test double."""
    return [0.0] * len(continuations)

"""Server configuration."""

from __future__ import annotations

import re
from dataclasses import dataclass

_BIND_RE = re.compile(r"^[\w.\-]+:\d{1,5}$")


@dataclass(frozen=True)
class BackendConfig:
    """Settings for the reference backend.

    ``model`` is either the built-in ``"seeded-tiny"`` identifier (a small
    randomly initialized sequence-to-sequence model with a fixed seed, so
    it needs no downloads and decodes deterministically) or the name of a
    Hugging Face seq2seq checkpoint to load instead.
    """

    model: str = "seeded-tiny"
    device: str = "cpu"
    max_tokens: int = 64
    bind: str = "127.0.0.1:8080"
    seed: int = 0

    def __post_init__(self):
        if not _BIND_RE.match(self.bind):
            raise ValueError(f"bind address must look like host:port, got {self.bind!r}")
        port = int(self.bind.rsplit(":", 1)[1])
        if not 0 < port < 65536:
            raise ValueError(f"port out of range in {self.bind!r}")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")

    @property
    def host(self) -> str:
        return self.bind.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.bind.rsplit(":", 1)[1])

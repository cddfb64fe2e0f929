"""Reference HTTP backend implementing the generation and score wire
contracts used by the chesstags inference pipeline."""

from .config import BackendConfig
from .model import TinySeq2Seq, load_model
from .server import create_app

__all__ = ["BackendConfig", "TinySeq2Seq", "load_model", "create_app"]

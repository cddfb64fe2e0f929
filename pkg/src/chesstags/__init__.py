"""Chess commentary control-tag pipeline.

Turns (game, move, commentary) data into control-tag-annotated model
inputs, derives tags from a UCI engine at inference time, and
ground-checks generated commentary against the position.
"""

__version__ = "0.1.0"

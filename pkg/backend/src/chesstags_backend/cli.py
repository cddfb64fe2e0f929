"""Run the reference backend with uvicorn."""

from __future__ import annotations

import argparse

import uvicorn

from .config import BackendConfig
from .server import create_app


def main(argv=None):
    parser = argparse.ArgumentParser(description="chesstags reference backend server")
    parser.add_argument("--model", default="seeded-tiny",
                        help="'seeded-tiny' or a Hugging Face seq2seq checkpoint name")
    parser.add_argument("--bind", default="127.0.0.1:8080", help="host:port to listen on")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--max-tokens", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    config = BackendConfig(
        model=args.model,
        device=args.device,
        max_tokens=args.max_tokens,
        bind=args.bind,
        seed=args.seed,
    )
    uvicorn.run(create_app(config), host=config.host, port=config.port)


if __name__ == "__main__":
    main()

"""Command-line interface.

Subcommands mirror the pipeline stages: annotate, split, filter-forum,
eval-extractor, infer, probe.  Everything reads and writes JSONL (UTF-8);
the probe report additionally renders PNG heatmaps next to the CSV grids.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .core import BoardState, parse_san
from .corpus import (
    ForumPost,
    SplitSpec,
    evaluate_extractor,
    filter_forum_post,
    load_triplets,
    annotate_corpus,
    scrub_pii,
    split_dataset,
)
from .engine import EngineConfig, TagRequest, derive_tags, open_session
from .errors import ChessTagsError
from .inference import (
    UrlBackend,
    build_inference_request,
    generate,
    ground_check,
    realize_template,
    score_continuations,
)
from .probe import (
    belief_state,
    build_prompts,
    emit_heatmap,
    probe_metrics,
    render_heatmap_png,
    uniform_oracle,
)
from .representation import Ablation, RepresentationConfig, render_tags
from .tags import CommentaryType, LengthTag, TagSet

ABLATION_CONFIGS = {
    "unconditioned": RepresentationConfig.unconditioned,
    "move": RepresentationConfig.move_only,
    "game-state": RepresentationConfig.game_state,
    "tags": RepresentationConfig.with_tags,
    "fully": RepresentationConfig.fully,
}

TYPE_ALIASES = {
    "move_description": CommentaryType.MOVE_DESCRIPTION,
    "move_quality": CommentaryType.MOVE_QUALITY,
    "move_comparison": CommentaryType.MOVE_COMPARISON,
    "planning": CommentaryType.PLANNING,
    "contextual": CommentaryType.CONTEXTUAL,
    "general": CommentaryType.GENERAL,
}


@click.group()
def cli():
    """Chess commentary control-tag pipeline."""


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--ablation", multiple=True, default=("fully",),
              type=click.Choice(sorted(ABLATION_CONFIGS)), show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--strict", is_flag=True, help="Abort on the first bad input line.")
def annotate(in_path, ablation, out_path, strict):
    """Annotate triplets and emit model inputs per ablation."""
    problems: list[str] = []
    configs = [ABLATION_CONFIGS[name]() for name in ablation]
    count = 0
    with open(out_path, "w", encoding="utf-8") as out:
        records = load_triplets(in_path, strict=strict, problems=problems)
        for annotated in annotate_corpus(records, configs):
            tags = annotated.tags
            row = {
                "source": annotated.record.source,
                "commentary": annotated.record.commentary.text,
                "tags": render_tags(tags),
                "inputs": {name: it.text for name, it in annotated.inputs.items()},
            }
            if annotated.warnings:
                row["warnings"] = annotated.warnings
            out.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    for problem in problems:
        click.echo(f"skipped {problem}", err=True)
    click.echo(f"annotated {count} records -> {out_path}")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--ratios", default="85:10:5", show_default=True)
@click.option("--seed", default=0, type=int, show_default=True)
@click.option("--out-dir", default=".", type=click.Path(), show_default=True)
def split(in_path, ratios, seed, out_dir):
    """Deterministically split a JSONL dataset (game-grouped)."""
    parts = [int(x) for x in ratios.split(":")]
    if len(parts) != 3:
        raise click.BadParameter("ratios must look like 85:10:5")
    spec = SplitSpec(ratios=tuple(parts), seed=seed)
    with open(in_path, encoding="utf-8") as handle:
        rows = [json.loads(line) for line in handle if line.strip()]
    train, valid, test = split_dataset(
        rows, spec, game_id=lambda r: r.get("source", json.dumps(r, sort_keys=True))
    )
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, chunk in (("train", train), ("valid", valid), ("test", test)):
        with open(out / f"{name}.jsonl", "w", encoding="utf-8") as handle:
            for row in chunk:
                handle.write(json.dumps(row, ensure_ascii=False) + "\n")
    click.echo(f"split {len(rows)} -> train {len(train)} / valid {len(valid)} / test {len(test)}")


@cli.command("filter-forum")
@click.option("--in", "in_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path())
@click.option("--scrub/--no-scrub", default=True, show_default=True,
              help="Scrub PII from kept responses.")
def filter_forum(in_path, out_path, scrub):
    """Keep forum posts that match the chess-content patterns."""
    kept = dropped = 0
    out = open(out_path, "w", encoding="utf-8") if out_path else sys.stdout
    try:
        with open(in_path, encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                row = json.loads(line)
                post = ForumPost(
                    context=tuple(row.get("context", ())),
                    response=row["response"],
                    votes=row.get("votes"),
                    tags=tuple(row.get("tags", ())),
                )
                keep, patterns = filter_forum_post(post)
                if keep:
                    kept += 1
                    row["matched_patterns"] = list(patterns)
                    if scrub:
                        row["response"] = scrub_pii(row["response"])
                        row["context"] = [scrub_pii(c) for c in row.get("context", [])]
                    out.write(json.dumps(row, ensure_ascii=False) + "\n")
                else:
                    dropped += 1
    finally:
        if out_path:
            out.close()
    click.echo(f"kept {kept}, dropped {dropped}", err=True)


@cli.command("eval-extractor")
@click.option("--pred", required=True, type=click.Path(exists=True))
@click.option("--gold", required=True, type=click.Path(exists=True))
@click.option("--generative", is_flag=True, help="Token exact match instead of F1.")
@click.option("--fig", default=None, type=click.Path(), help="Write a per-class F1 bar chart.")
def eval_extractor(pred, gold, generative, fig):
    """Score predictions against gold labels (JSONL, field 'label')."""

    def load(path):
        with open(path, encoding="utf-8") as handle:
            return [json.loads(line)["label"] for line in handle if line.strip()]

    metrics = evaluate_extractor(load(pred), load(gold), generative=generative)
    click.echo(json.dumps(metrics, indent=2))
    if fig and not generative:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        classes = sorted(metrics["per_class"])
        values = [metrics["per_class"][c]["f1"] for c in classes]
        figure, ax = plt.subplots(figsize=(1.2 * max(4, len(classes)), 4))
        ax.bar(classes, values)
        ax.set_ylabel("F1")
        ax.set_ylim(0, 1)
        ax.set_title(f"macro F1 = {metrics['macro_f1']:.3f}")
        plt.setp(ax.get_xticklabels(), rotation=30, ha="right")
        figure.savefig(fig, dpi=120, bbox_inches="tight")
        plt.close(figure)
        click.echo(f"figure -> {fig}", err=True)


@cli.command()
@click.option("--fen", required=True)
@click.option("--move", "move_san", required=True)
@click.option("--type", "ctype", default="move_description",
              type=click.Choice(sorted(TYPE_ALIASES)), show_default=True)
@click.option("--length", default="medium",
              type=click.Choice([l.value for l in LengthTag]), show_default=True)
@click.option("--backend", default="template", show_default=True,
              help="'template' or a generation endpoint URL.")
@click.option("--engine", "engine_exe", default=None, type=click.Path(),
              help="UCI engine executable for tag derivation.")
@click.option("--transcript", default=None, type=click.Path(exists=True),
              help="Fake-engine transcript instead of a real engine.")
@click.option("--nodes", default=10000, type=int, show_default=True)
def infer(fen, move_san, ctype, length, backend, engine_exe, transcript, nodes):
    """Generate commentary for one move and ground-check it."""
    try:
        board = BoardState.from_fen(fen)
        move = parse_san(board, move_san)
    except ChessTagsError as exc:
        raise click.ClickException(str(exc))

    commentary_type = TYPE_ALIASES[ctype]
    length_tag = LengthTag(length)

    session = None
    if engine_exe or transcript:
        config = EngineConfig(executable=engine_exe, transcript=transcript, nodes=nodes)
        session = open_session(config)
    try:
        if session is not None:
            input_text, tags = build_inference_request(
                session, board, move, commentary_type, length_tag
            )
        else:
            # engine-free: type and length tags only
            tags = TagSet(commentary_type=commentary_type, length=length_tag)
            input_text = None
        if backend == "template":
            text = realize_template(tags, board, move)
        else:
            if input_text is None:
                raise click.ClickException("a URL backend needs --engine or --transcript")
            text = generate(UrlBackend(url=backend), input_text)
    except ChessTagsError as exc:
        raise click.ClickException(str(exc))
    finally:
        if session is not None:
            session.close()

    report = ground_check(text, board)
    click.echo(json.dumps({
        "commentary": text,
        "tags": render_tags(tags),
        "input": input_text.text if input_text else None,
        "violations": [
            {"span": list(v.span), "kind": v.kind, "detail": v.detail}
            for v in report.violations
        ],
    }, ensure_ascii=False, indent=2))


@cli.command()
@click.option("--fen", required=True)
@click.option("--backend", default="uniform", show_default=True,
              help="'uniform' or a score endpoint URL.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--context", default="", help="Game-state text prepended to each prompt.")
def probe(fen, backend, out_dir, context):
    """Belief-state probe: per-piece heatmaps (CSV + JSON + PNG) and metrics."""
    try:
        board = BoardState.from_fen(fen)
    except ChessTagsError as exc:
        raise click.ClickException(str(exc))
    if backend == "uniform":
        oracle = uniform_oracle
    else:
        url_backend = UrlBackend(url=backend)
        oracle = lambda prompt, conts: score_continuations(url_backend, prompt, list(conts))

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    states = []
    try:
        for prompt in build_prompts(board):
            state = belief_state(oracle, prompt, board, context=context)
            states.append(state)
            stem = f"{prompt.color.value.lower()}_{prompt.kind.name.lower()}"
            emit_heatmap(state, out / f"{stem}.csv")
            render_heatmap_png(state, out / f"{stem}.png")
    except ChessTagsError as exc:
        raise click.ClickException(str(exc))
    weight, accuracy = probe_metrics(states)
    metrics = {
        "prompts": len(states),
        "weight_on_valid": weight,
        "argmax_accuracy": accuracy,
    }
    (out / "metrics.json").write_text(json.dumps(metrics, indent=2) + "\n", encoding="utf-8")
    click.echo(json.dumps(metrics, indent=2))


if __name__ == "__main__":
    cli()

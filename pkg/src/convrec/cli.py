"""Command-line entry points: interactive chat, the HTTP service, replay
evaluation, transition export, tree dumps, and synthetic-bundle generation."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import EngineConfig, load_config
from .engine import build_engine
from .ingest import import_redial, load_movie_map
from .metrics import side_by_side
from .replay import DEFAULT_KS, both_to_json, run_both, run_replay
from .synth import write_bundle


def _add_engine_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", required=True, help="engine config file")
    sub.add_argument("--mode", choices=["baseline", "hierarchical"], help="override config mode")
    sub.add_argument("--tau", type=float, help="override walk threshold")
    sub.add_argument("--seed", type=int, help="override seed")


def _engine_from_args(args):
    cfg = load_config(args.config)
    if getattr(args, "mode", None):
        cfg.mode = args.mode
    if getattr(args, "tau", None) is not None:
        cfg.tau = args.tau
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    cfg.validate()
    return build_engine(cfg)


def _load_dialogues(args, engine):
    movie_map_path = args.movie_map or engine.config.movie_map_path
    movie_map = load_movie_map(movie_map_path) if movie_map_path else {}
    result = import_redial(args.data, movie_map)
    dialogues = result.dialogues
    if args.split_file:
        with open(args.split_file, encoding="utf-8") as fh:
            keep = {line.strip() for line in fh if line.strip()}
        dialogues = [d for d in dialogues if d.dialogue_id in keep]
    if result.skipped_markers:
        print(
            f"warning: {len(result.skipped_markers)} unresolved movie markers",
            file=sys.stderr,
        )
    return dialogues


def cmd_chat(args) -> int:
    engine = _engine_from_args(args)
    print(engine.startup_summary(), file=sys.stderr)
    session = engine.new_session(mode=engine.config.mode)
    print(f"session {session.id} mode={session.mode}; /quit to exit", file=sys.stderr)
    for line in sys.stdin:
        text = line.rstrip("\n")
        if text.strip() in ("/quit", "/exit"):
            break
        response = engine.advance(session, text)
        print(f"system> {response.text}")
        if args.show_tree:
            print(json.dumps(response.to_json_dict()["tree"], sort_keys=True))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    engine = _engine_from_args(args)
    print(engine.startup_summary(), file=sys.stderr)
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _write_transitions(result, path) -> None:
    Path(path).write_text(result.transitions.to_csv(), encoding="utf-8")


def cmd_replay(args) -> int:
    engine = _engine_from_args(args)
    print(engine.startup_summary(), file=sys.stderr)
    dialogues = _load_dialogues(args, engine)
    ks = tuple(int(k) for k in args.ks.split(",")) if args.ks else DEFAULT_KS
    if args.both:
        results = run_both(engine, dialogues, ks)
        base, hier = results["baseline"], results["hierarchical"]
        print(side_by_side(base.report, hier.report, "baseline", "hierarchical"))
        print(
            f"  off-diagonal transition share: baseline={base.transitions.off_diagonal_share():.4f}"
            f" hierarchical={hier.transitions.off_diagonal_share():.4f}"
        )
        payload = both_to_json(results)
        if args.dump_transitions:
            stem = Path(args.dump_transitions)
            for mode, res in results.items():
                _write_transitions(res, stem.with_suffix(f".{mode}.csv"))
    else:
        result = run_replay(engine, dialogues, engine.config.mode, ks)
        print(result.report.format_table(f"metrics ({result.mode})"))
        print(
            f"  off-diagonal transition share: {result.transitions.off_diagonal_share():.4f}"
        )
        payload = result.to_json()
        if args.dump_transitions:
            _write_transitions(result, args.dump_transitions)
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
        print(f"report written to {args.out}", file=sys.stderr)
    return 0


def cmd_export_transitions(args) -> int:
    engine = _engine_from_args(args)
    dialogues = _load_dialogues(args, engine)
    if args.both:
        results = run_both(engine, dialogues, DEFAULT_KS)
        stem = Path(args.out)
        for mode, res in results.items():
            _write_transitions(res, stem.with_suffix(f".{mode}.csv"))
    else:
        result = run_replay(engine, dialogues, engine.config.mode, DEFAULT_KS)
        _write_transitions(result, args.out)
    return 0


def cmd_dump_tree(args) -> int:
    engine = _engine_from_args(args)
    session = engine.new_session(mode=engine.config.mode)
    lines = (
        Path(args.script).read_text(encoding="utf-8").splitlines()
        if args.script
        else [line.rstrip("\n") for line in sys.stdin]
    )
    for text in lines:
        if not text.strip():
            continue
        response = engine.advance(session, text)
        print(json.dumps(response.to_json_dict(), sort_keys=True))
    return 0


def cmd_synth(args) -> int:
    cfg_path = write_bundle(
        args.out,
        n_dialogues=args.dialogues,
        genres_n=args.genres,
        items_per_genre=args.items_per_genre,
        seed=args.seed,
    )
    print(f"bundle written; config at {cfg_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="convrec",
        description="conversational recommender with reasoning trees and genre-level interest tracking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_chat = sub.add_parser("chat", help="interactive terminal session")
    _add_engine_args(p_chat)
    p_chat.add_argument("--show-tree", action="store_true", help="print tree JSON per turn")
    p_chat.set_defaults(func=cmd_chat)

    p_serve = sub.add_parser("serve", help="run the HTTP session service")
    _add_engine_args(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8080)
    p_serve.set_defaults(func=cmd_serve)

    p_replay = sub.add_parser("replay", help="evaluate recorded dialogues")
    _add_engine_args(p_replay)
    p_replay.add_argument("--data", required=True, help="dialogue JSON-lines file")
    p_replay.add_argument("--movie-map", help="marker->entity CSV (default from config)")
    p_replay.add_argument("--both", action="store_true", help="run baseline and hierarchical")
    p_replay.add_argument("--ks", help="comma-separated recall cutoffs (default 1,10,50)")
    p_replay.add_argument("--split-file", help="file of conversation ids to keep")
    p_replay.add_argument("--out", help="write the report JSON here")
    p_replay.add_argument("--dump-transitions", help="write transition matrix CSV here")
    p_replay.set_defaults(func=cmd_replay)

    p_export = sub.add_parser("export-transitions", help="write transition CSV only")
    _add_engine_args(p_export)
    p_export.add_argument("--data", required=True)
    p_export.add_argument("--movie-map")
    p_export.add_argument("--both", action="store_true")
    p_export.add_argument("--split-file")
    p_export.add_argument("--out", required=True)
    p_export.set_defaults(func=cmd_export_transitions)

    p_dump = sub.add_parser("dump-tree", help="print response JSON per scripted turn")
    _add_engine_args(p_dump)
    p_dump.add_argument("--script", help="file with one user utterance per line (default stdin)")
    p_dump.set_defaults(func=cmd_dump_tree)

    p_synth = sub.add_parser("synth", help="generate a synthetic evaluation bundle")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--dialogues", type=int, default=50)
    p_synth.add_argument("--genres", type=int, default=6)
    p_synth.add_argument("--items-per-genre", type=int, default=10)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

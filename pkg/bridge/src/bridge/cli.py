"""Command line interface: `bridge serve` and `bridge finetune`."""

from __future__ import annotations

import argparse
import logging
import sys

from bridge.config import BridgeConfig, load_config
from bridge.data import read_query_records, read_role_sets
from bridge.errors import BridgeError
from bridge.finetune import STAGES, finetune
from bridge.server import StageModels, serve, serve_tcp

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridge", description="encoder scorer for the rolecraft wire protocol"
    )
    parser.add_argument("--verbose", action="store_true", help="log at INFO level")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("serve", help="answer scoring requests over stdio or TCP")
    p.add_argument("--config", help="server config JSON naming stage checkpoints")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for fresh models when --config is omitted")
    p.add_argument("--tcp", type=int, metavar="PORT",
                   help="listen on TCP (0 = pick a port)")

    p = sub.add_parser("finetune", help="train one stage on a dump-queries export")
    p.add_argument("--stage", required=True, choices=STAGES)
    p.add_argument("--data", required=True, help="JSONL from rolecraft dump-queries")
    p.add_argument("-o", "--out", required=True, help="checkpoint file to write")
    p.add_argument("--config", help="bridge config JSON; flags below override it")
    p.add_argument("--resume", help="continue training from this checkpoint")
    p.add_argument("--roles", help="filter-roles payload choosing bio training lanes")
    p.add_argument("--negatives", type=int, default=2,
                   help="no-argument lanes per record when --roles is absent")
    p.add_argument("--encoder", help='"tiny" or a checkpoint path to start from')
    p.add_argument("--lr", type=float)
    p.add_argument("--warmup", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--tokens-per-batch", type=int)
    p.add_argument("--max-len", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--seed", type=int)
    return parser


def _finetune_config(a) -> BridgeConfig:
    cfg = load_config(a.config) if a.config else BridgeConfig()
    overrides = {
        "encoder": a.encoder, "lr": a.lr, "warmup": a.warmup, "epochs": a.epochs,
        "tokens_per_batch": a.tokens_per_batch, "max_len": a.max_len,
        "dim": a.dim, "layers": a.layers, "seed": a.seed,
    }
    merged = cfg.to_dict()
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return BridgeConfig(**{**merged, "roles": tuple(merged["roles"])})


def cmd_serve(a) -> int:
    models = (StageModels.from_config_file(a.config) if a.config
              else StageModels.fresh(BridgeConfig(seed=a.seed)))
    if a.tcp is not None:
        serve_tcp(models, a.tcp)
    else:
        serve(models, sys.stdin, sys.stdout)
    return EXIT_OK


def cmd_finetune(a) -> int:
    records = read_query_records(a.data)
    role_sets = read_role_sets(a.roles) if a.roles else None
    cfg = _finetune_config(a)
    losses = finetune(a.stage, records, cfg, a.out, role_sets=role_sets,
                      negatives=a.negatives, resume=a.resume)
    for i, loss in enumerate(losses, 1):
        print(f"epoch {i} loss {loss:.6f}", file=sys.stderr)
    print(f"saved {a.stage} checkpoint to {a.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr
    )
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "serve":
            return cmd_serve(args)
        return cmd_finetune(args)
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())

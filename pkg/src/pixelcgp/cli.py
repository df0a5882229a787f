"""Command line entry points: evolve, replay, export-dot."""

from __future__ import annotations

import argparse
import os
import sys

from . import envs, evolution, persist
from .dot import export_dot
from .genome import decode, trace_active
from .values import scalar_of

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ENV = 3
EXIT_GENOME = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pixelcgp",
        description="Evolve and inspect pixel-input CGP controllers")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evolve", help="run a 1+lambda evolution")
    ev.add_argument("--config", help="run configuration file")
    ev.add_argument("--seed", type=int, help="override the config seed")
    ev.add_argument("--env", help="override the config environment")
    ev.add_argument("--out", help="override the output directory")

    rp = sub.add_parser("replay", help="replay a genome for one episode")
    rp.add_argument("genome", help="genome file to replay")
    rp.add_argument("--config", help="run configuration file")
    rp.add_argument("--seed", type=int, default=None)
    rp.add_argument("--env", default=None)
    rp.add_argument("--trace", action="store_true",
                    help="print active node outputs every frame")

    dp = sub.add_parser("export-dot", help="print the active graph as DOT")
    dp.add_argument("genome", help="genome file to export")
    return parser


def _load_config(args) -> persist.RunConfig:
    if getattr(args, "config", None):
        cfg = persist.load_config(args.config)
    else:
        cfg = persist.RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg.seed = args.seed
    if getattr(args, "env", None):
        cfg.env = args.env
    if getattr(args, "out", None):
        cfg.out_dir = args.out
    return cfg


def _make_env(cfg: persist.RunConfig):
    return envs.make_env(cfg.env, ale_server=cfg.ale_server or None,
                         rom_dir=cfg.rom_dir or None)


def cmd_evolve(args) -> int:
    try:
        cfg = _load_config(args)
    except (OSError, persist.FormatError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        env = _make_env(cfg)
    except Exception as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return EXIT_ENV
    econf = evolution.EvolutionConfig(
        n_output=env.n_actions, C=cfg.c, r=cfg.r, lam=cfg.lam,
        n_eval=cfg.n_eval, m_nodes=cfg.m_nodes, m_output=cfg.m_output,
        episodes_per_eval=cfg.episodes, p_fskip=cfg.p_fskip,
        frame_cap=cfg.frame_cap, seed=cfg.seed)
    os.makedirs(cfg.out_dir, exist_ok=True)
    log_path = os.path.join(cfg.out_dir, "log.txt")
    try:
        with open(log_path, "w") as log_fh:
            best, state = evolution.run_evolution(
                econf, cfg.env, log_fn=lambda line: print(line, file=log_fh))
    except Exception as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return EXIT_ENV
    persist.save_genome(best, os.path.join(cfg.out_dir, "best.cgp"))
    # evaluation seed of the recorded fitness; replay with --seed $(cat ...)
    with open(os.path.join(cfg.out_dir, "best.seed"), "w") as fh:
        fh.write(f"{state.elite_seed}\n")
    print(f"best {state.elite_fitness} evals {state.evaluations_used}")
    return EXIT_OK


def cmd_replay(args) -> int:
    try:
        cfg = _load_config(args)
    except (OSError, persist.FormatError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        genome = persist.load_genome(args.genome)
    except (OSError, persist.FormatError) as exc:
        print(f"genome error: {exc}", file=sys.stderr)
        return EXIT_GENOME
    try:
        env = _make_env(cfg)
    except Exception as exc:
        print(f"environment error: {exc}", file=sys.stderr)
        return EXIT_ENV
    if env.n_actions != genome.n_output:
        print(f"genome error: {genome.n_output} outputs but environment "
              f"has {env.n_actions} actions", file=sys.stderr)
        return EXIT_GENOME
    program = decode(genome)
    active = sorted(i for i in trace_active(program) if i >= program.n_input)

    def on_frame(i, action, reward, prog):
        print(f"frame {i} action {action} reward {reward}")
        if args.trace:
            for n in active:
                nd = prog.nodes[n - prog.n_input]
                print(f"node {n} {nd.spec.name} {scalar_of(prog.state[n])}")

    total = envs.run_episode(program, env, cfg.seed, p_fskip=cfg.p_fskip,
                             frame_cap=cfg.frame_cap, on_frame=on_frame)
    print(f"total {total}")
    return EXIT_OK


def cmd_export_dot(args) -> int:
    try:
        genome = persist.load_genome(args.genome)
    except (OSError, persist.FormatError) as exc:
        print(f"genome error: {exc}", file=sys.stderr)
        return EXIT_GENOME
    sys.stdout.write(export_dot(genome))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = {
        "evolve": cmd_evolve,
        "replay": cmd_replay,
        "export-dot": cmd_export_dot,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())

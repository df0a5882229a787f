"""1+lambda evolutionary algorithm over CGP genomes.

One elite genome is kept; every generation it spawns lambda mutants, each
mutant is evaluated, and the best offspring whose fitness is greater than
or equal to the elite's replaces it (equal fitness replaces, so neutral
drift through junk genes stays possible). The run stops after
ceil(n_eval / lambda) generations.

Mutation replaces an exact count of distinct genes: round-half-up of
m_nodes * 4C node genes and of m_output * n_output output genes.

Evaluation is deterministic given (genome, eval seed). Each offspring slot
gets its own integer eval seed derived from (run seed, generation,
offspring index), so every generation faces fresh episodes but any logged
fitness can be reproduced later from the genome and that one integer; the
elite's seed travels in the run state. Offspring of one generation may be
evaluated in parallel worker processes; results are merged in offspring
order, so serial and parallel runs log identically.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import envs
from .genome import Genome, decode, random_genome

LOG_LINE = "generation {g} evals {e} best {f}"


@dataclass
class EvolutionConfig:
    n_input: int = envs.N_INPUT_PLANES
    n_output: int = 3
    C: int = 40
    r: float = 0.1
    lam: int = 9
    n_eval: int = 10000
    m_nodes: float = 0.1
    m_output: float = 0.6
    episodes_per_eval: int = 1
    p_fskip: float = envs.DEFAULT_P_FSKIP
    frame_cap: int = envs.DEFAULT_FRAME_CAP
    seed: int = 0

    @property
    def generations(self) -> int:
        return math.ceil(self.n_eval / self.lam)


@dataclass
class LogRecord:
    generation: int
    best_fitness: float
    evaluations: int

    def line(self) -> str:
        return LOG_LINE.format(g=self.generation, e=self.evaluations,
                               f=self.best_fitness)


@dataclass
class EvolutionState:
    elite: Genome
    elite_fitness: float
    elite_seed: int = 0        # eval seed that produced elite_fitness
    evaluations_used: int = 0
    generation: int = 0
    log: list[LogRecord] = field(default_factory=list)


def eval_seed_for(run_seed: int, generation: int, index: int) -> int:
    """Evaluation seed for one offspring slot, as a plain integer.

    A plain integer so it can be written down and handed back to evaluate()
    or a replay to reproduce the logged fitness exactly.
    """
    ss = np.random.SeedSequence([int(run_seed), int(generation), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def _exact_count(fraction: float, total: int) -> int:
    return int(math.floor(fraction * total + 0.5))


def mutate(parent: Genome, m_nodes: float, m_output: float,
           rng: np.random.Generator) -> Genome:
    """Child with fresh uniform values at an exact count of distinct genes."""
    genes = parent.genes.copy()
    n_out = parent.n_output
    k_n = _exact_count(m_nodes, 4 * parent.C)
    k_o = _exact_count(m_output, n_out)
    if k_n:
        sites = rng.choice(4 * parent.C, size=k_n, replace=False)
        genes[n_out + sites] = rng.random(k_n)
    if k_o:
        sites = rng.choice(n_out, size=k_o, replace=False)
        genes[sites] = rng.random(k_o)
    return parent.with_genes(genes)


def evaluate(genome: Genome, environment, episodes_per_eval: int,
             eval_seed: int, p_fskip: float = 0.0,
             frame_cap: int = envs.DEFAULT_FRAME_CAP) -> float:
    """Mean total episode reward; deterministic given (genome, eval_seed)."""
    if environment.n_actions != genome.n_output:
        raise ValueError(
            f"environment has {environment.n_actions} actions but genome "
            f"has {genome.n_output} outputs"
        )
    program = decode(genome)
    totals = [
        envs.run_episode(program, environment, eval_seed, episode=ep,
                         p_fskip=p_fskip, frame_cap=frame_cap)
        for ep in range(episodes_per_eval)
    ]
    return sum(totals) / len(totals)


def _eval_task(args) -> float:
    genes, n_input, n_output, C, r, env_name, episodes, seed, p_fskip, cap = args
    genome = Genome(np.asarray(genes), n_input, n_output, C, r)
    return evaluate(genome, envs.make_env(env_name), episodes, seed,
                    p_fskip=p_fskip, frame_cap=cap)


class _Evaluator:
    """Evaluates offspring batches, optionally in worker processes."""

    def __init__(self, config: EvolutionConfig, env_name: str, workers: int):
        self.config = config
        self.env_name = env_name
        self.pool = ProcessPoolExecutor(workers) if workers > 1 else None
        self.env = envs.make_env(env_name) if self.pool is None else None

    def __call__(self, genomes: list[Genome],
                 seeds: list[int]) -> list[float]:
        c = self.config
        if self.pool is None:
            return [
                evaluate(g, self.env, c.episodes_per_eval, seed,
                         p_fskip=c.p_fskip, frame_cap=c.frame_cap)
                for g, seed in zip(genomes, seeds)
            ]
        tasks = [
            (g.genes, g.n_input, g.n_output, g.C, g.r, self.env_name,
             c.episodes_per_eval, seed, c.p_fskip, c.frame_cap)
            for g, seed in zip(genomes, seeds)
        ]
        return list(self.pool.map(_eval_task, tasks))

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def run_evolution(config: EvolutionConfig, env_name: str = "catch",
                  workers: int = 1, log_fn=None) -> tuple[Genome, EvolutionState]:
    """Full 1+lambda run; returns the final elite and the run state."""
    rng = np.random.default_rng(config.seed)
    evaluator = _Evaluator(config, env_name, workers)
    try:
        elite = random_genome(config.n_input, config.n_output, config.C,
                              config.r, rng)
        elite_seed = eval_seed_for(config.seed, 0, 0)
        elite_fit = evaluator([elite], [elite_seed])[0]
        state = EvolutionState(elite, elite_fit, elite_seed,
                               evaluations_used=1)
        _log(state, log_fn)
        for gen in range(1, config.generations + 1):
            offspring = [
                mutate(elite, config.m_nodes, config.m_output, rng)
                for _ in range(config.lam)
            ]
            seeds = [eval_seed_for(config.seed, gen, i)
                     for i in range(config.lam)]
            fits = evaluator(offspring, seeds)
            state.evaluations_used += config.lam
            best_i = max(range(config.lam), key=lambda i: (fits[i], -i))
            if fits[best_i] >= elite_fit:
                elite, elite_fit = offspring[best_i], fits[best_i]
                elite_seed = seeds[best_i]
            state.elite, state.elite_fitness = elite, elite_fit
            state.elite_seed = elite_seed
            state.generation = gen
            _log(state, log_fn)
        return elite, state
    finally:
        evaluator.close()


def _log(state: EvolutionState, log_fn) -> None:
    rec = LogRecord(state.generation, state.elite_fitness,
                    state.evaluations_used)
    state.log.append(rec)
    if log_fn is not None:
        log_fn(rec.line())

"""Genetic search over a hyperparameter space.

Individuals carry a value for every dimension (a genotype) so that
crossover and mutation stay well defined when conditional dimensions
switch on and off; the objective only ever sees the active subset.
Selection is tournament of three, reproduction is per-gene uniform
crossover plus per-gene resampling mutation, and the single best
individual survives each generation unchanged.
"""

import numpy as np

from .result import SearchError, SearchResult

TOURNAMENT_SIZE = 3
ELITE_COUNT = 1


def _full_genotype(space, rng):
    return {d.name: d.sample(rng) for d in space.dimensions}


def _phenotype(space, genotype):
    cfg = {}
    for d in space.dimensions:
        if not d.condition or cfg.get(d.condition[0]) == d.condition[1]:
            cfg[d.name] = genotype[d.name]
    return cfg


def _tournament(fitness, rng):
    picks = rng.integers(len(fitness), size=TOURNAMENT_SIZE)
    return picks[int(np.argmax([fitness[i] for i in picks]))]


def _cross_and_mutate(space, mother, father, crossover_rate, mutation_rate,
                      rng):
    child = {}
    for d in space.dimensions:
        gene = father[d.name] if rng.random() < crossover_rate else mother[d.name]
        if rng.random() < mutation_rate:
            gene = d.sample(rng)
        child[d.name] = gene
    return child


def genetic_search(space, objective, pop_size=20, generations=10,
                   crossover_rate=0.5, mutation_rate=0.1, seed=0):
    if pop_size < 2:
        raise SearchError("pop_size must be >= 2")
    if generations < 0:
        raise SearchError("generations must be >= 0")
    for name, rate in (("crossover_rate", crossover_rate),
                       ("mutation_rate", mutation_rate)):
        if not 0.0 <= rate <= 1.0:
            raise SearchError("%s must lie in [0, 1]" % name)

    rng = np.random.default_rng(seed)
    history = []

    def evaluate(genotype):
        cfg = _phenotype(space, genotype)
        score = float(objective(cfg))
        history.append((cfg, score))
        return score

    population = [_full_genotype(space, rng) for _ in range(pop_size)]
    fitness = [evaluate(g) for g in population]

    for _ in range(generations):
        elite = int(np.argmax(fitness))
        next_pop = [population[elite]]
        next_fit = [fitness[elite]]
        while len(next_pop) < pop_size:
            mother = population[_tournament(fitness, rng)]
            father = population[_tournament(fitness, rng)]
            child = _cross_and_mutate(space, mother, father,
                                      crossover_rate, mutation_rate, rng)
            next_pop.append(child)
            next_fit.append(evaluate(child))
        population, fitness = next_pop, next_fit

    best = int(np.argmax([s for _, s in history]))
    best_cfg, best_score = history[best]
    return SearchResult(strategy="ga", best_config=best_cfg,
                        best_score=best_score, history=history,
                        evaluations_used=len(history), seed=int(seed))

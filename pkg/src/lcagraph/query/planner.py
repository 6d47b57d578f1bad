"""Seed selection: start each pattern at its cheapest labeled node.

The plan only chooses where matching starts; execution expands along the
pattern path from the seed, so results always equal the naive semantics.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Plan:
    query: object
    seeds: tuple  # per pattern: index of the seed NodePattern
    estimates: tuple  # per pattern: estimated seed candidate count


def _seed_cost(graph, node_pattern):
    if not node_pattern.labels:
        return graph.node_count
    return min(graph.label_cardinality(label) for label in node_pattern.labels)


def plan_query(query, graph):
    """Pick, for every pattern, the node with minimum label cardinality.

    Ties (including the all-unlabeled case) break toward the earliest
    pattern node in textual order.
    """
    seeds = []
    estimates = []
    for pattern in query.patterns:
        best = 0
        best_cost = _seed_cost(graph, pattern.nodes[0])
        for i, node in enumerate(pattern.nodes[1:], start=1):
            cost = _seed_cost(graph, node)
            if cost < best_cost:
                best, best_cost = i, cost
        seeds.append(best)
        estimates.append(best_cost)
    return Plan(query, tuple(seeds), tuple(estimates))

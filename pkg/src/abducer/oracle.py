"""Exhaustive reference implementation for small networks.

The oracle sweeps subsets of the causal links by increasing size, tests
each (culprit, subset) pair for validity and ranks explanations by weight.
It is deliberately simple so that the Steiner solver can be checked against
it; a size guard refuses networks where the sweep would be hopeless.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import NetworkTooLargeError, UnknownEventError
from .kb import CausalNetwork, EventId
from .scenario import (
    Link,
    Scenario,
    is_valid_scenario,
    log_weight,
    participants,
    raw_probability,
)

MAX_ORACLE_LINKS = 25

WEIGHT_TIE_TOL = 1e-9


@dataclass(frozen=True)
class RankedExplanation:
    rank: int
    scenario: Scenario
    log_weight: float
    probability: float


def structure_key(s: Scenario) -> tuple[int, tuple[Link, ...], EventId]:
    """Deterministic tie order: fewer links, then link list, then culprit."""
    return (len(s.causations), s.sorted_causations, s.culprit)


def order_and_rank(
    weighted: Iterable[tuple[Scenario, float, float]],
    tol: float = WEIGHT_TIE_TOL,
) -> list[RankedExplanation]:
    """Sort by weight, breaking ties within tol by structure_key."""
    items = sorted(weighted, key=lambda t: (t[1], structure_key(t[0])))
    groups: list[list[tuple[Scenario, float, float]]] = []
    for item in items:
        if groups and item[1] - groups[-1][-1][1] <= tol:
            groups[-1].append(item)
        else:
            groups.append([item])
    out: list[RankedExplanation] = []
    for group in groups:
        group.sort(key=lambda t: structure_key(t[0]))
        for s, w, p in group:
            out.append(RankedExplanation(len(out) + 1, s, w, p))
    return out


def enumerate_valid_scenarios(
    net: CausalNetwork,
    max_links: int,
    max_network_links: int = MAX_ORACLE_LINKS,
) -> Iterator[Scenario]:
    """Yield every valid scenario with at most max_links causations.

    The stream is deterministic: ordered by size, then culprit name, then
    the sorted link tuple.  Subset prefixes that already break the tree
    shape (an effect caused twice, or the culprit caused) are pruned; the
    pruning is monotone, so the stream equals the literal power-set sweep.
    """
    links = tuple(sorted((l.cause, l.effect) for l in net.causal))
    if len(links) > max_network_links:
        raise NetworkTooLargeError(
            f"{len(links)} causal links exceed the sweep guard ({max_network_links})"
        )
    culprits = tuple(n.id for n in net.events)
    max_links = min(max_links, len(links))

    for size in range(max_links + 1):
        for culprit in culprits:
            for subset in _tree_subsets(links, size, culprit):
                cand = Scenario(culprit, frozenset(subset))
                if is_valid_scenario(net, cand):
                    yield cand


def _tree_subsets(
    links: tuple[Link, ...], size: int, culprit: EventId
) -> Iterator[tuple[Link, ...]]:
    """Lexicographic size-``size`` subsets whose effects are unique and
    never the culprit."""
    n = len(links)

    def rec(start: int, chosen: list[Link], used_effects: set[EventId]) -> Iterator[tuple[Link, ...]]:
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for i in range(start, n - (size - len(chosen)) + 1):
            x, y = links[i]
            if y in used_effects or y == culprit:
                continue
            chosen.append(links[i])
            used_effects.add(y)
            yield from rec(i + 1, chosen, used_effects)
            chosen.pop()
            used_effects.remove(y)

    yield from rec(0, [], set())


def best_explanations_bruteforce(
    net: CausalNetwork,
    observations: Iterable[EventId],
    k: int,
    max_network_links: int = MAX_ORACLE_LINKS,
    culprit: EventId | None = None,
) -> list[RankedExplanation]:
    """The k most probable explanations of the observations, by exhaustion.

    With ``culprit`` given, only scenarios rooted there are considered
    (used to mirror the solver's augmented-root mode)."""
    obs = frozenset(observations)
    if not obs:
        raise ValueError("observation set must be non-empty")
    for o in obs:
        if not net.has_event(o):
            raise UnknownEventError(f"unknown event: {o}")
    if k < 1:
        raise ValueError("k must be positive")

    disorders = frozenset(net.disorders)
    found: list[tuple[Scenario, float, float]] = []
    for cand in enumerate_valid_scenarios(net, len(net.causal), max_network_links):
        if cand.culprit not in disorders:
            continue
        if culprit is not None and cand.culprit != culprit:
            continue
        if not obs <= participants(net, cand):
            continue
        found.append((cand, log_weight(net, cand), raw_probability(net, cand)))
    return order_and_rank(found)[:k]

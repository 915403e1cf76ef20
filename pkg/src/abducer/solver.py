"""Minimum-weight explanation search as directed Steiner trees.

The search graph has one node per event, causal edges weighted ln(1/p),
isa edges weighted zero, and node weights ln(1/prior) on disorders (applied
only when comparing candidate roots).  The k lightest arborescences rooted
at a disorder and covering the observations are enumerated best-first with
a Dreyfus-Wagner style dynamic program over terminal bitmasks plus
Lawler partitioning (re-solving with forced/forbidden edge sets), and each
candidate tree is kept only if its scenario passes the canonical validity
check.

The DP table is allocated lazily: a (node, subset) pair gets an entry only
when some relaxation reaches it, so components unrelated to the terminals
are never touched.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    InconsistentConstraintsError,
    MalformedTreeError,
    TooManyTerminalsError,
    UnknownEventError,
)
from .kb import CausalNetwork, EventId, add_top
from .oracle import RankedExplanation, WEIGHT_TIE_TOL, order_and_rank
from .scenario import (
    Scenario,
    is_valid_scenario,
    log_weight,
    participants,
    raw_probability,
)

MAX_TERMINALS = 20

EdgeKey = tuple[str, str]


@dataclass(frozen=True)
class GraphEdge:
    src: str
    dst: str
    weight: float
    kind: str  # "cause" or "isa"

    @property
    def key(self) -> EdgeKey:
        return (self.src, self.dst)


class WeightedSearchGraph:
    """Immutable weighted digraph over event ids."""

    __slots__ = ("nodes", "edges", "node_weight", "edge_by_key", "in_edges", "out_edges")

    def __init__(
        self,
        nodes: Iterable[str],
        edges: Iterable[GraphEdge],
        node_weight: dict[str, float],
    ):
        self.nodes = tuple(sorted(nodes))
        self.edges = tuple(sorted(edges, key=lambda e: (e.src, e.dst)))
        self.node_weight = dict(node_weight)
        self.edge_by_key = {e.key: e for e in self.edges}
        ins: dict[str, list[GraphEdge]] = {}
        outs: dict[str, list[GraphEdge]] = {}
        for e in self.edges:
            ins.setdefault(e.dst, []).append(e)
            outs.setdefault(e.src, []).append(e)
        self.in_edges = {v: tuple(es) for v, es in ins.items()}
        self.out_edges = {v: tuple(es) for v, es in outs.items()}

def build_search_graph(net: CausalNetwork) -> WeightedSearchGraph:
    """Causal edges ln(1/p), isa edges 0, disorder node weights ln(1/prior)."""
    edges = [
        GraphEdge(l.cause, l.effect, math.log(1.0 / l.cond_prob), "cause")
        for l in net.causal
    ]
    edges += [GraphEdge(l.child, l.parent, 0.0, "isa") for l in net.isa]
    node_weight = {
        n.id: math.log(1.0 / n.prior)
        for n in net.events
        if n.is_disorder and n.prior is not None
    }
    return WeightedSearchGraph((n.id for n in net.events), edges, node_weight)


@dataclass(frozen=True)
class SteinerTree:
    """An arborescence; edges are listed in root-down BFS order."""

    root: str
    edges: tuple[GraphEdge, ...]
    terminals: frozenset[str]
    total_weight: float


@dataclass
class DPTable:
    """Lazily allocated map (node, terminal bitmask) -> (weight, backpointer)."""

    entries: dict[tuple[str, int], tuple[float, tuple]] = field(default_factory=dict)
    relaxations: int = 0

    @property
    def entry_count(self) -> int:
        return len(self.entries)

    def touched_nodes(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.entries)


@dataclass
class SolveStats:
    """Aggregated instrumentation across the DP runs of one query."""

    dp_runs: int = 0
    relaxations: int = 0
    table_entries: int = 0
    touched_nodes: set[str] = field(default_factory=set)

    def absorb(self, table: DPTable) -> None:
        self.dp_runs += 1
        self.relaxations += table.relaxations
        self.table_entries += table.entry_count
        self.touched_nodes |= table.touched_nodes()


class _Problem:
    """A steiner instance after forbidding/contraction preprocessing."""

    __slots__ = (
        "in_adj",
        "term_nodes",
        "super_of",
        "forced_edges",
        "forced_weight",
        "terminals",
        "root",
    )

    def __init__(self, in_adj, term_nodes, super_of, forced_edges, terminals, root):
        self.in_adj = in_adj
        self.term_nodes = term_nodes
        self.super_of = super_of
        self.forced_edges = forced_edges
        self.forced_weight = sum(e.weight for e in forced_edges)
        self.terminals = terminals
        self.root = root


def _edge_key(e) -> EdgeKey:
    if isinstance(e, GraphEdge):
        return e.key
    return (e[0], e[1])


def _build_problem(
    g: WeightedSearchGraph,
    root: str,
    terminals: tuple[str, ...],
    forced_keys: frozenset[EdgeKey],
    forbidden_keys: frozenset[EdgeKey],
) -> "_Problem | None":
    forced_edges = tuple(g.edge_by_key[k] for k in sorted(forced_keys))

    head_of: dict[str, GraphEdge] = {}
    for e in forced_edges:
        if e.dst in head_of:
            return None
        head_of[e.dst] = e
    if root in head_of:
        return None
    for v in head_of:
        seen = {v}
        u = v
        while u in head_of:
            u = head_of[u].src
            if u in seen:
                return None
            seen.add(u)

    comp_top: dict[str, str] = {}

    def top_of(v: str) -> str:
        path = []
        while v in head_of and v not in comp_top:
            path.append(v)
            v = head_of[v].src
        t = comp_top.get(v, v)
        for p in path:
            comp_top[p] = t
        return t

    super_of = {v: top_of(v) for v in g.nodes}

    in_adj: dict[str, dict[str, GraphEdge]] = {}
    for e in g.edges:
        k = e.key
        if k in forbidden_keys or k in forced_keys:
            continue
        if e.dst in head_of:
            continue
        su, sv = super_of[e.src], super_of[e.dst]
        if su == sv:
            continue
        slot = in_adj.setdefault(sv, {})
        old = slot.get(su)
        if old is None or (e.weight, e.key) < (old.weight, old.key):
            slot[su] = e

    adj = {
        v: tuple(sorted(slot.values(), key=lambda e: (e.weight, e.key)))
        for v, slot in in_adj.items()
    }

    # The root's own bit costs nothing (its base entry is zero), so terminal
    # nodes are kept root-agnostic and one DP table can serve every root.
    term_nodes = {super_of[t] for t in terminals}
    for e in forced_edges:
        term_nodes.add(super_of[e.dst])
    return _Problem(adj, tuple(sorted(term_nodes)), super_of, forced_edges, terminals, root)


def _run_dp(problem: _Problem, table: DPTable) -> list[dict[str, float]]:
    """Fill the bitmask DP; returns per-mask distance dicts."""
    terms = problem.term_nodes
    nt = len(terms)
    full = (1 << nt) - 1
    by_mask: list[dict[str, float]] = [dict() for _ in range(full + 1)]
    backs = table.entries
    in_adj = problem.in_adj

    for mask in range(1, full + 1):
        dist = by_mask[mask]
        if mask & (mask - 1) == 0:
            t = terms[mask.bit_length() - 1]
            dist[t] = 0.0
            backs[(t, mask)] = (0.0, ("base",))
        else:
            low = mask & -mask
            s1 = (mask - 1) & mask
            while s1 > 0:
                if s1 & low:
                    s2 = mask ^ s1
                    d1, d2 = by_mask[s1], by_mask[s2]
                    for v, w1 in d1.items():
                        table.relaxations += 1
                        w2 = d2.get(v)
                        if w2 is None:
                            continue
                        cand = w1 + w2
                        if cand < dist.get(v, math.inf):
                            dist[v] = cand
                            backs[(v, mask)] = (cand, ("merge", s1))
                s1 = (s1 - 1) & mask

        heap = [(w, v) for v, w in dist.items()]
        heapq.heapify(heap)
        settled: set[str] = set()
        while heap:
            d, v = heapq.heappop(heap)
            if v in settled or d > dist.get(v, math.inf):
                continue
            settled.add(v)
            for e in in_adj.get(v, ()):
                table.relaxations += 1
                nd = d + e.weight
                u = problem.super_of[e.src]
                if nd < dist.get(u, math.inf):
                    dist[u] = nd
                    backs[(u, mask)] = (nd, ("edge", v, e))
                    heapq.heappush(heap, (nd, u))
    return by_mask


def _trace(table: DPTable, node: str, mask: int, acc: set[GraphEdge]) -> None:
    entry = table.entries.get((node, mask))
    if entry is None:
        raise MalformedTreeError("internal: missing DP backpointer")
    back = entry[1]
    if back[0] == "base":
        return
    if back[0] == "merge":
        s1 = back[1]
        _trace(table, node, s1, acc)
        _trace(table, node, mask ^ s1, acc)
        return
    _, nxt, edge = back
    acc.add(edge)
    _trace(table, nxt, mask, acc)


def _canonicalize(root: str, edges: Iterable[GraphEdge], terminals: Iterable[str]) -> tuple[tuple[GraphEdge, ...], float]:
    """Extract a deterministic arborescence from a traced edge set."""
    out: dict[str, list[GraphEdge]] = {}
    for e in set(edges):
        out.setdefault(e.src, []).append(e)
    for es in out.values():
        es.sort(key=lambda e: e.dst)
    visited = {root}
    queue = [root]
    chosen: list[GraphEdge] = []
    while queue:
        v = queue.pop(0)
        for e in out.get(v, ()):
            if e.dst not in visited:
                visited.add(e.dst)
                chosen.append(e)
                queue.append(e.dst)
    missing = set(terminals) - visited
    if missing:
        raise MalformedTreeError(f"internal: tree misses terminals {sorted(missing)}")
    weight = 0.0
    for e in sorted(chosen, key=lambda e: (e.src, e.dst)):
        weight += e.weight
    return tuple(chosen), weight


def _extract(problem: _Problem, by_mask: list[dict[str, float]], table: DPTable) -> SteinerTree | None:
    nt = len(problem.term_nodes)
    full = (1 << nt) - 1
    sroot = problem.super_of[problem.root]
    acc: set[GraphEdge] = set(problem.forced_edges)
    if full:
        if sroot not in by_mask[full]:
            return None
        _trace(table, sroot, full, acc)
    edges, weight = _canonicalize(problem.root, acc, problem.terminals)
    return SteinerTree(problem.root, edges, frozenset(problem.terminals), weight)


def steiner_dp(
    g: WeightedSearchGraph,
    root: str,
    terminals: Iterable[str],
    forced: Iterable = (),
    forbidden: Iterable = (),
) -> tuple[SteinerTree | None, DPTable]:
    """Minimum arborescence rooted at root covering the terminals.

    ``forced`` edges must appear in the tree (realized by contracting them),
    ``forbidden`` edges must not.  Returns (None, table) when no tree exists.
    """
    terms = tuple(sorted(set(terminals)))
    node_set = frozenset(g.nodes)
    if root not in node_set:
        raise UnknownEventError(f"unknown event: {root}")
    for t in terms:
        if t not in node_set:
            raise UnknownEventError(f"unknown event: {t}")
    if len(terms) > MAX_TERMINALS:
        raise TooManyTerminalsError(f"{len(terms)} terminals exceed {MAX_TERMINALS}")
    forced_keys = frozenset(_edge_key(e) for e in forced)
    forbidden_keys = frozenset(_edge_key(e) for e in forbidden)
    for k in sorted(forced_keys):
        if k not in g.edge_by_key:
            raise InconsistentConstraintsError(f"forced edge {k[0]}->{k[1]} not in graph")
        if k in forbidden_keys:
            raise InconsistentConstraintsError(f"edge {k[0]}->{k[1]} both forced and forbidden")

    table = DPTable()
    problem = _build_problem(g, root, terms, forced_keys, forbidden_keys)
    if problem is None:
        return None, table
    by_mask = _run_dp(problem, table)
    try:
        tree = _extract(problem, by_mask, table)
    except MalformedTreeError:
        return None, table
    return tree, table


def tree_to_scenario(net: CausalNetwork, tree: SteinerTree) -> Scenario:
    """Drop isa edges; the causal edges become the scenario's causations."""
    seen_dst: set[str] = set()
    adj: dict[str, list[str]] = {}
    for e in tree.edges:
        if e.dst in seen_dst or e.dst == tree.root:
            raise MalformedTreeError(f"node {e.dst} has two parents or is the root")
        seen_dst.add(e.dst)
        adj.setdefault(e.src, []).append(e.dst)
    reached = {tree.root}
    queue = [tree.root]
    while queue:
        v = queue.pop(0)
        for w in adj.get(v, ()):
            reached.add(w)
            queue.append(w)
    if seen_dst - reached:
        raise MalformedTreeError("edge set is not connected to the root")
    causations = []
    for e in tree.edges:
        if e.kind == "cause":
            if not net.is_link(e.src, e.dst):
                raise MalformedTreeError(f"{e.src}->{e.dst} is not a network link")
            causations.append((e.src, e.dst))
    return Scenario.make(tree.root, causations)


def _bfs_edge_order(tree: SteinerTree) -> list[GraphEdge]:
    out: dict[str, list[GraphEdge]] = {}
    for e in tree.edges:
        out.setdefault(e.src, []).append(e)
    for es in out.values():
        es.sort(key=lambda e: e.dst)
    order: list[GraphEdge] = []
    queue = [tree.root]
    while queue:
        v = queue.pop(0)
        for e in out.get(v, ()):
            order.append(e)
            queue.append(e.dst)
    return order


class _CandidateStream:
    """Best-first Lawler enumeration of candidate trees over several roots.

    Yields (weight, root, tree) with weight = root node weight + tree weight,
    in non-decreasing order.  Emitted trees are partitioned away by two kinds
    of subproblem: excluding one tree edge (forcing the preceding prefix),
    and strict extensions (forcing the whole tree plus one further causal
    edge, earlier-ordered extension edges forbidden).  The second kind makes
    the stream cover non-minimal candidates, whose extra branches explain
    nothing but are still legitimate scenarios.
    """

    def __init__(
        self,
        g: WeightedSearchGraph,
        roots: Iterable[str],
        terminals: Iterable[str],
        stats: SolveStats | None = None,
    ):
        self.g = g
        self.terminals = tuple(sorted(set(terminals)))
        self.stats = stats
        self._counter = itertools.count()
        self._heap: list[tuple] = []
        self._causal_keys = tuple(
            sorted(k for k, e in g.edge_by_key.items() if e.kind == "cause")
        )
        self._desc_cache: dict[str, frozenset[str]] = {}
        base_table = DPTable()
        base_problem = _build_problem(
            g, next(iter(g.nodes)), self.terminals, frozenset(), frozenset()
        )
        by_mask = _run_dp(base_problem, base_table) if base_problem else None
        if self.stats is not None:
            self.stats.absorb(base_table)
        for r in sorted(set(roots)):
            if base_problem is None:
                break
            rooted = _Problem(
                base_problem.in_adj,
                base_problem.term_nodes,
                base_problem.super_of,
                (),
                self.terminals,
                r,
            )
            try:
                tree = _extract(rooted, by_mask, base_table)
            except MalformedTreeError:
                tree = None
            if tree is not None:
                self._push(r, frozenset(), frozenset(), tree)

    def _root_weight(self, root: str) -> float:
        return self.g.node_weight.get(root, 0.0)

    def _descendants(self, root: str) -> frozenset[str]:
        cached = self._desc_cache.get(root)
        if cached is None:
            seen = {root}
            queue = [root]
            while queue:
                v = queue.pop()
                for e in self.g.out_edges.get(v, ()):
                    if e.dst not in seen:
                        seen.add(e.dst)
                        queue.append(e.dst)
            cached = self._desc_cache[root] = frozenset(seen)
        return cached

    def _push(self, root: str, forced: frozenset, forbidden: frozenset, tree: SteinerTree) -> None:
        w = self._root_weight(root) + tree.total_weight
        key = (w, len(tree.edges), tuple(e.key for e in tree.edges), root)
        heapq.heappush(self._heap, (key, next(self._counter), root, forced, forbidden, tree))

    def _solve_child(self, root: str, forced: frozenset, forbidden: frozenset) -> None:
        child, table = steiner_dp(self.g, root, self.terminals, forced, forbidden)
        if self.stats is not None:
            self.stats.absorb(table)
        if child is not None:
            self._push(root, forced, forbidden, child)

    def __iter__(self) -> Iterator[tuple[float, str, SteinerTree]]:
        while self._heap:
            key, _, root, forced, forbidden, tree = heapq.heappop(self._heap)
            yield key[0], root, tree

            prefix = set(forced)
            for e in _bfs_edge_order(tree):
                if e.key in forced:
                    continue
                self._solve_child(root, frozenset(prefix), forbidden | {e.key})
                prefix.add(e.key)

            tree_keys = frozenset(e.key for e in tree.edges)
            reach = self._descendants(root)
            sup_forbidden = set(forbidden)
            for f in self._causal_keys:
                if f in tree_keys or f in sup_forbidden:
                    continue
                if f[0] not in reach:
                    continue
                self._solve_child(
                    root, tree_keys | {f}, frozenset(sup_forbidden)
                )
                sup_forbidden.add(f)


def best_valid_tree(
    net: CausalNetwork,
    g: WeightedSearchGraph,
    root: str,
    terminals: Iterable[str],
    stats: SolveStats | None = None,
) -> tuple[SteinerTree, Scenario] | None:
    """Lightest tree rooted at root whose scenario is valid and covers
    the terminals as participants."""
    terms = frozenset(terminals)
    for w, r, tree in _CandidateStream(g, [root], terms, stats):
        scenario = tree_to_scenario(net, tree)
        if terms <= participants(net, scenario) and is_valid_scenario(net, scenario):
            return tree, scenario
    return None


def explain(
    net: CausalNetwork,
    observations: Iterable[EventId],
    k: int = 1,
    multi: bool = False,
    stats: SolveStats | None = None,
) -> list[RankedExplanation]:
    """The k most probable explanations of the observations.

    Single mode roots the search at each disorder; multi mode augments the
    network with the distinguished root event and explains through it.
    Fewer than k results are returned when fewer explanations exist.
    """
    obs = frozenset(observations)
    if not obs:
        raise ValueError("observation set must be non-empty")
    if k < 1:
        raise ValueError("k must be positive")
    for o in obs:
        if not net.has_event(o):
            raise UnknownEventError(f"unknown event: {o}")

    work = net if (multi and net.top) else (add_top(net) if multi else net)
    g = build_search_graph(work)
    roots = [work.top] if multi else list(work.disorders)
    if not roots:
        return []

    found: list[tuple[Scenario, float, float]] = []
    seen: set[Scenario] = set()
    kth = math.inf
    for w, root, tree in _CandidateStream(g, roots, obs, stats):
        if len(found) >= k and w > kth + WEIGHT_TIE_TOL:
            break
        scenario = tree_to_scenario(work, tree)
        if scenario in seen:
            continue
        seen.add(scenario)
        if obs <= participants(work, scenario) and is_valid_scenario(work, scenario):
            found.append(
                (scenario, log_weight(work, scenario), raw_probability(work, scenario))
            )
            if len(found) >= k:
                kth = sorted(t[1] for t in found)[k - 1]
    return order_and_rank(found)[:k]

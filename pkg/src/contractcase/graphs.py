"""Small deterministic graph helpers shared by the validator and the argument engine.

Nodes are strings; adjacency is rebuilt sorted so results never depend on
insertion order or on hash randomization.
"""

from __future__ import annotations

from collections.abc import Iterable


def _sorted_adjacency(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {n: [] for n in sorted(nodes)}
    for source, target in sorted(edges):
        adj.setdefault(source, []).append(target)
        adj.setdefault(target, [])
    return adj


def find_cycle(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[str] | None:
    """One witness cycle as a node sequence, or None if the graph is acyclic.

    The witness is rotated so its smallest node comes first, which makes the
    result independent of declaration order.
    """
    adj = _sorted_adjacency(nodes, edges)
    WHITE, GREY, BLACK = 0, 1, 2
    color = {n: WHITE for n in adj}
    stack: list[str] = []

    def dfs(node: str) -> list[str] | None:
        color[node] = GREY
        stack.append(node)
        for nxt in adj[node]:
            if color[nxt] == GREY:
                cycle = stack[stack.index(nxt):]
                pivot = cycle.index(min(cycle))
                return cycle[pivot:] + cycle[:pivot]
            if color[nxt] == WHITE:
                found = dfs(nxt)
                if found is not None:
                    return found
        stack.pop()
        color[node] = BLACK
        return None

    for node in sorted(adj):
        if color[node] == WHITE:
            found = dfs(node)
            if found is not None:
                return found
    return None


def topological_order(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[str]:
    """Kahn's algorithm with a sorted frontier; raises ValueError on a cycle."""
    adj = _sorted_adjacency(nodes, edges)
    indegree = {n: 0 for n in adj}
    for source in adj:
        for target in adj[source]:
            indegree[target] += 1
    ready = sorted(n for n, d in indegree.items() if d == 0)
    order: list[str] = []
    while ready:
        node = ready.pop(0)
        order.append(node)
        inserted = False
        for target in adj[node]:
            indegree[target] -= 1
            if indegree[target] == 0:
                ready.append(target)
                inserted = True
        if inserted:
            ready.sort()
    if len(order) != len(adj):
        raise ValueError("graph contains a cycle; no topological order exists")
    return order

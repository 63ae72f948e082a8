"""Bipartite matching primitives behind the flow search.

Left vertices are the positions 0..len(candidates)-1; ``candidates[i]``
lists the right vertices available to position i in ascending order.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Sequence

_INF = float("inf")


def max_matching_size(
    candidates: Sequence[Sequence[int]],
    start: int = 0,
    used: Iterable[int] = (),
) -> int:
    """Maximum matching size of positions start.. onto unused right vertices.

    Hopcroft-Karp with deterministic (ascending) tie-breaking.
    """
    blocked = set(used)
    right_index: dict[int, int] = {}
    adj: list[list[int]] = []
    for i in range(start, len(candidates)):
        row = []
        for y in candidates[i]:
            if y in blocked:
                continue
            j = right_index.setdefault(y, len(right_index))
            row.append(j)
        adj.append(row)

    n_left = len(adj)
    match_l = [-1] * n_left
    match_r = [-1] * len(right_index)
    dist: list[float] = [0.0] * n_left
    matched = 0
    while _bfs_layers(adj, match_l, match_r, dist):
        for u in range(n_left):
            if match_l[u] == -1 and _augment(u, adj, dist, match_l, match_r):
                matched += 1
    return matched


def _bfs_layers(adj, match_l, match_r, dist) -> bool:
    queue: deque[int] = deque()
    free_dist = _INF
    for u in range(len(adj)):
        if match_l[u] == -1:
            dist[u] = 0
            queue.append(u)
        else:
            dist[u] = _INF
    while queue:
        u = queue.popleft()
        if dist[u] >= free_dist:
            continue
        for v in adj[u]:
            w = match_r[v]
            if w == -1:
                free_dist = min(free_dist, dist[u] + 1)
            elif dist[w] == _INF:
                dist[w] = dist[u] + 1
                queue.append(w)
    return free_dist != _INF


def _augment(root, adj, dist, match_l, match_r) -> bool:
    # Iterative layered DFS; recursion depth would track path length.
    us = [root]
    its = [iter(adj[root])]
    vs: list[int] = [-1]
    while us:
        u = us[-1]
        moved = False
        for v in its[-1]:
            w = match_r[v]
            if w == -1:
                vs[-1] = v
                for uu, vv in zip(us, vs):
                    match_l[uu] = vv
                    match_r[vv] = uu
                return True
            if dist[w] == dist[u] + 1:
                vs[-1] = v
                us.append(w)
                its.append(iter(adj[w]))
                vs.append(-1)
                moved = True
                break
        if not moved:
            dist[u] = _INF
            us.pop()
            its.pop()
            vs.pop()
    return False


def iter_saturating_assignments(
    candidates: Sequence[Sequence[int]],
) -> Iterator[tuple[int, ...]]:
    """Yield every assignment saturating all positions, lexicographically.

    An assignment picks a distinct right vertex for every position from its
    candidate list.  Dead branches are pruned with a matching feasibility
    check, so consecutive yields are separated by polynomial work.
    """
    n = len(candidates)
    if n == 0:
        yield ()
        return
    if max_matching_size(candidates) < n:
        return

    used: set[int] = set()
    choice: list[int] = []
    stack: list[Iterator[int]] = [iter(candidates[0])]
    while stack:
        i = len(choice)
        placed = False
        for y in stack[-1]:
            if y in used:
                continue
            used.add(y)
            choice.append(y)
            if i + 1 == n:
                yield tuple(choice)
                used.discard(y)
                choice.pop()
                continue
            if max_matching_size(candidates, i + 1, used) == n - i - 1:
                stack.append(iter(candidates[i + 1]))
                placed = True
                break
            used.discard(y)
            choice.pop()
        if not placed:
            stack.pop()
            if choice:
                used.discard(choice.pop())

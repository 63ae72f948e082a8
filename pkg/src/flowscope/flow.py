"""Causal flow search, verification, and the influencing digraph.

A causal flow pairs every measured vertex x with an adjacent partner f(x)
outside the input set, so that some vertex order puts x strictly before
f(x) and before every other neighbour of f(x).  Such an order exists for a
given f exactly when the induced influencing digraph is acyclic, so the
decision pipeline enumerates candidate functions (as saturating bipartite
matchings) and tests each digraph.  On instances too large to enumerate
exhaustively the pipeline stops at a configurable budget and returns an
explicit ``undecided`` verdict rather than guessing.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Literal, NamedTuple

from flowscope.geometry import Digraph, Geometry, GeometryError
from flowscope.matching import iter_saturating_assignments, max_matching_size

DEFAULT_MATCHING_BUDGET = 1000
DEFAULT_EXHAUSTIVE_BOUND = 10
DEFAULT_ORACLE_BOUND = 10

SearchStatus = Literal["found", "no-flow", "undecided"]


class FlowDomainError(ValueError):
    """A successor function does not map the measured set into allowed partners."""


class OracleBoundError(ValueError):
    """An instance exceeds the exhaustive oracle's size cap."""


class PathCoverError(ValueError):
    """A claimed path cover violates one of its defining properties."""


class FlowFormatError(ValueError):
    """A flow file cannot be parsed against the given geometry."""


@dataclass(frozen=True)
class SuccessorFunction:
    """Partial map from measured vertices to their correction partners.

    Stored as ascending (source, target) pairs.  ``from_mapping`` validates
    the full contract (domain, codomain, injectivity, adjacency); the plain
    constructor and ``from_pairs`` accept arbitrary candidates so that
    verifiers can inspect broken ones.
    """

    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> SuccessorFunction:
        return cls(tuple(sorted(pairs)))

    @classmethod
    def from_mapping(cls, geom: Geometry, mapping: dict[int, int]) -> SuccessorFunction:
        measured = set(geom.measured)
        extra = sorted(set(mapping) - measured)
        if extra:
            raise FlowDomainError(f"f is defined on output vertex {extra[0]}")
        missing = sorted(measured - set(mapping))
        if missing:
            raise FlowDomainError(f"f is undefined on measured vertex {missing[0]}")
        targets: set[int] = set()
        for x in sorted(mapping):
            y = mapping[x]
            if not (isinstance(y, int) and 0 <= y < geom.vertex_count):
                raise FlowDomainError(f"f({x}) = {y!r} is not a vertex")
            if y in geom.inputs:
                raise FlowDomainError(f"f({x}) = {y} lies in the input set")
            if y in targets:
                raise ValueError(f"f is not injective: {y} has two preimages")
            targets.add(y)
            if y not in geom.graph.adjacency[x]:
                raise ValueError(f"f({x}) = {y} is not adjacent to {x}")
        return cls.from_pairs(mapping.items())

    @cached_property
    def mapping(self) -> dict[int, int]:
        return dict(self.pairs)

    def sources(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, x: int) -> bool:
        return x in self.mapping

    def __call__(self, x: int) -> int:
        return self.mapping[x]


@dataclass(frozen=True)
class PathCover:
    """Vertex-disjoint directed paths covering the whole graph.

    There is one path per output vertex; outputs appear only as final
    points and inputs only as initial points.
    """

    paths: tuple[tuple[int, ...], ...]

    @classmethod
    def validated(cls, geom: Geometry, paths: Iterable[Iterable[int]]) -> PathCover:
        cover = cls(tuple(tuple(p) for p in paths))
        cover.check(geom)
        return cover

    def check(self, geom: Geometry) -> None:
        if len(self.paths) != geom.output_count:
            raise PathCoverError(
                f"cover has {len(self.paths)} paths but the geometry has "
                f"{geom.output_count} outputs"
            )
        seen: set[int] = set()
        for path in self.paths:
            if not path:
                raise PathCoverError("empty path in cover")
            for u, v in zip(path, path[1:]):
                if not geom.graph.has_edge(u, v):
                    raise PathCoverError(f"consecutive vertices {u}, {v} are not adjacent")
            for pos, v in enumerate(path):
                if v in seen:
                    raise PathCoverError(f"vertex {v} appears in two paths")
                seen.add(v)
                if v in geom.outputs and pos != len(path) - 1:
                    raise PathCoverError(f"output vertex {v} is not a final point")
                if v in geom.inputs and pos != 0:
                    raise PathCoverError(f"input vertex {v} is not an initial point")
            if path[-1] not in geom.outputs:
                raise PathCoverError(f"path ending at {path[-1]} does not end in an output")
        if len(seen) != geom.vertex_count:
            raise PathCoverError("cover does not visit every vertex")

    def successor_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for path in self.paths for u, v in zip(path, path[1:]))

    def successor(self) -> SuccessorFunction:
        return SuccessorFunction.from_pairs(self.successor_pairs())

    def initial_points(self) -> tuple[int, ...]:
        return tuple(path[0] for path in self.paths)

    def lengths(self) -> tuple[int, ...]:
        return tuple(len(path) for path in self.paths)


@dataclass(frozen=True)
class InfluencingDigraph:
    """Loop-free digraph whose acyclicity certifies a flow for one f.

    There is an arc x -> y (x != y) exactly when y = f(x) or y is adjacent
    to f(x).
    """

    digraph: Digraph

    @property
    def vertex_count(self) -> int:
        return self.digraph.vertex_count

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        return self.digraph.arcs


@dataclass(frozen=True)
class CausalFlow:
    """A successor function plus a vertex rank map witnessing the order.

    ``order_rank[v]`` is a non-negative integer; arcs of the influencing
    digraph go strictly uphill in rank.
    """

    successor: SuccessorFunction
    order_rank: tuple[int, ...]

    def rank_of(self, v: int) -> int:
        return self.order_rank[v]

    @property
    def depth(self) -> int:
        return max(self.order_rank, default=0)


@dataclass(frozen=True)
class FlowCheck:
    """Outcome of verifying a flow; falsy when a condition fails."""

    ok: bool
    condition: str | None = None
    witness: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.ok


class AcyclicityResult(NamedTuple):
    """Topological ranks if acyclic, otherwise one directed cycle."""

    ranks: tuple[int, ...] | None
    cycle: tuple[int, ...] | None


@dataclass(frozen=True)
class FlowSearchResult:
    """Verdict of the flow pipeline.

    ``status`` is "found", "no-flow", or "undecided".  A no-flow verdict
    carries a reason tag ("edge-bound", "no-cover", or "cyclic-D") and,
    for cyclic-D, the cycle found in the first candidate's digraph.
    ``tried`` counts the saturating matchings examined.
    """

    status: SearchStatus
    flow: CausalFlow | None = None
    cover: PathCover | None = None
    reason: str | None = None
    cycle: tuple[int, ...] | None = None
    tried: int = 0


def verify_flow(geom: Geometry, flow: CausalFlow) -> FlowCheck:
    """Check the three flow conditions against a geometry.

    Returns the first violated condition with witnesses: "adjacency" when
    x is not adjacent to f(x), "successor-order" when rank(x) is not below
    rank(f(x)), and "neighborhood-order" when some other neighbour y of
    f(x) does not come strictly after x.  A successor map whose domain or
    codomain does not fit the geometry raises FlowDomainError instead.
    """
    g = geom.graph
    n = g.vertex_count
    mapping = flow.successor.mapping
    measured = geom.measured
    extra = sorted(set(mapping) - set(measured))
    if extra:
        raise FlowDomainError(f"f is defined on output vertex {extra[0]}")
    missing = sorted(set(measured) - set(mapping))
    if missing:
        raise FlowDomainError(f"f is undefined on measured vertex {missing[0]}")
    for x in measured:
        fx = mapping[x]
        if not (isinstance(fx, int) and 0 <= fx < n):
            raise FlowDomainError(f"f({x}) = {fx!r} is not a vertex")
        if fx in geom.inputs:
            raise FlowDomainError(f"f({x}) = {fx} lies in the input set")
    ranks = flow.order_rank
    if len(ranks) != n:
        raise FlowDomainError("rank map must assign a rank to every vertex")

    for x in measured:
        fx = mapping[x]
        if fx not in g.adjacency[x]:
            return FlowCheck(False, "adjacency", (x, fx))
        if not ranks[x] < ranks[fx]:
            return FlowCheck(False, "successor-order", (x, fx))
        for y in g.adjacency[fx]:
            if y != x and not ranks[x] < ranks[y]:
                return FlowCheck(False, "neighborhood-order", (x, y))
    return FlowCheck(True)


def build_influencing_digraph(geom: Geometry, successor: SuccessorFunction) -> InfluencingDigraph:
    """Arcs x -> f(x) and x -> y for every other neighbour y of f(x)."""
    adj = geom.graph.adjacency
    arcs: list[tuple[int, int]] = []
    for x, fx in successor.pairs:
        arcs.append((x, fx))
        for y in adj[fx]:
            if y != x:
                arcs.append((x, y))
    return InfluencingDigraph(Digraph(geom.vertex_count, tuple(arcs)))


def acyclic_order(d: InfluencingDigraph | Digraph) -> AcyclicityResult:
    """Topologically rank a digraph, or exhibit a directed cycle.

    Ranks are longest-path layers, so every arc increases rank by at least
    one and the assignment does not depend on traversal order.
    """
    dg = d.digraph if isinstance(d, InfluencingDigraph) else d
    n = dg.vertex_count
    succ = dg.successors
    indeg = [0] * n
    for _, v in dg.arcs:
        indeg[v] += 1
    layer = [0] * n
    queue: deque[int] = deque(v for v in range(n) if indeg[v] == 0)
    popped = [False] * n
    processed = 0
    while queue:
        u = queue.popleft()
        popped[u] = True
        processed += 1
        bump = layer[u] + 1
        for w in succ[u]:
            if layer[w] < bump:
                layer[w] = bump
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if processed == n:
        return AcyclicityResult(tuple(layer), None)
    return AcyclicityResult(None, _extract_cycle(n, dg.arcs, popped))


def _extract_cycle(n: int, arcs: tuple[tuple[int, int], ...], popped: list[bool]) -> tuple[int, ...]:
    # Every residual vertex keeps a residual predecessor, so walking
    # backwards must revisit a vertex within n steps.
    preds: dict[int, list[int]] = {}
    for u, v in arcs:
        if not popped[u] and not popped[v]:
            preds.setdefault(v, []).append(u)
    start = min(v for v in range(n) if not popped[v] and v in preds)
    seen = {start: 0}
    path = [start]
    cur = start
    while True:
        prev = min(preds[cur])
        if prev in seen:
            backward = path[seen[prev]:]
            cycle = list(reversed(backward))
            pivot = cycle.index(min(cycle))
            return tuple(cycle[pivot:] + cycle[:pivot])
        seen[prev] = len(path)
        path.append(prev)
        cur = prev


class NaturalPreorder:
    """Reachability view of the influencing digraph for one function f.

    ``precedes(x, y)`` holds when x == y or y is reachable from x.  The
    relation is computed on demand and cached per source vertex; it is a
    partial order exactly when the digraph is acyclic.
    """

    def __init__(self, geom: Geometry, successor: SuccessorFunction):
        self._digraph = build_influencing_digraph(geom, successor)
        self._succ = self._digraph.digraph.successors
        self._reach: dict[int, frozenset[int]] = {}

    @property
    def digraph(self) -> InfluencingDigraph:
        return self._digraph

    def _reachable_from(self, x: int) -> frozenset[int]:
        cached = self._reach.get(x)
        if cached is not None:
            return cached
        seen: set[int] = set()
        stack = [x]
        while stack:
            u = stack.pop()
            for w in self._succ[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        result = frozenset(seen)
        self._reach[x] = result
        return result

    def precedes(self, x: int, y: int) -> bool:
        if not (0 <= x < self._digraph.vertex_count and 0 <= y < self._digraph.vertex_count):
            raise GeometryError(f"unknown vertex in query ({x}, {y})")
        return x == y or y in self._reachable_from(x)


def natural_preorder(geom: Geometry, successor: SuccessorFunction) -> NaturalPreorder:
    """Queryable transitive closure of the order conditions for f."""
    return NaturalPreorder(geom, successor)


def _candidate_table(geom: Geometry) -> tuple[list[int], list[list[int]]]:
    allowed = set(geom.non_inputs)
    measured = list(geom.measured)
    candidates = [
        [y for y in geom.graph.adjacency[x] if y in allowed] for x in measured
    ]
    return measured, candidates


def _splice_orbits(vertex_count: int, succ: dict[int, int]) -> tuple[tuple[int, ...], ...] | None:
    """Chain f into paths; None when some orbit closes into a cycle."""
    image = set(succ.values())
    paths: list[tuple[int, ...]] = []
    covered = 0
    for start in range(vertex_count):
        if start in image:
            continue
        chain = [start]
        cur = start
        while cur in succ:
            cur = succ[cur]
            chain.append(cur)
        paths.append(tuple(chain))
        covered += len(chain)
    if covered != vertex_count:
        return None
    return tuple(paths)


def find_path_cover(
    geom: Geometry,
    *,
    budget: int = DEFAULT_MATCHING_BUDGET,
    exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND,
) -> PathCover | None:
    """Search for a path cover via saturating matchings.

    Returns None when no saturating matching exists (then no flow exists
    either), when every matching tried splices into a cycle, or when the
    budget runs out on a large instance.  Instances with at most
    ``exhaustive_bound`` vertices are enumerated completely.
    """
    n = geom.vertex_count
    if n == 0:
        return PathCover(())
    if geom.output_count == 0:
        return None
    measured, candidates = _candidate_table(geom)
    limit = None if n <= exhaustive_bound else budget
    tried = 0
    for assignment in iter_saturating_assignments(candidates):
        if limit is not None and tried >= limit:
            return None
        tried += 1
        paths = _splice_orbits(n, dict(zip(measured, assignment)))
        if paths is not None:
            return PathCover(paths)
    return None


def _empty_flow_result() -> FlowSearchResult:
    flow = CausalFlow(SuccessorFunction(()), ())
    return FlowSearchResult("found", flow=flow, cover=PathCover(()), tried=0)


def find_causal_flow(
    geom: Geometry,
    *,
    budget: int = DEFAULT_MATCHING_BUDGET,
    exhaustive_bound: int = DEFAULT_EXHAUSTIVE_BOUND,
) -> FlowSearchResult:
    """Decide flow existence and construct a flow when one exists.

    Pipeline: reject immediately when the edge count exceeds the gamma
    bound for k = |outputs|; then enumerate saturating matchings between
    measured vertices and allowed partners, returning the first whose
    influencing digraph is acyclic.  Orbit cycles are covered by the same
    test, since a cyclic orbit is itself a digraph cycle.  When the budget
    is exhausted before the enumeration completes (only possible above
    ``exhaustive_bound`` vertices) the verdict is "undecided", never a
    false no.
    """
    from flowscope.extremal import gamma  # local import: extremal builds on this module

    n = geom.vertex_count
    k = geom.output_count
    if n == 0:
        return _empty_flow_result()
    if k == 0:
        # k paths must cover n > 0 vertices; impossible with zero paths.
        return FlowSearchResult("no-flow", reason="no-cover")
    if geom.graph.edge_count > gamma(n, k):
        return FlowSearchResult("no-flow", reason="edge-bound")

    measured, candidates = _candidate_table(geom)
    if max_matching_size(candidates) < len(measured):
        return FlowSearchResult("no-flow", reason="no-cover")

    limit = None if n <= exhaustive_bound else budget
    tried = 0
    first_cycle: tuple[int, ...] | None = None
    for assignment in iter_saturating_assignments(candidates):
        if limit is not None and tried >= limit:
            return FlowSearchResult("undecided", tried=tried)
        tried += 1
        succ = SuccessorFunction.from_pairs(zip(measured, assignment))
        ranks, cycle = acyclic_order(build_influencing_digraph(geom, succ))
        if ranks is not None:
            paths = _splice_orbits(n, succ.mapping)
            assert paths is not None  # acyclic digraph rules out orbit cycles
            return FlowSearchResult(
                "found",
                flow=CausalFlow(succ, ranks),
                cover=PathCover(paths),
                tried=tried,
            )
        if first_cycle is None:
            first_cycle = cycle
    return FlowSearchResult("no-flow", reason="cyclic-D", cycle=first_cycle, tried=tried)


def flow_from_cover(geom: Geometry, cover: PathCover) -> FlowSearchResult:
    """Run the gate, digraph construction, and topological sort for one cover.

    The cover is trusted (callers such as the extremal generator produce
    valid ones); only the flow conditions themselves are decided here.
    """
    from flowscope.extremal import gamma  # local import: extremal builds on this module

    n = geom.vertex_count
    k = geom.output_count
    if n == 0:
        return _empty_flow_result()
    if k >= 1 and geom.graph.edge_count > gamma(n, k):
        return FlowSearchResult("no-flow", reason="edge-bound")
    succ = SuccessorFunction.from_pairs(cover.successor_pairs())
    ranks, cycle = acyclic_order(build_influencing_digraph(geom, succ))
    if ranks is not None:
        return FlowSearchResult("found", flow=CausalFlow(succ, ranks), cover=cover, tried=1)
    return FlowSearchResult("no-flow", reason="cyclic-D", cycle=cycle, tried=1)


def brute_force_flow(geom: Geometry, *, bound: int = DEFAULT_ORACLE_BOUND) -> CausalFlow | None:
    """Exhaustive oracle: try every injective f along edges, smallest first.

    Independent of the matching pipeline on purpose: the influencing arcs
    are rebuilt inline and acyclicity is checked with a colouring DFS, so
    the two routes only share definitions, not code.  Partial assignments
    already containing a digraph cycle are pruned, which is sound because
    extending f only adds arcs.
    """
    n = geom.vertex_count
    if n > bound:
        raise OracleBoundError(f"instance has {n} vertices; oracle bound is {bound}")
    if n == 0:
        return CausalFlow(SuccessorFunction(()), ())
    measured, candidates = _candidate_table(geom)
    adj = geom.graph.adjacency
    succ: dict[int, int] = {}
    used: set[int] = set()

    def influence_lists() -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(n)]
        for x, fx in succ.items():
            out[x].append(fx)
            out[x].extend(y for y in adj[fx] if y != x)
        return out

    def has_cycle(out: list[list[int]]) -> bool:
        color = [0] * n  # 0 white, 1 on stack, 2 done
        for root in range(n):
            if color[root] != 0:
                continue
            stack: list[tuple[int, int]] = [(root, 0)]
            color[root] = 1
            while stack:
                u, idx = stack[-1]
                if idx < len(out[u]):
                    stack[-1] = (u, idx + 1)
                    w = out[u][idx]
                    if color[w] == 1:
                        return True
                    if color[w] == 0:
                        color[w] = 1
                        stack.append((w, 0))
                else:
                    color[u] = 2
                    stack.pop()
        return False

    def search(i: int) -> bool:
        if i == len(measured):
            return True
        x = measured[i]
        for y in candidates[i]:
            if y in used:
                continue
            succ[x] = y
            used.add(y)
            if not has_cycle(influence_lists()) and search(i + 1):
                return True
            del succ[x]
            used.discard(y)
        return False

    if not search(0):
        return None

    out = influence_lists()
    ranks = _dfs_topological_ranks(n, out)
    return CausalFlow(SuccessorFunction.from_pairs(succ.items()), ranks)


def _dfs_topological_ranks(n: int, out: list[list[int]]) -> tuple[int, ...]:
    # Reverse postorder of a DFS over a DAG; arcs strictly increase rank.
    postorder: list[int] = []
    visited = [False] * n
    for root in range(n):
        if visited[root]:
            continue
        visited[root] = True
        stack: list[tuple[int, int]] = [(root, 0)]
        while stack:
            u, idx = stack[-1]
            if idx < len(out[u]):
                stack[-1] = (u, idx + 1)
                w = out[u][idx]
                if not visited[w]:
                    visited[w] = True
                    stack.append((w, 0))
            else:
                postorder.append(u)
                stack.pop()
    ranks = [0] * n
    for pos, v in enumerate(reversed(postorder)):
        ranks[v] = pos
    return tuple(ranks)


FLOW_FILE_KEYS = ("successor", "ranks", "paths")


def dump_flow(geom: Geometry, flow: CausalFlow, cover: PathCover | None = None) -> str:
    """Render a flow as byte-stable text keyed by vertex labels."""
    if cover is None:
        paths = _splice_orbits(geom.vertex_count, flow.successor.mapping)
        if paths is None:
            raise ValueError("successor orbits contain a cycle; cannot lay out paths")
        cover = PathCover(paths)
    lab = geom.label_of
    payload = {
        "successor": {lab(x): lab(y) for x, y in sorted(flow.successor.pairs, key=lambda p: lab(p[0]))},
        "ranks": {lab(v): flow.order_rank[v] for v in sorted(range(geom.vertex_count), key=lab)},
        "paths": [[lab(v) for v in path] for path in cover.paths],
    }
    return json.dumps(payload, indent=2) + "\n"


def load_flow(geom: Geometry, text: str) -> tuple[CausalFlow, PathCover]:
    """Parse a flow file against a geometry; semantic checks are left to verify_flow."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FlowFormatError(f"malformed flow file: {exc}") from exc
    if not isinstance(data, dict):
        raise FlowFormatError("flow file must contain a top-level object")
    missing = [k for k in FLOW_FILE_KEYS if k not in data]
    if missing:
        raise FlowFormatError(f"missing key(s): {', '.join(missing)}")
    unknown = [k for k in data if k not in FLOW_FILE_KEYS]
    if unknown:
        raise FlowFormatError(f"unknown key(s): {', '.join(unknown)}")

    def resolve(label: object, where: str) -> int:
        if not isinstance(label, str):
            raise FlowFormatError(f"{where}: expected a vertex label, got {label!r}")
        try:
            return geom.id_of(label)
        except GeometryError as exc:
            raise FlowFormatError(f"{where}: {exc}") from None

    if not isinstance(data["successor"], dict):
        raise FlowFormatError("'successor' must be an object")
    pairs = [
        (resolve(x, "successor"), resolve(y, "successor"))
        for x, y in data["successor"].items()
    ]

    if not isinstance(data["ranks"], dict):
        raise FlowFormatError("'ranks' must be an object")
    ranks = [0] * geom.vertex_count
    seen_ranks: set[int] = set()
    for label, value in data["ranks"].items():
        v = resolve(label, "ranks")
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            raise FlowFormatError(f"ranks[{label!r}]: expected a non-negative integer")
        ranks[v] = value
        seen_ranks.add(v)
    if len(seen_ranks) != geom.vertex_count:
        missing_v = min(set(range(geom.vertex_count)) - seen_ranks)
        raise FlowFormatError(f"missing rank for vertex {geom.label_of(missing_v)!r}")

    if not isinstance(data["paths"], list):
        raise FlowFormatError("'paths' must be a list")
    paths = []
    for pos, raw in enumerate(data["paths"]):
        if not isinstance(raw, list):
            raise FlowFormatError(f"paths[{pos}]: expected a list of labels")
        paths.append(tuple(resolve(label, f"paths[{pos}]") for label in raw))

    flow = CausalFlow(SuccessorFunction.from_pairs(pairs), tuple(ranks))
    return flow, PathCover(tuple(paths))

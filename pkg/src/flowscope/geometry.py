"""Immutable graphs, geometries, and digraphs, plus the geometry file format.

Vertices are dense integers 0..n-1 everywhere inside the package.  String
labels exist only at the ingestion and serialization boundary; they are
carried on the geometry so output stays readable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

FILE_KEYS = ("vertices", "edges", "inputs", "outputs")


class GeometryError(ValueError):
    """A graph, geometry, or geometry file violates a structural rule."""


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph: no self-loops, no parallel edges.

    ``adjacency[v]`` is the ascending tuple of neighbours of ``v``.  Keeping
    neighbour order sorted makes every traversal in the package
    deterministic.
    """

    vertex_count: int
    adjacency: tuple[tuple[int, ...], ...]
    edge_count: int

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]] = ()) -> Graph:
        """Build a graph from unordered vertex pairs, validating simplicity."""
        if vertex_count < 0:
            raise GeometryError("vertex count must be non-negative")
        seen: set[tuple[int, int]] = set()
        adj: list[list[int]] = [[] for _ in range(vertex_count)]
        for u, v in edges:
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise GeometryError(f"edge ({u}, {v}) references an unknown vertex")
            if u == v:
                raise GeometryError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GeometryError(f"duplicate edge ({key[0]}, {key[1]})")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        return cls(vertex_count, tuple(tuple(sorted(nbrs)) for nbrs in adj), len(seen))

    def neighbors(self, v: int) -> tuple[int, ...]:
        """Ascending neighbours of ``v``; never contains ``v`` itself."""
        self._check_vertex(v)
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        self._check_vertex(v)
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        return v in self.adjacency[u]

    def edges(self) -> Iterator[tuple[int, int]]:
        """All edges as (u, v) with u < v, in ascending order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def _check_vertex(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.vertex_count):
            raise GeometryError(f"unknown vertex {v!r}")


@dataclass(frozen=True)
class Geometry:
    """A graph together with its input and output vertex sets.

    Inputs and outputs may overlap.  The measured vertices are those
    outside the output set; correction partners must lie outside the
    input set.  Instances are immutable and safe to share.
    """

    graph: Graph
    inputs: frozenset[int]
    outputs: frozenset[int]
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", frozenset(self.inputs))
        object.__setattr__(self, "outputs", frozenset(self.outputs))
        n = self.graph.vertex_count
        for name in ("inputs", "outputs"):
            for v in getattr(self, name):
                if not (isinstance(v, int) and 0 <= v < n):
                    raise GeometryError(f"{name} reference unknown vertex {v!r}")
        if self.labels is not None:
            labels = tuple(self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != n:
                raise GeometryError("label count does not match vertex count")
            if len(set(labels)) != n:
                raise GeometryError("duplicate vertex label")

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @property
    def output_count(self) -> int:
        return len(self.outputs)

    @cached_property
    def measured(self) -> tuple[int, ...]:
        """Vertices outside the output set, ascending."""
        return tuple(v for v in range(self.vertex_count) if v not in self.outputs)

    @cached_property
    def non_inputs(self) -> tuple[int, ...]:
        """Vertices outside the input set, ascending."""
        return tuple(v for v in range(self.vertex_count) if v not in self.inputs)

    def label_of(self, v: int) -> str:
        self.graph._check_vertex(v)
        return self.labels[v] if self.labels is not None else str(v)

    @cached_property
    def _label_index(self) -> dict[str, int]:
        return {self.label_of(v): v for v in range(self.vertex_count)}

    def id_of(self, label: str) -> int:
        try:
            return self._label_index[label]
        except KeyError:
            raise GeometryError(f"unknown vertex label {label!r}") from None


@dataclass(frozen=True)
class Digraph:
    """Directed graph over dense vertex ids; loops and parallel arcs allowed."""

    vertex_count: int
    arcs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        n = self.vertex_count
        for u, v in self.arcs:
            if not (0 <= u < n and 0 <= v < n):
                raise GeometryError(f"arc ({u}, {v}) references an unknown vertex")

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        """Out-neighbour lists, each ascending (parallel arcs preserved)."""
        out: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.arcs:
            out[u].append(v)
        return tuple(tuple(sorted(vs)) for vs in out)

    def out_degree(self, v: int) -> int:
        return len(self.successors[v])


def load_geometry(text: str) -> Geometry:
    """Parse a geometry file (see ``serialize_geometry`` for the format).

    Labels are mapped to dense integer ids in file order and retained on
    the returned geometry.  Structural problems are reported with the
    offending key and position.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GeometryError(f"malformed geometry file: {exc}") from exc
    if not isinstance(data, dict):
        raise GeometryError("geometry file must contain a top-level object")
    missing = [k for k in FILE_KEYS if k not in data]
    if missing:
        raise GeometryError(f"missing key(s): {', '.join(missing)}")
    unknown = [k for k in data if k not in FILE_KEYS]
    if unknown:
        raise GeometryError(f"unknown key(s): {', '.join(unknown)}")
    for key in FILE_KEYS:
        if not isinstance(data[key], list):
            raise GeometryError(f"'{key}' must be a list")

    index: dict[str, int] = {}
    for pos, label in enumerate(data["vertices"]):
        if not isinstance(label, str) or not label:
            raise GeometryError(f"vertices[{pos}]: labels must be non-empty strings")
        if label in index:
            raise GeometryError(f"vertices[{pos}]: duplicate label {label!r}")
        index[label] = pos

    def resolve(key: str, pos: int, item: object) -> int:
        if not isinstance(item, str) or item not in index:
            raise GeometryError(f"{key}[{pos}]: unknown vertex label {item!r}")
        return index[item]

    edges: list[tuple[int, int]] = []
    seen_edges: set[tuple[int, int]] = set()
    for pos, pair in enumerate(data["edges"]):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise GeometryError(f"edges[{pos}]: expected a 2-element list of labels")
        u = resolve("edges", pos, pair[0])
        v = resolve("edges", pos, pair[1])
        if u == v:
            raise GeometryError(f"edges[{pos}]: self-loop at {pair[0]!r}")
        key = (u, v) if u < v else (v, u)
        if key in seen_edges:
            raise GeometryError(f"edges[{pos}]: duplicate edge {pair[0]!r} -- {pair[1]!r}")
        seen_edges.add(key)
        edges.append((u, v))

    ends: dict[str, frozenset[int]] = {}
    for key in ("inputs", "outputs"):
        ids: list[int] = []
        for pos, label in enumerate(data[key]):
            vid = resolve(key, pos, label)
            if vid in ids:
                raise GeometryError(f"{key}[{pos}]: duplicate label {label!r}")
            ids.append(vid)
        ends[key] = frozenset(ids)

    graph = Graph.from_edges(len(index), edges)
    return Geometry(graph, ends["inputs"], ends["outputs"], tuple(data["vertices"]))


def serialize_geometry(geom: Geometry) -> str:
    """Render a geometry as byte-stable text.

    Keys appear in the order vertices, edges, inputs, outputs; every list
    of labels is sorted lexicographically and each edge is written with
    its smaller label first.
    """
    labels = [geom.label_of(v) for v in range(geom.vertex_count)]
    edge_pairs = sorted(sorted((labels[u], labels[v])) for u, v in geom.graph.edges())
    payload = {
        "vertices": sorted(labels),
        "edges": [list(pair) for pair in edge_pairs],
        "inputs": sorted(labels[v] for v in geom.inputs),
        "outputs": sorted(labels[v] for v in geom.outputs),
    }
    return json.dumps(payload, indent=2) + "\n"

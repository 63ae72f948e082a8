"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to watch the
per-criterion lines stream by).
"""

from __future__ import annotations

import itertools
import time

import numpy as np
import pytest

from flowscope import (
    ExtremalPartition,
    Geometry,
    Graph,
    MeasurementPattern,
    acyclic_order,
    brute_force_flow,
    build_influencing_digraph,
    draw_angles,
    find_causal_flow,
    find_path_cover,
    flow_from_cover,
    gamma,
    generate_extremal,
    isometry_defect,
    lex_acyclicity_certificate,
    load_geometry,
    simulate_postselected,
    verify_flow,
)

from .conftest import SIX_CYCLE_TEXT

ANGLE_DRAWS = 20
DEFECT_TOLERANCE = 1e-9


def report(criterion: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def iter_partitions(n: int, smallest: int = 1):
    if n == 0:
        yield ()
        return
    for first in range(smallest, n + 1):
        for rest in iter_partitions(n - first, first):
            yield (first,) + rest


@pytest.fixture(scope="module")
def saturation_sweep():
    """Generated instance, certificates, and found flow per partition, n <= 12.

    Returns the rows plus the wall time spent generating and searching, so
    the saturation criterion can account for the full sweep cost.
    """
    start = time.perf_counter()
    results = []
    for n in range(1, 13):
        for parts in iter_partitions(n):
            geom, cover = generate_extremal(ExtremalPartition(parts))
            search = find_causal_flow(geom)
            results.append((parts, geom, cover, search))
    return results, time.perf_counter() - start


@pytest.fixture(scope="module")
def small_geometry_sweep():
    """Exhaustive oracle-vs-pipeline comparison over all graphs with n <= 6.

    Graphs come from the atlas of non-isomorphic graphs on up to six
    vertices; every output set is tried with three input variants: empty,
    equal to the outputs, and the initial points of a found path cover.
    """
    nx = pytest.importorskip("networkx")
    rows = []
    for ng in nx.graph_atlas_g():
        n = ng.number_of_nodes()
        if n > 6:
            break
        graph = Graph.from_edges(n, list(ng.edges()))
        for size in range(n + 1):
            for osub in itertools.combinations(range(n), size):
                outputs = frozenset(osub)
                variants = {frozenset(), outputs}
                cover = find_path_cover(Geometry(graph, frozenset(), outputs))
                if cover is not None:
                    variants.add(frozenset(cover.initial_points()))
                for inputs in sorted(variants, key=sorted):
                    geom = Geometry(graph, inputs, outputs)
                    rows.append((geom, brute_force_flow(geom), find_causal_flow(geom)))
    return rows


def test_criterion_1_gamma_formula():
    ok = gamma(23, 3) == 63
    ok = ok and all(gamma(n, 1) == n - 1 for n in range(1, 10**6 + 1))
    ok = ok and all(gamma(k, k) == k * (k - 1) // 2 for k in range(1, 10**3 + 1))
    report("1 (gamma formula)", ok, "n=1..1e6 at k=1, k=1..1e3 at n=k, and (23,3)=63")


def test_criterion_2_saturation_sweep(saturation_sweep):
    rows, build_time = saturation_sweep
    start = time.perf_counter()
    failures = []
    for parts, geom, cover, search in rows:
        k = len(parts)
        n = geom.vertex_count
        if geom.graph.edge_count != gamma(n, k):
            failures.append((parts, "edge count"))
        if not lex_acyclicity_certificate(geom, cover):
            failures.append((parts, "lex certificate"))
        ranks, _ = acyclic_order(build_influencing_digraph(geom, cover.successor()))
        if ranks is None:
            failures.append((parts, "acyclic_order"))
        if search.status != "found" or not verify_flow(geom, search.flow).ok:
            failures.append((parts, "find_causal_flow"))
    elapsed = build_time + time.perf_counter() - start
    report(
        "2 (saturation sweep)",
        not failures and elapsed < 30.0,
        f"{len(rows)} partitions of n<=12 in {elapsed:.1f}s, failures={failures[:3]}",
    )


def test_criterion_3_sharpness():
    start = time.perf_counter()
    checked = 0
    failures = []
    for n in range(1, 8):
        for parts in iter_partitions(n):
            geom, _ = generate_extremal(ExtremalPartition(parts))
            present = set(geom.graph.edges())
            for u, v in itertools.combinations(range(n), 2):
                if (u, v) in present:
                    continue
                bigger = Graph.from_edges(n, sorted(present | {(u, v)}))
                if brute_force_flow(Geometry(bigger, geom.inputs, geom.outputs)) is not None:
                    failures.append((parts, (u, v)))
                checked += 1
    elapsed = time.perf_counter() - start
    report(
        "3 (sharpness)",
        not failures and elapsed < 300.0,
        f"{checked} single-edge additions over partitions of n<=7 in {elapsed:.1f}s, "
        f"failures={failures[:3]}",
    )


def test_criterion_4_oracle_equivalence(small_geometry_sweep):
    disagreements = 0
    undecided = 0
    unsound = 0
    for geom, oracle, result in small_geometry_sweep:
        if result.status == "undecided":
            undecided += 1
            continue
        if (oracle is not None) != (result.status == "found"):
            disagreements += 1
        if result.status == "found" and not verify_flow(geom, result.flow).ok:
            unsound += 1
    ok = disagreements == 0 and undecided == 0 and unsound == 0
    report(
        "4 (oracle equivalence)",
        ok,
        f"{len(small_geometry_sweep)} instances, disagreements={disagreements}, "
        f"undecided={undecided}, unsound={unsound}",
    )


def test_criterion_5_six_cycle_regression():
    geom = load_geometry(SIX_CYCLE_TEXT)
    result = find_causal_flow(geom)
    oracle = brute_force_flow(geom)
    expected_cycle = {geom.id_of("a0"), geom.id_of("a1"), geom.id_of("a2")}
    ok = (
        result.status == "no-flow"
        and result.reason == "cyclic-D"
        and oracle is None
        and result.cycle is not None
        and set(result.cycle) == expected_cycle
    )
    report(
        "5 (six-cycle regression)",
        ok,
        f"pipeline={result.status}/{result.reason}, oracle={'absent' if oracle is None else 'flow'}, "
        f"cycle={result.cycle}",
    )


def test_criterion_6_isometry_property(saturation_sweep):
    rows, _build_time = saturation_sweep
    start = time.perf_counter()
    flows = 0
    worst = 0.0
    zero_maps = 0
    for idx, (parts, geom, _cover, search) in enumerate(rows):
        if geom.vertex_count > 10:
            continue
        assert search.status == "found"
        flows += 1
        rng = np.random.default_rng(1000 + idx)
        for _ in range(ANGLE_DRAWS):
            angles = draw_angles(geom.measured, rng)
            vmap = simulate_postselected(MeasurementPattern(geom, search.flow, angles))
            if not np.any(vmap.matrix):
                zero_maps += 1
                continue
            worst = max(worst, isometry_defect(vmap))
    elapsed = time.perf_counter() - start
    ok = zero_maps == 0 and worst < DEFECT_TOLERANCE and elapsed < 120.0
    report(
        "6 (isometry property)",
        ok,
        f"{flows} flows x {ANGLE_DRAWS} draws, worst defect {worst:.2e}, "
        f"zero maps {zero_maps}, {elapsed:.1f}s",
    )


def test_criterion_7_pipeline_scaling():
    sizes = (10_000, 20_000, 40_000)
    times = {}
    for n in sizes:
        geom, cover = generate_extremal(ExtremalPartition((n // 5,) * 5))
        best = float("inf")
        for _ in range(3):
            t0 = time.perf_counter()
            result = flow_from_cover(geom, cover)
            best = min(best, time.perf_counter() - t0)
        assert result.status == "found"
        times[n] = best
    ratio_2x = times[20_000] / times[10_000]
    ratio_4x = times[40_000] / times[10_000]
    ok = ratio_2x <= 1.5 * 2 and ratio_4x <= 1.5 * 4 and times[40_000] < 5.0
    report(
        "7 (pipeline scaling)",
        ok,
        f"k=5 times {times[10_000]:.3f}s/{times[20_000]:.3f}s/{times[40_000]:.3f}s, "
        f"growth x2={ratio_2x:.2f} x4={ratio_4x:.2f}",
    )


def test_criterion_8_edge_gate_soundness(small_geometry_sweep):
    violations = 0
    gated = 0
    for geom, oracle, _result in small_geometry_sweep:
        n, k = geom.vertex_count, geom.output_count
        if n == 0 or k == 0:
            continue
        if geom.graph.edge_count > gamma(n, k):
            gated += 1
            if oracle is not None:
                violations += 1
    report(
        "8 (edge-gate soundness)",
        violations == 0,
        f"{gated} over-budget instances, oracle violations={violations}",
    )

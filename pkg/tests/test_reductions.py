"""Partition-preserving reductions: worked cases, oracles, exact certificates."""

import dataclasses
import math
import random
from fractions import Fraction

import pytest

from oracles import brute_effective_field, brute_z, graph_tuple
from twospin import (DomainError, FieldedGraph, Quad, SpinParams,
                     bipartite_transform, contract_certificate,
                     contract_degree_one, effective_field, ising_pipeline,
                     partition_function, realize_field_selfloops, to_ising,
                     verify_reduction)
from twospin.instances import random_bipartite_graph, random_graph

K2 = FieldedGraph({"u": 1.0, "v": 1.0}, [("u", "v")])


# ---------------------------------------------------------------------------
# bipartite transform

def test_bipartite_k2_worked_example():
    cert = bipartite_transform(K2, 1.1, SpinParams(1.0, 2.0, 1.0), left=["u"])
    fields = cert.output.graph.field_map
    assert fields["u"] == pytest.approx(1.555635, abs=1e-6)
    assert fields["v"] == pytest.approx(1.285649, abs=1e-6)
    assert cert.scale == pytest.approx(2 / 1.1, rel=1e-12)
    z_anti = partition_function(cert.input.graph, cert.input.params)
    z_ferro = partition_function(cert.output.graph, cert.output.params)
    assert z_anti == pytest.approx(3.762706, abs=1e-6)
    assert z_ferro == pytest.approx(6.841284, abs=1e-6)
    assert z_ferro == pytest.approx(cert.scale * z_anti, rel=1e-12)
    assert verify_reduction(cert).verified
    # against the test-local brute-force oracle
    w = 1 / math.sqrt(2)
    assert z_anti == pytest.approx(brute_z({"u": 1.1, "v": 1.1}, [("u", "v")], w, w),
                                   rel=1e-12)


def test_bipartite_k2_exact():
    cert = bipartite_transform(K2, Fraction(11, 10),
                               SpinParams(Fraction(1), Fraction(2), 1), left=["u"])
    assert cert.scale == Fraction(20, 11)
    cert = verify_reduction(cert)
    assert cert.verified
    # the exact sides live in Q(sqrt(2))
    z_anti = partition_function(cert.input.graph, cert.input.params)
    assert isinstance(z_anti, Quad)


def test_bipartite_edgeless_fields_and_scale():
    g = FieldedGraph({"u": 1.0, "v": 1.0}, [])
    cert = bipartite_transform(g, 1.5, SpinParams(1.0, 2.0, 1.0), left=["u"])
    fields = cert.output.graph.field_map
    assert fields["u"] == pytest.approx(1.5, rel=1e-12)
    assert fields["v"] == pytest.approx(1 / 1.5, rel=1e-12)
    assert cert.scale == pytest.approx(1 / 1.5, rel=1e-12)
    assert verify_reduction(cert).verified


def test_bipartite_field_ranges_stay_in_documented_interval():
    rng = random.Random(8)
    ratio = 2.0
    for _ in range(20):
        g, left = random_bipartite_graph(rng)
        if not g.edges:
            continue
        deg = g.degrees()
        if min(deg.values()) < 1:
            continue
        mu_p = 1.1
        cert = bipartite_transform(g, mu_p, SpinParams(1.0, 2.0, 1.0), left=left)
        delta_max = max(deg.values())
        lo = (1 / mu_p) * math.sqrt(ratio)
        hi = mu_p * ratio ** (delta_max / 2)
        for _, f in cert.output.graph.vertices:
            assert lo * (1 - 1e-12) <= f <= hi * (1 + 1e-12)


def test_bipartite_autodetects_parts():
    # path l0-r0-l1 is bipartite; omit the explicit parts
    g = FieldedGraph({"a": 1.0, "b": 1.0, "c": 1.0}, [("a", "b"), ("b", "c")])
    cert = bipartite_transform(g, 1.2, SpinParams(1.0, 2.0, 1.0))
    assert verify_reduction(cert).verified


def test_bipartite_rejects_bad_input():
    tri = FieldedGraph({"a": 1.0, "b": 1.0, "c": 1.0},
                       [("a", "b"), ("b", "c"), ("c", "a")])
    with pytest.raises(DomainError):
        bipartite_transform(tri, 1.1, SpinParams(1.0, 2.0, 1.0))
    loop = FieldedGraph({"a": 1.0}, [("a", "a")])
    with pytest.raises(DomainError):
        bipartite_transform(loop, 1.1, SpinParams(1.0, 2.0, 1.0))
    with pytest.raises(DomainError):
        bipartite_transform(K2, 1.1, SpinParams(1.0, 2.0, 1.0), left=["u", "v"])
    with pytest.raises(DomainError):
        bipartite_transform(K2, 1.0, SpinParams(1.0, 2.0, 1.0), left=["u"])
    with pytest.raises(DomainError):
        bipartite_transform(K2, 1.1, SpinParams(2.0, 1.5, 1.0), left=["u"])  # beta > gamma


def test_bipartite_random_exact_sample():
    rng = random.Random(1001)
    for _ in range(25):
        g, left = random_bipartite_graph(rng, max_vertices=10)
        cert = bipartite_transform(g, Fraction(101, 100),
                                   SpinParams(Fraction(4, 5), Fraction(2), 1), left=left)
        assert verify_reduction(cert).verified


# ---------------------------------------------------------------------------
# self-loop / bristle realisation

P_SL = SpinParams(2.0, 3.0, 3.0)


def test_selfloop_worked_example():
    r = realize_field_selfloops(5.0, 100, P_SL)
    assert (r.x, r.y) == (1, 6)
    assert r.achieved == pytest.approx(5.043252743484224, rel=1e-12)
    assert abs(math.log(r.achieved / 5.0)) == pytest.approx(0.008613347, abs=1e-8)
    assert abs(math.log(r.achieved / 5.0)) <= 1 / 100
    # cross-check on the materialised loop/bristle graph (7 vertices)
    assert r.gadget.n == 7
    assert effective_field(r.gadget, P_SL) == pytest.approx(r.achieved, rel=1e-10)
    fields, edges = graph_tuple(r.gadget)
    assert brute_effective_field(fields, edges, 2.0, 3.0, "v0") == pytest.approx(
        r.achieved, rel=1e-10)


def test_selfloop_identity_target():
    r = realize_field_selfloops(3.0, 50, P_SL)
    assert (r.x, r.y) == (0, 0)
    assert r.achieved == 3.0
    assert r.gadget.n == 1 and not r.gadget.edges


def test_selfloop_tolerance_sweep():
    for m in (10, 100, 1000, 10000):
        for target in (0.5, 2.0, 5.0, 10.0):
            r = realize_field_selfloops(target, m, P_SL)
            assert math.exp(-1 / m) <= r.achieved / target <= math.exp(1 / m)
            # growth stays (sub)linear in m on this sweep
            assert r.x <= m + 20 and r.y <= m + 20


def test_selfloop_preconditions():
    with pytest.raises(DomainError):
        realize_field_selfloops(5.0, 10, SpinParams(1.0, 2.0, 20.0))  # beta <= 1
    with pytest.raises(DomainError):
        realize_field_selfloops(5.0, 10, SpinParams(2.0, 3.0, 1.5))  # mu too small
    with pytest.raises(DomainError):
        realize_field_selfloops(-1.0, 10, P_SL)
    with pytest.raises(DomainError):
        realize_field_selfloops(5.0, 0, P_SL)


def test_selfloop_gadget_structure():
    r = realize_field_selfloops(10.0, 100, P_SL)
    loops = [e for e in r.gadget.edges if e[0] == e[1]]
    bristles = [e for e in r.gadget.edges if e[0] != e[1]]
    assert len(loops) == r.x and len(bristles) == r.y
    assert r.gadget.output == "v0"
    closed = 3.0 * (2 / 3) ** r.x * (7 / 6) ** r.y
    assert r.achieved == pytest.approx(closed, rel=1e-12)


# ---------------------------------------------------------------------------
# degree-one contraction

P_C = SpinParams(1.0, 2.0, 2.0)
PATH = FieldedGraph({"u": 2.0, "v": 2.0, "w": 2.0}, [("u", "v"), ("v", "w")])


def test_contract_path_worked_example():
    core, scale = contract_degree_one(PATH, P_C)
    assert scale == pytest.approx(16.0, rel=1e-12)
    assert core.n == 1 and core.vertices[0][0] == "v"
    assert core.field_map["v"] == pytest.approx(1.125, rel=1e-12)
    assert scale * (1.125 + 1) == pytest.approx(34.0, rel=1e-12)
    assert partition_function(PATH, P_C) == pytest.approx(34.0, rel=1e-12)


def test_contract_no_op_when_min_degree_two():
    tri = FieldedGraph({"a": 2.0, "b": 2.0, "c": 2.0},
                       [("a", "b"), ("b", "c"), ("c", "a")])
    core, scale = contract_degree_one(tri, P_C)
    assert scale == 1
    assert core.vertices == tri.vertices and core.edges == tri.edges
    loopy = FieldedGraph({"a": 2.0}, [("a", "a")])  # loop counts twice
    core, scale = contract_degree_one(loopy, P_C)
    assert scale == 1 and core.n == 1 and core.edges


def test_contract_star_collapses_to_centre():
    mu = 2.0
    star = FieldedGraph({"c": mu, "l0": mu, "l1": mu, "l2": mu},
                        [("c", "l0"), ("c", "l1"), ("c", "l2")])
    core, scale = contract_degree_one(star, P_C)
    h_mu = (mu + 1) / (mu + 2)
    assert scale == pytest.approx((mu + 2) ** 3, rel=1e-12)
    assert core.field_map["c"] == pytest.approx(mu * h_mu ** 3, rel=1e-12)


def test_contract_preserves_z_on_random_graphs():
    rng = random.Random(77)
    for _ in range(25):
        g = random_graph(rng, max_vertices=9, field=2.0)
        core, scale = contract_degree_one(g, P_C)
        assert partition_function(g, P_C) == pytest.approx(
            scale * partition_function(core, P_C), rel=1e-10)
        # with mu <= gamma/beta no surviving field exceeds mu
        assert all(f <= 2.0 * (1 + 1e-12) for _, f in core.vertices)


def test_contract_exact_certificate():
    pe = SpinParams(Fraction(1), Fraction(2), Fraction(2))
    g = FieldedGraph({"u": Fraction(2), "v": Fraction(2), "w": Fraction(2)},
                     [("u", "v"), ("v", "w")])
    cert = verify_reduction(contract_certificate(g, pe))
    assert cert.verified
    assert cert.scale == Fraction(16)


# ---------------------------------------------------------------------------
# Ising transform

TRI = FieldedGraph({"a": 2.0, "b": 2.0, "c": 2.0},
                   [("a", "b"), ("b", "c"), ("c", "a")])


def test_to_ising_triangle_worked_example():
    cert = to_ising(TRI, P_C)
    assert all(f == pytest.approx(1.0, rel=1e-12) for _, f in cert.output.graph.vertices)
    a = cert.output.params.beta
    assert a == pytest.approx(math.sqrt(2), rel=1e-14)
    assert cert.scale == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    z_ferro = partition_function(TRI, P_C)
    z_ising = partition_function(cert.output.graph, cert.output.params)
    assert z_ferro == pytest.approx(40.0, rel=1e-12)
    assert z_ising == pytest.approx(10 * math.sqrt(2), rel=1e-12)
    assert z_ferro == pytest.approx(cert.scale * z_ising, rel=1e-12)
    assert verify_reduction(cert).verified


def test_to_ising_single_vertex_closed_form():
    g = FieldedGraph({"a": 1.7}, [])
    cert = to_ising(g, P_C)
    assert cert.scale == 1
    assert verify_reduction(cert).verified


def test_to_ising_preconditions():
    with pytest.raises(DomainError):
        to_ising(PATH, P_C)  # degree-one vertices
    with pytest.raises(DomainError):
        to_ising(TRI, SpinParams(1.0, 2.0, 2.5))  # mu > gamma/beta
    big = TRI.with_fields({"a": 3.0})
    with pytest.raises(DomainError):
        to_ising(big, P_C)  # field above mu


def test_to_ising_exact_quad_certificate():
    pe = SpinParams(Fraction(1), Fraction(2), Fraction(2))
    tri = FieldedGraph({v: Fraction(2) for v in "abc"},
                       [("a", "b"), ("b", "c"), ("c", "a")])
    cert = to_ising(tri, pe)
    assert isinstance(cert.scale, Quad)
    assert float(cert.scale) == pytest.approx(2 * math.sqrt(2), rel=1e-14)
    assert verify_reduction(cert).verified
    # exact equality: Z_in == scale * Z_out in Q(sqrt(2))
    z_in = partition_function(cert.input.graph, cert.input.params)
    z_out = partition_function(cert.output.graph, cert.output.params)
    assert z_in == cert.scale * z_out


# ---------------------------------------------------------------------------
# composite pipeline and verification plumbing

def test_pipeline_on_random_graphs_exact():
    rng = random.Random(501)
    for _ in range(20):
        beta, gamma = Fraction(4, 5), Fraction(2)
        mu = gamma / beta
        g = random_graph(rng, max_vertices=9, field=mu)
        cert = ising_pipeline(g, SpinParams(beta, gamma, mu))
        assert verify_reduction(cert).verified
        assert all(f <= 1 for _, f in cert.output.graph.vertices)


def test_pipeline_handles_fully_contracted_graph():
    pe = SpinParams(Fraction(1), Fraction(2), Fraction(2))
    g = FieldedGraph({v: Fraction(2) for v in "uvw"}, [("u", "v"), ("v", "w")])
    cert = ising_pipeline(g, pe)
    assert cert.output.graph.n == 0
    assert cert.scale == Fraction(34)
    assert verify_reduction(cert).verified


def test_pipeline_isolated_vertices_are_scaled_out():
    pe = SpinParams(1.0, 2.0, 2.0)
    g = FieldedGraph({"a": 2.0, "b": 2.0, "c": 2.0, "d": 2.0, "iso": 2.0},
                     [("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])
    cert = ising_pipeline(g, pe)
    assert "iso" not in cert.output.graph.field_map
    assert verify_reduction(cert).verified


def test_corrupted_scale_fails_verification():
    cert = to_ising(TRI, P_C)
    bad = dataclasses.replace(cert, scale=cert.scale * 1.0001)
    assert verify_reduction(bad).verified is False
    cert_exact = contract_certificate(
        FieldedGraph({v: Fraction(2) for v in "uv"}, [("u", "v")]),
        SpinParams(Fraction(1), Fraction(2), Fraction(2)))
    bad_exact = dataclasses.replace(cert_exact, scale=cert_exact.scale + 1)
    assert verify_reduction(bad_exact).verified is False


def test_verify_respects_enum_limit():
    from twospin import CapacityError
    big = FieldedGraph({f"v{i}": 1.0 for i in range(30)}, [])
    cert = contract_certificate(big, P_C)
    with pytest.raises(CapacityError):
        verify_reduction(cert)

import io

import numpy as np
import pytest

from conftest import ops_to_netlist, random_ops, single_kernel
from oracles import dependency_edges, longest_path

from qcoremap import ConfigError, build_qodg, critical_path, dump_dot, level_graph, parse_program
from qcoremap.fabric import OpCost, QecProfile


def three_op_kernel(uniform_profile):
    _, k = single_kernel("qubit a\nqubit b\nqubit c\nCNOT a,b\nT b\nCNOT a,c\n")
    return level_graph(build_qodg(k, uniform_profile))


def test_three_op_example_edges(uniform_profile):
    g = three_op_kernel(uniform_profile)
    got = {(e.src, e.dst): set(e.shared_qubits) for e in g.edges}
    assert got == {(0, 1): {1}, (0, 2): {0}}


def test_single_op(uniform_profile):
    _, k = single_kernel("qubit a\nH a\n")
    g = build_qodg(k, uniform_profile)
    assert len(g) == 1 and not g.edges


def test_single_qubit_chain(uniform_profile):
    _, k = single_kernel("qubit q\nH q\nH q\nH q\n")
    g = build_qodg(k, uniform_profile)
    assert [(e.src, e.dst, set(e.shared_qubits)) for e in g.edges] == \
        [(0, 1, {0}), (1, 2, {0})]


def test_cnot_pair_shares_both_qubits(uniform_profile):
    _, k = single_kernel("qubit a\nqubit b\nCNOT a,b\nCNOT a,b\n")
    g = build_qodg(k, uniform_profile)
    (e,) = g.edges
    assert e.shared_qubits == {0, 1}


def test_levels_of_three_op_example(uniform_profile):
    g = three_op_kernel(uniform_profile)
    assert list(g.levels()) == [0, 1, 1]
    assert g.level_sizes == {0: 1, 1: 2}


def test_chain_levels(uniform_profile):
    _, k = single_kernel("qubit q\n" + "T q\n" * 5)
    g = level_graph(build_qodg(k, uniform_profile))
    assert list(g.levels()) == [0, 1, 2, 3, 4]
    assert g.level_sizes == {i: 1 for i in range(5)}


def test_missing_profile_row_raises():
    prof = QecProfile("partial", 7, {"H": OpCost(28, 40.0, True)})
    _, k = single_kernel("qubit a\nqubit b\nCNOT a,b\n")
    with pytest.raises(ConfigError):
        build_qodg(k, prof)


def test_tdg_inherits_t_row():
    prof = QecProfile("tonly", 7, {"T": OpCost(100, 400.0, False)})
    _, k = single_kernel("qubit a\nTdg a\n")
    g = build_qodg(k, prof)
    assert g.nodes[0].ancilla == 100


def test_critical_path_chain(uniform_profile):
    _, k = single_kernel("qubit q\nT q\nT q\nT q\n")
    g = level_graph(build_qodg(k, uniform_profile))
    assert critical_path(g) == pytest.approx(30.0)


def test_critical_path_three_op_example(uniform_profile):
    g = three_op_kernel(uniform_profile)
    # both maximal paths have two 10us ops
    assert critical_path(g) == pytest.approx(20.0)
    routed = {(e.src, e.dst): 96.0 for e in g.edges}
    assert critical_path(g, routed) == pytest.approx(116.0)


def test_critical_path_empty():
    prof = QecProfile("u", 7, {"H": OpCost(1, 1.0, True)})
    p = parse_program("qubit a\nH a\n")
    g = build_qodg(next(iter(p.kernels.values())), prof)
    assert critical_path(g) == 1.0


def test_edges_match_pairwise_oracle_randomized(uniform_profile):
    rng = np.random.default_rng(42)
    for _ in range(60):
        n_q = int(rng.integers(1, 11))
        ops = random_ops(rng, int(rng.integers(1, 51)), n_q)
        _, k = single_kernel(ops_to_netlist(ops, n_q))
        g = build_qodg(k, uniform_profile)
        got = {(e.src, e.dst): set(e.shared_qubits) for e in g.edges}
        assert got == dependency_edges(ops)


def test_per_qubit_edges_form_simple_chain(uniform_profile):
    rng = np.random.default_rng(17)
    for _ in range(30):
        n_q = int(rng.integers(1, 8))
        ops = random_ops(rng, int(rng.integers(1, 40)), n_q)
        _, k = single_kernel(ops_to_netlist(ops, n_q))
        g = build_qodg(k, uniform_profile)
        for q in range(n_q):
            touchers = [i for i, (kind, qs) in enumerate(ops) if q in qs]
            carrying = sorted(
                (e.src, e.dst) for e in g.edges if q in e.shared_qubits
            )
            assert carrying == [
                (touchers[i], touchers[i + 1]) for i in range(len(touchers) - 1)
            ]


def test_critical_path_matches_enumeration(uniform_profile):
    rng = np.random.default_rng(3)
    for _ in range(20):
        n_q = int(rng.integers(2, 6))
        ops = random_ops(rng, int(rng.integers(1, 12)), n_q)
        _, k = single_kernel(ops_to_netlist(ops, n_q))
        g = level_graph(build_qodg(k, uniform_profile))
        delays = [nd.delay_us for nd in g.nodes]
        edges = {(e.src, e.dst): set(e.shared_qubits) for e in g.edges}
        routing = {(e.src, e.dst): float(10 * (1 + e.src)) for e in g.edges}
        assert critical_path(g) == pytest.approx(longest_path(len(g), edges, delays))
        assert critical_path(g, routing) == pytest.approx(
            longest_path(len(g), edges, delays, routing)
        )


def test_dot_dump(uniform_profile):
    g = three_op_kernel(uniform_profile)
    buf = io.StringIO()
    dump_dot(g, buf)
    text = buf.getvalue()
    assert "digraph" in text
    assert 'n0 -> n1 [qubits="1"];' in text
    assert "level=1" in text

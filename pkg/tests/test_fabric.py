import io

import numpy as np
import pytest

from conftest import single_kernel
from oracles import exact_delays, exact_geometry

from qcoremap import (
    ConfigError,
    FabricParams,
    build_qodg,
    compute_dmax,
    compute_geometry,
    delay_matrix,
    grid_layout,
    kway_partition,
    level_graph,
    load_qec_profile,
    xy_route,
)
from qcoremap.fabric import OpCost, QecProfile


def test_steane_profile_values(steane):
    assert steane.code_length == 7
    assert steane.a_min == 28
    for kind in ("X", "Y", "Z", "H", "S"):
        assert steane.lookup(kind).ancilla == 28
    assert steane.lookup("CNOT").ancilla == 56
    assert steane.lookup("T").ancilla == 100
    assert not steane.lookup("T").transversal
    assert steane.lookup("Tdg").ancilla == 100  # inherits T


def test_bacon_shor_profile_values(bacon_shor):
    assert bacon_shor.code_length == 9
    assert bacon_shor.a_min == 18
    for kind in ("X", "Y", "Z", "H"):
        assert bacon_shor.lookup(kind).ancilla == 18
    assert bacon_shor.lookup("CNOT").ancilla == 36
    assert bacon_shor.lookup("S").ancilla == 58
    assert bacon_shor.lookup("T").ancilla == 309
    assert not bacon_shor.lookup("S").transversal


def test_profile_parser_rejects_bad_lines():
    with pytest.raises(ConfigError):
        load_qec_profile("op H ancilla 28 delay_us 40 transversal 1\n")  # no header
    with pytest.raises(ConfigError):
        load_qec_profile("code x length 7\nop H ancilla 0 delay_us 40 transversal 1\n")
    with pytest.raises(ConfigError):
        load_qec_profile("code x length 7\nwhat H\n")


def test_profile_without_nontransversal_warns():
    text = "code x length 7\nop H ancilla 28 delay_us 40 transversal 1\n"
    with pytest.warns(UserWarning):
        load_qec_profile(text)


def test_missing_kind_surfaces_at_graph_build(steane):
    prof = QecProfile("nocnot", 7, {k: v for k, v in steane.rows.items() if k != "CNOT"})
    _, kern = single_kernel("qubit a\nqubit b\nCNOT a,b\n")
    with pytest.raises(ConfigError):
        build_qodg(kern, prof)


# ----------------------------------------------------------------------
# geometry

# frozen from the exact-arithmetic oracle: Steane, A=800, k=4, D_max=50
HEADLINE = dict(a_total=800, k=4, a_min=28, l_code=7, d_max=50)
HEADLINE_ALPHAS = (15, 24, 4, 1)
HEADLINE_DELAYS = dict(adjacent=270.0, diagonal=540.0, intra=96.0)


def test_exact_oracle_reproduces_frozen_values():
    assert exact_geometry(**HEADLINE) == HEADLINE_ALPHAS
    inter1, intra = exact_delays(*HEADLINE_ALPHAS, alpha_int=3, beta=10.0,
                                 gamma=0.2, manhattan=1)
    inter2, _ = exact_delays(*HEADLINE_ALPHAS, alpha_int=3, beta=10.0,
                             gamma=0.2, manhattan=2)
    assert inter1 == HEADLINE_DELAYS["adjacent"]
    assert inter2 == HEADLINE_DELAYS["diagonal"]
    assert intra == HEADLINE_DELAYS["intra"]


def test_headline_geometry(steane):
    params = FabricParams(4, 800)
    geo = compute_geometry(steane, params, 50)
    assert (geo.alpha_compute, geo.alpha_core, geo.alpha_cache, geo.alpha_mem) == HEADLINE_ALPHAS
    dm = delay_matrix(geo, params, grid_layout(4))
    assert dm.d[0, 1] == 270.0   # adjacent in the 2x2 grid
    assert dm.d[0, 3] == 540.0   # diagonal
    assert dm.d[0, 0] == 96.0    # intra-core cache load
    assert np.allclose(dm.d, dm.d.T)


def test_geometry_degenerate_dmax_zero(steane):
    params = FabricParams(4, 800)
    geo = compute_geometry(steane, params, 0)
    # alpha_core reduces to ceil(sqrt(A/k))
    assert geo.alpha_core == 15  # ceil(sqrt(200)) = 15


def test_geometry_boundary_budget(steane):
    # A/k = 2*d_max keeps the radicand positive
    params = FabricParams(1, 100)
    geo = compute_geometry(steane, params, 50)
    assert geo.alpha_compute >= 1


def test_geometry_negative_radicand_raises():
    prof = QecProfile("tiny", 2, {"H": OpCost(100, 1.0, True)})
    params = FabricParams(1, 10)
    with pytest.raises(ConfigError):
        compute_geometry(prof, params, 1000)


def test_geometry_monotone_in_budget(steane):
    prev = 0
    for a in range(200, 4000, 37):
        geo = compute_geometry(steane, FabricParams(4, a), 20)
        assert geo.alpha_compute >= prev
        prev = geo.alpha_compute


def test_compute_dmax(uniform_profile):
    _, kern = single_kernel(
        "qubit a\nqubit b\nqubit c\nqubit d\n"
        "H a\nCNOT a,b\nH c\nCNOT a,c\nH d\nCNOT a,d\n"
    )
    g = level_graph(build_qodg(kern, uniform_profile))
    part = kway_partition(g, 2)
    dmax = compute_dmax(g, part)
    parts = part.parts()
    expect = max(
        len({q for i in side for q in g.nodes[i].op.operands}) for side in parts if side
    )
    assert dmax == expect
    assert compute_dmax(g, kway_partition(g, 1)) == 4  # k=1: every qubit


def test_budget_validation(steane):
    with pytest.raises(ConfigError):
        FabricParams(4, 80).validate_against(steane)  # 20 per core < 100 (T)
    FabricParams(4, 800).validate_against(steane)


# ----------------------------------------------------------------------
# grid + routing

def test_grid_layouts():
    assert grid_layout(4).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert grid_layout(2).tolist() == [[0, 0], [0, 1]]
    assert grid_layout(5).tolist() == [[0, 0], [0, 1], [0, 2], [1, 0], [1, 1]]
    assert grid_layout(1).tolist() == [[0, 0]]


def test_xy_routes():
    layout = np.array([[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2]])
    assert xy_route(0, 5, layout) == [(0, 0), (0, 1), (0, 2), (1, 2)]
    assert xy_route(2, 2, layout) == [(0, 2)]
    assert xy_route(4, 0, layout) == [(1, 1), (1, 0), (0, 0)]


def test_xy_route_length_is_manhattan_exhaustive():
    for k in range(1, 17):
        layout = grid_layout(k)
        for a in range(k):
            for b in range(k):
                path = xy_route(a, b, layout)
                manhattan = abs(int(layout[a, 0] - layout[b, 0])) + \
                    abs(int(layout[a, 1] - layout[b, 1]))
                assert len(path) == manhattan + 1
                for u, v in zip(path, path[1:]):
                    assert abs(u[0] - v[0]) + abs(u[1] - v[1]) == 1


def test_inter_core_delay_linear_in_distance(steane):
    params = FabricParams(9, 8100)
    geo = compute_geometry(steane, params, 10)
    layout = grid_layout(9)
    dm = delay_matrix(geo, params, layout)
    unit = dm.d[0, 1]
    for a in range(9):
        for b in range(9):
            if a != b:
                steps = abs(int(layout[a, 0] - layout[b, 0])) + \
                    abs(int(layout[a, 1] - layout[b, 1]))
                assert dm.d[a, b] == steps * unit

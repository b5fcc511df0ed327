from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_pipeline_latency, random_two_tier_problem
from tiercut.model import (
    CommLinkSpec,
    MicroserviceSpec,
    Placement,
    Tier,
    TierChain,
    UnsupportedTierError,
)
from tiercut.perf import (
    NetworkState,
    PricingWeights,
    TierPairLink,
    comm_weight,
    latency_report,
    pipeline_latency,
    total_cost,
    vertex_weight,
)


def test_vertex_weight_edge_example():
    ms = MicroserviceSpec("A", {"edge": 0.040})
    assert vertex_weight(ms, Tier("edge", 0, 2.0)) == pytest.approx(0.080, abs=1e-12)


def test_vertex_weight_zero_time():
    ms = MicroserviceSpec("A", {"edge": 0.0})
    assert vertex_weight(ms, Tier("edge", 0, 123.0)) == 0.0


def test_vertex_weight_cloud_example():
    ms = MicroserviceSpec("A", {"cloud": 0.020})
    assert vertex_weight(ms, Tier("cloud", 1, 1.0)) == pytest.approx(0.020, abs=1e-12)


def test_vertex_weight_rejects_undeclared_tier():
    ms = MicroserviceSpec("A", {"edge": 0.040})
    with pytest.raises(UnsupportedTierError):
        vertex_weight(ms, Tier("cloud", 1, 1.0))


def test_comm_weight_inter_zone_figures():
    tiers = TierChain((Tier("wavelength", 0, 2.0), Tier("availability", 1, 1.0)))
    net = NetworkState((TierPairLink("wavelength", "availability", 35.47, 38.31),))
    link = CommLinkSpec("a", "b", 4.0, 0.01)
    expected = 4.0 / 35.47 + 0.01 / 38.31  # = 0.1130323845...
    got = comm_weight(link, net, tiers, "wavelength", "availability")
    assert got == pytest.approx(expected, abs=1e-12)
    assert got == pytest.approx(0.1130323845276581, abs=1e-9)


def test_comm_weight_zero_data():
    tiers = TierChain((Tier("e", 0, 2.0), Tier("c", 1, 1.0)))
    net = NetworkState((TierPairLink("e", "c", 35.47, 38.31),))
    assert comm_weight(CommLinkSpec("a", "b", 0.0, 0.0), net, tiers, "e", "c") == 0.0


def test_comm_weight_calibrated_upload():
    tiers = TierChain((Tier("device", 0, 1.0), Tier("wavelength", 1, 1.0)))
    net = NetworkState((TierPairLink("device", "wavelength", 28.43, 151.3),))
    link = CommLinkSpec("file", "vs", 15722.0, 0.0)
    got = comm_weight(link, net, tiers, "device", "wavelength")
    assert got == pytest.approx(15722.0 / 28.43, abs=1e-9)
    assert got == pytest.approx(553.0, rel=0.001)


def test_comm_weight_same_tier_is_zero(toy_app, toy_tiers, toy_net):
    link = toy_app.link("S", "A")
    assert comm_weight(link, toy_net, toy_tiers, "edge", "edge") == 0.0


@pytest.mark.parametrize(
    "assignment,expected",
    [
        ({"S": "edge", "A": "edge", "B": "edge"}, 0.075),
        ({"S": "edge", "A": "edge", "B": "cloud"}, 0.070),
        ({"S": "edge", "A": "cloud", "B": "cloud"}, 0.140),
    ],
)
def test_pipeline_latency_toy_examples(toy_app, toy_tiers, toy_net, assignment, expected):
    got = pipeline_latency(toy_app, toy_tiers, Placement(assignment), toy_net, "chain")
    assert got == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize(
    "assignment,expected",
    [
        ({"S": "edge", "A": "edge", "B": "edge"}, 0.150),
        ({"S": "edge", "A": "edge", "B": "cloud"}, 0.105),
        ({"S": "edge", "A": "cloud", "B": "cloud"}, 0.045),
    ],
)
def test_total_cost_toy_examples(toy_app, toy_tiers, assignment, expected):
    report = total_cost(toy_app, toy_tiers, Placement(assignment))
    assert report.total == pytest.approx(expected, abs=1e-9)
    assert report.total == pytest.approx(sum(report.contributions.values()), abs=1e-9)


def test_latency_report_decomposition_sums(toy_app, toy_tiers, toy_net):
    placement = Placement({"S": "edge", "A": "edge", "B": "cloud"})
    report = latency_report(toy_app, toy_tiers, placement, toy_net)
    row = report.for_pipeline("chain")
    assert row.total_s == pytest.approx(
        row.edge_processing_s + row.cloud_processing_s + row.communication_s, abs=1e-9
    )
    assert row.communication_s == pytest.approx(0.01, abs=1e-12)


def test_zero_cut_means_zero_communication(toy_app, toy_tiers, toy_net):
    placement = Placement({"S": "edge", "A": "edge", "B": "edge"})
    report = latency_report(toy_app, toy_tiers, placement, toy_net)
    assert report.for_pipeline("chain").communication_s == 0.0


def _toy_fixture_set():
    from tiercut.model import ApplicationGraph, CommLinkSpec, CriticalPipeline

    app = ApplicationGraph(
        name="toy-chain",
        microservices=(
            MicroserviceSpec("S", {"edge": 0.005}, bound_tier="edge"),
            MicroserviceSpec("A", {"edge": 0.040, "cloud": 0.020}),
            MicroserviceSpec("B", {"edge": 0.030, "cloud": 0.015}),
        ),
        links=(CommLinkSpec("S", "A", 3.5, 0.0), CommLinkSpec("A", "B", 0.35, 0.0)),
        pipelines=(CriticalPipeline("chain", ("S", "A", "B"), 0.120),),
    )
    tiers = TierChain((Tier("edge", 0, 2.0), Tier("cloud", 1, 1.0)))
    return app, tiers


@settings(max_examples=40, deadline=None)
@given(
    factor=st.floats(min_value=1.0, max_value=50.0),
    assignment=st.tuples(
        st.sampled_from(["edge", "cloud"]), st.sampled_from(["edge", "cloud"])
    ),
)
def test_more_bandwidth_never_raises_latency(factor, assignment):
    app, tiers = _toy_fixture_set()
    a, b = assignment
    placement = Placement({"S": "edge", "A": a, "B": b})
    slow = NetworkState((TierPairLink("edge", "cloud", 35.0, 35.0),))
    fast = NetworkState((TierPairLink("edge", "cloud", 35.0 * factor, 35.0 * factor),))
    lat_slow = pipeline_latency(app, tiers, placement, slow, "chain")
    lat_fast = pipeline_latency(app, tiers, placement, fast, "chain")
    assert lat_fast <= lat_slow + 1e-15


@settings(max_examples=40, deadline=None)
@given(extra=st.floats(min_value=0.0, max_value=1.0))
def test_more_service_time_never_lowers_latency(extra):
    import dataclasses

    app, tiers = _toy_fixture_set()
    net = NetworkState((TierPairLink("edge", "cloud", 35.0, 35.0),))
    placement = Placement({"S": "edge", "A": "edge", "B": "cloud"})
    slower = dataclasses.replace(
        app,
        microservices=tuple(
            dataclasses.replace(
                ms, service_time_s={k: v + extra for k, v in ms.service_time_s.items()}
            )
            for ms in app.microservices
        ),
    )
    base = pipeline_latency(app, tiers, placement, net, "chain")
    more = pipeline_latency(slower, tiers, placement, net, slower.pipelines[0])
    assert more >= base - 1e-15


def test_weight_scaling_preserves_argmin(toy_app, toy_tiers, toy_net):
    from tiercut.partition import PartitionProblem, partition

    base = PartitionProblem(toy_app, toy_tiers, toy_net, PricingWeights(1.0, 1.0))
    scaled = PartitionProblem(toy_app, toy_tiers, toy_net, PricingWeights(7.5, 7.5))
    r1 = partition(base)
    r2 = partition(scaled)
    assert r1.placement.assignment == r2.placement.assignment
    assert r2.cost == pytest.approx(7.5 * r1.cost, rel=1e-12)


def test_pipeline_latency_matches_naive_walker_on_random_graphs():
    rng = random.Random(20240811)
    for _ in range(60):
        app, tiers, net, _, _ = random_two_tier_problem(rng, n_max=12)
        placement = Placement(
            {m.id: rng.choice(m.allowed_tiers(tiers)) for m in app.microservices}
        )
        for pipe in app.pipelines:
            mine = pipeline_latency(app, tiers, placement, net, pipe)
            ref = naive_pipeline_latency(app, tiers, placement, net, pipe)
            assert mine == pytest.approx(ref, rel=1e-12, abs=1e-15)


def test_pipeline_latency_matches_naive_walker_on_every_placement():
    import itertools

    rng = random.Random(77)
    for _ in range(8):
        app, tiers, net, _, _ = random_two_tier_problem(rng, n_max=8)
        ids = sorted(ms.id for ms in app.microservices)
        allowed = [app.microservice(m).allowed_tiers(tiers) for m in ids]
        for combo in itertools.product(*allowed):
            placement = Placement(dict(zip(ids, combo)))
            for pipe in app.pipelines:
                mine = pipeline_latency(app, tiers, placement, net, pipe)
                ref = naive_pipeline_latency(app, tiers, placement, net, pipe)
                assert mine == pytest.approx(ref, rel=1e-12, abs=1e-15)

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tiercut.model import (
    ApplicationGraph,
    CommLinkSpec,
    CriticalPipeline,
    MicroserviceSpec,
    Tier,
    TierChain,
)
from tiercut.perf import NetworkState, TierPairLink
from tiercut.scenario import bundled_scenarios, load_bundled


@pytest.fixture(scope="session")
def scenario_paths() -> dict[str, Path]:
    return bundled_scenarios()


@pytest.fixture()
def toy_tiers() -> TierChain:
    return TierChain((Tier("edge", 0, 2.0), Tier("cloud", 1, 1.0)))


@pytest.fixture()
def toy_net() -> NetworkState:
    # 3.5 Mbit at 35 Mbit/s = 100 ms on (S, A); 0.35 Mbit = 10 ms on (A, B)
    return NetworkState((TierPairLink("edge", "cloud", 35.0, 35.0, 0.0258),))


@pytest.fixture()
def toy_app() -> ApplicationGraph:
    return ApplicationGraph(
        name="toy-chain",
        microservices=(
            MicroserviceSpec("S", {"edge": 0.005}, bound_tier="edge"),
            MicroserviceSpec("A", {"edge": 0.040, "cloud": 0.020}),
            MicroserviceSpec("B", {"edge": 0.030, "cloud": 0.015}),
        ),
        links=(
            CommLinkSpec("S", "A", 3.5, 0.0),
            CommLinkSpec("A", "B", 0.35, 0.0),
        ),
        pipelines=(CriticalPipeline("chain", ("S", "A", "B"), 0.120),),
    )


@pytest.fixture(scope="session")
def monitoring_scenario():
    return load_bundled("monitoring_location1")

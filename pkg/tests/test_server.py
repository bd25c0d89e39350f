import asyncio

import pytest
from aiohttp import test_utils

from twrc.server import web_server


def get(path, **params):
    async def request():
        async with test_utils.TestClient(test_utils.TestServer(await web_server())) as client:
            response = await client.get(path, params=params)
            return response.status, await response.json()
    return asyncio.run(request())


def test_status():
    status, document = get("/api/status")
    assert status == 200
    assert document["service"] == "twrc"


def test_region_member():
    status, document = get("/api/region/member", region="outer", tuple="0.5,0.5,0,0",
                           p1="1", p2="1", pr1="3", pr2="3")
    assert status == 200
    assert document["member"] is True
    assert document["schema"] == 1


def test_region_slice():
    status, document = get("/api/region/slice", p1="1", p2="1", pr1="3", pr2="3",
                           resolution="2", regions="outer,eer-br")
    assert status == 200
    assert len(document["rows"]) == 4


def test_gap_witness():
    status, document = get("/api/gap/witness", tuple="2,2,0,0", p1="15", p2="15")
    assert status == 200
    assert document["alpha"] == pytest.approx(0.7587, abs=1e-4)


def test_sim_ser():
    status, document = get("/api/sim/ser", q="4", n="8", snrs="inf", trials="50", seed="1")
    assert status == 200
    assert document["points"][0]["ser_modsum"] == 0.0


@pytest.mark.parametrize("path, params", [
    ("/api/region/member", {"region": "inner", "tuple": "0,0,0,0", "p1": "1", "p2": "1", "pr1": "1", "pr2": "1"}),
    ("/api/region/member", {"region": "outer", "tuple": "0,0,0,0", "p1": "1"}),
    ("/api/region/member", {"region": "outer", "tuple": "0,0,0", "p1": "1", "p2": "1", "pr1": "1", "pr2": "1"}),
    ("/api/gap/witness", {"tuple": "0.5,0.5,0.1,0", "p1": "1", "p2": "1"}),
    ("/api/sim/ser", {"q": "4", "n": "8", "snrs": "0", "trials": "0"}),
    ("/api/sim/ser", {"q": "4", "n": "8", "snrs": "0", "seed": "-1"}),
])
def test_bad_requests(path, params):
    status, document = get(path, **params)
    assert status == 400
    assert document["error"]

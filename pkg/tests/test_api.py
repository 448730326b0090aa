import httpx
import pytest
import pytest_asyncio

from app.core.errors import CapacityError, ConfigError, EmptySolutionError, RangeError
from app.core.lifespan import lifespan
from main import app, status_for


@pytest_asyncio.fixture
async def client():
    async with lifespan(app):
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://test") as http:
            yield http


def unitary_config(**overrides):
    config = {
        "space": {"d_a": 2, "d_b": 2, "q": 1.0},
        "phi": {"source": "generate", "kind": "unitary", "seed": 3},
        "dsf": {"variant": "fermionic_quadratic", "m": 2},
        "n_max": 2,
    }
    config.update(overrides)
    return config


@pytest.mark.asyncio
async def test_health(client):
    response = await client.get("/health")
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["overall_status"] == "operational"
    assert body["components"][0]["name"] == "worker_pool"
    assert body["components"][0]["details"]["threads"] >= 1


@pytest.mark.asyncio
async def test_health_without_worker_pool():
    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport, base_url="http://test") as http:
        response = await http.get("/health")
    body = response.json()
    assert response.status_code == 200
    assert body["success"] is False
    assert body["overall_status"] == "degraded"
    assert body["components"][0]["status"] == "down"


@pytest.mark.asyncio
async def test_dsf_table(client):
    response = await client.get("/api/v1/dsf/table", params={"variant": "fermionic_quadratic", "m": 2, "n_max": 3})
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert [row["phi"] for row in rows] == [0.0, 1.0, 1.0, 0.0]
    assert rows[0]["binomial_residual"] is None


@pytest.mark.asyncio
async def test_dsf_table_invalid_parameters(client):
    response = await client.get("/api/v1/dsf/table", params={"variant": "q_fermion_square", "q": 1.0})
    assert response.status_code == 422
    body = response.json()
    assert body["success"] is False
    assert body["error"]["error_code"] == "CONFIGERROR"


@pytest.mark.asyncio
async def test_ptable(client):
    response = await client.get("/api/v1/ptable", params={"n_max": 5})
    assert response.status_code == 200
    rows = response.json()["rows"]
    assert {"n": 5, "k": 2, "l": 2, "j": 1, "value": -12} in rows


@pytest.mark.asyncio
async def test_generate_phi(client):
    response = await client.post("/api/v1/phi/generate", json={"d_a": 4, "d_b": 4, "m": 2, "n_modes": 2, "seed": 7})
    assert response.status_code == 200
    body = response.json()
    assert body["f"] == pytest.approx(1.0)
    assert body["verdict"]["verdict"] == "realizable_q1"
    assert body["verdict"]["m"] == 2


@pytest.mark.asyncio
async def test_generate_phi_capacity(client):
    response = await client.post("/api/v1/phi/generate", json={"d_a": 2, "d_b": 2, "m": 2, "n_modes": 2})
    assert response.status_code == 409
    assert response.json()["error"]["error_type"] == "EmptySolutionError"


@pytest.mark.asyncio
async def test_verify_pass(client):
    response = await client.post("/api/v1/verify", json=unitary_config())
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is True
    assert body["report"]["verdict"] == "pass"
    assert body["failures"] == []


@pytest.mark.asyncio
async def test_verify_fail_is_not_an_error(client):
    config = unitary_config(dsf={"variant": "tabulated", "values": [0, 1, 1, 0.1, -2]})
    response = await client.post("/api/v1/verify", json=config)
    assert response.status_code == 200
    body = response.json()
    assert body["success"] is False
    assert "commutator_cascade:A1_cascade_n2" in body["failures"]


@pytest.mark.asyncio
async def test_verify_pairing_conflict(client):
    config = unitary_config(space={"d_a": 2, "d_b": 2, "q": 0.5, "cutoff": 4})
    response = await client.post("/api/v1/verify", json=config)
    assert response.status_code == 422
    assert response.json()["error"]["fields"] == ["space.q", "dsf.variant"]


@pytest.mark.asyncio
async def test_verify_schema_violation(client):
    response = await client.post("/api/v1/verify", json={"space": {"d_a": 2}})
    assert response.status_code == 422
    assert response.json()["error"]["error_code"] == "VALIDATION_ERROR"


def test_status_mapping():
    assert status_for(EmptySolutionError("x")) == 409
    assert status_for(ConfigError("x")) == 422
    assert status_for(RangeError("x")) == 422
    assert status_for(CapacityError("x")) == 500

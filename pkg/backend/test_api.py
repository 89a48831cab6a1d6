"""
Tests for the HTTP surface through FastAPI's TestClient.
"""

import sys
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from backend.database import db
from backend.main import app

FANO_MTX = """\
matroid F7
elements a b c d e f g
repr GF(2) rows 3
col a 100
col b 010
col c 001
col d 110
col e 101
col f 011
col g 111
"""


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    db.db_path = tmp_path_factory.mktemp("db") / "fanforge-test.db"
    with TestClient(app) as c:
        yield c


def test_health(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json()["database"] == "connected"


def test_config(client):
    data = client.get("/api/config").json()
    assert data["exit_codes"]["resource_abort"] == 3
    assert data["depth"] == 2


def test_catalog(client):
    items = {item["name"]: item for item in client.get("/api/matroids/catalog").json()}
    assert items["F7"]["elements"] == 7
    assert items["P6"]["binary"] is False


def test_show(client):
    data = client.get("/api/matroids/U24").json()
    assert (data["rank"], data["bases"], data["field"]) == (2, 6, 3)
    assert data["mtx"].startswith("matroid U24\n")
    assert client.get("/api/matroids/F8").status_code == 404


def test_fans(client):
    data = client.get("/api/matroids/F7/fans").json()
    assert data["family"] == [["a", "b", "d"]]
    assert data["fans"]
    assert all(len(F["seq"]) == 3 and F["triangle_first"] for F in data["fans"])


def test_parse(client):
    response = client.post("/api/matroids/parse", json={"mtx": FANO_MTX})
    assert response.status_code == 200
    assert response.json()["bases"] == 28
    bad = client.post("/api/matroids/parse", json={"mtx": "elements a\nfrobnicate\n"})
    assert bad.status_code == 400
    assert "unknown keyword" in bad.json()["detail"]


def test_fragility_check(client):
    data = client.post("/api/fragility/check", json={"matroid": "whirl3", "S": ["U24"]}).json()
    assert data["fragile"] is True
    assert len(data["verdicts"]) == 6
    assert data["lines"][-1] == "fragile: yes"
    inline = client.post("/api/fragility/check", json={"mtx": FANO_MTX, "S": ["F7", "F7dual"]}).json()
    assert inline["fragile"] is True


def test_hypotheses(client):
    data = client.post("/api/fragility/hypotheses", json={"N": "wheel3"}).json()
    assert data["ok"] is False
    assert data["lines"][0] == "hypotheses: fail"
    assert client.post("/api/fragility/hypotheses", json={"N": "F7", "S": ["F7", "F7dual"]}).json()["ok"]


def test_certify_and_browse_runs(client):
    response = client.post("/api/certify", json={"N": "F7", "S": ["F7", "F7dual"], "depth": 1})
    assert response.status_code == 200
    body = response.json()
    assert body["result"]["verdict"] == "certified"
    assert body["result"]["counts"] == [1, 2]

    runs = client.get("/api/certify/runs").json()
    assert runs[0]["id"] == body["id"]
    assert runs[0]["counts"] == [1, 2]

    stored = client.get(f"/api/certify/runs/{body['id']}").json()
    assert stored["verdict"] == "certified"
    assert stored["result"]["depth"] == 1
    assert client.get("/api/certify/runs/999999").status_code == 404


def test_certify_errors(client):
    response = client.post("/api/certify", json={"N": "wheel3", "fans": [], "depth": 1})
    assert response.status_code == 400
    assert client.post("/api/certify", json={"depth": 1}).status_code == 400
    assert client.post("/api/certify", json={"N": "U24", "field": 3, "depth": 1}).status_code == 400

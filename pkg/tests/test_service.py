import json

import pytest
from fastapi.testclient import TestClient

from twistlab.service import app

from conftest import fixture_path

client = TestClient(app)


def desc_of(name):
    return json.loads(fixture_path(name).read_text())


def test_health():
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_validate():
    r = client.post("/validate", json={"description": desc_of("pauli-z2z2")})
    assert r.status_code == 200
    assert r.json()["passed"] is True


def test_validate_malformed_description():
    r = client.post("/validate", json={"description": {"group": {"kind": "??"}}})
    assert r.status_code == 422


def test_validate_missing_body_field():
    r = client.post("/validate", json={})
    assert r.status_code == 422


def test_norm():
    r = client.post("/norm", json={"description": desc_of("free2-trivial"),
                                   "element": "x", "radius": 6})
    assert r.status_code == 200
    body = r.json()
    assert body["norm_lower"] <= body["l1_upper"] + 1e-6
    assert body["l1_upper"] == pytest.approx(2.0)


def test_norm_unknown_element():
    r = client.post("/norm", json={"description": desc_of("free2-trivial"),
                                   "element": "nope"})
    assert r.status_code == 422


def test_norm_resource_cap():
    r = client.post("/norm", json={"description": desc_of("free2-trivial"),
                                   "element": "y4", "radius": 30})
    assert r.status_code == 507


def test_average_ph():
    r = client.post("/average/ph", json={"description": desc_of("free2-trivial"),
                                         "element": "x", "kmax": 2, "eps": 0.01})
    assert r.status_code == 200
    body = r.json()
    assert len(body["records"]) == 2
    assert body["records"][0]["terms"] == 6


def test_average_pcom():
    r = client.post("/average/pcom", json={"description": desc_of("free2-trivial"),
                                           "element": "x", "N": 16})
    assert r.status_code == 200
    body = r.json()
    assert body["N"] == 16
    assert body["certified_bound"] == pytest.approx(1.0)
    assert body["norm_lower"] <= body["certified_bound"] + 1e-6


def test_ideals():
    r = client.post("/ideals", json={"description": desc_of("z2-swap")})
    assert r.status_code == 200
    body = r.json()
    assert body["bijection"]["holds"] is True
    assert all(p["equal"] for p in body["pairs"])


def test_traces():
    r = client.post("/traces", json={"description": desc_of("z2-swap")})
    assert r.status_code == 200
    assert r.json()["holds"] is True


def test_decompose():
    r = client.post("/decompose", json={"description": desc_of("s3-natural")})
    assert r.status_code == 200
    body = r.json()
    assert body["ambient_dimension"] == 18
    assert body["blocks"]["dims"] == [3, 3]
    assert len(body["orbits"]["entries"]) == 1


def test_decompose_free_group_rejected():
    r = client.post("/decompose", json={"description": desc_of("free2-trivial")})
    assert r.status_code == 422


def test_report():
    r = client.post("/report", json={"description": desc_of("z2-1234")})
    assert r.status_code == 200
    body = r.json()
    assert body["validation"]["passed"]
    assert body["decomposition"]["blocks"]["dims"] == [2, 2]
    assert body["ideals"]["bijection"]["holds"] is True
    assert "orbits" in body

#!/usr/bin/env python3
"""
Tests for the read-only HTTP API
"""

import pytest
from fastapi.testclient import TestClient

from api_server import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    response = client.get("/api/health")
    assert response.status_code == 200
    assert response.json() == {"status": "healthy"}


def test_vev_paper(client):
    response = client.get("/api/vev", params={"expr": "a[1,0]*ad[1,0]"})
    assert response.status_code == 200
    body = response.json()
    assert body["exact"] == "1/3"
    assert body["numeric"]["re"] == pytest.approx(1 / 3)
    assert body["normal_form"] == "ad[1,0]*a[1,0] + 1/3"


def test_vev_custom_split_and_standard(client):
    response = client.get("/api/vev", params={"expr": "a[1,0]*ad[1,0]", "n": "1/2,1/4,1/4"})
    assert response.json()["exact"] == "1/2"
    response = client.get("/api/vev", params={"expr": "a[0,0]*ad[0,0]", "scheme": "standard"})
    assert response.json()["exact"] == "-1"


@pytest.mark.parametrize("params", [
    {"expr": "a[4,0]"},
    {"expr": "a[1,0]", "scheme": "custom"},
    {"expr": "a[1,0]", "n": "1/2,1/2,1/2"},
    {"expr": "a[1,0]", "n": "a,b,c"},
    {"expr": "a[1,0]", "scheme": "standard", "n": "1/3,1/3,1/3"},
    {"expr": "a[1,0] + 1/0"},
    {"expr": "(" * 100 + "a[1,0]" + ")" * 100},
])
def test_vev_bad_requests(client, params):
    assert client.get("/api/vev", params=params).status_code == 400


def test_vev_requires_expression(client):
    assert client.get("/api/vev").status_code == 422


def test_vacuum_energy(client):
    response = client.get("/api/vacuum-energy", params={"L": "1", "modes": "0,0,1;0,0,-1"})
    assert response.status_code == 200
    body = response.json()
    assert body["standard_raw"]["exact"] == "8*pi"
    assert body["standard_raw"]["value"] == pytest.approx(8 * 3.141592653589793)
    assert body["standard_normal_ordered"]["exact"] == "0"
    assert body["paper_raw"]["exact"] == "0"
    assert body["modes"] == [[0, 0, 1], [0, 0, -1]]
    assert body["selected"]["exact"] == "0"


def test_vacuum_energy_selected_scheme(client):
    body = client.get("/api/vacuum-energy", params={"scheme": "standard"}).json()
    assert body["selected"]["exact"] == "8*pi"
    assert body["selected"]["scheme"].startswith("standard")
    assert body["paper_raw"]["exact"] == "0"
    body = client.get("/api/vacuum-energy", params={"n": "1/2,1/4,1/4"}).json()
    assert body["selected"]["exact"] == "0"


@pytest.mark.parametrize("params", [
    {"modes": "0,0,0"},
    {"modes": "0,0,1;0,0,1"},
    {"L": "0"},
    {"L": "1,2"},
    {"scheme": "bogus"},
])
def test_vacuum_energy_bad_requests(client, params):
    assert client.get("/api/vacuum-energy", params=params).status_code == 400

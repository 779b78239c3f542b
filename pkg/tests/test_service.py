import pytest
from fastapi.testclient import TestClient

from sparsesim.report import canonical_json
from sparsesim.service import MAX_ORACLE_QUBITS, app, resolve_estimator

client = TestClient(app)

PERIOD2 = {
    "n": 4,
    "input": "0000",
    "u1": {"type": "qft-then-reversible", "qft_targets": [1, 2, 3]},
    "u2": {"type": "qft", "targets": [0, 1, 2, 3]},
    "measure": [0, 1, 2, 3],
}

PARITY = {
    "n": 3,
    "input": "000",
    "u1": {"type": "function", "name": "parity"},
    "u2": {"type": "product", "unitaries": ["H", "H", "H"]},
    "measure": [0, 1, 2],
}


def wide_circuit(n: int) -> dict:
    return {
        "n": n,
        "input": "0" * n,
        "u1": {"type": "qft-then-reversible", "qft_targets": [0]},
        "u2": {"type": "qft", "targets": list(range(n))},
        "measure": list(range(n)),
    }


def test_resolve_estimator() -> None:
    assert resolve_estimator("auto", MAX_ORACLE_QUBITS) == "sampling"
    assert resolve_estimator("auto", MAX_ORACLE_QUBITS + 1) == "ct"
    assert resolve_estimator("ct", 2) == "ct"
    assert resolve_estimator("exact", 30) == "exact"


def test_healthz() -> None:
    body = client.get("/healthz").json()
    assert body["status"] == "ok"
    assert "version" in body


def test_oracle_endpoint_period_two() -> None:
    resp = client.post("/oracle", json={"circuit": PERIOD2})
    assert resp.status_code == 200
    report = resp.json()
    assert report["command"] == "oracle"
    assert set(report) == {"command", "params", "result", "timing"}
    result = report["result"]
    assert result["support_size"] == 2
    assert [e["value"] for e in result["support"]] == [0, 8]
    assert [e["x"] for e in result["support"]] == ["0000", "0001"]
    for e in result["support"]:
        assert e["p"] == pytest.approx(0.5)
    assert result["mass"] == pytest.approx(1.0)
    assert result["ok"]


def test_oracle_endpoint_top_truncation() -> None:
    resp = client.post("/oracle", json={"circuit": PERIOD2, "top": 1})
    result = resp.json()["result"]
    assert result["support_size"] == 1
    assert result["tail"] == pytest.approx(0.5)


def test_simulate_endpoint_exact() -> None:
    req = {"circuit": PERIOD2, "t": 2, "epsilon": 0.1, "delta": 0.1, "estimator": "exact"}
    resp = client.post("/simulate", json=req)
    assert resp.status_code == 200
    result = resp.json()["result"]
    assert result["estimator"] == "exact"
    assert result["ok"]
    dist = result["distribution"]
    assert [e["value"] for e in dist["support"]] == [0, 8]
    for e in dist["support"]:
        assert e["p"] == pytest.approx(0.5)
    assert dist["search"]["probes"] <= dist["search"]["budget"]
    assert not dist["search"]["halted"]
    assert result["oracle"]["calls"] > 0
    assert result["oracle"]["samples_drawn"] == 0


def test_simulate_endpoint_auto_picks_sampling() -> None:
    req = {"circuit": PERIOD2, "t": 2, "epsilon": 0.1, "delta": 0.1, "seed": 5}
    result = client.post("/simulate", json=req).json()["result"]
    assert result["estimator"] == "sampling"
    assert result["oracle"]["samples_drawn"] > 0


def test_simulate_result_is_reproducible() -> None:
    req = {"circuit": PERIOD2, "t": 2, "epsilon": 0.1, "delta": 0.1, "seed": 9}
    a = client.post("/simulate", json=req).json()
    b = client.post("/simulate", json=req).json()
    assert canonical_json(a["result"]) == canonical_json(b["result"])
    assert canonical_json(a["params"]) == canonical_json(b["params"])


def test_reconstruct_state_endpoint() -> None:
    req = {
        "circuit": PARITY,
        "t": 1,
        "epsilon": 1.0 / 6.0,
        "delta": 0.2,
        "estimator": "exact",
        "seed": 3,
    }
    resp = client.post("/reconstruct-state", json=req)
    assert resp.status_code == 200
    result = resp.json()["result"]
    assert result["ok"]
    assert result["norm"] == pytest.approx(1.0, abs=1e-12)
    assert len(result["state"]) == 1
    entry = result["state"][0]
    assert entry["x"] == "111"
    # the output state is exactly |111>, so the phase estimate is near +1
    assert entry["re"] == pytest.approx(1.0, abs=0.1)
    assert entry["im"] == pytest.approx(0.0, abs=0.1)
    assert result["phase_anomalies"] == 0
    assert result["amplitude_samples"] > 0
    assert result["error_bound"] == pytest.approx(5 * (1.0 / 6.0) ** 0.5)


def test_weights_endpoint_exact() -> None:
    req = {
        "circuit": PERIOD2,
        "theta": 0.3,
        "pi": 0.1,
        "epsilon": 0.05,
        "delta": 0.1,
        "estimator": "exact",
    }
    resp = client.post("/weights", json=req)
    assert resp.status_code == 200
    result = resp.json()["result"]
    assert result["ok"]
    assert [e["value"] for e in result["entries"]] == [0, 8]
    for e in result["entries"]:
        assert e["weight"] == pytest.approx(0.5)
        # coefficients of the uniform even superposition are +1/sqrt(2)
        assert e["re"] == pytest.approx(2.0 ** -0.5, abs=0.1)
        assert abs(e["im"]) <= 0.1
    assert result["coefficient_samples"] > 0


def test_compare_endpoint_exact_backend_always_succeeds() -> None:
    req = {
        "circuit": PERIOD2,
        "t": 2,
        "epsilon": 0.1,
        "delta": 0.1,
        "trials": 3,
        "estimator": "exact",
    }
    result = client.post("/compare", json=req).json()["result"]
    assert result["trials"] == 3
    assert result["successes"] == 3
    assert result["success_rate"] == 1.0
    assert result["l1_errors"] == pytest.approx([0.0, 0.0, 0.0], abs=1e-12)
    assert result["ok"]


def test_bad_circuit_returns_422() -> None:
    bad = dict(PERIOD2, input="00")
    resp = client.post("/oracle", json={"circuit": bad})
    assert resp.status_code == 422
    assert "input" in resp.json()["detail"]


def test_out_of_range_epsilon_is_rejected() -> None:
    req = {"circuit": PERIOD2, "t": 2, "epsilon": 0.3, "delta": 0.1}
    resp = client.post("/simulate", json=req)
    assert resp.status_code == 422


def test_dense_oracle_width_limit() -> None:
    circuit = wide_circuit(MAX_ORACLE_QUBITS + 1)
    resp = client.post("/oracle", json={"circuit": circuit})
    assert resp.status_code == 422
    assert "dense oracle" in resp.json()["detail"]

    req = {"circuit": circuit, "t": 2, "epsilon": 0.1, "delta": 0.1, "estimator": "exact"}
    resp = client.post("/simulate", json=req)
    assert resp.status_code == 422


def test_weights_require_full_measurement() -> None:
    circuit = {
        "n": 2,
        "input": "00",
        "u1": {"type": "product", "unitaries": ["H", "H"]},
        "u2": {"type": "qft", "targets": [0]},
        "measure": [0],
    }
    req = {"circuit": circuit, "theta": 0.3, "pi": 0.1, "epsilon": 0.1, "delta": 0.1}
    resp = client.post("/weights", json=req)
    assert resp.status_code == 422
    assert "every qubit" in resp.json()["detail"]

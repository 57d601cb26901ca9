import pytest
from fastapi.testclient import TestClient

from neural_scorer.service import create_app


@pytest.fixture(scope="session")
def client(scorer):
    return TestClient(create_app(scorer))


class TestService:
    def test_health(self, client, scorer):
        response = client.get("/health")
        assert response.status_code == 200
        body = response.json()
        assert body["status"] == "ok"
        assert body["model_name"] == scorer.model_name

    def test_score(self, client):
        response = client.post(
            "/v1/score", json={"query": "capital of France", "document": "Paris is the capital"}
        )
        assert response.status_code == 200
        body = response.json()
        assert 0.0 <= body["score"] <= 1.0
        assert body["truncated"] is False
        assert body["model_name"]

    def test_score_matches_direct_call(self, client, scorer):
        payload = {"query": "breach of contract", "document": "the contract was breached"}
        response = client.post("/v1/score", json=payload)
        direct = scorer.score_pair(payload["query"], payload["document"])
        assert response.json()["score"] == direct.score

    def test_batch_preserves_order(self, client, scorer):
        pairs = [
            {"query": "q1", "document": "first"},
            {"query": "q2", "document": "second"},
            {"query": "q3", "document": "third"},
        ]
        response = client.post("/v1/score_batch", json={"pairs": pairs})
        assert response.status_code == 200
        results = response.json()["results"]
        expected = [scorer.score_pair(p["query"], p["document"]).score for p in pairs]
        assert [r["score"] for r in results] == expected

    def test_empty_field_is_422(self, client):
        response = client.post("/v1/score", json={"query": "", "document": "something"})
        assert response.status_code == 422

    def test_malformed_request_is_400(self, client):
        response = client.post("/v1/score", json={"query": "only one field"})
        assert response.status_code == 400

    def test_unloadable_model_gives_503(self, monkeypatch):
        monkeypatch.setenv("SCORER_MODEL", "does-not-exist/nowhere")
        app = create_app()
        with TestClient(app) as broken:
            assert broken.post(
                "/v1/score", json={"query": "q", "document": "d"}
            ).status_code == 503
            assert broken.get("/health").status_code == 503

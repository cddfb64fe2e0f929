"""Wire-contract tests for the reference backend."""

import math

import pytest
from fastapi.testclient import TestClient

from chesstags_backend import BackendConfig, create_app

SQUARES = [f"{f}{r}" for f in "abcdefgh" for r in range(1, 9)]


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(BackendConfig(seed=0))) as client:
        yield client


def test_health_ready(client):
    response = client.get("/health")
    assert response.status_code == 200
    assert response.json() == {"status": "ready"}


def test_not_ready_before_startup():
    # TestClient used without its context manager never runs the lifespan,
    # so the model is absent: health reports loading and requests get 503.
    bare = TestClient(create_app(BackendConfig()))
    assert bare.get("/health").json() == {"status": "loading"}
    assert bare.post("/generate", json={"input": "x"}).status_code == 503
    assert bare.post("/score", json={"prompt": "p", "continuations": ["a1"]}).status_code == 503


# -- /generate ---------------------------------------------------------------

def test_generate_schema_and_token_budget(client):
    response = client.post("/generate", json={"input": "[Unconditioned]", "max_tokens": 5})
    assert response.status_code == 200
    payload = response.json()
    assert set(payload) == {"text"}
    assert isinstance(payload["text"], str)
    assert len(payload["text"].split()) <= 5


def test_generate_missing_input_is_400(client):
    assert client.post("/generate", json={"max_tokens": 5}).status_code == 400
    assert client.post("/generate", json={"input": 7}).status_code == 400
    assert client.post("/generate", json={"input": "x", "max_tokens": 0}).status_code == 400
    assert client.post("/generate", content=b"not json",
                       headers={"content-type": "application/json"}).status_code == 400


def test_generate_greedy_is_deterministic(client):
    body = {"input": "[v1] [MOVE] e4 [Move Quality] Good [short]", "max_tokens": 16}
    first = client.post("/generate", json=body).json()["text"]
    second = client.post("/generate", json=body).json()["text"]
    assert first == second


# -- /score ------------------------------------------------------------------

def test_score_64_squares_finite_and_ordered(client):
    response = client.post(
        "/score", json={"prompt": "White's bishop on ", "continuations": SQUARES}
    )
    assert response.status_code == 200
    logprobs = response.json()["logprobs"]
    assert len(logprobs) == 64
    assert all(isinstance(lp, float) and math.isfinite(lp) for lp in logprobs)
    # order preservation: reversing the continuations reverses the scores
    reversed_scores = client.post(
        "/score", json={"prompt": "White's bishop on ", "continuations": SQUARES[::-1]}
    ).json()["logprobs"]
    assert reversed_scores == logprobs[::-1]


def test_score_repeated_continuation_identical(client):
    logprobs = client.post(
        "/score", json={"prompt": "p", "continuations": ["e4", "e4", "d4"]}
    ).json()["logprobs"]
    assert logprobs[0] == logprobs[1]


def test_score_deterministic_across_calls(client):
    body = {"prompt": "White's king on ", "continuations": SQUARES}
    assert (client.post("/score", json=body).json()
            == client.post("/score", json=body).json())


def test_score_malformed_is_400(client):
    assert client.post("/score", json={"continuations": ["a1"]}).status_code == 400
    assert client.post("/score", json={"prompt": "p"}).status_code == 400
    assert client.post("/score", json={"prompt": "p", "continuations": []}).status_code == 400
    assert client.post("/score", json={"prompt": "p", "continuations": "a1"}).status_code == 400
    assert client.post("/score", json={"prompt": "p", "continuations": [1, 2]}).status_code == 400


# -- configuration -----------------------------------------------------------

def test_config_bind_validation():
    with pytest.raises(ValueError):
        BackendConfig(bind="no-port")
    with pytest.raises(ValueError):
        BackendConfig(bind="host:99999")
    with pytest.raises(ValueError):
        BackendConfig(max_tokens=0)
    assert BackendConfig(bind="0.0.0.0:9000").port == 9000


# -- integration with the primary package's client helpers -------------------

def test_probe_belief_state_through_wire_contract(client):
    from chesstags.core import BoardState, Color, PieceKind
    from chesstags.probe import ProbePrompt, belief_state

    def oracle(prompt, continuations):
        response = client.post(
            "/score", json={"prompt": prompt, "continuations": list(continuations)}
        )
        return response.json()["logprobs"]

    prompt = ProbePrompt.default(Color.WHITE, PieceKind.KING)
    state = belief_state(oracle, prompt, BoardState.initial())
    assert len(state.distribution) == 64
    assert sum(state.distribution) == pytest.approx(1.0)

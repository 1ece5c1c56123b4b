"""Provider adapters: deterministic mocks and the remote HTTP plumbing."""

import base64

import pytest
import requests

import oracles
from promptfab.errors import ProviderUnavailable, UnintelligibleAudio
from promptfab.mesh import mesh_bounds, serialize_mesh
from promptfab.providers import (
    GenerationRequest,
    RemoteConfig,
    ResemblanceVerdict,
    generate_mesh,
    transcribe,
    verify_resemblance,
)


def test_prompt_routes_to_catalog():
    mesh = generate_mesh(GenerationRequest("a simple stool"))
    assert mesh.name == "stool"
    mesh = generate_mesh(GenerationRequest("assemble me a table with one leg"))
    assert mesh.name == "one_leg_table"


def test_unknown_prompt_falls_back_to_box(caplog):
    with caplog.at_level("WARNING"):
        mesh = generate_mesh(GenerationRequest("a spaceship"))
    assert mesh.name == "box"
    bounds = mesh_bounds(mesh)
    assert tuple(bounds.max - bounds.min) == (2.0, 2.0, 2.0)  # 2x2x2 cell block
    assert any("no catalog match" in r.message for r in caplog.records)


def test_mock_generation_deterministic():
    req = GenerationRequest("a happy dog", seed=2)
    a = serialize_mesh(generate_mesh(req), "stl_binary")
    b = serialize_mesh(generate_mesh(req), "stl_binary")
    assert a == b


def test_empty_prompt_rejected():
    with pytest.raises(ValueError):
        GenerationRequest("   ")


def test_unknown_provider_rejected():
    with pytest.raises(ValueError):
        generate_mesh(GenerationRequest("a stool"), provider="premium")


def test_transcribe_passthrough():
    assert transcribe(b"a simple stool") == "a simple stool"
    assert transcribe(b"  padded  \n") == "padded"


def test_transcribe_rejects_empty_and_binary():
    with pytest.raises(UnintelligibleAudio):
        transcribe(b"")
    with pytest.raises(UnintelligibleAudio):
        transcribe(b"\xff\xfe\x00")


def test_verify_default_verdict():
    verdict = verify_resemblance(b"png-bytes", "a simple stool")
    assert verdict.matches is True
    assert verdict.score == 0.9


def test_verify_configured_negative():
    verdict = verify_resemblance(
        b"png-bytes", "a tall dog", verdicts={"dog": (False, 0.2)}
    )
    assert verdict.matches is False
    assert verdict.score == 0.2
    assert "dog" in verdict.rationale


def test_verify_clamps_configured_scores():
    high = verify_resemblance(b"x", "a stool", verdicts={"stool": (True, 1.7)})
    low = verify_resemblance(b"x", "a stool", verdicts={"stool": (True, -0.4)})
    assert high.score == 1.0
    assert low.score == 0.0


def test_verify_requires_render():
    with pytest.raises(ValueError):
        verify_resemblance(b"", "a stool")


def test_verdict_score_bounds():
    with pytest.raises(ValueError):
        ResemblanceVerdict(matches=True, score=1.2)


# ---------------------------------------------------------------------------
# remote adapters (requests monkeypatched)
# ---------------------------------------------------------------------------


class FakeResponse:
    def __init__(self, status_code=200, payload=None):
        self.status_code = status_code
        self._payload = payload or {}

    def json(self):
        return self._payload


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setenv("PROMPTFAB_API_KEY", "k-test")


def test_remote_requires_endpoint():
    with pytest.raises(ProviderUnavailable, match="not configured"):
        generate_mesh(GenerationRequest("a stool"), provider="remote")


def test_remote_requires_credentials(monkeypatch):
    monkeypatch.delenv("PROMPTFAB_API_KEY", raising=False)
    config = RemoteConfig(generation_url="https://fab.test/gen")
    with pytest.raises(ProviderUnavailable, match="PROMPTFAB_API_KEY"):
        generate_mesh(GenerationRequest("a stool"), provider="remote", config=config)


def test_remote_generation_round_trip(monkeypatch, api_key):
    stl = oracles.stl_binary_bytes(oracles.box_corners((0, 0, 0), (1, 1, 1)))
    seen = {}

    def fake_post(url, headers=None, timeout=None, **kwargs):
        seen.update(url=url, headers=headers, timeout=timeout, json=kwargs.get("json"))
        return FakeResponse(
            payload={
                "mesh_b64": base64.b64encode(stl).decode("ascii"),
                "format": "stl_binary",
                "name": "remote-box",
            }
        )

    monkeypatch.setattr(requests, "post", fake_post)
    config = RemoteConfig(generation_url="https://fab.test/gen", timeout=7.5)
    mesh = generate_mesh(
        GenerationRequest("a cube", seed=4), provider="remote", config=config
    )
    assert mesh.name == "remote-box"
    assert mesh.num_triangles == 12
    assert seen["url"] == "https://fab.test/gen"
    assert seen["headers"]["Authorization"] == "Bearer k-test"
    assert seen["timeout"] == 7.5
    assert seen["json"] == {"prompt": "a cube", "seed": 4}


def test_remote_http_error_maps_to_unavailable(monkeypatch, api_key):
    monkeypatch.setattr(requests, "post", lambda *a, **k: FakeResponse(status_code=503))
    config = RemoteConfig(generation_url="https://fab.test/gen")
    with pytest.raises(ProviderUnavailable, match="HTTP 503"):
        generate_mesh(GenerationRequest("a stool"), provider="remote", config=config)


def test_remote_network_error_maps_to_unavailable(monkeypatch, api_key):
    def boom(*args, **kwargs):
        raise requests.ConnectionError("refused")

    monkeypatch.setattr(requests, "post", boom)
    config = RemoteConfig(transcription_url="https://fab.test/stt")
    with pytest.raises(ProviderUnavailable, match="refused"):
        transcribe(b"audio", provider="remote", config=config)


def test_remote_transcription(monkeypatch, api_key):
    monkeypatch.setattr(
        requests, "post", lambda *a, **k: FakeResponse(payload={"text": "  a chair "})
    )
    config = RemoteConfig(transcription_url="https://fab.test/stt")
    assert transcribe(b"audio", provider="remote", config=config) == "a chair"


def test_remote_transcription_empty_text(monkeypatch, api_key):
    monkeypatch.setattr(
        requests, "post", lambda *a, **k: FakeResponse(payload={"text": ""})
    )
    config = RemoteConfig(transcription_url="https://fab.test/stt")
    with pytest.raises(UnintelligibleAudio):
        transcribe(b"audio", provider="remote", config=config)


def test_remote_verification_clamps_score(monkeypatch, api_key):
    monkeypatch.setattr(
        requests,
        "post",
        lambda *a, **k: FakeResponse(
            payload={"matches": True, "score": 1.8, "rationale": "sure"}
        ),
    )
    config = RemoteConfig(verification_url="https://fab.test/vlm")
    verdict = verify_resemblance(b"png", "a stool", provider="remote", config=config)
    assert verdict.matches is True
    assert verdict.score == 1.0
    assert verdict.rationale == "sure"

"""Clients for the three external AI services, each with an offline mock.

The mocks are the default and are fully deterministic: mesh generation
keyword-matches the built-in catalog, transcription is a byte-to-text
passthrough, and resemblance verification returns configured verdicts.
The remote adapters document a minimal request shape and are expected to
need adjustment against live APIs; they never block the pipeline longer
than the configured timeout.
"""

from __future__ import annotations

import base64
import logging
import os
from dataclasses import dataclass, field

from .catalog import build_mesh, cells_to_mesh, match_prompt
from .errors import ProviderUnavailable, UnintelligibleAudio
from .mesh import TriangleMesh, parse_mesh
from .voxel import ScalingTarget

log = logging.getLogger(__name__)

PROVIDERS = ("mock", "remote")
DEFAULT_TIMEOUT = 60.0

_FALLBACK_CELLS = frozenset(
    (i, j, k) for i in range(2) for j in range(2) for k in range(2)
)


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    seed: int = 0
    target: ScalingTarget = ScalingTarget()

    def __post_init__(self):
        if not self.prompt.strip():
            raise ValueError("prompt must be nonempty")


@dataclass(frozen=True)
class ResemblanceVerdict:
    matches: bool
    score: float
    rationale: str = ""

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score {self.score} outside [0, 1]")

    def to_dict(self) -> dict:
        return {"matches": self.matches, "score": self.score, "rationale": self.rationale}


@dataclass(frozen=True)
class RemoteConfig:
    """Endpoints and credentials for the remote adapters."""

    generation_url: str = ""
    transcription_url: str = ""
    verification_url: str = ""
    api_key_env: str = "PROMPTFAB_API_KEY"
    timeout: float = DEFAULT_TIMEOUT


def _check_provider(provider: str) -> None:
    if provider not in PROVIDERS:
        raise ValueError(f"unknown provider {provider!r}; expected one of {PROVIDERS}")


def _remote_post(url: str, config: RemoteConfig, **kwargs):
    import requests

    if not url:
        raise ProviderUnavailable("remote endpoint not configured")
    key = os.environ.get(config.api_key_env, "")
    if not key:
        raise ProviderUnavailable(f"credentials missing: set {config.api_key_env}")
    headers = kwargs.pop("headers", {})
    headers["Authorization"] = f"Bearer {key}"
    try:
        response = requests.post(url, headers=headers, timeout=config.timeout, **kwargs)
    except requests.RequestException as exc:
        raise ProviderUnavailable(f"{url}: {exc}") from exc
    if response.status_code != 200:
        raise ProviderUnavailable(f"{url}: HTTP {response.status_code}")
    return response


# ---------------------------------------------------------------------------
# Text to mesh
# ---------------------------------------------------------------------------


def generate_mesh(
    request: GenerationRequest, provider: str = "mock", config: RemoteConfig | None = None
) -> TriangleMesh:
    """Produce a mesh for the prompt.

    Mock: keyword match against the catalog; unmatched prompts fall back
    to a plain box with a logged warning. Remote: POST {prompt, seed} and
    ingest the returned mesh.
    """
    _check_provider(provider)
    if provider == "mock":
        obj = match_prompt(request.prompt)
        if obj is None:
            log.warning("no catalog match for %r; generating a plain box", request.prompt)
            return cells_to_mesh(_FALLBACK_CELLS, name="box")
        return build_mesh(obj, seed=request.seed)

    config = config or RemoteConfig()
    response = _remote_post(
        config.generation_url,
        config,
        json={"prompt": request.prompt, "seed": request.seed},
    )
    payload = response.json()
    data = base64.b64decode(payload["mesh_b64"])
    return parse_mesh(data, payload.get("format", "stl_binary"), name=payload.get("name", ""))


# ---------------------------------------------------------------------------
# Speech to text
# ---------------------------------------------------------------------------


def transcribe(audio: bytes, provider: str = "mock", config: RemoteConfig | None = None) -> str:
    """Mock treats the audio bytes as UTF-8 text (test fixture convention)."""
    _check_provider(provider)
    if provider == "mock":
        try:
            text = audio.decode("utf-8").strip()
        except UnicodeDecodeError as exc:
            raise UnintelligibleAudio("mock audio must be UTF-8 text") from exc
        if not text:
            raise UnintelligibleAudio("empty audio")
        return text

    config = config or RemoteConfig()
    response = _remote_post(
        config.transcription_url,
        config,
        files={"file": ("audio", audio)},
    )
    text = response.json().get("text", "").strip()
    if not text:
        raise UnintelligibleAudio("remote transcription returned no text")
    return text


# ---------------------------------------------------------------------------
# Render vs prompt verification
# ---------------------------------------------------------------------------

_VERIFY_TEMPLATE = (
    "The image shows three orthographic views of an object assembled from "
    "cubic modules. Does it resemble: {prompt!r}? Reply with JSON "
    '{{"matches": bool, "score": 0..1, "rationale": str}}.'
)


def verify_resemblance(
    render: bytes,
    prompt: str,
    provider: str = "mock",
    config: RemoteConfig | None = None,
    verdicts: dict[str, tuple[bool, float]] | None = None,
) -> ResemblanceVerdict:
    """Judge whether a render matches the prompt.

    Mock: configured per-keyword verdicts (scores clamped into [0, 1]),
    defaulting to a confident match. Remote: vision API call with a fixed
    instruction template.
    """
    _check_provider(provider)
    if not render:
        raise ValueError("render must be nonempty")
    if provider == "mock":
        matches, score = True, 0.9
        rationale = "mock verdict: default match"
        if verdicts:
            text = prompt.lower()
            for keyword in sorted(verdicts):
                if keyword in text:
                    matches, score = verdicts[keyword]
                    rationale = f"mock verdict configured for {keyword!r}"
                    break
        return ResemblanceVerdict(
            matches=bool(matches), score=min(1.0, max(0.0, float(score))), rationale=rationale
        )

    config = config or RemoteConfig()
    response = _remote_post(
        config.verification_url,
        config,
        json={
            "prompt": _VERIFY_TEMPLATE.format(prompt=prompt),
            "image_b64": base64.b64encode(render).decode("ascii"),
        },
    )
    payload = response.json()
    return ResemblanceVerdict(
        matches=bool(payload["matches"]),
        score=min(1.0, max(0.0, float(payload["score"]))),
        rationale=str(payload.get("rationale", "")),
    )

"""Remote vision-language backend for sketch interpretation.

The interpreter sends one image (camera frame with the sketch stamped on
it) plus the composed prompt, and expects a small JSON object back.  The
transport is swappable: :class:`HttpTransport` talks to an OpenAI-style
chat endpoint, :class:`StubTransport` replays canned replies for tests
and headless runs.
"""

from __future__ import annotations

import base64
import os
import time
from dataclasses import dataclass, field

from .interpret import (
    InterpretationResult,
    InterpretationSource,
    ParseError,
    PromptBundle,
    parse_response,
)

__all__ = [
    "HttpTransport",
    "RemoteEndpoint",
    "RemoteRequest",
    "RemoteTimeout",
    "StubTransport",
    "TransportError",
    "interpret_remote",
]


class TransportError(RuntimeError):
    """The endpoint could not be reached or answered with an error."""


class RemoteTimeout(TransportError):
    """The call (including any retry) did not finish inside the deadline."""


@dataclass(frozen=True)
class RemoteEndpoint:
    """Where and how to reach the interpretation model."""

    url: str
    model: str = "gpt-4o"
    api_key_env: str = "SKETCHTELEOP_API_KEY"
    timeout_s: float = 30.0


@dataclass(frozen=True)
class RemoteRequest:
    """One outbound call: the composited image plus the prompt sections."""

    image_png: bytes
    bundle: PromptBundle
    extra_instruction: str | None = None
    timeout_s: float = 30.0

    def user_text(self) -> str:
        parts = [
            self.bundle.examples_text,
            self.bundle.request_text,
            self.bundle.dynamic_text,
        ]
        if self.extra_instruction:
            parts.append(self.extra_instruction)
        return "\n\n".join(p.strip() for p in parts if p and p.strip())


_REFORMAT_NOTE = (
    "Your previous reply contained no JSON object. Reply again with only the "
    'JSON object {"task": "...", "sketch_shape": "..."} and nothing else.'
)


class HttpTransport:
    """POSTs an OpenAI-style chat completion request with one image."""

    def __init__(self, endpoint: RemoteEndpoint):
        self.endpoint = endpoint

    def __call__(self, request: RemoteRequest) -> str:
        import requests

        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.endpoint.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        image_b64 = base64.b64encode(request.image_png).decode("ascii")
        payload = {
            "model": self.endpoint.model,
            "messages": [
                {"role": "system", "content": request.bundle.system_text},
                {
                    "role": "user",
                    "content": [
                        {"type": "text", "text": request.user_text()},
                        {
                            "type": "image_url",
                            "image_url": {"url": f"data:image/png;base64,{image_b64}"},
                        },
                    ],
                },
            ],
        }
        try:
            response = requests.post(
                self.endpoint.url, json=payload, headers=headers, timeout=request.timeout_s
            )
        except requests.Timeout as exc:
            raise RemoteTimeout(f"no reply within {request.timeout_s:.1f}s") from exc
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if response.status_code != 200:
            raise TransportError(f"endpoint answered {response.status_code}: {response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportError("endpoint reply missing choices[0].message.content") from exc


@dataclass
class StubTransport:
    """Canned replies for tests and headless scenario runs.

    Replies are popped in order; the last one repeats once the list runs
    out.  ``delay_s`` models call latency without sleeping: a call whose
    budget is below the delay raises :class:`RemoteTimeout` immediately.
    Every request is recorded for assertions.
    """

    replies: list[str]
    delay_s: float = 0.0
    requests: list[RemoteRequest] = field(default_factory=list)
    _cursor: int = 0

    def __call__(self, request: RemoteRequest) -> str:
        self.requests.append(request)
        if self.delay_s > request.timeout_s:
            raise RemoteTimeout(f"no reply within {request.timeout_s:.1f}s")
        if not self.replies:
            raise TransportError("stub has no replies configured")
        index = min(self._cursor, len(self.replies) - 1)
        self._cursor += 1
        return self.replies[index]


def interpret_remote(
    image_png: bytes,
    bundle: PromptBundle,
    transport,
    *,
    timeout_s: float = 30.0,
    clock=time.monotonic,
) -> InterpretationResult:
    """Ask the remote model once, retrying a single time on a bad reply.

    The retry appends a reformat instruction and must fit inside the same
    overall deadline; parse errors on the second reply propagate.
    """
    deadline = clock() + timeout_s
    raw = transport(RemoteRequest(image_png, bundle, None, timeout_s))
    try:
        return parse_response(raw, InterpretationSource.REMOTE)
    except ParseError:
        remaining = deadline - clock()
        if remaining <= 0.0:
            raise RemoteTimeout(f"deadline of {timeout_s:.1f}s spent before retry") from None
        raw = transport(RemoteRequest(image_png, bundle, _REFORMAT_NOTE, remaining))
        return parse_response(raw, InterpretationSource.REMOTE)

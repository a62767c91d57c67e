"""HTTP plumbing: polite rate limiting, retries, and a swappable transport.

The clock, sleeper, and RNG are injectable so rate and retry behavior is
unit-testable with a fake clock, and the transport is a small protocol so
recorded fixtures can stand in for the network.
"""

from __future__ import annotations

import random
import time
from typing import Any, Callable, Protocol

import requests

DEFAULT_TIMEOUT = 30.0
MAX_ATTEMPTS = 5
BACKOFF_BASE = 1.0
BACKOFF_CAP = 60.0
RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


class TransientHttpError(RuntimeError):
    def __init__(self, message: str, status: int | None = None) -> None:
        super().__init__(message)
        self.status = status


class PermanentHttpError(RuntimeError):
    def __init__(self, message: str, status: int | None = None) -> None:
        super().__init__(message)
        self.status = status


class Transport(Protocol):
    def get(self, url: str, params: dict, headers: dict) -> tuple[int, Any]:
        """Return (status code, decoded JSON body). Raise TransientHttpError
        for connection-level failures."""
        ...


class RateLimiter:
    """Spaces requests at least 1/rate seconds apart.

    Even spacing bounds the count in any window of length W by
    ceil(W * rate), which satisfies a per-second politeness cap.
    """

    def __init__(
        self,
        rate_per_second: float,
        clock: Callable[[], float] = time.monotonic,
        sleeper: Callable[[float], None] = time.sleep,
    ) -> None:
        if rate_per_second <= 0:
            raise ValueError("rate must be positive")
        self.interval = 1.0 / rate_per_second
        self._clock = clock
        self._sleep = sleeper
        self._next_allowed = clock()

    def wait(self) -> None:
        now = self._clock()
        if now < self._next_allowed:
            self._sleep(self._next_allowed - now)
            now = self._next_allowed
        self._next_allowed = now + self.interval


class RequestsTransport:
    def __init__(self, user_agent: str, timeout: float = DEFAULT_TIMEOUT) -> None:
        self._session = requests.Session()
        self._session.headers["User-Agent"] = user_agent
        self._timeout = timeout

    def get(self, url: str, params: dict, headers: dict) -> tuple[int, Any]:
        try:
            resp = self._session.get(
                url, params=params, headers=headers, timeout=self._timeout
            )
        except requests.RequestException as exc:
            raise TransientHttpError(f"GET {url}: {exc}") from exc
        try:
            body = resp.json() if resp.content else None
        except ValueError:
            body = None
        return resp.status_code, body


def fetch_json(
    transport: Transport,
    limiter: RateLimiter,
    url: str,
    params: dict | None = None,
    headers: dict | None = None,
    max_attempts: int = MAX_ATTEMPTS,
    backoff_base: float = BACKOFF_BASE,
    sleeper: Callable[[float], None] = time.sleep,
    rng: random.Random | None = None,
) -> Any:
    """GET with rate limiting and jittered exponential backoff.

    Retries transient statuses (429/5xx) and connection errors up to
    max_attempts; other non-2xx statuses fail immediately.
    """
    params = params or {}
    headers = headers or {}
    rng = rng or random.Random()
    last: Exception | None = None
    for attempt in range(1, max_attempts + 1):
        limiter.wait()
        try:
            status, body = transport.get(url, params, headers)
        except TransientHttpError as exc:
            last = exc
        else:
            if 200 <= status < 300:
                return body
            if status in RETRYABLE_STATUS:
                last = TransientHttpError(f"GET {url}: HTTP {status}", status)
            else:
                raise PermanentHttpError(f"GET {url}: HTTP {status}", status)
        if attempt < max_attempts:
            delay = min(BACKOFF_CAP, backoff_base * (2.0 ** (attempt - 1)))
            sleeper(delay * (0.5 + 0.5 * rng.random()))
    raise TransientHttpError(
        f"GET {url}: giving up after {max_attempts} attempts ({last})",
        getattr(last, "status", None),
    )

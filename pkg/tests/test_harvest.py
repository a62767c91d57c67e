"""Rate limiting, retry/backoff, venue resolution, pagination, backfill.

Everything runs against a scripted in-memory transport and a fake clock;
no test touches the network or real time.
"""

from __future__ import annotations

import json
import random

import pytest

from bibatlas.harvest.client import (
    backfill_abstracts,
    decode_inverted_index,
    fetch_venue,
    parse_work,
    resolve_venue,
)
from bibatlas.harvest.models import (
    AmbiguousMatchError,
    Checkpoint,
    NoMatchError,
    VenueSpec,
)
from bibatlas.harvest.transport import (
    PermanentHttpError,
    RateLimiter,
    TransientHttpError,
    fetch_json,
)

from conftest import record


class FakeClock:
    def __init__(self) -> None:
        self.t = 0.0

    def __call__(self) -> float:
        return self.t

    def advance(self, dt: float) -> None:
        self.t += dt


class FakeTransport:
    """Pops one scripted (status, body) tuple or exception per request."""

    def __init__(self, script) -> None:
        self.script = list(script)
        self.calls: list[tuple[str, dict, dict]] = []

    def get(self, url, params, headers):
        self.calls.append((url, dict(params), dict(headers)))
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


@pytest.fixture
def clock():
    return FakeClock()


def _limiter(clock, rate=1000.0):
    return RateLimiter(rate, clock=clock, sleeper=clock.advance)


class TestRateLimiter:
    def test_first_call_free_then_spaced(self, clock):
        sleeps = []

        def sleeper(d):
            sleeps.append(d)
            clock.advance(d)

        limiter = RateLimiter(4.0, clock=clock, sleeper=sleeper)
        limiter.wait()
        limiter.wait()
        limiter.wait()
        assert sleeps == [0.25, 0.25]

    def test_slow_caller_never_sleeps(self, clock):
        sleeps = []
        limiter = RateLimiter(2.0, clock=clock, sleeper=sleeps.append)
        limiter.wait()
        clock.advance(10.0)
        limiter.wait()
        assert sleeps == []

    def test_spacing_invariant_under_bursty_arrivals(self, clock):
        def sleeper(d):
            clock.advance(d)

        limiter = RateLimiter(5.0, clock=clock, sleeper=sleeper)
        rng = random.Random(3)
        stamps = []
        for _ in range(50):
            clock.advance(rng.random() * 0.4)
            limiter.wait()
            stamps.append(clock.t)
        gaps = [b - a for a, b in zip(stamps, stamps[1:])]
        assert min(gaps) >= 0.2 - 1e-12

    def test_rate_must_be_positive(self, clock):
        with pytest.raises(ValueError):
            RateLimiter(0.0, clock=clock)


class TestFetchJson:
    def test_success_first_attempt(self, clock):
        transport = FakeTransport([(200, {"ok": 1})])
        body = fetch_json(transport, _limiter(clock), "https://x/works")
        assert body == {"ok": 1}
        assert len(transport.calls) == 1

    @pytest.mark.parametrize("status", [429, 500, 502, 503, 504])
    def test_retryable_status_then_success(self, clock, status):
        transport = FakeTransport([(status, None), (200, {"ok": 2})])
        naps = []
        body = fetch_json(
            transport,
            _limiter(clock),
            "https://x/works",
            sleeper=naps.append,
            rng=random.Random(0),
        )
        assert body == {"ok": 2}
        assert len(naps) == 1
        assert 0.5 <= naps[0] <= 1.0  # base delay 1.0 with half jitter

    def test_connection_error_retried(self, clock):
        transport = FakeTransport([TransientHttpError("boom"), (200, {"ok": 3})])
        body = fetch_json(
            transport, _limiter(clock), "https://x/works", sleeper=lambda d: None
        )
        assert body == {"ok": 3}

    def test_permanent_status_fails_immediately(self, clock):
        transport = FakeTransport([(404, None)])
        with pytest.raises(PermanentHttpError) as err:
            fetch_json(transport, _limiter(clock), "https://x/works")
        assert err.value.status == 404
        assert len(transport.calls) == 1

    def test_gives_up_after_max_attempts(self, clock):
        transport = FakeTransport([(500, None)] * 3)
        naps = []
        with pytest.raises(TransientHttpError) as err:
            fetch_json(
                transport,
                _limiter(clock),
                "https://x/works",
                max_attempts=3,
                sleeper=naps.append,
            )
        assert "giving up" in str(err.value)
        assert err.value.status == 500
        assert len(transport.calls) == 3
        assert len(naps) == 2  # no backoff after the final attempt

    def test_backoff_doubles_with_jitter_bounds(self, clock):
        transport = FakeTransport([(503, None)] * 4)
        naps = []
        with pytest.raises(TransientHttpError):
            fetch_json(
                transport,
                _limiter(clock),
                "https://x/works",
                max_attempts=4,
                backoff_base=2.0,
                sleeper=naps.append,
            )
        for i, nap in enumerate(naps):
            full = 2.0 * (2.0**i)
            assert full / 2 <= nap <= full

    def test_backoff_is_capped(self, clock):
        transport = FakeTransport([(503, None), (200, {})])
        naps = []
        fetch_json(
            transport,
            _limiter(clock),
            "https://x/works",
            backoff_base=1000.0,
            sleeper=naps.append,
        )
        assert naps[0] <= 60.0


class TestDecodeInvertedIndex:
    def test_orders_tokens_by_position(self):
        index = {"learning": [2], "of": [0], "deep": [1]}
        assert decode_inverted_index(index) == "of deep learning"

    def test_repeated_token(self):
        assert decode_inverted_index({"the": [0, 2], "cat": [1]}) == "the cat the"

    def test_empty_or_missing(self):
        assert decode_inverted_index(None) is None
        assert decode_inverted_index({}) is None


def _source_page(*ids):
    return (200, {"results": [{"id": sid} for sid in ids]})


class TestResolveVenue:
    def test_single_match_fills_source_id(self, clock):
        spec = VenueSpec(slug="venue-a", issns=["1234-5678"])
        transport = FakeTransport([_source_page("S1")])
        resolved = resolve_venue(spec, transport, _limiter(clock))
        assert resolved.source_id == "S1"
        assert spec.source_id is None  # input spec untouched
        url, params, _ = transport.calls[0]
        assert url.endswith("/sources")
        assert params["filter"] == "issn:1234-5678"

    def test_multiple_issns_agreeing_on_one_source(self, clock):
        spec = VenueSpec(slug="venue-a", issns=["1111-1111", "2222-2222"])
        transport = FakeTransport([_source_page("S1"), _source_page("S1")])
        resolved = resolve_venue(spec, transport, _limiter(clock))
        assert resolved.source_id == "S1"
        assert len(transport.calls) == 2

    def test_no_match_raises(self, clock):
        spec = VenueSpec(slug="venue-a", issns=["1234-5678"])
        transport = FakeTransport([_source_page()])
        with pytest.raises(NoMatchError):
            resolve_venue(spec, transport, _limiter(clock))

    def test_ambiguous_match_lists_candidates(self, clock):
        spec = VenueSpec(slug="venue-a", issns=["1111-1111", "2222-2222"])
        transport = FakeTransport([_source_page("S1"), _source_page("S2")])
        with pytest.raises(AmbiguousMatchError) as err:
            resolve_venue(spec, transport, _limiter(clock))
        assert err.value.candidates == ["S1", "S2"]

    def test_mailto_forwarded(self, clock):
        spec = VenueSpec(slug="venue-a", issns=["1234-5678"])
        transport = FakeTransport([_source_page("S1")])
        resolve_venue(spec, transport, _limiter(clock), mailto="me@example.org")
        assert transport.calls[0][1]["mailto"] == "me@example.org"

    def test_venue_spec_requires_issn(self):
        with pytest.raises(ValueError):
            VenueSpec(slug="venue-a", issns=[])


class TestParseWork:
    def test_full_work(self):
        work = {
            "display_name": "Deep Parsing",
            "publication_year": 2019,
            "doi": "10.1/abc",
            "cited_by_count": 7,
            "abstract_inverted_index": {"Good": [0], "work": [1]},
            "authorships": [
                {
                    "author": {
                        "display_name": "Ada Ada",
                        "id": "A1",
                        "orcid": "0000-0001",
                    }
                },
                {"author": {"id": "A2"}},  # nameless: dropped
            ],
        }
        rec = parse_work(work, "venue-a")
        assert rec.title == "Deep Parsing"
        assert rec.year == 2019
        assert rec.doi == "10.1/abc"
        assert rec.venue_slug == "venue-a"
        assert rec.citations == {"primary-index": 7}
        assert rec.abstract == "Good work"
        assert len(rec.authors) == 1
        assert rec.authors[0].display_name == "Ada Ada"
        assert rec.authors[0].upstream_id == "A1"
        assert rec.authors[0].orcid == "0000-0001"

    def test_title_key_fallback_and_plain_abstract(self):
        rec = parse_work(
            {"title": "Old Shape", "publication_year": 2001, "abstract": "plain"},
            "venue-b",
        )
        assert rec.title == "Old Shape"
        assert rec.abstract == "plain"
        assert rec.citations == {}

    @pytest.mark.parametrize(
        "work",
        [
            {"publication_year": 2001},
            {"display_name": "No Year"},
            {"display_name": "", "publication_year": 2001},
        ],
    )
    def test_missing_title_or_year_rejected(self, work):
        with pytest.raises(ValueError):
            parse_work(work, "venue-a")


def _work(title, year=2015):
    return {
        "display_name": title,
        "publication_year": year,
        "authorships": [{"author": {"display_name": "Ada Ada"}}],
        "cited_by_count": 1,
    }


def _page(titles, next_cursor):
    return (200, {"meta": {"next_cursor": next_cursor}, "results": [_work(t) for t in titles]})


def _titles(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line)["title"] for line in fh]


class TestFetchVenue:
    def _spec(self):
        return VenueSpec(slug="venue-a", issns=["1234-5678"], source_id="S1")

    def test_paginates_to_completion(self, clock, tmp_path):
        transport = FakeTransport(
            [
                _page(["t1", "t2"], "c2"),
                _page(["t3"], "c3"),
                _page(["t4", "t5"], None),
            ]
        )
        ckpt = fetch_venue(
            self._spec(),
            Checkpoint(venue_slug="venue-a"),
            transport,
            _limiter(clock),
            tmp_path / "raw.jsonl",
            tmp_path / "ckpt.json",
        )
        assert ckpt.completed
        assert ckpt.pages_fetched == 3
        assert ckpt.records_fetched == 5
        assert ckpt.skipped_pages == 0
        assert _titles(tmp_path / "raw.jsonl") == ["t1", "t2", "t3", "t4", "t5"]
        assert [c[1]["cursor"] for c in transport.calls] == ["*", "c2", "c3"]
        saved = Checkpoint.load(tmp_path / "ckpt.json")
        assert saved.completed and saved.records_fetched == 5

    def test_unparseable_works_skipped(self, clock, tmp_path):
        page = (
            200,
            {
                "meta": {"next_cursor": None},
                "results": [_work("good"), {"display_name": "no year"}],
            },
        )
        ckpt = fetch_venue(
            self._spec(),
            Checkpoint(venue_slug="venue-a"),
            FakeTransport([page]),
            _limiter(clock),
            tmp_path / "raw.jsonl",
            tmp_path / "ckpt.json",
        )
        assert ckpt.records_fetched == 1
        assert _titles(tmp_path / "raw.jsonl") == ["good"]

    def test_malformed_page_skipped_and_continues(self, clock, tmp_path):
        transport = FakeTransport(
            [
                (200, {"meta": {"next_cursor": "c2"}}),  # no results key
                _page(["t1"], None),
            ]
        )
        ckpt = fetch_venue(
            self._spec(),
            Checkpoint(venue_slug="venue-a"),
            transport,
            _limiter(clock),
            tmp_path / "raw.jsonl",
            tmp_path / "ckpt.json",
        )
        assert ckpt.completed
        assert ckpt.skipped_pages == 1
        assert _titles(tmp_path / "raw.jsonl") == ["t1"]

    def test_malformed_final_page_stops_incomplete(self, clock, tmp_path):
        transport = FakeTransport([(200, {"meta": {}})])
        ckpt = fetch_venue(
            self._spec(),
            Checkpoint(venue_slug="venue-a"),
            transport,
            _limiter(clock),
            tmp_path / "raw.jsonl",
            tmp_path / "ckpt.json",
        )
        assert not ckpt.completed
        assert ckpt.skipped_pages == 1

    def test_empty_results_complete_even_with_cursor(self, clock, tmp_path):
        transport = FakeTransport([(200, {"meta": {"next_cursor": "more"}, "results": []})])
        ckpt = fetch_venue(
            self._spec(),
            Checkpoint(venue_slug="venue-a"),
            transport,
            _limiter(clock),
            tmp_path / "raw.jsonl",
            tmp_path / "ckpt.json",
        )
        assert ckpt.completed
        assert ckpt.records_fetched == 0
        assert len(transport.calls) == 1

    def test_crash_resume_no_duplicates(self, clock, tmp_path):
        out, cp = tmp_path / "raw.jsonl", tmp_path / "ckpt.json"

        def crash_after_two(pages):
            if pages == 2:
                raise RuntimeError("power loss")

        transport = FakeTransport(
            [_page(["t1", "t2"], "c2"), _page(["t3", "t4"], "c3"), _page(["t5"], None)]
        )
        with pytest.raises(RuntimeError):
            fetch_venue(
                self._spec(),
                Checkpoint(venue_slug="venue-a"),
                transport,
                _limiter(clock),
                out,
                cp,
                page_hook=crash_after_two,
            )
        # output may outrun the durable checkpoint; resume must trim it
        with open(out, "a", encoding="utf-8") as fh:
            fh.write('{"title": "torn write"}\n')
        resumed = Checkpoint.load(cp)
        assert resumed.records_fetched == 4 and resumed.cursor == "c3"
        transport2 = FakeTransport([_page(["t5"], None)])
        ckpt = fetch_venue(
            self._spec(), resumed, transport2, _limiter(clock), out, cp
        )
        assert ckpt.completed and ckpt.records_fetched == 5
        assert _titles(out) == ["t1", "t2", "t3", "t4", "t5"]
        assert [c[1]["cursor"] for c in transport2.calls] == ["c3"]

    def test_completed_checkpoint_is_a_no_op(self, clock, tmp_path):
        transport = FakeTransport([])
        ckpt = fetch_venue(
            self._spec(),
            Checkpoint(venue_slug="venue-a", completed=True),
            transport,
            _limiter(clock),
            tmp_path / "raw.jsonl",
            tmp_path / "ckpt.json",
        )
        assert ckpt.completed and transport.calls == []

    def test_guard_rails(self, clock, tmp_path):
        args = (FakeTransport([]), _limiter(clock), tmp_path / "o.jsonl", tmp_path / "c.json")
        with pytest.raises(ValueError, match="unresolved"):
            fetch_venue(
                VenueSpec(slug="venue-a", issns=["1"]),
                Checkpoint(venue_slug="venue-a"),
                *args,
            )
        with pytest.raises(ValueError, match="different venue"):
            fetch_venue(self._spec(), Checkpoint(venue_slug="venue-b"), *args)

    def test_resume_with_missing_or_short_output_rejected(self, clock, tmp_path):
        args = (FakeTransport([]), _limiter(clock))
        with pytest.raises(ValueError, match="missing"):
            fetch_venue(
                self._spec(),
                Checkpoint(venue_slug="venue-a", records_fetched=3, cursor="c2"),
                *args,
                tmp_path / "absent.jsonl",
                tmp_path / "c.json",
            )
        short = tmp_path / "short.jsonl"
        short.write_text('{"title": "t1"}\n', encoding="utf-8")
        with pytest.raises(ValueError, match="expects"):
            fetch_venue(
                self._spec(),
                Checkpoint(venue_slug="venue-a", records_fetched=3, cursor="c2"),
                *args,
                short,
                tmp_path / "c.json",
            )


class TestBackfillAbstracts:
    def _records(self):
        r1 = record("Needs Abstract", doi="10.1/a", venue="venue-a")
        r2 = record("Has Abstract", doi="10.1/b", venue="venue-a")
        r2.abstract = "already here"
        r3 = record("No Doi", venue="venue-a")
        return [r1, r2, r3]

    def test_fills_only_missing_with_doi(self, clock, monkeypatch):
        monkeypatch.delenv("IEEE_API_KEY", raising=False)
        records = self._records()
        transport = FakeTransport([(200, {"articles": [{"abstract": "found text"}]})])
        stats = backfill_abstracts(
            records, transport, _limiter(clock), api_key="k123"
        )
        assert records[0].abstract == "found text"
        assert records[1].abstract == "already here"
        assert records[2].abstract is None
        assert stats == {
            "venue-a": {"queried": 1, "filled": 1, "misses": 0, "partial": False}
        }
        _, params, _ = transport.calls[0]
        assert params == {"doi": "10.1/a", "apikey": "k123"}

    def test_miss_counted(self, clock):
        records = [record("Needs Abstract", doi="10.1/a")]
        transport = FakeTransport([(200, {"articles": []})])
        stats = backfill_abstracts(records, transport, _limiter(clock), api_key="k")
        assert stats["venue-a"]["misses"] == 1
        assert records[0].abstract is None

    def test_ceiling_marks_partial(self, clock):
        records = [
            record(f"Paper {i}", doi=f"10.1/{i}", venue="venue-a") for i in range(3)
        ]
        transport = FakeTransport([(200, {"articles": []})] * 2)
        stats = backfill_abstracts(
            records, transport, _limiter(clock), api_key="k", ceiling=2
        )
        assert stats["venue-a"]["queried"] == 2
        assert stats["venue-a"]["partial"] is True
        assert len(transport.calls) == 2

    def test_key_from_environment(self, clock, monkeypatch):
        monkeypatch.setenv("IEEE_API_KEY", "env-key")
        transport = FakeTransport([(200, {"articles": []})])
        backfill_abstracts(
            [record("Needs Abstract", doi="10.1/a")], transport, _limiter(clock)
        )
        assert transport.calls[0][1]["apikey"] == "env-key"

    def test_missing_key_rejected(self, clock, monkeypatch):
        monkeypatch.delenv("IEEE_API_KEY", raising=False)
        with pytest.raises(ValueError, match="API key"):
            backfill_abstracts([], FakeTransport([]), _limiter(clock))

"""Config defaults, deep-merge validation, and stage-scoped digests."""

from __future__ import annotations

import pytest

from bibatlas.pipeline.config import (
    STAGE_SCOPES,
    ConfigError,
    load_config,
)
from bibatlas.pipeline.stages import STAGE_ORDER


def _write(tmp_path, text):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    return path


class TestLoading:
    def test_defaults_without_file(self):
        cfg = load_config()
        assert cfg["seed"] == 1337
        assert cfg["venues"] == []
        assert cfg["embedding.weights"] == {
            "specter": 0.55,
            "concepts": 0.30,
            "venue_lda": 0.15,
        }
        assert cfg["phantom.k_list"] == [5, 10, 20]
        assert cfg["communities.resolutions.multiplex"] == 0.5

    def test_empty_file_is_defaults(self, tmp_path):
        cfg = load_config(_write(tmp_path, ""))
        assert cfg.doc == load_config().doc

    def test_deep_merge_keeps_siblings(self, tmp_path):
        cfg = load_config(_write(tmp_path, "seed: 5\ncommunities:\n  seed: 7\n"))
        assert cfg["seed"] == 5
        assert cfg["communities.seed"] == 7
        assert cfg["communities.min_island_size"] == 10  # untouched sibling
        assert cfg["dedup.ratio_threshold"] == 95

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "nope.yaml")

    def test_invalid_yaml(self, tmp_path):
        with pytest.raises(ConfigError, match="invalid YAML"):
            load_config(_write(tmp_path, "a: [unclosed"))

    def test_non_mapping_top_level(self, tmp_path):
        with pytest.raises(ConfigError, match="mapping"):
            load_config(_write(tmp_path, "- 1\n- 2\n"))


class TestValidation:
    def test_unknown_top_level_key(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown config key: stranger"):
            load_config(_write(tmp_path, "stranger: 1\n"))

    def test_unknown_nested_key_names_full_path(self, tmp_path):
        with pytest.raises(ConfigError, match="dedup.nope"):
            load_config(_write(tmp_path, "dedup:\n  nope: 2\n"))

    def test_scalar_where_mapping_expected(self, tmp_path):
        with pytest.raises(ConfigError, match="expected a mapping"):
            load_config(_write(tmp_path, "dedup: 5\n"))

    def test_valid_venues_normalized(self, tmp_path):
        cfg = load_config(
            _write(
                tmp_path,
                "venues:\n"
                "  - slug: venue-a\n"
                "    issns: [1234-5678]\n"
                "  - slug: venue-b\n"
                "    issns: ['2222-2222']\n"
                "    source_id: S9\n",
            )
        )
        assert cfg["venues"] == [
            {"slug": "venue-a", "issns": ["1234-5678"]},
            {"slug": "venue-b", "issns": ["2222-2222"], "source_id": "S9"},
        ]

    @pytest.mark.parametrize(
        "venues_yaml, message",
        [
            ("venues: 3\n", "expected a list"),
            ("venues:\n  - slug: a\n", "needs slug and issns"),
            ("venues:\n  - slug: a\n    issns: []\n", "at least one ISSN"),
            (
                "venues:\n"
                "  - {slug: a, issns: [1]}\n"
                "  - {slug: a, issns: [2]}\n",
                "duplicate slug",
            ),
            ("venues:\n  - {slug: a, issns: [1], color: red}\n", "unknown keys"),
        ],
    )
    def test_bad_venues(self, tmp_path, venues_yaml, message):
        with pytest.raises(ConfigError, match=message):
            load_config(_write(tmp_path, venues_yaml))

    @pytest.mark.parametrize(
        "override",
        [
            "dedup:\n  ratio_threshold: 101\n",
            "multiplex:\n  alpha: 1.5\n",
            "multiplex:\n  tau_s: -2\n",
            "trajectories:\n  tau_eta: 2.0\n",
            "seed: -1\n",
            "seed: true\n",
            "graphs:\n  base_threshold: -2\n",
            "export:\n  chunk_bytes: nope\n",
            "phantom:\n  k_list: []\n",
            "phantom:\n  k_list: [0, 5]\n",
            "phantom:\n  k_list: 10\n",
            "phantom:\n  horizon: 2019\n",
            "embedding:\n  weights:\n    specter: 0\n",
            "embedding:\n  weights:\n    concepts: -0.2\n",
        ],
    )
    def test_bad_numbers(self, tmp_path, override):
        with pytest.raises(ConfigError):
            load_config(_write(tmp_path, override))

    def test_getitem_unknown_path(self):
        cfg = load_config()
        with pytest.raises(ConfigError, match="unknown config key"):
            cfg["dedup.missing"]


class TestDigests:
    def test_digest_deterministic_and_sensitive(self, tmp_path):
        a = load_config()
        b = load_config(_write(tmp_path, ""))
        assert a.digest() == b.digest()
        assert a.digest() != a.with_seed(7).digest()

    def test_every_stage_has_a_scope(self):
        assert set(STAGE_SCOPES) == set(STAGE_ORDER)

    def test_scope_digest_isolates_stages(self, tmp_path):
        base = load_config()
        tweaked = load_config(_write(tmp_path, "communities:\n  seed: 7\n"))
        assert base.scope_digest("communities") != tweaked.scope_digest("communities")
        for stage in STAGE_ORDER:
            if stage != "communities":
                assert base.scope_digest(stage) == tweaked.scope_digest(stage)

    def test_seed_scope_membership(self):
        base = load_config()
        reseeded = base.with_seed(2024)
        changed = {s for s in STAGE_ORDER if base.scope_digest(s) != reseeded.scope_digest(s)}
        assert changed == {"graphs", "phantom", "export"}

    def test_unknown_stage_rejected(self):
        with pytest.raises(ConfigError, match="unknown stage"):
            load_config().scope_digest("mystery")

    def test_with_seed_copies(self):
        base = load_config()
        other = base.with_seed(99)
        assert other["seed"] == 99
        assert base["seed"] == 1337
        assert other.doc is not base.doc

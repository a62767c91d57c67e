"""Keyword labels: hand-checked TF-IDF scores, tie order, and exemplars."""

import math

from bibatlas.communities.labels import STOPWORDS, keyword_labels
from bibatlas.communities.leiden import Partition

LN2 = math.log(2.0)


def _partition(assignment):
    return Partition(
        assignment=assignment, layer="test", resolution=1.0, seed=42, quality=0.0
    )


class TestScoring:
    def _fixture(self, mkpaper):
        partition = _partition({"u1": 0, "u2": 0, "v1": 1, "v2": 1})
        papers = [
            mkpaper("pA", ["u1"], title="Graph Clustering Methods"),
            mkpaper("pB", ["u2", "u1"], title="Graph Spectra"),
            mkpaper("pC", ["v1"], title="Neural Parsing"),
            mkpaper("pD", ["v2"], title="Neural Graph Parsing"),
        ]
        return partition, papers

    def test_hand_computed_tfidf(self, mkpaper):
        partition, papers = self._fixture(mkpaper)
        labels = keyword_labels(partition, papers)
        # community 0: "graph" appears in both communities, idf ln(2/2)=0;
        # everything else scores 1*ln2 and ties break lexicographically
        assert labels[0].top_terms == [
            ("clustering", LN2),
            ("clustering methods", LN2),
            ("graph clustering", LN2),
            ("graph spectra", LN2),
            ("methods", LN2),
            ("spectra", LN2),
        ]
        assert labels[1].top_terms == [
            ("neural", 2 * LN2),
            ("parsing", 2 * LN2),
            ("graph parsing", LN2),
            ("neural graph", LN2),
            ("neural parsing", LN2),
            ("graph", 0.0),
        ]

    def test_exemplars_by_paper_count_then_key(self, mkpaper):
        partition, papers = self._fixture(mkpaper)
        labels = keyword_labels(partition, papers)
        assert labels[0].exemplar_authors == ["u1", "u2"]
        assert labels[1].exemplar_authors == ["v1", "v2"]

    def test_shared_paper_counts_in_both_communities(self, mkpaper):
        partition, papers = self._fixture(mkpaper)
        papers.append(mkpaper("pE", ["u1", "v1"], title="Bridging Token"))
        labels = keyword_labels(partition, papers)
        # "bridging" lands in both communities, so its idf is zero
        for cid in (0, 1):
            scores = dict(labels[cid].top_terms)
            assert scores.get("bridging", 0.0) == 0.0

    def test_top_n_cut(self, mkpaper):
        partition, papers = self._fixture(mkpaper)
        labels = keyword_labels(partition, papers, top_n=2)
        assert labels[1].top_terms == [("neural", 2 * LN2), ("parsing", 2 * LN2)]


class TestTokenization:
    def test_stopwords_removed_before_bigrams(self, mkpaper):
        partition = _partition({"a": 0, "b": 1})
        papers = [
            mkpaper("p1", ["a"], title="Graph of Clustering"),
            mkpaper("p2", ["b"], title="Other Topic"),
        ]
        labels = keyword_labels(partition, papers)
        terms = [t for t, _ in labels[0].top_terms]
        # the stopword "of" vanishes and the bigram bridges across it
        assert "graph clustering" in terms
        assert all("of" not in t.split() for t in terms)

    def test_boilerplate_stopwords(self):
        assert {"paper", "study", "analysis"} <= STOPWORDS
        assert "studies" not in STOPWORDS


class TestEdgeCases:
    def test_single_community_falls_back_to_frequency(self, mkpaper):
        partition = _partition({"a": 0, "b": 0})
        papers = [
            mkpaper("p1", ["a"], title="Quantum Widgets"),
            mkpaper("p2", ["b"], title="Quantum Gadgets"),
        ]
        labels = keyword_labels(partition, papers)
        assert labels[0].top_terms[0] == ("quantum", 2.0)

    def test_unknown_authors_ignored(self, mkpaper):
        partition = _partition({"a": 0})
        papers = [
            mkpaper("p1", ["a"], title="Known Things"),
            mkpaper("p2", ["stranger"], title="Unknown Things"),
        ]
        labels = keyword_labels(partition, papers)
        terms = [t for t, _ in labels[0].top_terms]
        assert "unknown" not in terms
        assert labels[0].exemplar_authors == ["a"]

    def test_empty_community_still_labeled(self, mkpaper):
        partition = _partition({"a": 0, "lurker": 1})
        papers = [mkpaper("p1", ["a"], title="Solo Work")]
        labels = keyword_labels(partition, papers)
        assert labels[1].top_terms == []
        assert labels[1].exemplar_authors == []

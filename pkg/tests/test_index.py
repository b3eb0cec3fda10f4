import math
import random

import numpy as np
import pytest

from choir.chunking import Chunk
from choir.index import (
    IndexHolder,
    IndexSnapshot,
    build_index,
    hashed_embedder,
    query_chunks,
    rank_documents,
)

from conftest import DEMO_MESSAGES, canonical_ranking


def brute_force_cosine(query_vec, chunks, vectors):
    """Independent oracle: plain-python cosine over every entry."""
    qnorm = math.sqrt(sum(x * x for x in query_vec))
    scored = []
    for chunk, vec in zip(chunks, vectors):
        dot = sum(float(a) * float(b) for a, b in zip(vec, query_vec))
        vnorm = math.sqrt(sum(float(x) * float(x) for x in vec))
        score = dot / (vnorm * qnorm) if vnorm > 0 and qnorm > 0 else 0.0
        scored.append((chunk, score))
    scored.sort(key=lambda cs: (-cs[1], cs[0].doc_path, cs[0].ordinal))
    return scored


def random_snapshot(rng, embedder, n_docs=3, dimension=256):
    words = ["alpha", "beta", "gamma", "delta", "policy", "meeting", "paper",
             "deadline", "server", "backup", "vacation", "onboarding", "zzqx"]
    chunks = []
    for d in range(n_docs):
        path = f"doc{d}.md"
        for o in range(rng.randint(1, 16)):
            text = " ".join(rng.choices(words, k=rng.randint(1, 30))) + "\n"
            chunks.append(Chunk(f"{path}#{o}", path, (), o, text))
    vectors = (
        np.stack([embedder(c.text) for c in chunks])
        if chunks
        else np.zeros((0, dimension))
    )
    return IndexSnapshot(repo_revision="r", chunks=tuple(chunks), vectors=vectors)


class TestEmbedder:
    def test_empty_is_zero(self):
        assert not np.any(hashed_embedder()(""))

    def test_punctuation_only_is_zero(self):
        assert not np.any(hashed_embedder()("?!... --- ***"))

    def test_deterministic(self):
        embed = hashed_embedder()
        t = "We aim for a décision – submit or not"
        assert np.array_equal(embed(t), embed(t))

    def test_unit_norm(self):
        embed = hashed_embedder()
        for text in ("hello world", "a", "paper deadline decision"):
            assert abs(np.linalg.norm(embed(text)) - 1.0) <= 1e-9

    def test_case_insensitive(self):
        embed = hashed_embedder()
        assert np.array_equal(embed("Paper Deadline"), embed("paper deadline"))


class TestQueries:
    def test_exact_text_ranks_first(self):
        embed = hashed_embedder()
        rng = random.Random(1)
        snap = random_snapshot(rng, embed)
        target = snap.chunks[4]
        results = query_chunks(snap, embed, target.text, k=3)
        assert results[0][0].chunk_id == target.chunk_id or results[0][1] >= 1.0 - 1e-9
        assert abs(results[0][1] - 1.0) <= 1e-9

    def test_zero_query_empty_result(self):
        embed = hashed_embedder()
        snap = random_snapshot(random.Random(2), embed)
        assert query_chunks(snap, embed, "", k=5) == []
        assert rank_documents(snap, embed, "") == []

    def test_oracle_equivalence_random_corpora(self):
        embed = hashed_embedder()
        rng = random.Random(42)
        for trial in range(20):
            snap = random_snapshot(rng, embed)
            query = " ".join(rng.choices(["alpha", "paper", "zzqx", "server"], k=3))
            qvec = embed(query)
            expected = brute_force_cosine(qvec, snap.chunks, snap.vectors)
            got = query_chunks(snap, embed, query, k=len(snap.chunks))
            got_ids = [c.chunk_id for c in canonical_ranking(got)]
            exp_ids = [c.chunk_id for c in canonical_ranking(expected)]
            assert got_ids == exp_ids
            for (_, s1), (_, s2) in zip(got, expected):
                assert abs(s1 - s2) <= 1e-9

    def test_no_overlap_query_matches_oracle(self):
        embed = hashed_embedder()
        snap = random_snapshot(random.Random(3), embed)
        qvec = embed("zzqx")
        expected = brute_force_cosine(qvec, snap.chunks, snap.vectors)
        got = query_chunks(snap, embed, "zzqx", k=len(snap.chunks))
        assert [c.chunk_id for c, _ in got] == [c.chunk_id for c, _ in expected]

    def test_k_validated(self):
        embed = hashed_embedder()
        snap = random_snapshot(random.Random(4), embed)
        with pytest.raises(ValueError):
            query_chunks(snap, embed, "alpha", k=0)


class TestRankDocuments:
    def test_doc_score_is_max_chunk_score(self):
        embed = hashed_embedder()
        snap = random_snapshot(random.Random(5), embed)
        query = "alpha policy paper"
        qvec = embed(query)
        oracle = brute_force_cosine(qvec, snap.chunks, snap.vectors)
        best = {}
        for chunk, score in oracle:
            best[chunk.doc_path] = max(best.get(chunk.doc_path, -2.0), score)
        expected = sorted(
            ((p, s) for p, s in best.items() if s > 0.05),
            key=lambda ps: (-ps[1], ps[0]),
        )
        got = rank_documents(snap, embed, query)
        assert [p for p, _ in got] == [p for p, _ in expected]
        for (_, s1), (_, s2) in zip(got, expected):
            assert abs(s1 - s2) <= 1e-9

    def test_threshold_excludes_everything(self):
        embed = hashed_embedder()
        snap = random_snapshot(random.Random(6), embed)
        got = rank_documents(snap, embed, "alpha", relevance_threshold=2.0)
        assert got == []


class TestBuildIndex:
    def test_covers_all_documents(self, fixture_repo):
        embed = hashed_embedder()
        snap = build_index(fixture_repo, embed)
        assert {c.doc_path for c in snap.chunks} == set(fixture_repo.list_documents())
        assert snap.repo_revision == fixture_repo.head()

    def test_rebuild_deterministic(self, fixture_repo):
        embed = hashed_embedder()
        s1 = build_index(fixture_repo, embed)
        s2 = build_index(fixture_repo, embed)
        assert [c.chunk_id for c in s1.chunks] == [c.chunk_id for c in s2.chunks]
        assert np.array_equal(s1.vectors, s2.vectors)

    def test_demo_query_ranks_policy_doc(self, fixture_repo):
        holder = IndexHolder(fixture_repo, hashed_embedder())
        query = " ".join(m.text for m in DEMO_MESSAGES)
        ranked = holder.rank_documents(query)
        assert ranked[0][0] == "echolabs-policy.md"

    def test_holder_rebuild_tags_new_head(self, fixture_repo, tmp_path):
        holder = IndexHolder(fixture_repo, hashed_embedder())
        old = holder.snapshot.repo_revision
        from conftest import manual_commit

        manual_commit(fixture_repo.root, "extra.md", "# Extra\n\nnew doc\n")
        snap = holder.rebuild()
        assert snap.repo_revision != old
        assert snap.repo_revision == fixture_repo.head()
        assert "extra.md" in {c.doc_path for c in snap.chunks}

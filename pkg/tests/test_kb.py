import copy
import json
import os
import stat
import threading

import pytest

from sales_assist import kb as kb_mod
from sales_assist.errors import (
    AlreadySeededError,
    DuplicateProductError,
    QueryError,
    QueryTimeoutError,
    ReferentialIntegrityError,
    SchemaMismatchError,
    SqlRejectedError,
    StorageError,
)
from sales_assist.kb import extract_keywords, init_schema
from sales_assist.synth import generate_synthetic_dataset


class TestInitSchema:
    def test_fresh_store_all_zero(self, tmp_path):
        handle = init_schema(tmp_path / "new.db")
        stats = handle.stats()
        assert stats.as_dict() == {
            "products": 0, "coverage_details": 0, "policy_terms": 0,
            "faqs": 0, "pricing_tiers": 0, "approx_tokens": 0,
        }
        handle.close()

    def test_idempotent(self, tmp_path, canonical_dataset):
        path = tmp_path / "twice.db"
        first = init_schema(path)
        first.seed(canonical_dataset)
        first.close()
        second = init_schema(path)
        assert second.stats().faqs == 2490
        second.close()

    def test_unwritable_path_storage_error(self, tmp_path):
        with pytest.raises(StorageError):
            init_schema(tmp_path / "missing-dir" / "kb.db")

    @pytest.mark.skipif(os.geteuid() == 0, reason="root bypasses permission bits")
    def test_readonly_directory_storage_error(self, tmp_path):
        blocked = tmp_path / "blocked"
        blocked.mkdir()
        os.chmod(blocked, stat.S_IRUSR | stat.S_IXUSR)
        try:
            with pytest.raises(StorageError):
                init_schema(blocked / "kb.db")
        finally:
            os.chmod(blocked, stat.S_IRWXU)

    def test_schema_mismatch(self, tmp_path):
        import sqlite3

        path = tmp_path / "other.db"
        conn = sqlite3.connect(path)
        conn.execute("CREATE TABLE products (id INTEGER, label TEXT)")
        conn.commit()
        conn.close()
        with pytest.raises(SchemaMismatchError):
            init_schema(path)


class TestSeed:
    def test_canonical_counts(self, seeded_kb):
        stats = seeded_kb.stats()
        assert (stats.products, stats.coverage_details, stats.policy_terms,
                stats.faqs, stats.pricing_tiers) == (50, 290, 50, 2490, 162)

    def test_approx_tokens_order_of_magnitude(self, seeded_kb):
        # rough estimate, held to +/-30% of the 350k reference only
        assert 245_000 <= seeded_kb.stats().approx_tokens <= 455_000

    def test_empty_dataset_all_zero(self, fresh_kb):
        empty = {t: [] for t in ("products", "coverage_details", "policy_terms",
                                 "faqs", "pricing_tiers")}
        stats = fresh_kb.seed(empty)
        assert stats.products == 0 and stats.faqs == 0

    def test_dangling_product_id_rejected(self, fresh_kb, canonical_dataset):
        bad = copy.deepcopy(canonical_dataset)
        bad["faqs"][0]["product_id"] = 999
        with pytest.raises(ReferentialIntegrityError):
            fresh_kb.seed(bad)

    def test_duplicate_product_name_rejected(self, fresh_kb, canonical_dataset):
        bad = copy.deepcopy(canonical_dataset)
        bad["products"][1]["name"] = bad["products"][0]["name"]
        with pytest.raises(DuplicateProductError):
            fresh_kb.seed(bad)

    def test_reseed_requires_overwrite(self, tmp_path, canonical_dataset):
        handle = init_schema(tmp_path / "reseed.db")
        handle.seed(canonical_dataset)
        with pytest.raises(AlreadySeededError):
            handle.seed(canonical_dataset)
        stats = handle.seed(generate_synthetic_dataset(3), overwrite=True)
        assert stats.faqs == 2490
        handle.close()

    def test_failed_seed_rolls_back(self, fresh_kb, canonical_dataset):
        bad = copy.deepcopy(canonical_dataset)
        bad["pricing_tiers"][-1]["product_id"] = 12345
        with pytest.raises(ReferentialIntegrityError):
            fresh_kb.seed(bad)
        assert fresh_kb.stats().products == 0


class TestFaqSearch:
    def test_flagship_deductible_question(self, seeded_kb, canonical_dataset):
        hits = seeded_kb.faq_keyword_search(
            "what is the deductible for SecureLife Premium Term 30", limit=5)
        assert hits
        top_faq, top_score = hits[0]
        by_id = {p["id"]: p["name"] for p in canonical_dataset["products"]}
        assert by_id[top_faq.product_id] == "SecureLife Premium Term 30"
        assert top_score >= 4

    def test_all_stopwords_empty(self, seeded_kb):
        assert seeded_kb.faq_keyword_search("the a of", limit=5) == []

    def test_limit_contract(self, seeded_kb):
        hits = seeded_kb.faq_keyword_search("deductible", limit=1)
        assert len(hits) == 1

    def test_deterministic_ordering(self, seeded_kb):
        question = "how do claims work for travel coverage"
        first = seeded_kb.faq_keyword_search(question, limit=10)
        second = seeded_kb.faq_keyword_search(question, limit=10)
        assert first == second

    def test_scores_descending_ties_by_id(self, seeded_kb):
        hits = seeded_kb.faq_keyword_search("deductible renewal premium", limit=20)
        scores = [score for _faq, score in hits]
        assert scores == sorted(scores, reverse=True)
        for (faq_a, score_a), (faq_b, score_b) in zip(hits, hits[1:]):
            if score_a == score_b:
                assert faq_a.id < faq_b.id

    def test_limit_must_be_positive(self, seeded_kb):
        with pytest.raises(ValueError):
            seeded_kb.faq_keyword_search("deductible", limit=0)

    def test_keyword_extraction(self):
        assert extract_keywords("What is the deductible for SecureLife Premium Term 30") == [
            "deductible", "securelife", "premium", "term", "30"]
        assert extract_keywords("THE A OF") == []


class TestReadonlyExecution:
    def test_count_faqs(self, seeded_kb):
        assert seeded_kb.execute_readonly_sql("SELECT COUNT(*) AS n FROM faqs") == [{"n": 2490}]

    def test_life_category_has_five(self, seeded_kb):
        rows = seeded_kb.execute_readonly_sql(
            "SELECT name FROM products WHERE category='Life'")
        assert len(rows) == 5

    def test_row_cap_applied(self, seeded_kb):
        rows = seeded_kb.execute_readonly_sql("SELECT * FROM faqs")
        assert len(rows) == 50

    def test_existing_limit_respected(self, seeded_kb):
        rows = seeded_kb.execute_readonly_sql("SELECT id FROM faqs LIMIT 3")
        assert len(rows) == 3

    def test_write_rejected_defensively(self, seeded_kb):
        with pytest.raises(SqlRejectedError):
            seeded_kb.execute_readonly_sql("DELETE FROM faqs")

    def test_bad_column_query_error(self, seeded_kb):
        with pytest.raises(QueryError) as err:
            seeded_kb.execute_readonly_sql("SELECT nope FROM products")
        assert "nope" in str(err.value)

    def test_runaway_query_times_out(self, seeded_kb):
        runaway = ("WITH RECURSIVE c(x) AS (SELECT 1 UNION ALL SELECT x+1 FROM c) "
                   "SELECT count(*) FROM c")
        with pytest.raises(QueryTimeoutError):
            seeded_kb.execute_readonly_sql(runaway, timeout_s=0.2)

    def test_reads_never_change_stats(self, seeded_kb):
        before = seeded_kb.stats()
        seeded_kb.execute_readonly_sql("SELECT * FROM pricing_tiers")
        seeded_kb.faq_keyword_search("premium cost", limit=3)
        assert seeded_kb.stats() == before

    def test_concurrent_reads(self, seeded_kb):
        errors = []

        def worker():
            try:
                for _ in range(20):
                    seeded_kb.execute_readonly_sql("SELECT COUNT(*) AS n FROM products")
                    seeded_kb.faq_keyword_search("deductible", limit=2)
            except Exception as exc:  # pragma: no cover - failure path
                errors.append(exc)

        threads = [threading.Thread(target=worker) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors


def test_stats_pure(seeded_kb):
    assert seeded_kb.stats() == seeded_kb.stats()


def test_dataset_roundtrip_through_json(tmp_path, canonical_dataset):
    path = tmp_path / "dataset.json"
    path.write_text(json.dumps(canonical_dataset))
    handle = init_schema(tmp_path / "fromjson.db")
    stats = handle.seed(json.loads(path.read_text()))
    assert stats.faqs == 2490
    handle.close()

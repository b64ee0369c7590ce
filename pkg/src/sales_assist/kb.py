"""Embedded insurance knowledge base.

A single-file SQLite store with five tables (products, coverage_details,
policy_terms, faqs, pricing_tiers), atomic seeding from a dataset document,
keyword search over FAQs, and a guarded read-only SQL executor.

All read operations are safe to call concurrently from multiple threads of
one process; a lock serializes access to the underlying connection. Seeding
uses an immediate transaction so concurrent writers fail cleanly instead of
interleaving.
"""

from __future__ import annotations

import logging
import re
import sqlite3
import threading
import time
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any

from . import sqlguard
from .errors import (
    AlreadySeededError,
    DatasetValidationError,
    DuplicateProductError,
    QueryError,
    QueryTimeoutError,
    ReferentialIntegrityError,
    SchemaMismatchError,
    SqlRejectedError,
    StorageError,
)

logger = logging.getLogger(__name__)

DEFAULT_ROW_CAP = 50
DEFAULT_QUERY_TIMEOUT_S = 2.0
_PROGRESS_HANDLER_OPS = 2000


@dataclass(frozen=True)
class Product:
    id: int
    name: str
    category: str
    description: str


@dataclass(frozen=True)
class CoverageDetail:
    id: int
    product_id: int
    coverage_type: str
    amount: float
    deductible: float
    conditions: str


@dataclass(frozen=True)
class PolicyTerm:
    id: int
    product_id: int
    term_length: str
    renewal_policy: str
    cancellation_policy: str


@dataclass(frozen=True)
class Faq:
    id: int
    product_id: int
    question: str
    answer: str


@dataclass(frozen=True)
class PricingTier:
    id: int
    product_id: int
    tier_name: str
    monthly_premium: float
    annual_premium: float
    age_min: int
    age_max: int


@dataclass(frozen=True)
class KbStats:
    products: int
    coverage_details: int
    policy_terms: int
    faqs: int
    pricing_tiers: int
    approx_tokens: int

    def as_dict(self) -> dict[str, int]:
        return {
            "products": self.products,
            "coverage_details": self.coverage_details,
            "policy_terms": self.policy_terms,
            "faqs": self.faqs,
            "pricing_tiers": self.pricing_tiers,
            "approx_tokens": self.approx_tokens,
        }


_RECORD_TYPES = {
    "products": Product,
    "coverage_details": CoverageDetail,
    "policy_terms": PolicyTerm,
    "faqs": Faq,
    "pricing_tiers": PricingTier,
}

_SCHEMA = {
    "products": """
        CREATE TABLE IF NOT EXISTS products (
            id INTEGER PRIMARY KEY,
            name TEXT NOT NULL UNIQUE,
            category TEXT NOT NULL,
            description TEXT NOT NULL
        )""",
    "coverage_details": """
        CREATE TABLE IF NOT EXISTS coverage_details (
            id INTEGER PRIMARY KEY,
            product_id INTEGER NOT NULL REFERENCES products(id),
            coverage_type TEXT NOT NULL,
            amount REAL NOT NULL CHECK (amount >= 0),
            deductible REAL NOT NULL CHECK (deductible >= 0),
            conditions TEXT NOT NULL
        )""",
    "policy_terms": """
        CREATE TABLE IF NOT EXISTS policy_terms (
            id INTEGER PRIMARY KEY,
            product_id INTEGER NOT NULL REFERENCES products(id),
            term_length TEXT NOT NULL,
            renewal_policy TEXT NOT NULL,
            cancellation_policy TEXT NOT NULL
        )""",
    "faqs": """
        CREATE TABLE IF NOT EXISTS faqs (
            id INTEGER PRIMARY KEY,
            product_id INTEGER NOT NULL REFERENCES products(id),
            question TEXT NOT NULL CHECK (length(question) > 0),
            answer TEXT NOT NULL CHECK (length(answer) > 0)
        )""",
    "pricing_tiers": """
        CREATE TABLE IF NOT EXISTS pricing_tiers (
            id INTEGER PRIMARY KEY,
            product_id INTEGER NOT NULL REFERENCES products(id),
            tier_name TEXT NOT NULL,
            monthly_premium REAL NOT NULL CHECK (monthly_premium > 0),
            annual_premium REAL NOT NULL CHECK (annual_premium > 0),
            age_min INTEGER NOT NULL,
            age_max INTEGER NOT NULL CHECK (age_max >= age_min)
        )""",
}

# text-bearing columns counted toward the rough token estimate (chars / 4)
_TEXT_COLUMNS = {
    "products": ["name", "category", "description"],
    "coverage_details": ["coverage_type", "conditions"],
    "policy_terms": ["term_length", "renewal_policy", "cancellation_policy"],
    "faqs": ["question", "answer"],
    "pricing_tiers": ["tier_name"],
}


def load_stopwords() -> frozenset[str]:
    text = resources.files("sales_assist.assets").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip())


_STOPWORDS = load_stopwords()
_TOKEN_RE = re.compile(r"[a-z0-9]+")


def extract_keywords(question: str) -> list[str]:
    """Lowercased tokens of the question minus stopwords, order-preserving."""
    seen: list[str] = []
    for tok in _TOKEN_RE.findall(question.lower()):
        if tok not in _STOPWORDS and tok not in seen:
            seen.append(tok)
    return seen


def init_schema(store_path: str | Path) -> "KnowledgeBase":
    """Open (creating if needed) the store at ``store_path`` with all five tables.

    Idempotent on existing stores; raises SchemaMismatchError when a present
    table deviates from the expected column layout, StorageError when the
    path cannot be opened for writing.
    """
    path = Path(store_path)
    try:
        conn = sqlite3.connect(path, check_same_thread=False)
    except sqlite3.Error as exc:
        raise StorageError(f"cannot open store at {path}: {exc}") from exc
    conn.row_factory = sqlite3.Row
    conn.execute("PRAGMA foreign_keys = ON")
    try:
        _check_existing_schema(conn)
        for ddl in _SCHEMA.values():
            conn.execute(ddl)
        conn.commit()
    except sqlite3.OperationalError as exc:
        conn.close()
        raise StorageError(f"cannot initialize store at {path}: {exc}") from exc
    except SchemaMismatchError:
        conn.close()
        raise
    return KnowledgeBase(path, conn)


def _check_existing_schema(conn: sqlite3.Connection) -> None:
    for table, record_type in _RECORD_TYPES.items():
        rows = conn.execute(f"PRAGMA table_info({table})").fetchall()
        if not rows:
            continue  # table absent, will be created
        have = [r["name"] for r in rows]
        want = [f.name for f in fields(record_type)]
        if have != want:
            raise SchemaMismatchError(
                f"table {table} has columns {have}, expected {want}")


def validate_dataset(dataset: dict[str, Any]) -> None:
    """Structural validation of a dataset document against the five record types."""
    if not isinstance(dataset, dict):
        raise DatasetValidationError("dataset document must be a JSON object")
    for table, record_type in _RECORD_TYPES.items():
        rows = dataset.get(table)
        if not isinstance(rows, list):
            raise DatasetValidationError(f"missing or non-array table {table!r}")
        want = [f.name for f in fields(record_type)]
        for row in rows:
            if not isinstance(row, dict):
                raise DatasetValidationError(f"{table}: row is not an object")
            missing = [c for c in want if c not in row]
            if missing:
                raise DatasetValidationError(f"{table}: row missing fields {missing}")
    product_ids = {row["id"] for row in dataset["products"]}
    for table in ("coverage_details", "policy_terms", "faqs", "pricing_tiers"):
        for row in dataset[table]:
            if row["product_id"] not in product_ids:
                raise ReferentialIntegrityError(
                    f"{table} row {row['id']} references unknown product {row['product_id']}")
    names = [row["name"] for row in dataset["products"]]
    if len(names) != len(set(names)):
        dup = sorted({n for n in names if names.count(n) > 1})
        raise DuplicateProductError(f"duplicate product names: {dup}")


class KnowledgeBase:
    """Handle to one open store. Create via :func:`init_schema`."""

    def __init__(self, path: Path, conn: sqlite3.Connection):
        self.path = path
        self._conn = conn
        self._lock = threading.RLock()

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # --- seeding ---

    def seed(self, dataset: dict[str, Any], overwrite: bool = False) -> KbStats:
        """Insert a dataset document in one atomic transaction.

        Re-seeding a non-empty store is rejected unless ``overwrite`` is set,
        in which case existing rows are replaced wholesale.
        """
        validate_dataset(dataset)
        with self._lock:
            try:
                self._conn.execute("BEGIN IMMEDIATE")
            except sqlite3.OperationalError as exc:
                raise StorageError(f"store is locked by another writer: {exc}") from exc
            try:
                already = self._conn.execute("SELECT COUNT(*) FROM products").fetchone()[0]
                if already and not overwrite:
                    raise AlreadySeededError(
                        "store already contains data; pass overwrite to replace it")
                if overwrite:
                    for table in reversed(list(_RECORD_TYPES)):
                        self._conn.execute(f"DELETE FROM {table}")
                for table, record_type in _RECORD_TYPES.items():
                    cols = [f.name for f in fields(record_type)]
                    placeholders = ", ".join("?" for _ in cols)
                    self._conn.executemany(
                        f"INSERT INTO {table} ({', '.join(cols)}) VALUES ({placeholders})",
                        [tuple(row[c] for c in cols) for row in dataset[table]],
                    )
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                self._conn.rollback()
                msg = str(exc)
                if "FOREIGN KEY" in msg:
                    raise ReferentialIntegrityError(msg) from exc
                if "UNIQUE" in msg and "products.name" in msg:
                    raise DuplicateProductError(msg) from exc
                raise DatasetValidationError(msg) from exc
            except Exception:
                self._conn.rollback()
                raise
        return self.stats()

    # --- reads ---

    def faq_keyword_search(self, question: str, limit: int = 5) -> list[tuple[Faq, int]]:
        """Rank FAQs by how many of the question's keywords they contain.

        A keyword matches when it appears as a case-insensitive substring of
        the FAQ's question or answer. Ties break toward the lower FAQ id.
        """
        if limit < 1:
            raise ValueError("limit must be >= 1")
        keywords = extract_keywords(question)
        if not keywords:
            return []
        clauses = []
        params: list[str] = []
        for kw in keywords:
            clauses.append("(CASE WHEN question LIKE ? OR answer LIKE ? THEN 1 ELSE 0 END)")
            pattern = f"%{kw}%"
            params.extend((pattern, pattern))
        score_expr = " + ".join(clauses)
        sql = (
            f"SELECT * FROM (SELECT id, product_id, question, answer, {score_expr} AS score "
            f"FROM faqs) WHERE score > 0 ORDER BY score DESC, id ASC LIMIT ?"
        )
        with self._lock:
            rows = self._conn.execute(sql, (*params, limit)).fetchall()
        return [
            (Faq(r["id"], r["product_id"], r["question"], r["answer"]), r["score"])
            for r in rows
        ]

    def execute_readonly_sql(
        self,
        sql: str,
        max_rows: int = DEFAULT_ROW_CAP,
        timeout_s: float = DEFAULT_QUERY_TIMEOUT_S,
    ) -> list[dict[str, Any]]:
        """Run an already-validated SELECT with a row cap and a time budget.

        Validation is re-checked here so an unvalidated write can never reach
        the store, whatever the caller did upstream.
        """
        verdict = sqlguard.validate_readonly_sql(sql)
        if not verdict.accepted:
            raise SqlRejectedError(verdict.reason or "rejected")
        statement = sql.strip().rstrip(";")
        if not sqlguard.has_top_level_limit(statement):
            statement = f"{statement} LIMIT {max_rows}"
        deadline = time.monotonic() + timeout_s
        with self._lock:
            self._conn.set_progress_handler(
                lambda: 1 if time.monotonic() > deadline else 0, _PROGRESS_HANDLER_OPS)
            try:
                cursor = self._conn.execute(statement)
                rows = cursor.fetchmany(max_rows)
                columns = [d[0] for d in cursor.description] if cursor.description else []
            except sqlite3.OperationalError as exc:
                if "interrupted" in str(exc).lower():
                    raise QueryTimeoutError(
                        f"query exceeded {timeout_s:.1f}s budget") from exc
                raise QueryError(str(exc)) from exc
            except sqlite3.Error as exc:
                raise QueryError(str(exc)) from exc
            finally:
                self._conn.set_progress_handler(None, 0)
        return [dict(zip(columns, row)) for row in rows]

    def stats(self) -> KbStats:
        """Exact row counts plus a rough token estimate (total text chars / 4)."""
        with self._lock:
            counts = {
                table: self._conn.execute(f"SELECT COUNT(*) FROM {table}").fetchone()[0]
                for table in _RECORD_TYPES
            }
            chars = 0
            for table, cols in _TEXT_COLUMNS.items():
                expr = " + ".join(f"COALESCE(SUM(LENGTH({c})), 0)" for c in cols)
                chars += self._conn.execute(f"SELECT {expr} FROM {table}").fetchone()[0]
        return KbStats(
            products=counts["products"],
            coverage_details=counts["coverage_details"],
            policy_terms=counts["policy_terms"],
            faqs=counts["faqs"],
            pricing_tiers=counts["pricing_tiers"],
            approx_tokens=chars // 4,
        )

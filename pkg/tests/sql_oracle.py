"""Independent write-capability oracle for SQL statements.

Deliberately shares no code with the package validator: statements are
split with sqlite3.complete_statement, then executed with executescript
against a scratch in-memory database under an authorizer that records every
action code. A statement is write-capable when any non-read action fires or
the database dump changes. This is the ground truth the fuzz suite checks
the tokenizer-based validator against.
"""

from __future__ import annotations

import sqlite3

_SCRATCH_SCHEMA = """
CREATE TABLE products (id INTEGER PRIMARY KEY, name TEXT UNIQUE, category TEXT, description TEXT);
CREATE TABLE coverage_details (id INTEGER PRIMARY KEY, product_id INTEGER, coverage_type TEXT,
    amount REAL, deductible REAL, conditions TEXT);
CREATE TABLE policy_terms (id INTEGER PRIMARY KEY, product_id INTEGER, term_length TEXT,
    renewal_policy TEXT, cancellation_policy TEXT);
CREATE TABLE faqs (id INTEGER PRIMARY KEY, product_id INTEGER, question TEXT, answer TEXT);
CREATE TABLE pricing_tiers (id INTEGER PRIMARY KEY, product_id INTEGER, tier_name TEXT,
    monthly_premium REAL, annual_premium REAL, age_min INTEGER, age_max INTEGER);
INSERT INTO products VALUES (1, 'Oracle Probe Product', 'Life', 'probe row');
INSERT INTO faqs VALUES (1, 1, 'probe question?', 'probe answer');
"""

# action codes that a pure read may produce
_READ_ACTIONS = {
    getattr(sqlite3, "SQLITE_SELECT", 21),
    getattr(sqlite3, "SQLITE_READ", 20),
    getattr(sqlite3, "SQLITE_FUNCTION", 31),
    getattr(sqlite3, "SQLITE_RECURSIVE", 33),
}


def split_statements(sql: str) -> list[str]:
    """Statement list per sqlite3.complete_statement; no tokenizer shared
    with the validator under test."""
    parts: list[str] = []
    buf = ""
    for ch in sql:
        buf += ch
        if sqlite3.complete_statement(buf):
            parts.append(buf.strip())
            buf = ""
    if buf.strip():
        parts.append(buf.strip())
    return [p for p in parts if p.strip("; \n\t")]


def probe(sql: str) -> dict:
    """Execute ``sql`` wholesale on a scratch store and report what happened.

    Returns {write_capable, actions, error, statements}.
    """
    conn = sqlite3.connect(":memory:")
    conn.executescript(_SCRATCH_SCHEMA)
    conn.commit()
    actions: list[int] = []
    recording = False

    def authorizer(action, *_args):
        if recording:
            actions.append(action)
        return sqlite3.SQLITE_OK

    conn.set_authorizer(authorizer)
    before = "\n".join(conn.iterdump())
    error = None
    recording = True
    try:
        conn.executescript(sql)
        conn.commit()
    except sqlite3.Error as exc:
        error = str(exc)
    finally:
        recording = False
    after = "\n".join(conn.iterdump())
    conn.close()
    non_read = [a for a in actions if a not in _READ_ACTIONS]
    return {
        "write_capable": before != after or bool(non_read),
        "actions": actions,
        "error": error,
        "statements": split_statements(sql),
    }

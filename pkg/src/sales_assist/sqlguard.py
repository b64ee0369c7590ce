"""Read-only SQL validation for LLM-generated queries.

The validator tokenizes the statement rather than pattern-matching raw text,
so forbidden verbs hiding inside string literals or quoted identifiers do not
cause false rejections, and comment/statement smuggling cannot slip writes
through. A statement is accepted only if all of the following hold:

* it tokenizes cleanly (no unterminated strings or block comments);
* comments appear only before the first real token;
* it is a single statement (at most one trailing semicolon);
* the first keyword is SELECT, or WITH leading to a top-level SELECT;
* no forbidden keyword (INSERT, UPDATE, DELETE, DROP, ALTER, CREATE,
  REPLACE, ATTACH, DETACH, PRAGMA, VACUUM, TRUNCATE) appears as a keyword
  token.  REPLACE immediately followed by ``(`` is the SQLite scalar
  function and is allowed.

Rejection is a value, not an exception: callers branch on ``Verdict.accepted``.
"""

from __future__ import annotations

from dataclasses import dataclass

FORBIDDEN_KEYWORDS = frozenset({
    "INSERT", "UPDATE", "DELETE", "DROP", "ALTER", "CREATE",
    "REPLACE", "ATTACH", "DETACH", "PRAGMA", "VACUUM", "TRUNCATE",
})

_WORD_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_")
_WORD_CHARS = _WORD_START | frozenset("0123456789$")


@dataclass(frozen=True)
class Token:
    kind: str  # word | string | quoted_ident | number | punct | semicolon | comment
    value: str
    pos: int


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str | None = None


def _rejected(reason: str) -> Verdict:
    return Verdict(False, reason)


class TokenizeError(ValueError):
    pass


def tokenize(sql: str) -> list[Token]:
    """Split SQL into tokens, honoring SQLite quoting and comment rules.

    Raises TokenizeError on unterminated strings, quoted identifiers, or
    block comments.
    """
    tokens: list[Token] = []
    i, n = 0, len(sql)
    while i < n:
        ch = sql[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "-" and sql.startswith("--", i):
            end = sql.find("\n", i)
            end = n if end == -1 else end
            tokens.append(Token("comment", sql[i:end], i))
            i = end
            continue
        if ch == "/" and sql.startswith("/*", i):
            end = sql.find("*/", i + 2)
            if end == -1:
                raise TokenizeError("unterminated block comment")
            tokens.append(Token("comment", sql[i:end + 2], i))
            i = end + 2
            continue
        if ch == "'":
            i = _scan_quoted(sql, i, "'", "unterminated string literal", tokens, "string")
            continue
        if ch == '"':
            i = _scan_quoted(sql, i, '"', "unterminated quoted identifier", tokens, "quoted_ident")
            continue
        if ch == "`":
            end = sql.find("`", i + 1)
            if end == -1:
                raise TokenizeError("unterminated quoted identifier")
            tokens.append(Token("quoted_ident", sql[i:end + 1], i))
            i = end + 1
            continue
        if ch == "[":
            end = sql.find("]", i + 1)
            if end == -1:
                raise TokenizeError("unterminated quoted identifier")
            tokens.append(Token("quoted_ident", sql[i:end + 1], i))
            i = end + 1
            continue
        if ch in _WORD_START:
            j = i + 1
            while j < n and sql[j] in _WORD_CHARS:
                j += 1
            tokens.append(Token("word", sql[i:j], i))
            i = j
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and sql[i + 1].isdigit()):
            j = i + 1
            while j < n and (sql[j].isdigit() or sql[j] in ".eExX+-" and _numeric_continues(sql, j)):
                j += 1
            tokens.append(Token("number", sql[i:j], i))
            i = j
            continue
        if ch == ";":
            tokens.append(Token("semicolon", ch, i))
            i += 1
            continue
        tokens.append(Token("punct", ch, i))
        i += 1
    return tokens


def _numeric_continues(sql: str, j: int) -> bool:
    # +/- only continue a number straight after an exponent marker
    if sql[j] in "+-":
        return j > 0 and sql[j - 1] in "eE"
    return True


def _scan_quoted(sql: str, start: int, quote: str, err: str,
                 tokens: list[Token], kind: str) -> int:
    i = start + 1
    n = len(sql)
    while i < n:
        if sql[i] == quote:
            if i + 1 < n and sql[i + 1] == quote:  # doubled quote escape
                i += 2
                continue
            tokens.append(Token(kind, sql[start:i + 1], start))
            return i + 1
        i += 1
    raise TokenizeError(err)


def validate_readonly_sql(sql: str) -> Verdict:
    """Decide whether ``sql`` is a single read-only SELECT statement."""
    try:
        tokens = tokenize(sql)
    except TokenizeError as exc:
        return _rejected(str(exc))

    # strip leading comments; any later comment is embedded
    body_start = 0
    while body_start < len(tokens) and tokens[body_start].kind == "comment":
        body_start += 1
    body = tokens[body_start:]
    if not body:
        return _rejected("empty statement")
    for tok in body:
        if tok.kind == "comment":
            return _rejected("embedded comment")

    semi_positions = [idx for idx, tok in enumerate(body) if tok.kind == "semicolon"]
    if semi_positions:
        if len(semi_positions) > 1 or semi_positions[0] != len(body) - 1:
            return _rejected("multiple statements")
        body = body[:-1]
        if not body:
            return _rejected("empty statement")

    depth = 0
    saw_top_level_select = False
    for idx, tok in enumerate(body):
        if tok.kind == "punct":
            if tok.value == "(":
                depth += 1
            elif tok.value == ")":
                depth = max(0, depth - 1)
            continue
        if tok.kind != "word":
            continue
        upper = tok.value.upper()
        if upper in FORBIDDEN_KEYWORDS:
            if upper == "REPLACE" and _next_is_open_paren(body, idx):
                continue  # replace(x, y, z) scalar function
            return _rejected(f"forbidden keyword {upper}")
        if upper == "SELECT" and depth == 0:
            saw_top_level_select = True

    first = body[0]
    if first.kind != "word" or first.value.upper() not in ("SELECT", "WITH"):
        return _rejected("statement must start with SELECT")
    if not saw_top_level_select:
        return _rejected("WITH clause does not introduce a SELECT")
    return Verdict(True, None)


def _next_is_open_paren(tokens: list[Token], idx: int) -> bool:
    for tok in tokens[idx + 1:]:
        return tok.kind == "punct" and tok.value == "("
    return False


def has_top_level_limit(sql: str) -> bool:
    """True when the statement already carries a LIMIT outside any subquery."""
    try:
        tokens = tokenize(sql)
    except TokenizeError:
        return False
    depth = 0
    for tok in tokens:
        if tok.kind == "punct":
            if tok.value == "(":
                depth += 1
            elif tok.value == ")":
                depth = max(0, depth - 1)
        elif tok.kind == "word" and depth == 0 and tok.value.upper() == "LIMIT":
            return True
    return False

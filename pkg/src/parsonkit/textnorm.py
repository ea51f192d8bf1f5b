"""Whitespace normalization for code-line comparison.

Two levels are provided:

``normalize``
    Collapses runs of whitespace outside string literals to single spaces and
    trims the ends.  Case and quote characters are preserved.

``comparison_key``
    The equality basis used by the grader.  Like ``normalize``, but spaces
    that are not *between* two identifier characters are dropped entirely, so
    ``missing.append( i )`` compares equal to ``missing.append(i)`` while
    ``return missing`` stays distinct from ``returnmissing``.

Whitespace inside string literals is always preserved verbatim.
"""

import string

_WORD = set(string.ascii_letters + string.digits + "_")


def _split_literals(line: str) -> list[tuple[str, bool]]:
    """Split a line into (chunk, is_string_literal) pieces.

    Handles single and double quotes with backslash escapes.  An unterminated
    literal runs to the end of the line.
    """
    parts: list[tuple[str, bool]] = []
    buf: list[str] = []
    quote: str | None = None
    i = 0
    while i < len(line):
        ch = line[i]
        if quote is None:
            if ch in "'\"":
                if buf:
                    parts.append(("".join(buf), False))
                    buf = []
                quote = ch
                buf.append(ch)
            else:
                buf.append(ch)
        else:
            buf.append(ch)
            if ch == "\\" and i + 1 < len(line):
                buf.append(line[i + 1])
                i += 1
            elif ch == quote:
                parts.append(("".join(buf), True))
                buf = []
                quote = None
        i += 1
    if buf:
        parts.append(("".join(buf), quote is not None))
    return parts


def normalize(line: str) -> str:
    """Collapse whitespace runs outside string literals; trim the ends."""
    out: list[str] = []
    for chunk, is_literal in _split_literals(line):
        if is_literal:
            out.append(chunk)
        else:
            collapsed = []
            prev_space = False
            for ch in chunk:
                if ch.isspace():
                    if not prev_space:
                        collapsed.append(" ")
                    prev_space = True
                else:
                    collapsed.append(ch)
                    prev_space = False
            out.append("".join(collapsed))
    return "".join(out).strip()


def comparison_key(line: str) -> str:
    """Canonical form for equality checks between code lines."""
    normalized = normalize(line)
    parts = _split_literals(normalized)
    out: list[str] = []
    for chunk, is_literal in parts:
        if is_literal:
            out.append(chunk)
            continue
        kept: list[str] = []
        for idx, ch in enumerate(chunk):
            if ch != " ":
                kept.append(ch)
                continue
            prev = chunk[idx - 1] if idx > 0 else (out[-1][-1] if out and out[-1] else "")
            nxt = chunk[idx + 1] if idx + 1 < len(chunk) else ""
            if prev in _WORD and nxt in _WORD:
                kept.append(" ")
        out.append("".join(kept))
    return "".join(out)


def _line_key(line: str) -> str:
    # Keep the leading indentation: in multi-line blocks the relative
    # indentation of member lines is structural, not cosmetic.
    expanded = line.expandtabs(4)
    indent = len(expanded) - len(expanded.lstrip(" "))
    return " " * indent + comparison_key(expanded)


def lines_equal(a: str, b: str) -> bool:
    """True when two code fragments are equal after normalization.

    Multi-line fragments compare line by line; leading indentation of each
    line is significant, interior spacing is normalized.
    """
    la = [_line_key(x) for x in a.splitlines() or [""]]
    lb = [_line_key(x) for x in b.splitlines() or [""]]
    return la == lb

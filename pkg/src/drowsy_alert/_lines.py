"""Tokenizer for the line-oriented ``key value`` file formats."""

from __future__ import annotations

from collections.abc import Iterator


def iter_directives(text: str) -> Iterator[tuple[int, list[str], str]]:
    """Yield ``(line_number, tokens, rest)`` for every non-blank, non-comment line.

    Only whole lines starting with ``#`` are comments, so free-text values
    (message bodies, paths) may contain ``#``. ``rest`` is the line with its
    first token removed, stripped of surrounding whitespace.
    """
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        rest = line[len(tokens[0]):].strip()
        yield lineno, tokens, rest

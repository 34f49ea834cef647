"""Corpus readers and document chunking.

Two input formats are understood:

plain
    UTF-8, one document per line, tokens separated by whitespace.
vertical
    UTF-8, one ``surface<TAB>tag`` pair per line, blank lines between
    documents.

Surfaces are lowercased; tags are kept verbatim.
"""
from __future__ import annotations

import io
import os
from dataclasses import dataclass
from itertools import islice
from typing import IO, Iterable, Iterator, NamedTuple

from .errors import InputFormatError

FORMATS = ("plain", "vertical")
DEFAULT_CHUNK_SIZE = 500


class Token(NamedTuple):
    surface: str
    tag: str | None = None


@dataclass
class Document:
    doc_id: int
    tokens: list[Token]

    def __len__(self):
        return len(self.tokens)


@dataclass
class Chunk:
    chunk_id: int
    documents: list[Document]

    @property
    def n_tokens(self):
        return sum(len(d) for d in self.documents)


def _lines(stream):
    """Yield ``(line_number, byte_offset, text)`` with the newline stripped.

    Binary streams are decoded strictly so that a bad byte can be located;
    text streams are passed through.
    """
    offset = 0
    for lineno, raw in enumerate(stream, 1):
        if isinstance(raw, bytes):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise InputFormatError(
                    f"invalid UTF-8 at byte offset {offset + exc.start} (line {lineno})"
                ) from None
            size = len(raw)
        else:
            text = raw
            size = len(raw.encode("utf-8", "surrogatepass"))
        yield lineno, offset, text.rstrip("\r\n")
        offset += size


def read_plain(stream: IO) -> Iterator[Document]:
    """One document per line; empty lines become empty documents."""
    for doc_id, (_, _, text) in enumerate(_lines(stream)):
        yield Document(doc_id, [Token(w.lower()) for w in text.split()])


def read_vertical(stream: IO) -> Iterator[Document]:
    """``surface<TAB>tag`` per line; a blank line closes the current document.

    Runs of blank lines count as a single boundary.
    """
    doc_id = 0
    tokens: list[Token] = []
    for lineno, _, text in _lines(stream):
        if not text.strip():
            if tokens:
                yield Document(doc_id, tokens)
                doc_id += 1
                tokens = []
            continue
        if text.count("\t") != 1:
            raise InputFormatError(f"line {lineno}: expected exactly one tab, got {text.count(chr(9))}")
        surface, tag = text.split("\t")
        if not surface or any(c.isspace() for c in surface):
            raise InputFormatError(f"line {lineno}: empty surface or surface containing whitespace")
        if not tag:
            raise InputFormatError(f"line {lineno}: empty tag")
        tokens.append(Token(surface.lower(), tag))
    if tokens:
        yield Document(doc_id, tokens)


def read(stream: IO, fmt: str = "plain") -> Iterator[Document]:
    if fmt == "plain":
        return read_plain(stream)
    if fmt == "vertical":
        return read_vertical(stream)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def iter_file(path: str | os.PathLike, fmt: str = "plain") -> Iterator[Document]:
    """Stream documents from a file, closing it when exhausted."""
    with open(path, "rb") as fh:
        yield from read(fh, fmt)


def read_text(text: str, fmt: str = "plain") -> list[Document]:
    """Convenience for tests and small in-memory corpora."""
    return list(read(io.StringIO(text), fmt))


def chunk(documents: Iterable[Document], chunk_size: int = DEFAULT_CHUNK_SIZE) -> Iterator[Chunk]:
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    it = iter(documents)
    chunk_id = 0
    while True:
        batch = list(islice(it, chunk_size))
        if not batch:
            return
        yield Chunk(chunk_id, batch)
        chunk_id += 1

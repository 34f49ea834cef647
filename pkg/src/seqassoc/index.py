"""Two-pass frequency index over units, sequences and end-point pairs.

Pass one counts individual units and keeps lexical units whose corpus
frequency reaches ``individual_freq`` (POS tags are always kept). Pass two
enumerates every window of 2..max_length tokens under every lexical/POS
realization, discards per chunk any sequence seen fewer than
``per_chunk_freq`` times, and sums the survivors across chunks.

A sequence key is a plain tuple of unit ids; the lexical/POS mask follows
from the units' kinds.
"""
from __future__ import annotations

import gzip
import hashlib
import logging
import os
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping

import numpy as np

from . import kernels
from .errors import IndexLoadError, MergeError
from .ingest import Chunk, Document, chunk as make_chunks

logger = logging.getLogger(__name__)

LEXICAL = "lex"
POS = "pos"
MASK_CHAR = {LEXICAL: "L", POS: "P"}

MAGIC = "#seqassoc-index"
FORMAT_VERSION = 1
DEFAULT_MAX_LENGTH = 5

SequenceKey = tuple  # tuple[int, ...] of unit ids


@dataclass(frozen=True, order=True)
class Unit:
    id: int
    kind: str
    text: str


@dataclass(frozen=True)
class Thresholds:
    individual_freq: int = 50
    per_chunk_freq: int = 10
    chunk_size: int = 500

    def __post_init__(self):
        for name in ("individual_freq", "per_chunk_freq", "chunk_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


class UnitTable:
    """Result of pass one: the unit inventory with corpus frequencies."""

    def __init__(self, units, freq, n_tokens):
        self.units = tuple(units)
        self.freq = tuple(freq)
        self.N = n_tokens
        self._ids = {(u.kind, u.text): u.id for u in self.units}
        digest = hashlib.blake2b(digest_size=12)
        for u in self.units:
            digest.update(f"{u.kind}\t{u.text}\n".encode())
        self.key = digest.hexdigest()

    def __len__(self):
        return len(self.units)

    def get(self, kind, text, default=-1):
        return self._ids.get((kind, text), default)

    def encode(self, documents: Iterable[Document]):
        """Return ``(lex, pos, starts)`` arrays for :func:`kernels.count_chunk`."""
        lex_ids = {t: i for (k, t), i in self._ids.items() if k == LEXICAL}
        pos_ids = {t: i for (k, t), i in self._ids.items() if k == POS}
        lex, pos, starts = [], [], [0]
        for doc in documents:
            for tok in doc.tokens:
                lex.append(lex_ids.get(tok.surface, -1))
                pos.append(pos_ids.get(tok.tag, -1) if tok.tag is not None else -1)
            starts.append(len(lex))
        return (
            np.asarray(lex, dtype=np.int32),
            np.asarray(pos, dtype=np.int32),
            np.asarray(starts, dtype=np.int64),
        )


@dataclass
class Counts:
    """Mutable sequence/end-point counts tied to one unit table."""

    table_key: str
    seqs: dict = field(default_factory=dict)
    endpoints: dict = field(default_factory=dict)
    chunks: int = 0

    def __eq__(self, other):
        if not isinstance(other, Counts):
            return NotImplemented
        return (
            self.table_key == other.table_key
            and self.seqs == other.seqs
            and self.endpoints == other.endpoints
            and self.chunks == other.chunks
        )


def _add_into(acc: dict, other: Mapping):
    for k, v in other.items():
        acc[k] = acc.get(k, 0) + v


def merge(a: Counts, b: Counts) -> Counts:
    """Pointwise sum of two count maps built against the same unit table."""
    if a.table_key != b.table_key:
        raise MergeError("counts were built against different unit tables")
    seqs = dict(a.seqs)
    _add_into(seqs, b.seqs)
    ends = dict(a.endpoints)
    _add_into(ends, b.endpoints)
    return Counts(a.table_key, seqs, ends, a.chunks + b.chunks)


class CorpusIndex:
    """Immutable frequency store read by every measure."""

    def __init__(self, N, units, unit_freq, seq_freq, endpoint_freq,
                 chunk_count, thresholds, max_length):
        self.N = int(N)
        self.units = tuple(units)
        self.unit_freq = tuple(int(f) for f in unit_freq)
        self.seq_freq = MappingProxyType(dict(seq_freq))
        self.endpoint_freq = MappingProxyType(dict(endpoint_freq))
        self.chunk_count = int(chunk_count)
        self.thresholds = thresholds
        self.max_length = int(max_length)
        self._ids = {(u.kind, u.text): u.id for u in self.units}
        if any(u.id != i for i, u in enumerate(self.units)):
            raise ValueError("unit ids must be dense and ordered")

    def __eq__(self, other):
        if not isinstance(other, CorpusIndex):
            return NotImplemented
        return (
            self.N == other.N
            and self.units == other.units
            and self.unit_freq == other.unit_freq
            and self.seq_freq == other.seq_freq
            and self.endpoint_freq == other.endpoint_freq
            and self.chunk_count == other.chunk_count
            and self.thresholds == other.thresholds
            and self.max_length == other.max_length
        )

    def __repr__(self):
        return (f"CorpusIndex(N={self.N}, units={len(self.units)}, "
                f"sequences={len(self.seq_freq)}, endpoints={len(self.endpoint_freq)})")

    def unit_id(self, kind, text):
        return self._ids[kind, text]

    def key(self, text: str, mask: str | None = None) -> SequenceKey:
        """Build a key from space-separated units, e.g. ``key("give me DET", "LLP")``.

        Without a mask every slot is lexical.
        """
        words = text.split()
        mask = mask or "L" * len(words)
        if len(mask) != len(words):
            raise ValueError("mask length differs from number of units")
        return tuple(
            self._ids[(LEXICAL, w.lower()) if m == "L" else (POS, w)]
            for w, m in zip(words, mask)
        )

    def mask(self, key) -> str:
        return "".join(MASK_CHAR[self.units[u].kind] for u in key)

    def render(self, key) -> str:
        return " ".join(
            self.units[u].text.upper() if self.units[u].kind == POS else self.units[u].text
            for u in key
        )

    def freq(self, key) -> int:
        """Frequency of a unit (length-1 key) or a stored sequence; 0 if absent."""
        if len(key) == 1:
            return self.unit_freq[key[0]]
        return self.seq_freq.get(tuple(key), 0)

    def sequences(self):
        """Stored sequence keys in a deterministic order."""
        return sorted(self.seq_freq, key=lambda k: (len(k), k))


def pass1_count_units(chunks: Iterable[Chunk], thresholds: Thresholds) -> UnitTable:
    words = Counter()
    tags = Counter()
    n = 0
    for ch in chunks:
        for doc in ch.documents:
            n += len(doc.tokens)
            words.update(t.surface for t in doc.tokens)
            tags.update(t.tag for t in doc.tokens if t.tag is not None)
    kept = [(LEXICAL, w, c) for w, c in words.items() if c >= thresholds.individual_freq]
    kept += [(POS, t, c) for t, c in tags.items()]
    kept.sort(key=lambda x: (x[0], x[1]))
    if len(kept) >= 1 << 28:
        raise ValueError("unit inventory too large for the index key layout")
    units = [Unit(i, kind, text) for i, (kind, text, _) in enumerate(kept)]
    logger.info("pass 1: %d tokens, %d/%d word types kept, %d tags",
                n, sum(1 for k in kept if k[0] == LEXICAL), len(words), len(tags))
    return UnitTable(units, [c for _, _, c in kept], n)


def _count_encoded(args):
    lex, pos, starts, max_length, min_count = args
    return kernels.count_chunk(lex, pos, starts, max_length, min_count)


def _iter_results(jobs, threads):
    if threads <= 1:
        for job in jobs:
            yield _count_encoded(job)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        pending = deque()
        for job in jobs:
            pending.append(pool.submit(_count_encoded, job))
            if len(pending) >= 2 * threads:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def pass2_count_sequences(chunks: Iterable[Chunk], table: UnitTable, thresholds: Thresholds,
                          max_length: int = DEFAULT_MAX_LENGTH, threads: int = 1) -> CorpusIndex:
    if not 2 <= max_length <= kernels.MAX_SUPPORTED_LENGTH:
        raise ValueError(f"max_length must be in [2, {kernels.MAX_SUPPORTED_LENGTH}]")
    jobs = (
        (*table.encode(ch.documents), max_length, thresholds.per_chunk_freq)
        for ch in chunks
    )
    total = Counts(table.key)
    for seqs, ends in _iter_results(jobs, threads):
        _add_into(total.seqs, seqs)
        _add_into(total.endpoints, ends)
        total.chunks += 1
    logger.info("pass 2: %d chunks, %d sequences, %d end-point pairs",
                total.chunks, len(total.seqs), len(total.endpoints))
    return finalize(table, total, thresholds, max_length)


def count_chunk(ch: Chunk, table: UnitTable, thresholds: Thresholds,
                max_length: int = DEFAULT_MAX_LENGTH) -> Counts:
    """Pruned counts for a single chunk (the unit of parallel work)."""
    seqs, ends = _count_encoded(
        (*table.encode(ch.documents), max_length, thresholds.per_chunk_freq))
    return Counts(table.key, seqs, ends, 1)


def finalize(table: UnitTable, counts: Counts, thresholds: Thresholds,
             max_length: int = DEFAULT_MAX_LENGTH) -> CorpusIndex:
    if counts.table_key != table.key:
        raise MergeError("counts do not belong to this unit table")
    return CorpusIndex(table.N, table.units, table.freq, counts.seqs, counts.endpoints,
                       counts.chunks, thresholds, max_length)


def build_index(documents: Callable[[], Iterable[Document]], thresholds: Thresholds = Thresholds(),
                max_length: int = DEFAULT_MAX_LENGTH, threads: int = 1) -> CorpusIndex:
    """Run both passes. ``documents`` is called once per pass."""
    table = pass1_count_units(make_chunks(documents(), thresholds.chunk_size), thresholds)
    return pass2_count_sequences(make_chunks(documents(), thresholds.chunk_size),
                                 table, thresholds, max_length, threads)


# -- persistence ------------------------------------------------------------
#
# Text container, one section per block:
#
#   #seqassoc-index <TAB> 1
#   @header            key <TAB> value
#   @units             id, kind, text, freq
#   @sequences         length, mask, unit ids (comma separated), freq
#   @endpoints         left id, right id, length, freq
#   @end
#
# Paths ending in ".gz" are gzip-compressed.

_HEADER_KEYS = ("N", "individual_freq", "per_chunk_freq", "chunk_size", "max_length", "chunk_count")


def _open(path, mode):
    if str(path).endswith(".gz"):
        return gzip.open(path, mode + "t", encoding="utf-8", newline="\n")
    return open(path, mode, encoding="utf-8", newline="\n")


def save(index: CorpusIndex, path: str | os.PathLike) -> None:
    th = index.thresholds
    with _open(path, "w") as fh:
        fh.write(f"{MAGIC}\t{FORMAT_VERSION}\n@header\n")
        for k, v in zip(_HEADER_KEYS, (index.N, th.individual_freq, th.per_chunk_freq,
                                       th.chunk_size, index.max_length, index.chunk_count)):
            fh.write(f"{k}\t{v}\n")
        fh.write("@units\n")
        for u, f in zip(index.units, index.unit_freq):
            fh.write(f"{u.id}\t{u.kind}\t{u.text}\t{f}\n")
        fh.write("@sequences\n")
        for key in index.sequences():
            fh.write(f"{len(key)}\t{index.mask(key)}\t{','.join(map(str, key))}\t{index.seq_freq[key]}\n")
        fh.write("@endpoints\n")
        for (x, y, n), f in sorted(index.endpoint_freq.items()):
            fh.write(f"{x}\t{y}\t{n}\t{f}\n")
        fh.write("@end\n")


def _sections(lines: Iterator[str]):
    section = None
    body: list[list[str]] = []
    for line in lines:
        line = line.rstrip("\n")
        if line.startswith("@"):
            if section is not None:
                yield section, body
            section, body = line[1:], []
            if section == "end":
                yield section, body
                return
        elif section is None:
            raise IndexLoadError("header", "data before first section")
        else:
            body.append(line.split("\t"))
    if section is not None:
        yield section, body


def load(path: str | os.PathLike) -> CorpusIndex:
    try:
        with _open(path, "r") as fh:
            first = fh.readline().rstrip("\n").split("\t")
            if first[0] != MAGIC:
                raise IndexLoadError("header", "not a seqassoc index (bad magic)")
            if len(first) != 2 or first[1] != str(FORMAT_VERSION):
                raise IndexLoadError("header", f"unsupported format version {first[1:]}")
            sections = dict(_sections(fh))
    except (OSError, UnicodeDecodeError, EOFError) as exc:
        raise IndexLoadError("header", f"cannot read {path}: {exc}") from None

    for name in ("header", "units", "sequences", "endpoints", "end"):
        if name not in sections:
            raise IndexLoadError(name, "section missing (truncated file?)")
    try:
        header = {row[0]: int(row[1]) for row in sections["header"]}
        missing = [k for k in _HEADER_KEYS if k not in header]
        if missing:
            raise IndexLoadError("header", f"missing keys {missing}")
    except (IndexError, ValueError) as exc:
        raise IndexLoadError("header", str(exc)) from None

    units, freqs = [], []
    try:
        for row in sections["units"]:
            uid, kind, text, f = row
            units.append(Unit(int(uid), kind, text))
            freqs.append(int(f))
    except ValueError as exc:
        raise IndexLoadError("units", f"malformed row: {exc}") from None

    seqs = {}
    try:
        for row in sections["sequences"]:
            length, mask, ids, f = row
            key = tuple(int(u) for u in ids.split(","))
            if len(key) != int(length) or len(mask) != len(key):
                raise IndexLoadError("sequences", f"inconsistent row {row}")
            if any(u >= len(units) or MASK_CHAR[units[u].kind] != m for u, m in zip(key, mask)):
                raise IndexLoadError("sequences", f"mask disagrees with unit kinds in row {row}")
            seqs[key] = int(f)
    except ValueError as exc:
        raise IndexLoadError("sequences", f"malformed row: {exc}") from None

    ends = {}
    try:
        for row in sections["endpoints"]:
            x, y, n, f = (int(v) for v in row)
            ends[x, y, n] = f
    except ValueError as exc:
        raise IndexLoadError("endpoints", f"malformed row: {exc}") from None

    thresholds = Thresholds(header["individual_freq"], header["per_chunk_freq"], header["chunk_size"])
    try:
        return CorpusIndex(header["N"], units, freqs, seqs, ends, header["chunk_count"],
                           thresholds, header["max_length"])
    except ValueError as exc:
        raise IndexLoadError("units", str(exc)) from None

# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled window counting. Same contract as ``_kernels_py.count_chunk``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t
from libcpp.vector cimport vector

cnp.import_array()

cdef extern from *:
    """
    #include <cstdint>
    #include <cstddef>
    #include <vector>

    struct SeqKey {
        int32_t u[8];
        int32_t len;
    };

    static inline uint64_t mix64(uint64_t h) {
        h ^= h >> 33; h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33; h *= 0xc4ceb9fe1a85ec53ULL;
        return h ^ (h >> 33);
    }

    static inline uint64_t seq_hash(const SeqKey& k) {
        uint64_t h = 0x9E3779B97F4A7C15ULL ^ (uint64_t)k.len;
        for (int i = 0; i < k.len; ++i) h = (h ^ (uint32_t)k.u[i]) * 0x100000001B3ULL;
        return mix64(h);
    }

    static inline bool seq_eq(const SeqKey& a, const SeqKey& b) {
        if (a.len != b.len) return false;
        for (int i = 0; i < a.len; ++i) if (a.u[i] != b.u[i]) return false;
        return true;
    }

    /* Open addressing, linear probing, power-of-two capacity; len == 0 marks
       an empty slot. Counts live next to keys so probing stays in cache. */
    struct SeqSlot { SeqKey key; int64_t count; };
    struct SeqTable {
        std::vector<SeqSlot> slots;
        size_t used = 0;
        SeqTable() : slots(1 << 12) { for (auto& s : slots) s.key.len = 0; }
        size_t capacity() const { return slots.size(); }
        void grow() {
            std::vector<SeqSlot> old(slots.size() * 2);
            for (auto& s : old) s.key.len = 0;
            old.swap(slots);
            size_t mask = slots.size() - 1;
            for (auto& s : old) {
                if (!s.key.len) continue;
                size_t i = seq_hash(s.key) & mask;
                while (slots[i].key.len) i = (i + 1) & mask;
                slots[i] = s;
            }
        }
        void add(const SeqKey& k) {
            if (2 * (used + 1) > slots.size()) grow();
            size_t mask = slots.size() - 1;
            size_t i = seq_hash(k) & mask;
            while (slots[i].key.len) {
                if (seq_eq(slots[i].key, k)) { ++slots[i].count; return; }
                i = (i + 1) & mask;
            }
            slots[i].key = k;
            slots[i].count = 1;
            ++used;
        }
    };

    /* Same layout for packed end-point keys; key -1 marks an empty slot. */
    struct EndSlot { int64_t key; int64_t count; };
    struct EndTable {
        std::vector<EndSlot> slots;
        size_t used = 0;
        EndTable() : slots(1 << 10, EndSlot{-1, 0}) {}
        size_t capacity() const { return slots.size(); }
        void grow() {
            std::vector<EndSlot> old(slots.size() * 2, EndSlot{-1, 0});
            old.swap(slots);
            size_t mask = slots.size() - 1;
            for (auto& s : old) {
                if (s.key < 0) continue;
                size_t i = mix64((uint64_t)s.key) & mask;
                while (slots[i].key >= 0) i = (i + 1) & mask;
                slots[i] = s;
            }
        }
        void add(int64_t k) {
            if (2 * (used + 1) > slots.size()) grow();
            size_t mask = slots.size() - 1;
            size_t i = mix64((uint64_t)k) & mask;
            while (slots[i].key >= 0) {
                if (slots[i].key == k) { ++slots[i].count; return; }
                i = (i + 1) & mask;
            }
            slots[i].key = k;
            slots[i].count = 1;
            ++used;
        }
    };
    """
    cdef cppclass SeqKey:
        int32_t u[8]
        int32_t len
    cdef cppclass SeqSlot:
        SeqKey key
        int64_t count
    cdef cppclass SeqTable:
        vector[SeqSlot] slots
        void add(const SeqKey&)
    cdef cppclass EndSlot:
        int64_t key
        int64_t count
    cdef cppclass EndTable:
        vector[EndSlot] slots
        void add(int64_t)


MAX_SUPPORTED_LENGTH = 8
cdef enum:
    MAXLEN = 8
    MAXPARTIAL = 256  # 2 ** MAXLEN


def count_chunk(lex, pos, starts, int max_length, int64_t min_count):
    if not 2 <= max_length <= MAXLEN:
        raise ValueError(f"max_length must be in [2, {MAXLEN}]")
    cdef int32_t[::1] lx = np.ascontiguousarray(lex, dtype=np.int32)
    cdef int32_t[::1] ps = np.ascontiguousarray(pos, dtype=np.int32)
    cdef int64_t[::1] st = np.ascontiguousarray(starts, dtype=np.int64)
    if lx.shape[0] != ps.shape[0]:
        raise ValueError("lex and pos differ in length")

    cdef SeqTable seqs
    cdef EndTable ends
    cdef SeqKey cur[MAXPARTIAL]
    cdef SeqKey nxt[MAXPARTIAL]
    cdef int32_t first[2]
    cdef int32_t opt[2]
    cdef int nfirst, nopt, ncur, nnext, a, b, length
    cdef Py_ssize_t d, i, j, lo, hi
    cdef int64_t ekey

    for d in range(st.shape[0] - 1):
        lo = st[d]
        hi = st[d + 1]
        for i in range(lo, hi):
            nfirst = 0
            if lx[i] >= 0:
                first[nfirst] = lx[i]
                nfirst += 1
            if ps[i] >= 0:
                first[nfirst] = ps[i]
                nfirst += 1
            if nfirst == 0:
                continue
            ncur = nfirst
            for a in range(nfirst):
                cur[a].len = 1
                cur[a].u[0] = first[a]
            for length in range(2, max_length + 1):
                j = i + length - 1
                if j >= hi:
                    break
                nopt = 0
                if lx[j] >= 0:
                    opt[nopt] = lx[j]
                    nopt += 1
                if ps[j] >= 0:
                    opt[nopt] = ps[j]
                    nopt += 1
                if length >= 3:
                    for b in range(nopt):
                        for a in range(nfirst):
                            # left, right < 2**28 and length < 16 by construction
                            ekey = ((<int64_t>first[a]) << 32) | ((<int64_t>opt[b]) << 4) | length
                            ends.add(ekey)
                if ncur == 0:
                    continue
                nnext = 0
                for a in range(ncur):
                    for b in range(nopt):
                        nxt[nnext] = cur[a]
                        nxt[nnext].u[length - 1] = opt[b]
                        nxt[nnext].len = length
                        seqs.add(nxt[nnext])
                        nnext += 1
                for a in range(nnext):
                    cur[a] = nxt[a]
                ncur = nnext

    out_seqs = {}
    out_ends = {}
    cdef size_t slot
    cdef SeqSlot* sp
    cdef EndSlot* ep
    for slot in range(seqs.slots.size()):
        sp = &seqs.slots[slot]
        if sp.key.len and sp.count >= min_count:
            out_seqs[_as_tuple(sp.key)] = sp.count
    for slot in range(ends.slots.size()):
        ep = &ends.slots[slot]
        if ep.key >= 0 and ep.count >= min_count:
            ekey = ep.key
            out_ends[(ekey >> 32, (ekey >> 4) & 0xFFFFFFF, ekey & 0xF)] = ep.count
    return out_seqs, out_ends


cdef tuple _as_tuple(SeqKey& k):
    cdef int32_t* u = k.u
    if k.len == 2:
        return (u[0], u[1])
    if k.len == 3:
        return (u[0], u[1], u[2])
    if k.len == 4:
        return (u[0], u[1], u[2], u[3])
    if k.len == 5:
        return (u[0], u[1], u[2], u[3], u[4])
    return tuple([u[t] for t in range(k.len)])

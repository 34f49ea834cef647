import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seqassoc import _kernels_py, kernels

try:
    from seqassoc import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernel not built")


def _arrays(seed, n_units=12, n_tokens=400, drop=0.2, tagged=True):
    rng = np.random.default_rng(seed)
    lex = rng.integers(0, n_units, n_tokens).astype(np.int32)
    lex[rng.random(n_tokens) < drop] = -1
    if tagged:
        pos = rng.integers(n_units, n_units + 4, n_tokens).astype(np.int32)
        pos[rng.random(n_tokens) < 0.1] = -1
    else:
        pos = np.full(n_tokens, -1, dtype=np.int32)
    cuts = np.sort(rng.choice(np.arange(1, n_tokens), size=rng.integers(0, 10), replace=False))
    starts = np.concatenate([[0], cuts, [n_tokens]]).astype(np.int64)
    return lex, pos, starts


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_pure_fallback_selected_by_env():
    env = dict(os.environ, SEQASSOC_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from seqassoc import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_python_kernel_small_case():
    lex = np.array([0, 1, 0, 1], dtype=np.int32)
    pos = np.full(4, -1, dtype=np.int32)
    seqs, ends = _kernels_py.count_chunk(lex, pos, np.array([0, 4]), 3, 1)
    assert seqs == {(0, 1): 2, (1, 0): 1, (0, 1, 0): 1, (1, 0, 1): 1}
    assert ends == {(0, 0, 3): 1, (1, 1, 3): 1}


def test_dropped_slot_breaks_windows_but_not_endpoints():
    lex = np.array([0, -1, 1], dtype=np.int32)
    pos = np.full(3, -1, dtype=np.int32)
    seqs, ends = _kernels_py.count_chunk(lex, pos, np.array([0, 3]), 3, 1)
    assert seqs == {}
    assert ends == {(0, 1, 3): 1}


@pytest.mark.parametrize("impl", [_kernels_py, pytest.param(compiled, marks=needs_compiled)])
def test_rejects_bad_length(impl):
    lex = np.zeros(3, dtype=np.int32)
    with pytest.raises(ValueError):
        impl.count_chunk(lex, lex, np.array([0, 3]), 1, 1)


@needs_compiled
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(1, 4), st.booleans())
def test_compiled_matches_python(seed, max_length, min_count, tagged):
    lex, pos, starts = _arrays(seed, tagged=tagged)
    assert compiled.count_chunk(lex, pos, starts, max_length, min_count) == \
        _kernels_py.count_chunk(lex, pos, starts, max_length, min_count)


@needs_compiled
def test_compiled_handles_empty_chunk():
    empty = np.zeros(0, dtype=np.int32)
    assert compiled.count_chunk(empty, empty, np.array([0], dtype=np.int64), 5, 1) == ({}, {})

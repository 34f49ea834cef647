"""Acceptance suite: one ``criterion`` marker per headline requirement.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""
import math
import os
import random
import resource
import subprocess
import sys
import time

import pytest
from hypothesis import given, settings, strategies as st

import oracle
from conftest import index_of, random_corpus, unit_tuple
from seqassoc import index as idxmod, ingest, measures, pairwise, pipeline, stats
from seqassoc.index import Counts, merge

HERE = os.path.dirname(__file__)
TOL = 1e-3

# -- pairwise fixture -------------------------------------------------------

FIXTURE = "pairwise fixture: give me contingency table and delta-P"


@pytest.mark.criterion(FIXTURE)
def test_give_me_table():
    t = pairwise.contingency(189_583, 959_874, 15_049, 520_000_000)
    assert (t.a, t.b, t.c, t.d) == (15_049, 174_534, 944_825, 518_865_592)


@pytest.mark.criterion(FIXTURE)
def test_give_me_delta_p():
    t = pairwise.contingency(189_583, 959_874, 15_049, 520_000_000)
    lr, rl = pairwise.delta_p(t)
    assert lr == pytest.approx(0.015, abs=TOL)
    assert rl == pytest.approx(0.077, abs=TOL)


# -- worked example ---------------------------------------------------------

WORKED = "worked example: the european union budget"

BUDGET = ("the", "european", "union", "budget")


def budget_source():
    return measures.StubSource(
        pairs={
            ("the", "european"): (0.426, 0.035),
            ("european", "union"): (0.599, 0.228),
            ("union", "budget"): (0.000, 0.000),
            ("the", "european union budget"): (0.920, 0.000),
            ("the european union", "budget"): (0.000, 0.000),
        },
        endpoints={("the", "budget"): (0.054, 0.000)},
    )


@pytest.mark.criterion(WORKED)
@pytest.mark.parametrize("field, expected", [
    ("sum_lr", 1.025), ("mean_lr", 0.341), ("mean_rl", 0.087),
    ("min_lr", 0.0), ("min_rl", 0.0), ("cs", 0.762),
    ("e_lr", 0.054), ("e_rl", 0.0), ("rb_lr", 0.426), ("re_lr", 0.0),
    ("db_lr", 0.920), ("db_rl", 0.0), ("de_lr", 0.0), ("de_rl", 0.0),
])
def test_budget_vector(field, expected):
    vec = measures.score_sequence(BUDGET, budget_source())
    assert getattr(vec, field) == pytest.approx(expected, abs=TOL)


@pytest.mark.criterion(WORKED)
def test_budget_sum_rl_and_cc():
    vec = measures.score_sequence(BUDGET, budget_source())
    # the text reports 0.263 and 0.264 for the same quantity
    assert 0.263 - TOL <= vec.sum_rl <= 0.264 + TOL
    assert vec.cc == 0


# -- changed scalar / categorical -------------------------------------------

CHANGED = "changed scalar/categorical: globalisation adjustment fund"


@pytest.mark.criterion(CHANGED)
def test_globalisation_fund():
    seq = ("the", "european", "globalisation", "adjustment", "fund")
    src = measures.StubSource({
        ("the", "european"): (0.426, 0.035),
        ("european", "globalisation"): (0.112, 0.001),
        ("globalisation", "adjustment"): (0.310, 0.134),
        ("adjustment", "fund"): (0.044, 0.275),
    })
    scorer = measures.Scorer(src)
    rows = [r for r in scorer.explain(seq) if r[3] is not None]
    assert [round(r[3], 3) for r in rows] == [0.391, 0.111, 0.176, -0.231]
    assert scorer.changed_scalar(seq) == pytest.approx(0.447, abs=TOL)
    assert scorer.changed_categorical(seq) == 1


# -- oracle equivalence -----------------------------------------------------

ORACLE = "oracle equivalence on 20 random corpora (1e-12, < 60 s)"


@pytest.mark.criterion(ORACLE)
def test_oracle_equivalence():
    start = time.perf_counter()
    checked = 0
    for seed in range(20):
        docs = random_corpus(seed, max_tokens=10_000, tagged=seed % 2 == 0)
        assert sum(map(len, docs)) <= 10_000
        idx = index_of(docs)
        ref = oracle.count(docs)

        assert idx.N == ref.n
        assert {(u.kind, u.text): idx.unit_freq[u.id] for u in idx.units} == ref.units
        assert {unit_tuple(idx, k): v for k, v in idx.seq_freq.items()} == ref.seqs
        got_ends = {((idx.units[x].kind, idx.units[x].text), (idx.units[y].kind, idx.units[y].text), n): v
                    for (x, y, n), v in idx.endpoint_freq.items()}
        assert got_ends == ref.ends

        for item in measures.score_index(idx):
            want = oracle.vector(ref, unit_tuple(idx, item.key))
            got = item.vector.as_dict()
            for name in oracle.MEASURE_NAMES:
                assert math.isclose(got[name], want[name], rel_tol=1e-12, abs_tol=1e-12), \
                    (seed, item.text, name, got[name], want[name])
            assert not item.vector.pruned
            checked += 1
    elapsed = time.perf_counter() - start
    print(f"oracle: {checked} vectors in {elapsed:.1f}s")
    assert elapsed < 60


# -- property suite ---------------------------------------------------------

PROPS = "property suite"

symbols = st.sampled_from("abcde")
corpora = st.lists(st.lists(symbols, min_size=0, max_size=25), min_size=1, max_size=6)


def _plain_index(docs):
    return index_of([[(w, None) for w in d] for d in docs])


@pytest.mark.criterion(PROPS)
@settings(max_examples=60, deadline=None)
@given(corpora)
def test_prop_mean_min_identities(docs):
    idx = _plain_index(docs)
    for item in measures.score_index(idx):
        v, n = item.vector, item.length
        for d in ("lr", "rl"):
            assert v.get("mean", d) == v.get("sum", d) / (n - 1)
            assert v.get("min", d) <= v.get("mean", d) + 1e-15 * max(1.0, abs(v.get("mean", d)))
            if n == 2:
                assert v.get("sum", d) == v.get("mean", d) == v.get("min", d)


@pytest.mark.criterion(PROPS)
@settings(max_examples=60, deadline=None)
@given(corpora)
def test_prop_telescoping_reduced(docs):
    idx = _plain_index(docs)
    scorer = measures.Scorer(idx)
    for key in idx.sequences():
        if len(key) < 3:
            continue
        for d in ("lr", "rl"):
            # exact: removing an end-point removes exactly one pair
            assert scorer.reduced_begin(key, d) == scorer.pair_values(key, d)[0]
            assert scorer.reduced_end(key, d) == scorer.pair_values(key, d)[-1]
            # and the difference-of-sums form agrees up to rounding
            full = scorer.sum(key, d)
            assert math.isclose(scorer.reduced_begin(key, d), full - scorer.sum(key[1:], d), abs_tol=1e-12)
            assert math.isclose(scorer.reduced_end(key, d), full - scorer.sum(key[:-1], d), abs_tol=1e-12)


@pytest.mark.criterion(PROPS)
@settings(max_examples=60, deadline=None)
@given(corpora)
def test_prop_changed_scalar(docs):
    for item in measures.score_index(_plain_index(docs)):
        v = item.vector
        assert v.cs == v.sum_lr - v.sum_rl


tables = st.tuples(*[st.integers(0, 10**9)] * 4)


@pytest.mark.criterion(PROPS)
@settings(max_examples=300)
@given(tables)
def test_prop_base_ranges(cells):
    t = pairwise.ContingencyTable(*cells)
    for v in pairwise.delta_p(t):
        assert -1.0 <= v <= 1.0
    for v in pairwise.conditional_p(t):
        assert 0.0 <= v <= 1.0


def _counts(seed, table_key="k"):
    rng = random.Random(seed)
    seqs = {tuple(rng.choices(range(4), k=rng.randint(2, 3))): rng.randint(1, 9) for _ in range(8)}
    ends = {(rng.randrange(4), rng.randrange(4), 3): rng.randint(1, 9) for _ in range(4)}
    return Counts(table_key, seqs, ends, 1)


@pytest.mark.criterion(PROPS)
@settings(max_examples=100)
@given(st.integers(), st.integers(), st.integers())
def test_prop_merge_laws(sa, sb, sc):
    a, b, c = _counts(sa), _counts(sb), _counts(sc)
    assert merge(a, b) == merge(b, a)
    assert merge(merge(a, b), c) == merge(a, merge(b, c))
    assert merge(a, Counts("k")) == a


@pytest.mark.criterion(PROPS)
@settings(max_examples=40, deadline=None)
@given(corpora, st.floats(-1, 1), st.floats(0, 1), st.integers(0, 3), st.integers(0, 3))
def test_prop_filter_monotone(docs, link, raise_by, cc_hi, cc_drop):
    items = measures.score_index(_plain_index(docs))
    loose = pipeline.FilterConfig(link, cc_hi)
    strict = pipeline.FilterConfig(link + raise_by, max(0, cc_hi - cc_drop))
    kept_loose = {it.key for it in pipeline.apply_filter(items, loose)}
    kept_strict = {it.key for it in pipeline.apply_filter(items, strict)}
    assert kept_strict <= kept_loose


ints = st.lists(st.integers(-1000, 1000), min_size=2, max_size=40)


@pytest.mark.criterion(PROPS)
@settings(max_examples=200)
@given(st.lists(st.integers(-1000, 1000), min_size=2, max_size=40, unique=True))
def test_prop_spearman_identity_reversal(xs):
    assert stats.spearman(xs, xs) == 1.0
    assert stats.spearman(xs, [-x for x in xs]) == -1.0


@pytest.mark.criterion(PROPS)
@settings(max_examples=200)
@given(ints, st.data())
def test_prop_spearman_monotone_invariance(xs, data):
    ys = data.draw(st.lists(st.integers(-1000, 1000), min_size=len(xs), max_size=len(xs)))
    base = stats.spearman(xs, ys)
    moved = stats.spearman([math.exp(x / 100) for x in xs], [y ** 3 + 7 for y in ys])
    assert (math.isnan(base) and math.isnan(moved)) or base == moved


@pytest.mark.criterion(PROPS)
@settings(max_examples=30, deadline=None)
@given(corpora)
def test_prop_save_load_roundtrip(tmp_path_factory, docs):
    idx = _plain_index(docs)
    path = tmp_path_factory.mktemp("rt") / "x.idx"
    idxmod.save(idx, path)
    back = idxmod.load(path)
    assert back == idx
    assert [s.vector for s in measures.score_index(back)] == [s.vector for s in measures.score_index(idx)]


# -- large corpus -----------------------------------------------------------

LARGE = "large corpus (>= 1M tokens): correlation, sweep, filter, runtime"


@pytest.fixture(scope="module")
def large_corpus(tmp_path_factory):
    sys.path.insert(0, HERE)
    import docstring_corpus

    root = tmp_path_factory.mktemp("large")
    path = root / "docstrings.txt"
    n = docstring_corpus.write(path)
    return path, n


@pytest.fixture(scope="module")
def large_run(large_corpus):
    """Index and score through the CLI in a child process, timing both."""
    path, n = large_corpus
    idx_path = path.with_suffix(".idx")
    scores = path.with_suffix(".csv")
    start = time.perf_counter()
    for cmd in (["index", "--input", str(path), "--out", str(idx_path)],
                ["score", "--index", str(idx_path), "--out", str(scores)]):
        subprocess.run([sys.executable, "-m", "seqassoc.cli", *cmd], check=True)
    elapsed = time.perf_counter() - start
    peak_kib = resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss
    return idxmod.load(idx_path), elapsed, peak_kib, n


@pytest.fixture(scope="module")
def large_scores(large_run):
    return measures.score_index(large_run[0])


@pytest.mark.criterion(LARGE)
def test_large_runtime_and_memory(large_run):
    _, elapsed, peak_kib, n = large_run
    print(f"{n} tokens: index+score {elapsed:.1f}s, peak RSS {peak_kib / 1024:.0f} MiB")
    assert n >= 1_000_000
    assert elapsed < 300
    assert peak_kib < 4 * 1024 * 1024


@pytest.mark.criterion(LARGE)
def test_large_sum_mean_correlation(large_scores):
    cm = stats.correlation_matrix(large_scores, ("sum", "mean"))
    print(f"spearman(sum, mean): LR {cm.lr('sum', 'mean'):.3f} RL {cm.rl('sum', 'mean'):.3f}")
    assert cm.lr("sum", "mean") >= 0.75
    assert cm.rl("sum", "mean") >= 0.75


@pytest.mark.criterion(LARGE)
@pytest.mark.parametrize("vary, values", [("individual", [50, 100, 200, 400]), ("chunk", [2, 3, 4, 5])])
def test_large_threshold_sweep(large_corpus, vary, values):
    path, _ = large_corpus
    rows = stats.threshold_sweep(lambda: ingest.iter_file(path), values, vary)
    before = [r.sequences_before for r in rows]
    after = [r.sequences_after for r in rows]
    print(vary, list(zip(values, before, after)))
    assert all(x >= y for x, y in zip(before, before[1:]))
    assert all(x >= y for x, y in zip(after, after[1:]))
    drop_before = (before[0] - before[-1]) / before[0]
    drop_after = (after[0] - after[-1]) / after[0]
    assert drop_before > 0
    assert drop_after < drop_before


@pytest.mark.criterion(LARGE)
@pytest.mark.parametrize("direction", ["lr", "rl"])
def test_large_min_link_filter_exhaustive(large_scores, direction):
    cfg = pipeline.FilterConfig(min_link=0.01, max_cc=1, direction=direction)
    ranked = pipeline.select(large_scores, cfg, top_k=None)
    kept = {r.seq.key for r in ranked}
    weak = 0
    for item in large_scores:
        is_weak = item.vector.get("min", direction) < 0.01
        weak += is_weak
        if is_weak:
            assert item.key not in kept
        elif item.vector.cc <= 1:
            assert item.key in kept
    assert weak > 0


# -- measure variants ------------------------------------------------------

VARIANTS = "variants: conditional base disturbs min/e most; weighting identity"


@pytest.mark.criterion(VARIANTS)
def test_conditional_agreement_lowest_for_min_and_e(large_run, large_scores):
    cond = measures.score_index(large_run[0], measures.ScoreConfig(base="conditional"))
    agree = stats.variant_agreement(large_scores, cond)
    print({k: round(v, 3) for k, v in agree.items()})
    for d in ("lr", "rl"):
        constraint = max(agree[f"min_{d}"], agree[f"e_{d}"])
        aggregate = min(agree[f"sum_{d}"], agree[f"mean_{d}"])
        assert constraint < aggregate


@pytest.mark.criterion(VARIANTS)
def test_weighting_conflates_strength_and_frequency():
    assert pairwise.weight(0.9, 50) == pairwise.weight(0.045, 1000) == 45.0

from __future__ import annotations

import pytest

from trc.corpus import (
    BASE_DEFINITIONS, CorpusError, EQUALITY_ENTRY_IDS, CATALOG_COVERAGE,
    REFUTATION_ENTRY_IDS, list_theorems, parse_index, run_corpus,
    standard_context,
)
from trc.engine import EngineConfig
from trc.kernel import Falsum, NotEqual
from trc.terms import P1, P2, Pair, parse


def test_full_run_passes(corpus_report):
    assert corpus_report.ok
    assert len(corpus_report.results) == 85


def test_identity_definition():
    assert BASE_DEFINITIONS["I"] == Pair(P1, P2)


def test_equality_entries_pass(corpus_report):
    for ident in EQUALITY_ENTRY_IDS:
        assert corpus_report.result(ident).ok, ident


def test_refutation_entries_end_in_falsum(corpus, corpus_report):
    for ident in REFUTATION_ENTRY_IDS:
        result = corpus_report.result(ident)
        assert result.ok, ident
        for script in corpus.scripts[ident]:
            if script.hypothesis is not None:
                assert isinstance(script.statement, Falsum)
            else:
                assert isinstance(script.statement, NotEqual)


def test_reduction_web_uses_hypothesized_combinators(corpus):
    # each two-stage table refutation instantiates an earlier combinator with
    # a term built from its own hypothesized constant, exactly one per script
    expected = {
        "3-L": "L I", "3-O": "O I", "3-U": "U I", "3-W": "W I",
        "3-S": "S I", "3-D": "D I", "3-C": "C I", "3-Q1": "Q1 I", "3-Q3": "Q3 I",
        "3-J": "J I I", "3-G": "G I I", "3-H": "H I",
    }
    from trc.kernel import TheoremStep
    from trc.terms import render
    for ident, construction in expected.items():
        (script,) = corpus.scripts[ident]
        theorem_steps = [s for s in script.body if isinstance(s, TheoremStep)]
        assert theorem_steps, ident
        values = [render(v) for _, v in theorem_steps[-1].subst]
        assert construction in values, (ident, values)


def test_listing_has_one_line_per_theorem(corpus, corpus_report):
    lines = list_theorems(corpus, corpus_report)
    joined = "\n".join(lines)
    assert any(line.startswith("2.5 [refutation] <Eq,k(P2)> x != x") for line in lines)
    assert "3-R [refutation]" in joined
    assert "R $x $y $z = $y $z $x => false" in joined
    assert "compile-b [compile-success]" in joined
    scripts = sum(len(v) for v in corpus.scripts.values())
    specs = sum(1 for e in corpus.entries if e.source.startswith("spec:"))
    assert len(lines) == scripts + specs


def test_coverage_table_complete(corpus_report):
    lines = corpus_report.lines()
    coverage = [ln for ln in lines if ln.startswith("COVERAGE")]
    assert len(coverage) == len(CATALOG_COVERAGE)
    assert all(ln.endswith("OK") for ln in coverage)
    assert lines[-1] == "CORPUS PASS (85 entries)"


def test_index_drift_detected(corpus):
    bad = [e for e in corpus.entries if e.ident != "2.6"]
    import trc.corpus as corpus_mod
    with pytest.raises(CorpusError):
        corpus_mod._check_coverage(bad)


def test_parse_index_rejects_bad_lines():
    with pytest.raises(CorpusError):
        parse_index("justtwo words")
    with pytest.raises(CorpusError):
        parse_index("x unknown-kind file.trc")


def test_deleting_a_dependency_blocks_dependents(corpus):
    report = run_corpus(corpus.without("2.4a"))
    assert not report.ok
    for ident in ("2.6", "2.9b"):
        result = report.result(ident)
        assert result.status == "blocked"
        assert "2.4a" in result.detail
    # transitively blocked table entries report their own missing dependency
    assert report.result("3-M").status == "blocked"
    assert report.result("2.4b").ok  # unrelated entries still run


def test_printed_axioms_break_the_documented_entries(corpus):
    report = run_corpus(corpus, EngineConfig(corrected_axioms=False))
    assert not report.ok
    assert report.result("2.2a").status == "fail"
    assert report.result("2.3b").status in ("fail", "blocked")
    assert report.result("2.3c").status in ("fail", "blocked")
    note = [ln for ln in report.lines() if ln.startswith("NOTE")]
    assert note and "misprint" in note[0]


def test_jobs_scheduling_matches_sequential(corpus):
    seq = run_corpus(corpus, jobs=1)
    par = run_corpus(corpus, jobs=4)
    assert seq.lines(trace=True) == par.lines(trace=True)


def test_standard_context_registers_rules():
    registry, ruleset = standard_context()
    names = {r.name for r in ruleset.rules}
    assert {"2.1d", "2.1e", "2.2a.2", "2.2c.1"} <= names
    assert "2.4a" not in registry.ids()  # equality bootstrap only
    assert "2.2c.1" in registry.ids()


def test_runtime_budget(corpus_report):
    total = sum(rep.wall_time for r in corpus_report.results for rep in r.reports)
    assert total < 60.0

import csv
import io
import json

import pytest

from corpus_forge.model import Document, FilterOutcome, Reason
from corpus_forge.stats import (
    FunnelReport,
    SourceStats,
    StageStats,
    render_funnel,
    render_table,
    source_distribution,
    tally,
)


def _docs(n, source="web", words=3):
    return [Document(f"{source}-{i}", source, " ".join(["збор"] * words)) for i in range(n)]


def test_ten_in_seven_out():
    before = _docs(10)
    outcomes = [FilterOutcome.drop(Reason.BULLET_RATIO)] * 2 + [FilterOutcome.drop(Reason.ELLIPSIS_RATIO)]
    s = tally(before, before[:7], "gopher", outcomes)
    assert (s.docs_in, s.docs_out, s.dropped) == (10, 7, 3)
    assert s.drop_reasons == {"BulletRatio": 2, "EllipsisRatio": 1}
    assert (s.words_in, s.words_out) == (30, 21)


def test_inconsistent_histogram_rejected():
    with pytest.raises(ValueError):
        tally(_docs(3), _docs(1), "x", {"BulletRatio": 1})


def test_word_totals_match_recount(small_corpus):
    dist = source_distribution(small_corpus, small_corpus[::2])
    # independent recount: whitespace tokens per source
    recount_in, recount_out = {}, {}
    for d in small_corpus:
        recount_in[d.source] = recount_in.get(d.source, 0) + len(d.text.split())
    for d in small_corpus[::2]:
        recount_out[d.source] = recount_out.get(d.source, 0) + len(d.text.split())
    assert {s.source: s.words_in for s in dist} == recount_in
    assert {s.source: s.words_out for s in dist} == {k: recount_out.get(k, 0) for k in recount_in}


def test_percentages():
    report = FunnelReport(sources=[SourceStats("a", 100, 75), SourceStats("b", 100, 25)])
    md = render_table(report)
    assert "| a | 75 | 75.00% |" in md and "| b | 25 | 25.00% |" in md
    assert "**100**" in md
    single = FunnelReport(sources=[SourceStats("only", 5, 5)])
    assert "100.00%" in render_table(single)


def test_rows_sorted_by_words_and_basis():
    report = FunnelReport(sources=[SourceStats("small", 90, 10), SourceStats("big", 10, 90)])
    rows = list(csv.reader(io.StringIO(render_table(report, "csv"))))
    assert [r[0] for r in rows] == ["Source", "big", "small", "Total"]
    rows_in = list(csv.reader(io.StringIO(render_table(report, "csv", basis="in"))))
    assert [r[0] for r in rows_in][1] == "small"


def test_json_round_trip():
    report = FunnelReport(
        stages=[StageStats("c4", 10, 9, 100, 80, {"EmptyAfterC4": 1}), StageStats("chunk", 9, 9, 80, 80, {}, 12)],
        sources=[SourceStats("hplt2", 100, 80)],
    )
    assert FunnelReport.from_json(render_table(report, "json")) == report
    assert json.loads(report.to_json())["stages"][1]["records_out"] == 12


def test_unknown_format():
    with pytest.raises(ValueError):
        render_table(FunnelReport(), "xml")


def test_funnel_rendering_and_merge():
    a = StageStats("pii", 2, 2, 10, 10)
    b = StageStats("pii", 3, 1, 9, 3, {"X": 2})
    merged = a.merge(b)
    assert (merged.docs_in, merged.docs_out, merged.drop_reasons) == (5, 3, {"X": 2})
    assert "| pii | 5 | 3 | 19 | 13 | X=2 |" in render_funnel(FunnelReport([merged]))

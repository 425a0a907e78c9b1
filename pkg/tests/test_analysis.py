"""KL divergence and seed-space enumeration tests.

The enumeration workers inline the generator recurrence for speed, so the
tests here pin them to the public SplitMix64 API by exhaustive comparison
over whole seed spaces and by spot checks deep in the K=6 space.
"""

import json
import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdrd.analysis import (
    COUNTS_LIMIT,
    EnumerationReport,
    ScaleError,
    _election_chunk,
    _ordering_chunk,
    _run_chunks,
    election_distribution,
    format_nats,
    kl,
    modified_kl,
    report_document,
    report_to_json,
    render_report,
    sc_ordering_distribution,
)
from vdrd.engine import sort_voters, tally_with_seed
from vdrd.model import BallotSheet, Candidate, ElectionConfig, VoterBallot
from vdrd.oracle import Distribution, point_mass, uniform
from vdrd.rng import SplitMix64


def _sheet(c):
    return BallotSheet(tuple(Candidate(f"c{i}", 0) for i in range(c)))


def test_kl_identical_is_exactly_zero():
    p = Distribution({"a": 0.3, "b": 0.7}, 2)
    assert kl(p, p) == 0.0


def test_kl_point_vs_even_is_ln2():
    p = point_mass("a", 2)
    q = Distribution({"a": 0.5, "b": 0.5}, 2)
    assert math.isclose(kl(p, q), math.log(2), rel_tol=0, abs_tol=1e-12)


def test_kl_missing_mass_is_infinite():
    p = Distribution({"a": 0.5, "b": 0.5}, 2)
    q = point_mass("a", 2)
    assert kl(p, q) == math.inf


def test_kl_space_mismatch_rejected():
    with pytest.raises(ValueError):
        kl(uniform(2), uniform(3))


def test_kl_handles_default_mass_blocks():
    # uniform wanted (default-mass only) vs explicit equivalents and holes
    p = uniform(10)
    q = Distribution({i: 0.1 for i in range(10)}, 10)
    assert math.isclose(kl(p, q), 0.0, rel_tol=0, abs_tol=1e-15)
    q_hole = Distribution({0: 1.0}, 10)
    assert kl(p, q_hole) == math.inf
    assert math.isclose(kl(q_hole, p), math.log(10), rel_tol=0, abs_tol=1e-12)


@given(st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=2, max_size=8),
       st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=2, max_size=8))
@settings(max_examples=200)
def test_kl_nonnegative(ws_p, ws_q):
    n = min(len(ws_p), len(ws_q))
    sp, sq = sum(ws_p[:n]), sum(ws_q[:n])
    p = Distribution({i: w / sp for i, w in enumerate(ws_p[:n])}, n)
    q = Distribution({i: w / sq for i, w in enumerate(ws_q[:n])}, n)
    assert kl(p, q) >= -1e-12


def test_modified_kl_identical_is_zero():
    p = Distribution({"a": 0.4, "b": 0.6}, 2)
    assert modified_kl(p, p, 10) == 0.0


def test_modified_kl_hand_fixture():
    # |X| = 2, M = 10, P uniform, Q a point mass: mixtures are (0.5, 0.5)
    # and (11/12, 1/12), giving 0.5*ln(36/11); derived by hand
    p = Distribution({"a": 0.5, "b": 0.5}, 2)
    q = point_mass("a", 2)
    expected = 0.5 * math.log(36 / 11)
    assert math.isclose(modified_kl(p, q, 10), expected, rel_tol=0, abs_tol=1e-12)


def test_modified_kl_finite_where_kl_infinite():
    p = Distribution({"a": 0.5, "b": 0.5}, 2)
    q = point_mass("a", 2)
    assert kl(p, q) == math.inf
    assert math.isfinite(modified_kl(p, q, 10 ** 6))


def test_modified_kl_approaches_kl():
    p = Distribution({"a": 0.7, "b": 0.3}, 2)
    q = Distribution({"a": 0.2, "b": 0.8}, 2)
    base = kl(p, q)
    diffs = [abs(modified_kl(p, q, 10 ** e) - base) for e in range(2, 7)]
    assert all(later < earlier for earlier, later in zip(diffs, diffs[1:]))
    assert diffs[-1] < 1e-5


def test_modified_kl_weight_override():
    p = Distribution({"a": 0.5, "b": 0.5}, 2)
    q = point_mass("a", 2)
    default_weight = modified_kl(p, q, 10)
    assert modified_kl(p, q, 10, weight=2) == default_weight
    assert modified_kl(p, q, 10, weight=50) < default_weight
    with pytest.raises(ValueError):
        modified_kl(p, q, 10, weight=0)


def test_format_nats():
    assert format_nats(math.inf) == "inf"
    assert format_nats(0.0) == "0.00000000000e+00"
    assert format_nats(0.00251) == "2.51000000000e-03"
    assert len(format_nats(1 / 3).replace("e-01", "")) == 13  # 12 digits + dot


# ---------------------------------------------------------------------------
# worker loops pinned to the public generator API
# ---------------------------------------------------------------------------


def test_ordering_chunk_matches_generator_exhaustive():
    c, m = 4, 1000
    counts, place = _ordering_chunk(c, 0, m)
    expected = Counter(tuple(SplitMix64(s).permutation(c)) for s in range(m))
    assert counts == dict(expected)
    assert sum(counts.values()) == m
    for pos in range(c):
        for val in range(c):
            assert place[pos][val] == sum(
                n for t, n in expected.items() if t[pos] == val)


@given(st.integers(min_value=0, max_value=10 ** 6 - 1))
@settings(max_examples=150)
def test_ordering_chunk_matches_generator_sampled_k6(seed):
    counts, _ = _ordering_chunk(7, seed, seed + 1)
    assert counts == {tuple(SplitMix64(seed).permutation(7)): 1}


ELECTION_FIXTURE = [
    VoterBallot(7, (1, 3)),
    VoterBallot(23, (2, 1, 3)),
    VoterBallot(23, ()),      # empty ballot forces redraws
    VoterBallot(90, (3,)),
]


def test_election_chunk_matches_tally_exhaustive():
    config = ElectionConfig(k=2, n_places=3)
    voters = sort_voters(ELECTION_FIXTURE)
    prefs = tuple(b.prefs for b in voters)
    counts, place = _election_chunk(prefs, 3, 3, 0, 100)
    expected = Counter(
        tally_with_seed(_sheet(3), ELECTION_FIXTURE, config, s).elected
        for s in range(100))
    assert counts == dict(expected)
    assert sum(counts.values()) == 100
    for pos in range(3):
        for val in range(4):  # 0 = unfilled
            want = sum(n for t, n in expected.items()
                       if (t[pos] if pos < len(t) else 0) == val)
            assert place[pos][val] == want


def test_election_chunk_table_and_scan_paths_agree():
    voters = sort_voters(ELECTION_FIXTURE)
    prefs = tuple(b.prefs for b in voters)
    with_table = _election_chunk(prefs, 3, 3, 0, 100, use_table=True)
    without = _election_chunk(prefs, 3, 3, 0, 100, use_table=False)
    assert with_table == without


def test_run_chunks_partitioning_invariant():
    prefs = tuple(b.prefs for b in sort_voters(ELECTION_FIXTURE))
    serial = _run_chunks(_election_chunk, (prefs, 3, 3), 100, threads=1)
    parallel = _run_chunks(_election_chunk, (prefs, 3, 3), 100, threads=3)
    assert serial[0] == parallel[0]
    assert serial[1] == parallel[1]


# ---------------------------------------------------------------------------
# full analyses
# ---------------------------------------------------------------------------


def test_sc_single_candidate_all_zero():
    report = sc_ordering_distribution(1, ElectionConfig(k=2))
    assert report.kl_nats == 0.0
    assert report.modified_kl_nats == 0.0
    assert report.place_kl_nats == (0.0,)
    assert report.counts == {(0,): 100}


def test_sc_counts_sum_to_m():
    report = sc_ordering_distribution(3, ElectionConfig(k=3))
    assert sum(report.counts.values()) == 1000
    assert report.space_size == 6
    assert len(report.counts) == 6
    assert math.isfinite(report.kl_nats)


def test_sc_two_candidates_k4_balance():
    # generator-quality smoke bound: the two orderings stay within 1% of M
    report = sc_ordering_distribution(2, ElectionConfig(k=4))
    counts = list(report.counts.values())
    assert len(counts) == 2
    assert abs(counts[0] - counts[1]) < 10 ** 4 / 100


def test_sc_threads_do_not_change_output():
    one = sc_ordering_distribution(3, ElectionConfig(k=3), threads=1)
    two = sc_ordering_distribution(3, ElectionConfig(k=3), threads=2)
    assert one == two
    assert report_to_json(one) == report_to_json(two)


def test_scale_guard():
    with pytest.raises(ScaleError):
        sc_ordering_distribution(3, ElectionConfig(k=9))
    with pytest.raises(ScaleError):
        election_distribution(
            [VoterBallot(0, (1,))], _sheet(1), ElectionConfig(k=9))


def test_election_single_voter_zero_divergence():
    config = ElectionConfig(k=2, n_places=2)
    report = election_distribution([VoterBallot(5, (2, 1))], _sheet(2), config)
    assert report.counts == {(2, 1): 100}
    assert report.kl_nats == 0.0
    assert report.modified_kl_nats == 0.0
    assert all(x == 0.0 for x in report.place_kl_nats)


def test_election_two_opposed_voters_k3():
    config = ElectionConfig(k=3, n_places=1)
    ballots = [VoterBallot(1, (1,)), VoterBallot(2, (2,))]
    report = election_distribution(ballots, _sheet(2), config)
    assert sum(report.counts.values()) == 1000
    # both outcomes near half: divergence small but nonzero in general
    assert report.kl_nats < 1e-3
    assert report.space_size == 2
    assert report.places == 1


def test_election_two_opposed_voters_full_k6():
    # exhaustive over 10^6 seeds: the split lands within ~0.1% of even
    config = ElectionConfig(k=6, n_places=1)
    ballots = [VoterBallot(111111, (1,)), VoterBallot(999999, (2,))]
    report = election_distribution(ballots, _sheet(2), config)
    assert sum(report.counts.values()) == 10 ** 6
    assert report.kl_nats < 1e-6


def test_election_counts_match_direct_tally_loop():
    config = ElectionConfig(k=2, n_places=3)
    report = election_distribution(ELECTION_FIXTURE, _sheet(3), config)
    expected = Counter(
        tally_with_seed(_sheet(3), ELECTION_FIXTURE, config, s).elected
        for s in range(100))
    assert report.counts == dict(expected)


def test_election_threads_do_not_change_output():
    config = ElectionConfig(k=2, n_places=2)
    ballots = [VoterBallot(3, (1, 2)), VoterBallot(4, (2, 1))]
    one = election_distribution(ballots, _sheet(2), config, threads=1)
    two = election_distribution(ballots, _sheet(2), config, threads=2)
    assert one == two


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def test_report_json_roundtrip_and_layout():
    report = sc_ordering_distribution(3, ElectionConfig(k=2))
    doc = json.loads(report_to_json(report))
    assert doc["format"] == "vdrd-analysis/1"
    assert doc["kind"] == "orderings"
    assert doc["k"] == 2 and doc["m"] == 100
    assert doc["space_size"] == 6
    assert doc["counts_included"] is True
    assert sum(doc["counts"].values()) == 100
    assert all(len(key.split(",")) == 3 for key in doc["counts"])
    assert doc["place_counts"]["labels"] == ["0", "1", "2"]
    assert len(doc["place_kl_nats"]) == 3


def test_report_json_election_labels():
    config = ElectionConfig(k=1, n_places=2)
    ballots = [VoterBallot(3, (1, 2)), VoterBallot(4, (2, 1))]
    report = election_distribution(ballots, _sheet(2), config)
    doc = json.loads(report_to_json(report))
    assert doc["kind"] == "elections"
    assert doc["place_counts"]["labels"] == ["unfilled", "1", "2"]
    assert all(">" in key or key.isdigit() for key in doc["counts"])


def test_report_counts_dropped_above_limit():
    big = {(i,): 1 for i in range(COUNTS_LIMIT + 1)}
    report = EnumerationReport(
        kind="orderings", k=6, m=len(big), c=9, places=None,
        space_size=len(big), mixture_weight=len(big), counts=big,
        place_counts=((1,),), distribution=uniform(len(big)),
        kl_nats=0.0, modified_kl_nats=0.0, place_kl_nats=(0.0,))
    doc = report_document(report)
    assert doc["counts_included"] is False
    assert doc["counts"] is None
    assert doc["support_size"] == COUNTS_LIMIT + 1


def test_report_inf_token():
    # C=4 with K=1 leaves most orderings unseen: KL must be the inf token
    report = sc_ordering_distribution(4, ElectionConfig(k=1))
    assert report.kl_nats == math.inf
    doc = report_document(report)
    assert doc["kl_nats"] == "inf"
    assert doc["modified_kl_nats"] != "inf"
    text = render_report(report)
    assert "kl: inf nats" in text


def test_render_report_mentions_parameters():
    report = sc_ordering_distribution(2, ElectionConfig(k=2))
    text = render_report(report)
    assert "k: 2 (100 seeds enumerated)" in text
    assert "candidates: 2" in text

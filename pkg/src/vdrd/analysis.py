"""Exhaustive seed-space enumeration and KL-divergence measurement.

Two questions get answered here, both by running every one of the M = 10^K
possible seeds:

* how close the drawn ballot-paper orderings come to uniform over all C!
  orderings (and, per sheet place, to uniform over the C candidates);
* how close the realized election outcomes come to the exact
  random-dictator distribution.

Distances are Kullback-Leibler divergences in nats, wanted distribution
first. Enumeration results are exact integer counts, so reports are
byte-identical across runs and across worker counts.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import factorial
from typing import Optional, Sequence

from .engine import sort_voters
from .model import BallotSheet, ElectionConfig, NoElectableError, VoterBallot, format_prefs
from .oracle import (
    UNFILLED,
    Distribution,
    place_marginals,
    rd_distribution,
    sequence_space_size,
    uniform,
)

REPORT_FORMAT = "vdrd-analysis/1"

# Above this many seeds, refuse to enumerate unless forced.
MAX_UNFORCED_K = 8

# Outcome counts are dropped from report files above this support size.
COUNTS_LIMIT = 50_000

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Largest (2^C masks) x (V voters) table the election loop will precompute.
_TABLE_LIMIT = 4_000_000


class ScaleError(RuntimeError):
    """Enumeration would exceed desk scale; pass force=True to run anyway."""


def _check_scale(config: ElectionConfig, force: bool) -> None:
    if config.k > MAX_UNFORCED_K and not force:
        raise ScaleError(
            f"k={config.k} means 10^{config.k} seeds; pass --force to run anyway"
        )


def kl(p: Distribution, q: Distribution) -> float:
    """KL(P||Q) in nats: sum of P(x) ln(P(x)/Q(x)) over the support of P.

    Returns +inf when Q gives zero mass anywhere P does not. Terms are
    summed with fsum, so the result is independent of outcome order.
    """
    if p.size != q.size:
        raise ValueError(f"outcome spaces differ ({p.size} vs {q.size})")
    keys = set(p.mass)
    keys.update(q.mass)
    terms = []
    for x in keys:
        px = p.prob(x)
        if px <= 0:
            continue
        qx = q.prob(x)
        if qx <= 0:
            return math.inf
        terms.append(px * math.log(px / qx))
    rest = p.size - len(keys)
    if rest > 0 and p.default > 0:
        if q.default <= 0:
            return math.inf
        terms.append(rest * p.default * math.log(p.default / q.default))
    return math.fsum(terms)


def _mixed(d: Distribution, m: int, weight: int) -> Distribution:
    share = weight / d.size
    denom = m + weight
    mass = {x: (m * px + share) / denom for x, px in d.mass.items()}
    return Distribution(mass, d.size, (m * d.default + share) / denom)


def modified_kl(p: Distribution, q: Distribution, m: int,
                weight: Optional[int] = None) -> float:
    """KL between mixtures of each distribution with the uniform one.

    Each side becomes (m parts itself + weight parts uniform) / (m + weight),
    where weight defaults to the outcome-space size. The mixture gives every
    outcome positive mass, so the result is finite even when Q leaves part
    of the space unreachable.
    """
    if p.size != q.size:
        raise ValueError(f"outcome spaces differ ({p.size} vs {q.size})")
    w = p.size if weight is None else weight
    if w < 1:
        raise ValueError(f"mixture weight must be >= 1, got {w}")
    if m < 1:
        raise ValueError(f"mixture needs m >= 1, got {m}")
    return kl(_mixed(p, m, w), _mixed(q, m, w))


def format_nats(x: float) -> str:
    """12 significant digits; infinity renders as the literal token 'inf'."""
    if math.isinf(x):
        return "inf"
    return format(x, ".11e")


# ---------------------------------------------------------------------------
# Enumeration workers. The generator recurrence is inlined for speed; the
# test suite pins both loops to the public SplitMix64 API by exhaustive
# comparison over whole seed spaces.
# ---------------------------------------------------------------------------


def _ordering_chunk(c: int, start: int, stop: int):
    """Count the ordering drawn for each seed in [start, stop).

    Returns (counts by permutation tuple, per-place value counts). The
    permutation entries index the pre-ordered candidate list; place p of
    the sheet holds entry p of the tuple.
    """
    limits = [0, 0] + [(1 << 64) - ((1 << 64) % n) for n in range(2, c + 1)]
    counts: dict[tuple[int, ...], int] = {}
    place = [[0] * c for _ in range(c)]
    base = list(range(c))
    for s in range(start, stop):
        state = s
        a = base[:]
        for i in range(c - 1, 0, -1):
            limit = limits[i + 1]
            while True:
                state = (state + _GAMMA) & _MASK
                z = (state ^ (state >> 30)) * _MIX1 & _MASK
                z = (z ^ (z >> 27)) * _MIX2 & _MASK
                u = z ^ (z >> 31)
                if u < limit:
                    break
            j = u % (i + 1)
            a[i], a[j] = a[j], a[i]
        t = tuple(a)
        counts[t] = counts.get(t, 0) + 1
        for pos in range(c):
            place[pos][a[pos]] += 1
    return counts, place


def _build_top_table(prefs: Sequence[tuple[int, ...]], c: int):
    """top_table[elected_mask][voter] = top remaining candidate, 0 if none."""
    table = []
    for mask in range(1 << c):
        row = []
        for p in prefs:
            top = 0
            for x in p:
                if not mask & (1 << (x - 1)):
                    top = x
                    break
            row.append(top)
        table.append(row)
    return table


def _election_chunk(prefs: tuple[tuple[int, ...], ...], c: int, places: int,
                    start: int, stop: int, use_table: Optional[bool] = None):
    """Tally each seed in [start, stop) and count the elected sequences.

    ``prefs`` must already be in sorted voter order. Returns (counts by
    elected sequence, per-place counts with column 0 = unfilled).
    """
    v = len(prefs)
    limit_v = (1 << 64) - ((1 << 64) % v)
    if use_table is None:
        use_table = (1 << c) * v <= _TABLE_LIMIT
    table = _build_top_table(prefs, c) if use_table else None
    union_mask = 0
    for p in prefs:
        for x in p:
            union_mask |= 1 << (x - 1)
    counts: dict[tuple[int, ...], int] = {}
    place = [[0] * (c + 1) for _ in range(places)]
    for s in range(start, stop):
        state = s
        elected_mask = 0
        seq: list[int] = []
        for _ in range(places):
            if not union_mask & ~elected_mask:
                break
            if table is not None:
                row = table[elected_mask]
            while True:
                while True:
                    state = (state + _GAMMA) & _MASK
                    z = (state ^ (state >> 30)) * _MIX1 & _MASK
                    z = (z ^ (z >> 27)) * _MIX2 & _MASK
                    u = z ^ (z >> 31)
                    if u < limit_v:
                        break
                idx = u % v
                if table is not None:
                    top = row[idx]
                else:
                    top = 0
                    for x in prefs[idx]:
                        if not elected_mask & (1 << (x - 1)):
                            top = x
                            break
                if top:
                    break
            seq.append(top)
            elected_mask |= 1 << (top - 1)
        t = tuple(seq)
        counts[t] = counts.get(t, 0) + 1
        n = len(seq)
        for pos in range(places):
            place[pos][seq[pos] if pos < n else UNFILLED] += 1
    return counts, place


def _merge(parts):
    counts: dict = {}
    place = None
    for part_counts, part_place in parts:
        for key, n in part_counts.items():
            counts[key] = counts.get(key, 0) + n
        if place is None:
            place = [row[:] for row in part_place]
        else:
            for row, part_row in zip(place, part_place):
                for i, n in enumerate(part_row):
                    row[i] += n
    return counts, place


def _run_chunks(worker, args: tuple, m: int, threads: int):
    """Partition [0, m) into ranges, run the worker, merge by addition.

    Counts merge commutatively, so the result is identical for every
    partitioning and worker count.
    """
    if threads <= 1:
        return worker(*args, 0, m)
    bounds = []
    step = -(-m // threads)
    lo = 0
    while lo < m:
        hi = min(lo + step, m)
        bounds.append((lo, hi))
        lo = hi
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_worker_call, [(worker, args, b) for b in bounds]))
    return _merge(parts)


def _worker_call(job):
    worker, args, (lo, hi) = job
    return worker(*args, lo, hi)


@dataclass(frozen=True)
class EnumerationReport:
    """Everything measured by one exhaustive seed-space enumeration."""

    kind: str                 # "orderings" or "elections"
    k: int
    m: int
    c: int
    places: Optional[int]
    space_size: int
    mixture_weight: int
    counts: dict
    place_counts: tuple[tuple[int, ...], ...]
    distribution: Distribution
    kl_nats: float
    modified_kl_nats: float
    place_kl_nats: tuple[float, ...]


def sc_ordering_distribution(c: int, config: ElectionConfig,
                             mixture_weight: Optional[int] = None,
                             threads: int = 1, force: bool = False) -> EnumerationReport:
    """Measure how far drawn ballot orderings are from uniform.

    Every seed in [0, M) seeds a fresh generator and draws one permutation
    of the C pre-ordered candidates. The wanted distribution is uniform
    over all C! orderings; per sheet place, uniform over the C candidates.
    """
    if c < 1:
        raise ValueError("need at least one candidate")
    _check_scale(config, force)
    m = config.m
    counts, place = _run_chunks(_ordering_chunk, (c,), m, threads)
    space = factorial(c)
    q = Distribution({t: counts[t] / m for t in sorted(counts)}, space)
    p = uniform(space)
    weight = space if mixture_weight is None else mixture_weight
    place_kls = []
    p_place = uniform(c)
    for pos in range(c):
        q_place = Distribution(
            {val: n / m for val, n in enumerate(place[pos]) if n}, c)
        place_kls.append(kl(p_place, q_place))
    return EnumerationReport(
        kind="orderings",
        k=config.k,
        m=m,
        c=c,
        places=None,
        space_size=space,
        mixture_weight=weight,
        counts=counts,
        place_counts=tuple(tuple(row) for row in place),
        distribution=q,
        kl_nats=kl(p, q),
        modified_kl_nats=modified_kl(p, q, m, weight),
        place_kl_nats=tuple(place_kls),
    )


def election_distribution(ballots: Sequence[VoterBallot], sheet: BallotSheet,
                          config: ElectionConfig,
                          mixture_weight: Optional[int] = None,
                          threads: int = 1, force: bool = False) -> EnumerationReport:
    """Measure how far realized election outcomes are from the exact rule.

    Every seed in [0, M) runs the full multi-seat tally; the resulting
    counts over elected sequences are compared to the exact
    random-dictator distribution for the same ballots.
    """
    _check_scale(config, force)
    c = len(sheet)
    if c < 1:
        raise ValueError("ballot sheet is empty")
    voters = sort_voters(ballots)
    if not voters:
        raise ValueError("at least one ballot required")
    if all(not b.prefs for b in voters):
        raise NoElectableError("every ballot is empty")
    prefs = tuple(b.prefs for b in voters)
    m = config.m
    places = config.n_places
    counts, place = _run_chunks(_election_chunk, (prefs, c, places), m, threads)
    space = sequence_space_size(c, places)
    q = Distribution({t: counts[t] / m for t in sorted(counts)}, space)
    p = rd_distribution(ballots, places, c)
    weight = space if mixture_weight is None else mixture_weight
    p_places = place_marginals(p, c, places)
    place_kls = []
    for pos in range(places):
        q_place = Distribution(
            {val: n / m for val, n in enumerate(place[pos]) if n}, c + 1)
        place_kls.append(kl(p_places[pos], q_place))
    return EnumerationReport(
        kind="elections",
        k=config.k,
        m=m,
        c=c,
        places=places,
        space_size=space,
        mixture_weight=weight,
        counts=counts,
        place_counts=tuple(tuple(row) for row in place),
        distribution=q,
        kl_nats=kl(p, q),
        modified_kl_nats=modified_kl(p, q, m, weight),
        place_kl_nats=tuple(place_kls),
    )


def _outcome_key(report: EnumerationReport, outcome: tuple) -> str:
    if report.kind == "orderings":
        return ",".join(str(x) for x in outcome)
    return format_prefs(outcome)


def _place_labels(report: EnumerationReport) -> list[str]:
    if report.kind == "orderings":
        return [str(i) for i in range(report.c)]
    return ["unfilled"] + [str(i) for i in range(1, report.c + 1)]


def report_document(report: EnumerationReport) -> dict:
    """Machine-readable document for a report; schema in the README.

    KL values are strings so that infinity has a stable token and every
    value carries exactly 12 significant digits.
    """
    include_counts = len(report.counts) <= COUNTS_LIMIT
    doc = {
        "format": REPORT_FORMAT,
        "kind": report.kind,
        "k": report.k,
        "m": report.m,
        "candidates": report.c,
        "places": report.places,
        "space_size": report.space_size,
        "mixture_weight": report.mixture_weight,
        "kl_nats": format_nats(report.kl_nats),
        "modified_kl_nats": format_nats(report.modified_kl_nats),
        "place_kl_nats": [format_nats(x) for x in report.place_kl_nats],
        "place_counts": {
            "labels": _place_labels(report),
            "rows": [list(row) for row in report.place_counts],
        },
        "counts_included": include_counts,
        "support_size": len(report.counts),
        "counts": (
            {_outcome_key(report, t): report.counts[t] for t in sorted(report.counts)}
            if include_counts else None
        ),
    }
    return doc


def report_to_json(report: EnumerationReport) -> str:
    return json.dumps(report_document(report), indent=2) + "\n"


def render_report(report: EnumerationReport) -> str:
    """Human-readable summary of an enumeration report."""
    what = ("orderings of the ballot sheet" if report.kind == "orderings"
            else "elected sequences")
    lines = [
        f"analysis: {what}",
        f"k: {report.k} ({report.m} seeds enumerated)",
        f"candidates: {report.c}",
    ]
    if report.places is not None:
        lines.append(f"places: {report.places}")
    lines += [
        f"outcome space: {report.space_size}",
        f"outcomes seen: {len(report.counts)}",
        f"kl: {format_nats(report.kl_nats)} nats",
        f"modified kl (weight {report.mixture_weight}):"
        f" {format_nats(report.modified_kl_nats)} nats",
        f"max place kl: {format_nats(max(report.place_kl_nats))} nats",
        "place kl: " + " ".join(format_nats(x) for x in report.place_kl_nats),
    ]
    return "\n".join(lines) + "\n"

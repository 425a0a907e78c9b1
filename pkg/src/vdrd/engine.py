"""The electoral procedure: candidate ordering, ballot sheet, tally, checking.

The whole pipeline is a pure function of its inputs. Replaying it with the
same files must reproduce every byte, which is what makes the election
auditable by third parties.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .model import (
    BallotSheet,
    Candidate,
    ClaimedResult,
    ElectionConfig,
    ElectionResult,
    NoElectableError,
    SeatRecord,
    VoterBallot,
    candidate_seed_sum,
    parse_ballots,
    parse_candidates,
    voter_seed_sum,
)
from .rng import SplitMix64


def order_candidates(raw: Iterable[Candidate]) -> list[Candidate]:
    """Sort candidates ascending by seed contribution, ties by name.

    Names compare as code point sequences. This pre-ordering pins down
    which candidate the later pseudo-random permutation picks for each
    sheet position.
    """
    candidates = list(raw)
    names = {c.name for c in candidates}
    if len(names) != len(candidates):
        raise ValueError("candidate names must be unique")
    return sorted(candidates, key=lambda c: (c.seed, c.name))


def ballot_permutation(ordered: Sequence[Candidate], config: ElectionConfig) -> BallotSheet:
    """Number candidates 1..C in the order drawn from their seed sum.

    The generator is seeded with the sum of candidate seed contributions
    mod M; sheet position i+1 holds ordered[p[i]] where p is the drawn
    permutation.
    """
    candidates = list(ordered)
    if not candidates:
        raise ValueError("at least one candidate required")
    if candidates != order_candidates(candidates):
        raise ValueError("candidates must be pre-ordered (see order_candidates)")
    g = SplitMix64(candidate_seed_sum(candidates, config))
    p = g.permutation(len(candidates))
    return BallotSheet(candidates=tuple(candidates[i] for i in p))


def sort_voters(ballots: Iterable[VoterBallot]) -> list[VoterBallot]:
    """Sort ballots ascending by (seed, preference list).

    Preference lists compare lexicographically, a proper prefix sorting
    before its extensions. The sort is stable, so ballots identical in
    both fields keep their input order (they are interchangeable).
    """
    return sorted(ballots, key=lambda b: (b.seed, b.prefs))


def tally_with_seed(sheet: BallotSheet, ballots: Sequence[VoterBallot],
                    config: ElectionConfig, seed: int) -> ElectionResult:
    """Run the multi-seat tally with an explicitly supplied generator seed.

    One generator stream serves all seats. Per seat: draw a voter index
    uniformly below V; if that voter's remaining preferences are empty,
    redraw from the same stream; otherwise elect the voter's top remaining
    preference and delete it from every ballot. Stops early with a
    truncated result when every ballot runs out.
    """
    c = len(sheet)
    if c < 1:
        raise ValueError("ballot sheet is empty")
    if not 0 <= seed < config.m:
        raise ValueError(f"seed {seed} outside [0, {config.m})")
    voters = sort_voters(ballots)
    v = len(voters)
    if v == 0:
        raise ValueError("at least one ballot required")
    for b in voters:
        for p in b.prefs:
            if not 1 <= p <= c:
                raise ValueError(f"ballot references candidate {p}, sheet has {c}")
    if all(not b.prefs for b in voters):
        raise NoElectableError("every ballot is empty")

    g = SplitMix64(seed)
    remaining = [list(b.prefs) for b in voters]
    elected: list[int] = []
    audit: list[SeatRecord] = []
    truncated = False
    for seat in range(1, config.n_places + 1):
        if all(not r for r in remaining):
            truncated = True
            break
        redraws = 0
        raw_before = g.raw_draws
        while True:
            idx = g.uniform_below(v)
            if remaining[idx]:
                break
            redraws += 1
        winner = remaining[idx][0]
        elected.append(winner)
        for r in remaining:
            if winner in r:
                r.remove(winner)
        audit.append(SeatRecord(
            seat=seat,
            voter=idx,
            candidate=winner,
            redraws=redraws,
            raw_draws=g.raw_draws - raw_before,
        ))
    return ElectionResult(
        elected=tuple(elected),
        voter_seed_sum=seed,
        audit=tuple(audit),
        truncated=truncated,
    )


def tally(sheet: BallotSheet, ballots: Sequence[VoterBallot],
          config: ElectionConfig) -> ElectionResult:
    """Run the tally seeded by the sum of voter seed contributions mod M."""
    return tally_with_seed(sheet, ballots, config, voter_seed_sum(ballots, config))


@dataclass(frozen=True)
class FieldCheck:
    field: str
    claimed: object
    recomputed: object

    @property
    def ok(self) -> bool:
        return self.claimed == self.recomputed


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[FieldCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def first_mismatch(self) -> Optional[FieldCheck]:
        for c in self.checks:
            if not c.ok:
                return c
        return None

    def render(self) -> str:
        lines = []
        for c in self.checks:
            if c.ok:
                lines.append(f"{c.field}: match")
            else:
                lines.append(
                    f"{c.field}: MISMATCH claimed={c.claimed!r} recomputed={c.recomputed!r}"
                )
        first = self.first_mismatch()
        if first is None:
            lines.append("verification: PASS")
        else:
            lines.append(f"verification: FAIL (first divergence at {first.field})")
        return "\n".join(lines) + "\n"


def verify(candidates_text: str, ballots_text: str, config: ElectionConfig,
           claimed: ClaimedResult) -> VerificationReport:
    """Recompute the full pipeline from source files and compare field by field.

    Seed sums are checked before per-seat records, so a bad seed sum is
    flagged ahead of the cascade of seat mismatches it causes. Mismatches
    are report outcomes, not errors; parse failures still raise.
    """
    candidates = parse_candidates(candidates_text, config)
    sheet = ballot_permutation(order_candidates(candidates), config)
    ballots = parse_ballots(ballots_text, len(sheet), config)
    result = tally(sheet, ballots, config)

    checks = [
        FieldCheck("k", claimed.k, config.k),
        FieldCheck("places", claimed.places, config.n_places),
        FieldCheck("candidates", claimed.candidate_count, len(sheet)),
        FieldCheck("voters", claimed.voter_count, len(ballots)),
        FieldCheck("candidate_seed_sum", claimed.candidate_seed_sum,
                   candidate_seed_sum(candidates, config)),
        FieldCheck("sheet", claimed.sheet_names,
                   tuple(c.name for c in sheet.candidates)),
        FieldCheck("voter_seed_sum", claimed.voter_seed_sum, result.voter_seed_sum),
    ]
    seats = max(len(claimed.audit), len(result.audit))
    for i in range(seats):
        have = claimed.audit[i] if i < len(claimed.audit) else None
        want = result.audit[i] if i < len(result.audit) else None
        checks.append(FieldCheck(f"seat {i + 1}", have, want))
    checks.append(FieldCheck("elected", claimed.elected, result.elected))
    checks.append(FieldCheck("truncated", claimed.truncated, result.truncated))
    return VerificationReport(tuple(checks))


def find_dictator_seed(sheet: BallotSheet, others: Sequence[VoterBallot],
                       target_prefs: Sequence[int], config: ElectionConfig,
                       seat1_only: bool = False) -> Optional[int]:
    """Search the seed space for a contribution that makes the target dictator.

    Models the scenario where every other voter has revealed their seed
    contribution: the remaining voter tries each possible contribution
    against the public generator and keeps the first one for which the
    voter picked at every filled seat is himself (or just at seat 1 with
    ``seat1_only``). Returns None when no contribution in [0, M) works.

    Equality of (seed, prefs) identifies the target among sorted voters;
    ballots identical in both fields are interchangeable, so crediting any
    of them elects the same candidates.
    """
    prefs = tuple(target_prefs)
    if not prefs:
        return None
    others = list(others)
    for s in range(config.m):
        target = VoterBallot(seed=s, prefs=prefs)
        ballots = others + [target]
        result = tally(sheet, ballots, config)
        voters = sort_voters(ballots)
        records = result.audit[:1] if seat1_only else result.audit
        if all(voters[rec.voter] == target for rec in records):
            return s
    return None

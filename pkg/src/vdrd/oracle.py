"""Exact probability of every outcome under the ideal random-dictator rule.

The tally draws a uniformly random voter per seat (redrawing on empty
ballots) and elects that voter's top remaining preference. This module
computes the induced distribution over elected sequences exactly, by
recursion over states, to serve as the ground truth that the seed-space
enumeration is measured against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .model import NoElectableError, VoterBallot

# Marginal outcome for a place left empty by a truncated sequence.
UNFILLED = 0

SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Distribution:
    """Probability mass over a finite outcome space.

    Only outcomes with explicit mass are stored; all other outcomes in the
    space (``size`` in total) carry ``default`` mass each. A uniform
    distribution over millions of outcomes is therefore just
    ``Distribution({}, size, 1/size)``.
    """

    mass: Mapping[Any, float]
    size: int
    default: float = 0.0

    def __post_init__(self):
        if self.size < len(self.mass) or self.size < 1:
            raise ValueError(f"space of {self.size} cannot hold {len(self.mass)} outcomes")
        if self.default < 0 or any(m < 0 for m in self.mass.values()):
            raise ValueError("negative mass")
        total = self.total()
        if abs(total - 1) > SUM_TOLERANCE:
            raise ValueError(f"mass sums to {total!r}, not 1")

    def total(self) -> float:
        rest = (self.size - len(self.mass)) * self.default
        return math.fsum(self.mass.values()) + rest

    def prob(self, outcome) -> float:
        return self.mass.get(outcome, self.default)

    def support(self):
        return (x for x, p in self.mass.items() if p > 0)


def uniform(size: int) -> Distribution:
    return Distribution({}, size, 1.0 / size)


def point_mass(outcome, size: int) -> Distribution:
    return Distribution({outcome: 1.0}, size)


def sequence_space_size(c: int, n_places: int) -> int:
    """Number of possible elected sequences: injective, length 1..min(places, C)."""
    longest = min(n_places, c)
    total = 0
    block = 1
    for j in range(1, longest + 1):
        block *= c - j + 1
        total += block
    return total


def _top_counts(prefs: Sequence[tuple[int, ...]], elected: frozenset):
    """Count, per candidate, the ballots whose top remaining preference it is."""
    tops: dict[int, int] = {}
    live = 0
    for p in prefs:
        for x in p:
            if x not in elected:
                tops[x] = tops.get(x, 0) + 1
                live += 1
                break
    return tops, live


def rd_distribution(ballots: Sequence[VoterBallot], n_places: int, c: int) -> Distribution:
    """Exact distribution over elected sequences, in 64-bit floats.

    Pr(candidate next | state) = (ballots whose top remaining preference is
    the candidate) / (ballots with any remaining preference), which is the
    redraw-until-non-empty semantics. Recursion stops at n_places seats or
    when every ballot is exhausted; a truncated sequence keeps the
    probability accumulated on the way to it.
    """
    if c < 1:
        raise ValueError("need at least one candidate")
    if n_places < 1:
        raise ValueError("need at least one place")
    prefs = [tuple(b.prefs) for b in ballots]
    if not prefs:
        raise ValueError("at least one ballot required")
    for p in prefs:
        for x in p:
            if not 1 <= x <= c:
                raise ValueError(f"ballot references candidate {x}, only {c} exist")
    if all(not p for p in prefs):
        raise NoElectableError("every ballot is empty")

    masses: dict[tuple[int, ...], float] = {}
    step_cache: dict[frozenset, tuple[dict[int, int], int]] = {}

    def recurse(elected: tuple[int, ...], prob: float) -> None:
        if len(elected) == n_places:
            masses[elected] = masses.get(elected, 0.0) + prob
            return
        state = frozenset(elected)
        if state not in step_cache:
            step_cache[state] = _top_counts(prefs, state)
        tops, live = step_cache[state]
        if live == 0:
            masses[elected] = masses.get(elected, 0.0) + prob
            return
        for cand in sorted(tops):
            recurse(elected + (cand,), prob * (tops[cand] / live))

    recurse((), 1.0)
    return Distribution(masses, sequence_space_size(c, n_places))


def rd_distribution_exact(ballots: Sequence[VoterBallot], n_places: int,
                          c: int) -> dict[tuple[int, ...], Fraction]:
    """Same distribution in exact rationals, computed by frontier expansion.

    Kept structurally independent of ``rd_distribution`` (breadth-first over
    states instead of depth-first recursion) so the two can cross-check each
    other on small instances.
    """
    prefs = [tuple(b.prefs) for b in ballots]
    if all(not p for p in prefs):
        raise NoElectableError("every ballot is empty")
    frontier: dict[tuple[int, ...], Fraction] = {(): Fraction(1)}
    done: dict[tuple[int, ...], Fraction] = {}
    for _ in range(n_places):
        nxt: dict[tuple[int, ...], Fraction] = {}
        for elected, prob in frontier.items():
            tops, live = _top_counts(prefs, frozenset(elected))
            if live == 0:
                done[elected] = done.get(elected, Fraction(0)) + prob
                continue
            for cand, count in tops.items():
                seq = elected + (cand,)
                nxt[seq] = nxt.get(seq, Fraction(0)) + prob * Fraction(count, live)
        frontier = nxt
        if not frontier:
            break
    for elected, prob in frontier.items():
        done[elected] = done.get(elected, Fraction(0)) + prob
    return done


def place_marginals(d: Distribution, c: int, n_places: int) -> list[Distribution]:
    """Marginal distribution of each place, over candidates 1..C plus UNFILLED.

    Sequences shorter than a place contribute that place's mass to the
    UNFILLED outcome, keeping every marginal normalized.
    """
    if d.default != 0:
        raise ValueError("marginals need an explicit sequence distribution")
    margins = []
    for place in range(1, n_places + 1):
        acc: dict[int, float] = {}
        for seq, p in d.mass.items():
            key = seq[place - 1] if len(seq) >= place else UNFILLED
            acc[key] = acc.get(key, 0.0) + p
        margins.append(Distribution(acc, c + 1))
    return margins

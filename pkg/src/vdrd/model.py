"""Domain types and the bit-exact text formats for election inputs and outputs.

File grammars (one record per line, UTF-8, LF or CRLF, ``#`` starts a
comment line, blank lines ignored):

* candidates file:  ``<seed>,<name>`` where ``<seed>`` is exactly K decimal
  digits (leading zeros required) and ``<name>`` is any non-empty text,
  commas included.
* ballots file:  ``<seed>,<n1>><n2>>...`` where the part after the first
  comma is a ``>``-separated list of distinct candidate numbers in
  descending preference, possibly empty.

Result and sheet files are ``key: value`` documents; see ``format_result``
and ``format_sheet`` for the exact layouts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class ParseError(ValueError):
    """Input text violates a file grammar; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NoElectableError(ValueError):
    """Every ballot is empty, so no candidate can be elected."""


@dataclass(frozen=True)
class ElectionConfig:
    """Election-wide parameters: seed digit count K and seats to fill."""

    k: int
    n_places: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.n_places < 1:
            raise ValueError(f"n_places must be >= 1, got {self.n_places}")

    @property
    def m(self) -> int:
        """Size of the seed-contribution space, 10**k."""
        return 10 ** self.k

    def format_seed(self, value: int) -> str:
        """Render a seed contribution as exactly K decimal digits."""
        if not 0 <= value < self.m:
            raise ValueError(f"seed contribution {value} outside [0, {self.m})")
        return format(value, f"0{self.k}d")


@dataclass(frozen=True)
class Candidate:
    name: str
    seed: int


@dataclass(frozen=True)
class BallotSheet:
    """Candidates in their published order; position i holds number i+1."""

    candidates: tuple[Candidate, ...]

    def __len__(self) -> int:
        return len(self.candidates)

    def name_of(self, number: int) -> str:
        return self.candidates[number - 1].name


@dataclass(frozen=True)
class VoterBallot:
    """A seed contribution plus candidate numbers in descending preference."""

    seed: int
    prefs: tuple[int, ...]


@dataclass(frozen=True)
class SeatRecord:
    """Audit record for one seat: which draw elected whom, and at what cost."""

    seat: int
    voter: int
    candidate: int
    redraws: int
    raw_draws: int


@dataclass(frozen=True)
class ElectionResult:
    elected: tuple[int, ...]
    voter_seed_sum: int
    audit: tuple[SeatRecord, ...]
    truncated: bool = False


def candidate_seed_sum(candidates: Iterable[Candidate], config: ElectionConfig) -> int:
    return sum(c.seed for c in candidates) % config.m


def voter_seed_sum(ballots: Iterable[VoterBallot], config: ElectionConfig) -> int:
    return sum(b.seed for b in ballots) % config.m


def _records(text: str) -> Iterator[tuple[int, str]]:
    """Yield (line_no, line) with trailing CR stripped, skipping blanks and comments."""
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if not line.strip() or line.startswith("#"):
            continue
        yield line_no, line


def _parse_seed(token: str, config: ElectionConfig, line_no: int) -> int:
    if len(token) != config.k or not (token.isascii() and token.isdigit()):
        raise ParseError(
            line_no, f"seed must be exactly {config.k} decimal digits, got {token!r}"
        )
    return int(token)


def parse_candidates(text: str, config: ElectionConfig) -> list[Candidate]:
    """Parse a candidates file; raises ParseError naming the offending line."""
    candidates = []
    seen = set()
    for line_no, line in _records(text):
        if "," not in line:
            raise ParseError(line_no, "expected '<seed>,<name>'")
        token, name = line.split(",", 1)
        seed = _parse_seed(token, config, line_no)
        if not name:
            raise ParseError(line_no, "empty candidate name")
        if name in seen:
            raise ParseError(line_no, f"duplicate candidate name {name!r}")
        seen.add(name)
        candidates.append(Candidate(name=name, seed=seed))
    return candidates


def parse_prefs(part: str, c: int, line_no: int = 0) -> tuple[int, ...]:
    """Parse a '>'-separated preference list against candidate count c."""
    if part == "":
        return ()
    prefs = []
    seen = set()
    for token in part.split(">"):
        if not (token.isascii() and token.isdigit()) or token[0] == "0":
            raise ParseError(line_no, f"bad candidate number {token!r}")
        number = int(token)
        if not 1 <= number <= c:
            raise ParseError(line_no, f"candidate number {number} outside 1..{c}")
        if number in seen:
            raise ParseError(line_no, f"candidate number {number} repeated")
        seen.add(number)
        prefs.append(number)
    return tuple(prefs)


def parse_ballots(text: str, c: int, config: ElectionConfig) -> list[VoterBallot]:
    """Parse a ballots file; raises ParseError naming the offending line."""
    ballots = []
    for line_no, line in _records(text):
        if "," not in line:
            raise ParseError(line_no, "expected '<seed>,<preferences>'")
        token, part = line.split(",", 1)
        seed = _parse_seed(token, config, line_no)
        prefs = parse_prefs(part, c, line_no)
        ballots.append(VoterBallot(seed=seed, prefs=prefs))
    return ballots


def format_prefs(prefs: Sequence[int]) -> str:
    return ">".join(str(p) for p in prefs)


def format_candidates(candidates: Iterable[Candidate], config: ElectionConfig) -> str:
    return "".join(f"{config.format_seed(c.seed)},{c.name}\n" for c in candidates)


def format_ballots(ballots: Iterable[VoterBallot], config: ElectionConfig) -> str:
    return "".join(
        f"{config.format_seed(b.seed)},{format_prefs(b.prefs)}\n" for b in ballots
    )


SHEET_FORMAT = "vdrd-sheet/1"
RESULT_FORMAT = "vdrd-result/1"


def format_sheet(sheet: BallotSheet, config: ElectionConfig) -> str:
    """Render a ballot sheet with its audit header, byte-exactly."""
    total = candidate_seed_sum(sheet.candidates, config)
    lines = [
        f"format: {SHEET_FORMAT}",
        f"k: {config.k}",
        f"candidates: {len(sheet)}",
        f"candidate_seed_sum: {config.format_seed(total)}",
    ]
    for number, cand in enumerate(sheet.candidates, start=1):
        lines.append(f"sheet: {number},{cand.name}")
    return "\n".join(lines) + "\n"


def format_result(sheet: BallotSheet, voter_count: int, result: ElectionResult,
                  config: ElectionConfig) -> str:
    """Render a full election result, byte-exactly.

    The ``elected:`` line is the machine-readable outcome (same syntax as a
    ballot preference list); the ``seat:`` lines are the per-seat audit.
    """
    total = candidate_seed_sum(sheet.candidates, config)
    lines = [
        f"format: {RESULT_FORMAT}",
        f"k: {config.k}",
        f"places: {config.n_places}",
        f"candidates: {len(sheet)}",
        f"voters: {voter_count}",
        f"candidate_seed_sum: {config.format_seed(total)}",
    ]
    for number, cand in enumerate(sheet.candidates, start=1):
        lines.append(f"sheet: {number},{cand.name}")
    lines.append(f"voter_seed_sum: {config.format_seed(result.voter_seed_sum)}")
    lines.append(f"elected: {format_prefs(result.elected)}")
    for rec in result.audit:
        lines.append(
            f"seat: {rec.seat} voter={rec.voter} candidate={rec.candidate}"
            f" redraws={rec.redraws} raw_draws={rec.raw_draws}"
        )
    lines.append(f"truncated: {'yes' if result.truncated else 'no'}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ClaimedResult:
    """A parsed result file, as claimed by whoever produced it."""

    k: int
    places: int
    candidate_count: int
    voter_count: int
    candidate_seed_sum: int
    sheet_names: tuple[str, ...]
    voter_seed_sum: int
    elected: tuple[int, ...]
    audit: tuple[SeatRecord, ...]
    truncated: bool


class _ResultReader:
    """Strict reader for the canonical result layout."""

    def __init__(self, text: str):
        self.lines = list(_records(text))
        self.pos = 0

    def peek_key(self) -> str:
        if self.pos >= len(self.lines):
            return ""
        line = self.lines[self.pos][1]
        return line.split(": ", 1)[0] if ": " in line else ""

    def take(self, key: str) -> tuple[int, str]:
        if self.pos >= len(self.lines):
            raise ParseError(self.lines[-1][0] if self.lines else 1,
                             f"missing '{key}:' line")
        line_no, line = self.lines[self.pos]
        prefix = f"{key}: "
        if not line.startswith(prefix):
            raise ParseError(line_no, f"expected '{key}: ...', got {line!r}")
        self.pos += 1
        return line_no, line[len(prefix):]

    def take_int(self, key: str) -> int:
        line_no, value = self.take(key)
        if not (value.isascii() and value.isdigit()):
            raise ParseError(line_no, f"'{key}' must be an integer, got {value!r}")
        return int(value)


def parse_result(text: str) -> ClaimedResult:
    """Parse a result file back into its claimed fields."""
    r = _ResultReader(text)
    line_no, fmt = r.take("format")
    if fmt != RESULT_FORMAT:
        raise ParseError(line_no, f"unsupported format {fmt!r}")
    k = r.take_int("k")
    places = r.take_int("places")
    candidate_count = r.take_int("candidates")
    voter_count = r.take_int("voters")
    config = ElectionConfig(k=k, n_places=places)
    line_no, value = r.take("candidate_seed_sum")
    cand_sum = _parse_seed(value, config, line_no)
    sheet_names = []
    for _ in range(candidate_count):
        line_no, value = r.take("sheet")
        if "," not in value:
            raise ParseError(line_no, "expected 'sheet: <number>,<name>'")
        number, name = value.split(",", 1)
        if number != str(len(sheet_names) + 1):
            raise ParseError(line_no, f"sheet numbers must run 1..{candidate_count}")
        sheet_names.append(name)
    line_no, value = r.take("voter_seed_sum")
    voter_sum = _parse_seed(value, config, line_no)
    line_no, value = r.take("elected")
    elected = parse_prefs(value, candidate_count, line_no)
    audit = []
    while r.peek_key() == "seat":
        line_no, value = r.take("seat")
        fields = value.split(" ")
        try:
            seat = int(fields[0])
            kv = dict(f.split("=", 1) for f in fields[1:])
            rec = SeatRecord(
                seat=seat,
                voter=int(kv["voter"]),
                candidate=int(kv["candidate"]),
                redraws=int(kv["redraws"]),
                raw_draws=int(kv["raw_draws"]),
            )
        except (ValueError, KeyError, IndexError):
            raise ParseError(line_no, f"malformed seat record {value!r}") from None
        audit.append(rec)
    if len(audit) != len(elected):
        raise ParseError(line_no, f"{len(elected)} elected but {len(audit)} seat records")
    if tuple(rec.candidate for rec in audit) != elected:
        raise ParseError(line_no, "seat records disagree with the elected list")
    if [rec.seat for rec in audit] != list(range(1, len(audit) + 1)):
        raise ParseError(line_no, "seat records must run 1..n in order")
    line_no, value = r.take("truncated")
    if value not in ("yes", "no"):
        raise ParseError(line_no, f"'truncated' must be yes or no, got {value!r}")
    if r.pos != len(r.lines):
        raise ParseError(r.lines[r.pos][0], "unexpected trailing content")
    return ClaimedResult(
        k=k,
        places=places,
        candidate_count=candidate_count,
        voter_count=voter_count,
        candidate_seed_sum=cand_sum,
        sheet_names=tuple(sheet_names),
        voter_seed_sum=voter_sum,
        elected=elected,
        audit=tuple(audit),
        truncated=value == "yes",
    )

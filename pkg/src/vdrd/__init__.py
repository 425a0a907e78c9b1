"""Voter-determined random dictator elections, bit-exactly reproducible.

The random-dictator rule elects the top remaining preference of a uniformly
chosen voter, seat by seat. Here the random draw is replaced by a fully
specified pseudo-random generator seeded with the modular sum of seed
contributions supplied by the participants themselves, which makes every
election replayable and auditable while keeping the rule's fairness
properties to within a measurable (and measured) divergence.
"""

from .analysis import (
    EnumerationReport,
    ScaleError,
    election_distribution,
    format_nats,
    kl,
    modified_kl,
    render_report,
    report_document,
    report_to_json,
    sc_ordering_distribution,
)
from .engine import (
    FieldCheck,
    VerificationReport,
    ballot_permutation,
    find_dictator_seed,
    order_candidates,
    sort_voters,
    tally,
    tally_with_seed,
    verify,
)
from .model import (
    BallotSheet,
    Candidate,
    ClaimedResult,
    ElectionConfig,
    ElectionResult,
    NoElectableError,
    ParseError,
    SeatRecord,
    VoterBallot,
    candidate_seed_sum,
    format_ballots,
    format_candidates,
    format_prefs,
    format_result,
    format_sheet,
    parse_ballots,
    parse_candidates,
    parse_prefs,
    parse_result,
    voter_seed_sum,
)
from .oracle import (
    UNFILLED,
    Distribution,
    place_marginals,
    point_mass,
    rd_distribution,
    rd_distribution_exact,
    sequence_space_size,
    uniform,
)
from .rng import SplitMix64, rejection_below

__version__ = "0.1.0"

"""Regenerate the frozen 100-voter fixture used by the election analysis tests.

The fixture is drawn deterministically from the package's own generator, so
rerunning this script reproduces the committed files byte for byte. It also
prints the smallest positive sequence probability under the exact rule: every
sequence the enumeration must see has to carry enough probability that all
10^6 seeds give well-populated counts (expected count = prob * 10^6).
"""

import argparse
from pathlib import Path

from vdrd.model import Candidate, ElectionConfig, VoterBallot, format_ballots, format_candidates
from vdrd.oracle import rd_distribution
from vdrd.rng import SplitMix64

NAMES = ["Alice", "Bob", "Carol", "Dave", "Erin"]
DEFAULT_GEN_SEED = 2024


def build_fixture(gen_seed: int, voters: int = 100):
    g = SplitMix64(gen_seed)
    config = ElectionConfig(k=6, n_places=5)
    candidates = [Candidate(name, g.uniform_below(config.m)) for name in NAMES]
    ballots = []
    for _ in range(voters):
        seed = g.uniform_below(config.m)
        prefs = tuple(x + 1 for x in g.permutation(len(NAMES)))
        ballots.append(VoterBallot(seed, prefs))
    return config, candidates, ballots


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--gen-seed", type=int, default=DEFAULT_GEN_SEED)
    parser.add_argument("--out-dir", default=str(Path(__file__).parent.parent / "tests" / "fixtures"))
    args = parser.parse_args()

    config, candidates, ballots = build_fixture(args.gen_seed)
    dist = rd_distribution(ballots, config.n_places, len(NAMES))
    positive = [p for p in dist.mass.values() if p > 0]
    print(f"sequences with positive probability: {len(positive)}")
    print(f"smallest positive probability: {min(positive):.3e}"
          f" (expected count at 10^6 seeds: {min(positive) * 10 ** 6:.0f})")

    out_dir = Path(args.out_dir)
    cand_path = out_dir / "sv_candidates_c5_k6.txt"
    ballot_path = out_dir / "sv_ballots_v100_k6.txt"
    cand_path.write_text(format_candidates(candidates, config), newline="\n")
    ballot_path.write_text(format_ballots(ballots, config), newline="\n")
    print(f"wrote {cand_path}")
    print(f"wrote {ballot_path}")


if __name__ == "__main__":
    main()

import json

import numpy as np
import pytest

from approvalmaps import (
    ApprovalwiseVector,
    Election,
    approval_score,
    approvalwise_vector,
    election_from_json,
    election_from_text,
    election_to_json,
    election_to_text,
    load_election,
    save_election,
    spawn_seed,
    vote_hamming,
    vote_jaccard,
)
from oracles import random_election, relabel_election


class TestElection:
    def test_valid_construction(self):
        e = Election(3, (frozenset({0, 2}), frozenset()))
        assert e.num_candidates == 3
        assert e.num_voters == 2

    def test_rejects_out_of_range_candidate(self):
        with pytest.raises(ValueError, match="outside"):
            Election(2, (frozenset({2}),))
        with pytest.raises(ValueError):
            Election(2, (frozenset({-1}),))

    def test_rejects_empty_dimensions(self):
        with pytest.raises(ValueError):
            Election(0, (frozenset(),))
        with pytest.raises(ValueError):
            Election(3, ())

    def test_ballots_coerced_to_frozensets(self):
        e = Election(3, ({0, 1}, [2, 2]))
        assert e.ballots == (frozenset({0, 1}), frozenset({2}))

    def test_bool_array_round_trip(self, rng):
        e = random_election(rng, 7, 9)
        assert Election.from_bool_array(e.to_bool_array()) == e

    def test_approval_counts(self, small_election):
        assert small_election.approval_counts().tolist() == [2, 1, 0]


class TestApprovalScore:
    def test_both_approve(self):
        e = Election(1, (frozenset({0}), frozenset({0})))
        assert approval_score(e, 0) == 2

    def test_split(self):
        e = Election(2, (frozenset({0}), frozenset({1})))
        assert approval_score(e, 1) == 1

    def test_unapproved_candidate_scores_zero(self, small_election):
        assert approval_score(small_election, 2) == 0

    def test_out_of_range(self, small_election):
        with pytest.raises(IndexError):
            approval_score(small_election, 3)


class TestApprovalwiseVector:
    def test_basic(self, small_election):
        assert approvalwise_vector(small_election).values == (1.0, 0.5, 0.0)

    def test_all_empty(self):
        e = Election(4, (frozenset(),) * 3)
        assert approvalwise_vector(e).values == (0.0,) * 4

    def test_all_full(self):
        e = Election(4, (frozenset(range(4)),) * 3)
        assert approvalwise_vector(e).values == (1.0,) * 4

    def test_invariant_under_relabeling(self, rng):
        for _ in range(20):
            e = random_election(rng, 6, 8)
            relabeled = relabel_election(e, rng)
            assert approvalwise_vector(e) == approvalwise_vector(relabeled)

    def test_sum_equals_total_approvals(self, rng):
        for _ in range(10):
            e = random_election(rng, 5, 7)
            total = sum(len(b) for b in e.ballots)
            got = sum(approvalwise_vector(e).values) * e.num_voters
            assert got == pytest.approx(total)

    def test_vector_validation(self):
        with pytest.raises(ValueError, match="non-increasing"):
            ApprovalwiseVector((0.2, 0.8))
        with pytest.raises(ValueError, match="outside"):
            ApprovalwiseVector((1.5,))
        with pytest.raises(ValueError):
            ApprovalwiseVector(())


class TestVoteDistances:
    def test_hamming_symmetric_difference(self):
        assert vote_hamming({0, 1}, {1, 2}) == 2

    def test_hamming_identity(self):
        assert vote_hamming({3, 4}, {3, 4}) == 0

    def test_hamming_disjoint_extremes(self):
        assert vote_hamming(set(), set(range(5))) == 5

    def test_jaccard_basic(self):
        assert vote_jaccard({0, 1}, {1, 2}) == pytest.approx(2 / 3)

    def test_jaccard_identity(self):
        assert vote_jaccard({0, 1}, {0, 1}) == 0.0

    def test_jaccard_disjoint(self):
        assert vote_jaccard({0}, {1, 2}) == 1.0

    def test_jaccard_both_empty_defined_as_zero(self):
        assert vote_jaccard(set(), set()) == 0.0

    def test_hamming_is_a_metric_on_random_triples(self, rng):
        for _ in range(200):
            ballots = [
                frozenset(int(c) for c in rng.choice(6, rng.integers(0, 7), replace=False))
                for _ in range(3)
            ]
            u, v, w = ballots
            assert vote_hamming(u, v) == vote_hamming(v, u)
            assert (vote_hamming(u, v) == 0) == (u == v)
            assert vote_hamming(u, w) <= vote_hamming(u, v) + vote_hamming(v, w)


class TestFileFormat:
    def test_text_round_trip(self, rng):
        for _ in range(10):
            e = random_election(rng, 6, 5)
            assert election_from_text(election_to_text(e)) == e

    def test_trailing_empty_ballot_survives(self):
        e = Election(3, (frozenset({0}), frozenset()))
        text = election_to_text(e)
        assert text == "3 2\n0\n\n"
        assert election_from_text(text) == e

    def test_json_round_trip(self, rng):
        e = random_election(rng, 5, 4)
        assert election_from_json(election_to_json(e)) == e
        payload = json.loads(election_to_json(e))
        assert payload["num_candidates"] == 5

    def test_bad_header(self):
        with pytest.raises(ValueError, match="header"):
            election_from_text("nope\n")
        with pytest.raises(ValueError, match="expected 2 ballot"):
            election_from_text("3 2\n0\n")

    def test_bad_ballot_line(self):
        with pytest.raises(ValueError, match="line 2"):
            election_from_text("3 1\na,b\n")

    def test_save_load_both_formats(self, tmp_path, rng):
        e = random_election(rng, 4, 3)
        save_election(e, tmp_path / "x.elec")
        save_election(e, tmp_path / "x.json")
        assert load_election(tmp_path / "x.elec") == e
        assert load_election(tmp_path / "x.json") == e


class TestRngPlumbing:
    def test_spawn_seed_deterministic(self):
        assert spawn_seed(7, 3) == spawn_seed(7, 3)

    def test_spawn_seed_varies_with_index_and_seed(self):
        seeds = {spawn_seed(7, i) for i in range(100)}
        assert len(seeds) == 100
        assert spawn_seed(7, 0) != spawn_seed(8, 0)

    def test_spawn_seed_in_uint64_range(self):
        s = spawn_seed(2**63, 12345)
        assert 0 <= s < 2**64

import math
from collections import Counter

import numpy as np
import pytest

from approvalmaps import (
    CultureSpec,
    Election,
    make_extreme,
    noise_weight,
    open_interval_grid,
    sample_culture,
    sample_disjoint,
    sample_euclidean,
    sample_noise,
    sample_resampling,
    sample_urn,
)
from approvalmaps.core import ceil_fraction, floor_fraction


def all_specs():
    return [
        CultureSpec("resampling", p=0.4, phi=0.3),
        CultureSpec("disjoint", p=0.5, phi=0.2, g=2),
        CultureSpec("noise", p=0.5, phi=0.4, vote_distance="hamming"),
        CultureSpec("noise", p=0.5, phi=0.4, vote_distance="jaccard"),
        CultureSpec("euclidean", dim=1, radius=0.1),
        CultureSpec("euclidean", dim=2, radius=0.2),
        CultureSpec("urn", p=0.4, alpha=0.5),
        CultureSpec("ic", p=0.3),
        CultureSpec("id", p=0.6),
        CultureSpec("empty"),
        CultureSpec("full"),
    ]


class TestCultureSpec:
    def test_requires_parameters(self):
        with pytest.raises(ValueError, match="requires"):
            CultureSpec("resampling", p=0.5)
        with pytest.raises(ValueError, match="requires"):
            CultureSpec("urn", p=0.5)
        with pytest.raises(ValueError, match="requires"):
            CultureSpec("euclidean", dim=1)

    def test_rejects_extraneous_parameters(self):
        with pytest.raises(ValueError, match="does not take"):
            CultureSpec("resampling", p=0.5, phi=0.5, alpha=1.0)
        with pytest.raises(ValueError, match="does not take"):
            CultureSpec("empty", p=0.5)

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            CultureSpec("resampling", p=1.5, phi=0.5)
        with pytest.raises(ValueError):
            CultureSpec("euclidean", dim=3, radius=0.1)
        with pytest.raises(ValueError):
            CultureSpec("noise", p=0.5, phi=0.5, vote_distance="cosine")

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown culture kind"):
            CultureSpec("mallows")

    def test_json_round_trip(self):
        for spec in all_specs():
            assert CultureSpec.from_json_dict(spec.to_json_dict()) == spec

    def test_json_rejects_unknown_fields(self):
        with pytest.raises(ValueError, match="unknown"):
            CultureSpec.from_json_dict({"kind": "empty", "temperature": 3})


class TestDeterminismAndValidity:
    def test_same_spec_same_seed_identical(self):
        for spec in all_specs():
            a = sample_culture(spec, 8, 6, seed=99)
            b = sample_culture(spec, 8, 6, seed=99)
            assert a == b, spec.kind

    def test_output_dimensions(self):
        for spec in all_specs():
            e = sample_culture(spec, 7, 5, seed=1)
            assert e.num_candidates == 7
            assert e.num_voters == 5

    def test_different_seeds_usually_differ(self):
        e1 = sample_resampling(20, 10, 0.5, 1.0, seed=1)
        e2 = sample_resampling(20, 10, 0.5, 1.0, seed=2)
        assert e1 != e2


class TestResampling:
    def test_phi_zero_is_identity(self):
        e = sample_resampling(10, 8, 0.5, 0.0, seed=42)
        assert len(set(e.ballots)) == 1
        assert len(e.ballots[0]) == 5

    def test_central_ballot_size_floor(self):
        e = sample_resampling(10, 3, 0.29, 0.0, seed=1)
        assert len(e.ballots[0]) == 2  # floor(2.9)

    def test_phi_one_marginals_are_iid_p(self):
        # every candidate approved independently with probability p
        p = 0.3
        e = sample_resampling(4, 100_000, p, 1.0, seed=5)
        counts = e.approval_counts()
        sigma = math.sqrt(p * (1 - p) * e.num_voters)
        for c in counts:
            assert abs(c - p * e.num_voters) < 4 * sigma

    def test_marginal_split_between_central_and_outside(self):
        # centrally approved candidates: (1-phi) + phi*p; others: phi*p
        m, n, p, phi = 4, 100_000, 0.5, 0.4
        e = sample_resampling(m, n, p, phi, seed=11)
        counts = sorted(e.approval_counts(), reverse=True)
        hi, lo = (1 - phi) + phi * p, phi * p
        for c in counts[: floor_fraction(p, m)]:
            sigma = math.sqrt(hi * (1 - hi) * n)
            assert abs(c - hi * n) < 4 * sigma
        for c in counts[floor_fraction(p, m) :]:
            sigma = math.sqrt(lo * (1 - lo) * n)
            assert abs(c - lo * n) < 4 * sigma


class TestDisjoint:
    def test_single_group_no_noise_is_full(self):
        e = sample_disjoint(6, 5, 0.5, 0.0, 1, seed=3)
        assert all(b == frozenset(range(6)) for b in e.ballots)

    def test_phi_zero_yields_at_most_g_distinct_ballots(self):
        e = sample_disjoint(9, 40, 0.3, 0.0, 3, seed=4)
        distinct = set(e.ballots)
        assert len(distinct) <= 3
        # ballots partition the candidates
        union = frozenset().union(*distinct)
        assert union == frozenset(range(9))
        assert sum(len(b) for b in distinct) == 9

    def test_g_bigger_than_m_rejected(self):
        with pytest.raises(ValueError):
            sample_disjoint(3, 5, 0.5, 0.1, 4, seed=0)

    def test_two_groups_split_binomially(self):
        # cluster sizes concentrate around n/2
        n = 4000
        e = sample_disjoint(10, n, 0.2, 0.0, 2, seed=8)
        sizes = sorted(Counter(e.ballots).values())
        sigma = math.sqrt(n * 0.25)
        assert abs(sizes[-1] - n / 2) < 4 * sigma


class TestNoiseWeight:
    def test_hand_expanded_values(self):
        # central size 2 of 3 candidates, phi = 0.5, Hamming
        assert noise_weight(2, 0, 2, 3, 0.5) == pytest.approx(1.0)
        assert noise_weight(1, 0, 2, 3, 0.5) == pytest.approx(1.0)
        assert noise_weight(2, 1, 2, 3, 0.5) == pytest.approx(0.5)

    def test_phi_one_counts_ballots(self):
        for x in range(3):
            for y in range(3):
                assert noise_weight(x, y, 2, 4, 1.0) == math.comb(2, x) * math.comb(2, y)

    def test_phi_zero_concentrates_on_central(self):
        assert noise_weight(2, 0, 2, 4, 0.0) == 1.0
        assert noise_weight(1, 0, 2, 4, 0.0) == 0.0
        assert noise_weight(2, 1, 2, 4, 0.0) == 0.0

    def test_range_checks(self):
        with pytest.raises(ValueError):
            noise_weight(3, 0, 2, 4, 0.5)
        with pytest.raises(ValueError):
            noise_weight(0, 3, 2, 4, 0.5)


def _exact_ballot_distribution(m, z, phi, vote_distance):
    """Probability of each ballot (as a frozenset) given a central ballot of
    the first z candidates: proportional to phi^distance."""
    from itertools import combinations

    central = frozenset(range(z))
    weights = {}
    for size in range(m + 1):
        for ballot in combinations(range(m), size):
            b = frozenset(ballot)
            ham = len(central ^ b)
            if vote_distance == "hamming":
                d = float(ham)
            else:
                union = len(central | b)
                d = 0.0 if union == 0 else ham / union
            weights[b] = 1.0 if (phi == 0.0 and d == 0.0) else (0.0 if phi == 0.0 else phi**d)
    total = sum(weights.values())
    return {b: w / total for b, w in weights.items()}


class TestNoiseSampler:
    def test_phi_zero_all_votes_central(self):
        e = sample_noise(6, 30, 0.5, 0.0, "hamming", seed=9)
        assert len(set(e.ballots)) == 1
        assert len(e.ballots[0]) == 3

    @pytest.mark.parametrize("vote_distance", ["hamming", "jaccard"])
    def test_matches_enumerated_distribution(self, vote_distance):
        # m=4, central size 2: sampled ballot frequencies vs the exact
        # phi^d distribution, total variation <= 0.02 at 1e5 samples
        m, n, p, phi = 4, 100_000, 0.5, 0.5
        e = sample_noise(m, n, p, phi, vote_distance, seed=13)
        id_e = sample_noise(m, 1, p, 0.0, vote_distance, seed=13)
        central = id_e.ballots[0]  # same seed => same central ballot
        assert len(central) == 2
        # relabel so the central ballot is {0, 1}
        mapping = {c: i for i, c in enumerate(sorted(central))}
        mapping.update(
            {c: 2 + i for i, c in enumerate(sorted(set(range(m)) - central))}
        )
        counts = Counter(
            frozenset(mapping[c] for c in ballot) for ballot in e.ballots
        )
        exact = _exact_ballot_distribution(m, 2, phi, vote_distance)
        tv = 0.5 * sum(
            abs(counts.get(b, 0) / n - prob) for b, prob in exact.items()
        )
        assert tv <= 0.02

    def test_phi_one_hamming_uniform_over_all_ballots(self):
        m, n = 4, 100_000
        e = sample_noise(m, n, 0.5, 1.0, "hamming", seed=21)
        counts = Counter(e.ballots)
        assert len(counts) == 2**m
        tv = 0.5 * sum(abs(c / n - 1 / 2**m) for c in counts.values())
        assert tv <= 0.02


class TestEuclidean:
    def test_huge_radius_full_election(self):
        for dim in (1, 2):
            e = sample_euclidean(5, 4, dim, math.sqrt(dim), seed=2)
            assert all(b == frozenset(range(5)) for b in e.ballots)

    def test_tiny_radius_empty(self):
        e = sample_euclidean(50, 40, 2, 1e-9, seed=2)
        assert all(not b for b in e.ballots)

    def test_1d_approval_fraction_matches_integral(self):
        # P(|x - y| <= r) for uniform x, y = 2r - r^2 = 0.4375 at r = 0.25
        e = sample_euclidean(100, 1000, 1, 0.25, seed=6)
        fraction = sum(len(b) for b in e.ballots) / (100 * 1000)
        assert abs(fraction - 0.4375) < 0.02


class TestUrn:
    def test_ballot_sizes_are_ceil_pm(self):
        e = sample_urn(10, 30, 0.45, 0.7, seed=3)
        assert all(len(b) == ceil_fraction(0.45, 10) == 5 for b in e.ballots)

    def test_alpha_zero_uniform_fixed_size(self):
        m, n, p = 6, 60_000, 0.5
        e = sample_urn(m, n, p, 0.0, seed=14)
        counts = e.approval_counts()
        expect = ceil_fraction(p, m) / m * n
        sigma = math.sqrt(n * 0.5 * 0.5)
        for c in counts:
            assert abs(c - expect) < 4 * sigma

    def test_huge_alpha_copies_first_order(self):
        e = sample_urn(8, 50, 0.5, 1e9, seed=4)
        assert len(set(e.ballots)) == 1


class TestExtremes:
    def test_empty(self):
        e = make_extreme(5, 3, "empty")
        assert all(not b for b in e.ballots)

    def test_full(self):
        e = make_extreme(5, 3, "full")
        assert all(b == frozenset(range(5)) for b in e.ballots)

    def test_p_id_fixed_subset(self):
        e = make_extreme(10, 6, "p_id", seed=1, p=0.5)
        assert len(set(e.ballots)) == 1
        assert len(e.ballots[0]) == 5

    def test_p_variants_require_p(self):
        with pytest.raises(ValueError):
            make_extreme(5, 3, "p_id")

    def test_unknown_extreme(self):
        with pytest.raises(ValueError):
            make_extreme(5, 3, "chaos")


class TestOpenIntervalGrid:
    def test_values_strictly_inside(self):
        grid = open_interval_grid(0.0, 1.0, 4)
        assert grid == pytest.approx([0.2, 0.4, 0.6, 0.8])
        assert all(0.0 < v < 1.0 for v in grid)

    def test_single_value_is_midpoint(self):
        assert open_interval_grid(0.2, 0.6, 1) == pytest.approx([0.4])

    def test_count_must_be_positive(self):
        with pytest.raises(ValueError):
            open_interval_grid(0.0, 1.0, 0)

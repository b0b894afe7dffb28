#include <doctest.h>

#include <cmath>
#include <random>

#include "beliefkit/ocf.hpp"
#include "oracles.hpp"

using namespace beliefkit;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;
}

const Frame abc({"a", "b", "c"});
const Ocf kappa(abc, {0, 1, 3});

void check_values(const std::vector<double>& got, const std::vector<double>& want, double eps = 1e-12) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == Approx(want[i]).epsilon(eps).scale(1.0));
}

Ocf random_ocf(std::mt19937_64& rng, const Frame& f, Rank max_rank) {
    std::vector<Rank> r(f.size());
    for (auto& x : r) x = static_cast<Rank>(rng() % (max_rank + 1));
    r[rng() % f.size()] = 0;
    return Ocf(f, r);
}

}  // namespace

TEST_CASE("set ranks are minima") {
    CHECK(ocf_rank(kappa, abc.subset_of({"b", "c"})) == 1);
    CHECK(ocf_rank(kappa, abc.full_set()) == 0);
    CHECK(ocf_rank(kappa, abc.subset_of({"c"})) == 3);
    CHECK(code_of([] { ocf_rank(kappa, abc.empty_set()); }) == ErrorCode::EmptySet);
}

TEST_CASE("ocf validation") {
    CHECK(code_of([] { Ocf(abc, {1, 2, 3}); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { Ocf(abc, {0, 1}); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { Ocf(abc, {0, 1, 20}, 10); }) == ErrorCode::ValidationError);
    const auto p = Ocf::on_partition(abc, {{abc.subset_of({"a", "c"}), 0}, {abc.subset_of({"b"}), 2}});
    CHECK(p.ranks() == std::vector<Rank>{0, 2, 0});
    CHECK(p.constant_on(
        WeightedPartition(abc, {{abc.subset_of({"a", "c"}), 1.0}, {abc.subset_of({"b"}), 0.5}}, PartitionNormalization::Max)));
    CHECK_FALSE(kappa.constant_on(
        WeightedPartition(abc, {{abc.subset_of({"a", "c"}), 1.0}, {abc.subset_of({"b"}), 0.5}}, PartitionNormalization::Max)));
}

TEST_CASE("a-part by hand") {
    const auto part = ocf_a_part(kappa, abc.subset_of({"b", "c"}));
    CHECK_FALSE(part.ranks[0].has_value());
    CHECK(part.ranks[1] == 0u);
    CHECK(part.ranks[2] == 2u);
    const auto whole = ocf_a_part(kappa, abc.full_set());
    for (std::size_t i = 0; i < 3; ++i) CHECK(whole.ranks[i] == kappa.rank(i));
    const auto argmin = ocf_a_part(Ocf(abc, {0, 0, 4}), abc.subset_of({"a", "b"}));
    CHECK(argmin.ranks[0] == 0u);
    CHECK(argmin.ranks[1] == 0u);
    CHECK(code_of([] { ocf_a_part(kappa, abc.empty_set()); }) == ErrorCode::EmptySet);
}

TEST_CASE("conditionalization by hand") {
    const auto A = abc.subset_of({"b", "c"});
    CHECK(ocf_conditionalize(kappa, A, 2).ranks() == std::vector<Rank>{2, 0, 2});
    const auto zero = ocf_conditionalize(kappa, A, 0);
    CHECK(ocf_rank(zero, A) == 0);
    CHECK(ocf_rank(zero, A.complement()) == 0);
    CHECK(code_of([&] { ocf_conditionalize(kappa, abc.full_set(), 2); }) == ErrorCode::DegenerateComplement);
    CHECK(code_of([&] { ocf_conditionalize(kappa, abc.empty_set(), 2); }) == ErrorCode::EmptySet);
    CHECK(code_of([&] { ocf_conditionalize(Ocf(abc, {0, 1, 3}, 5), A, 10); }) == ErrorCode::RankOverflow);
}

TEST_CASE("large shifts approach plain conditioning") {
    const auto A = abc.subset_of({"b", "c"});
    std::vector<double> previous;
    for (Rank n : {0u, 1u, 2u, 5u, 10u, 50u}) {
        const auto d = ocf_to_possibility(ocf_conditionalize(kappa, A, n));
        const double on_complement = d.value(0);
        CHECK(on_complement == Approx(std::exp(-static_cast<double>(n))).epsilon(1e-12));
        if (!previous.empty()) CHECK(on_complement < previous.back());
        previous.push_back(on_complement);
        check_values({d.value(1), d.value(2)}, {1.0, std::exp(-2.0)});
    }
    CHECK(previous.back() <= std::exp(-50.0) * (1 + 1e-12));
}

TEST_CASE("translation") {
    const auto d = ocf_to_possibility(kappa);
    check_values(d.values(), {1.0, std::exp(-1.0), std::exp(-3.0)});
    CHECK(d.value(1) == Approx(0.367879).epsilon(1e-6));
    CHECK(d.value(2) == Approx(0.049787).epsilon(1e-5));
    check_values(ocf_to_possibility(Ocf(abc, {0, 0, 0})).values(), {1.0, 1.0, 1.0});
    CHECK(possibility_to_ocf(d) == kappa);
    CHECK(possibility_to_ocf(PossibilityDistribution::vacuous(abc)).ranks() == std::vector<Rank>{0, 0, 0});
    const Frame ab({"a", "b"});
    CHECK(code_of([&] { possibility_to_ocf(PossibilityDistribution(ab, {1.0, 0.5})); }) == ErrorCode::NotOnRankGrid);
    CHECK(code_of([&] { possibility_to_ocf(PossibilityDistribution(ab, {1.0, 0.0})); }) == ErrorCode::ZeroPossibility);
    CHECK(possibility_to_ocf(PossibilityDistribution(ab, {1.0, std::exp(-2.0) * (1 + 1e-8)})).rank(1) == 2);
}

TEST_CASE("a-part translation equals possibilistic conditioning") {
    const auto A = abc.subset_of({"b", "c"});
    check_values(ocf_to_possibility(ocf_a_part(kappa, A)).values(),
                 poss_condition(ocf_to_possibility(kappa), A).values());
}

TEST_CASE("spohn update cases") {
    const auto pi1 = ocf_to_possibility(kappa);
    const PossibilityDistribution pi2(abc, {0.2, 1.0, 0.7});
    check_values(spohn_partition_update(pi1, SpohnObservation::singletons(pi2)).values(), pi2.values());
    check_values(spohn_partition_update(kappa, SpohnObservation::singletons(pi2)).values(), pi2.values());
    const auto A = abc.subset_of({"b", "c"});
    const auto two = SpohnObservation::two_cell(A, std::exp(-2.0));
    const auto expected = ocf_to_possibility(ocf_conditionalize(kappa, A, 2)).values();
    check_values(spohn_partition_update(pi1, two).values(), expected);
    check_values(spohn_partition_update(kappa, SpohnObservation::shift(A, 2)).values(), expected);
    const SpohnObservation whole(WeightedPartition(abc, {{abc.full_set(), 1.0}}, PartitionNormalization::Max));
    check_values(spohn_partition_update(pi1, whole).values(), pi1.values());
    CHECK(code_of([&] {
              SpohnObservation(WeightedPartition(abc, {{A, 0.9}, {A.complement(), 0.5}}, PartitionNormalization::Sum));
          }) == ErrorCode::WeightNormalization);
    const PossibilityDistribution zero_on_a(abc, {0.0, 1.0, 0.5});
    CHECK(code_of([&] {
              spohn_partition_update(zero_on_a, SpohnObservation::two_cell(A.complement(), 0.5));
          }) == ErrorCode::ConditioningUndefined);
}

TEST_CASE("random two path equality and idempotence") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + trial % 5;
        const Frame f = oracle::letters(n);
        const auto k = random_ocf(rng, f, 12);
        const auto A = f.from_word(std::uniform_int_distribution<oracle::Mask>(1, (oracle::Mask{1} << n) - 2)(rng));
        const Rank shift = static_cast<Rank>(rng() % 21);
        const auto direct = ocf_to_possibility(ocf_conditionalize(k, A, shift)).values();
        const auto via = spohn_partition_update(ocf_to_possibility(k), SpohnObservation::shift(A, shift)).values();
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(direct[i] - via[i]) <= 1e-9 * std::max(std::abs(direct[i]), std::abs(via[i])));
        const auto kr = ocf_conditionalize(k, A, shift);
        CHECK(ocf_rank(kr, A) == 0);
        CHECK(ocf_rank(kr, A.complement()) == shift);
        for (std::size_t i = 0; i < n; ++i) {
            if (A.contains(i))
                CHECK(kr.rank(i) == k.rank(i) - ocf_rank(k, A));
            else
                CHECK(kr.rank(i) == k.rank(i) - ocf_rank(k, A.complement()) + shift);
        }
        const auto pi1 = ocf_to_possibility(k);
        const PossibilityDistribution pi2(f, oracle::random_possibility(rng, n));
        const auto obs = SpohnObservation::singletons(pi2);
        const auto once = spohn_partition_update(pi1, obs);
        check_values(spohn_partition_update(once, obs).values(), once.values());
        check_values(ocf_to_possibility(ocf_a_part(k, A)).values(), poss_condition(pi1, A).values());
    }
}

TEST_CASE("rule comparison flags") {
    const PossibilityDistribution pi1(abc, {1.0, 0.5, 0.2});
    const auto up = compare_rules(pi1, SpohnObservation::singletons(PossibilityDistribution(abc, {1.0, 0.8, 0.6})));
    CHECK(up.observation_dominates_prior);
    CHECK(up.possibilistic_keeps_prior);
    CHECK(up.spohn_adopts_observation);
    CHECK(up.max_divergence == Approx(0.4));
    check_values(up.possibilistic.values(), pi1.values());

    const auto down = compare_rules(pi1, SpohnObservation::singletons(PossibilityDistribution(abc, {1.0, 0.3, 0.1})));
    CHECK(down.observation_within_prior);
    CHECK(down.max_divergence == Approx(0.0).scale(1.0));
    check_values(down.possibilistic.values(), {1.0, 0.3, 0.1});
    check_values(down.spohn.values(), {1.0, 0.3, 0.1});

    // pi1 <= max(1[A], alpha) with obs {(A,1), (not A, alpha)}
    const auto A = abc.subset_of({"a", "b"});
    const auto witness = compare_rules(pi1, SpohnObservation::two_cell(A, 0.3));
    CHECK(witness.possibilistic_keeps_prior);
    check_values(witness.possibilistic.values(), pi1.values());
    check_values(witness.spohn.values(), {1.0, 0.5, 0.3});
    CHECK(witness.cores_overlap);

    const auto from_ocf = compare_rules(kappa, SpohnObservation::singletons(PossibilityDistribution(abc, {1.0, 0.8, 0.6})));
    CHECK(from_ocf.spohn_adopts_observation);
}

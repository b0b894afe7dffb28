#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "beliefkit/error.hpp"
#include "beliefkit/frame.hpp"
#include "beliefkit/possibility.hpp"
#include "beliefkit/probability.hpp"

namespace beliefkit {

using Rank = std::uint32_t;

inline constexpr Rank kDefaultRankCap = 1'000'000;

/// Ordinal conditional function on a finite frame: integer degrees of
/// disbelief per element, with at least one element at rank 0. The rank of
/// a set is the minimum over its members.
class Ocf {
public:
    Ocf(Frame frame, std::vector<Rank> ranks, Rank cap = kDefaultRankCap);

    /// Ranks given per cell of a partition; every member of a cell gets the
    /// cell's rank, so the function is constant on cells by construction.
    static Ocf on_partition(Frame frame, const std::vector<std::pair<Subset, Rank>>& cells,
                            Rank cap = kDefaultRankCap);

    const Frame& frame() const { return frame_; }
    const std::vector<Rank>& ranks() const { return ranks_; }
    Rank rank(std::size_t i) const { return ranks_[i]; }
    Rank cap() const { return cap_; }

    /// True when the ranks are constant on each cell of `partition`.
    bool constant_on(const WeightedPartition& partition) const;

    bool operator==(const Ocf& rhs) const { return frame_.same_as(rhs.frame_) && ranks_ == rhs.ranks_; }

private:
    Frame frame_;
    std::vector<Rank> ranks_;
    Rank cap_;
};

/// Ranks defined on a non-empty subset only.
struct PartialRanks {
    Subset domain;
    std::vector<std::optional<Rank>> ranks;
};

/// min over A of the ranks. Throws EmptySet for A = {}.
Rank ocf_rank(const Ocf& k, const Subset& event);

/// k(w|A) = k(w) - k(A) for w in A.
PartialRanks ocf_a_part(const Ocf& k, const Subset& event);

/// A-part on A, n + (not-A)-part on the complement. Throws EmptySet when A is
/// empty and DegenerateComplement when A is the whole frame.
Ocf ocf_conditionalize(const Ocf& k, const Subset& event, Rank shift);

/// pi(w) = exp(-k(w)).
PossibilityDistribution ocf_to_possibility(const Ocf& k);
/// exp(-rank) on the domain, 0 elsewhere.
PossibilityDistribution ocf_to_possibility(const PartialRanks& part);

inline constexpr double kDefaultRankGridTolerance = 1e-6;

/// Inverse translation k(w) = round(-ln pi(w)). Throws ZeroPossibility for a
/// zero value and NotOnRankGrid when -ln pi(w) is not within `delta` of an integer.
Ocf possibility_to_ocf(const PossibilityDistribution& d, double delta = kDefaultRankGridTolerance,
                       double tol = kDefaultTolerance, Rank cap = kDefaultRankCap);

/// Weighted partition read possibilistically: alpha_i = Pi2(A_i), max alpha_i = 1.
class SpohnObservation {
public:
    explicit SpohnObservation(WeightedPartition partition);

    static SpohnObservation singletons(const PossibilityDistribution& pi2);
    /// {(A, 1), (not A, alpha)}.
    static SpohnObservation two_cell(const Subset& event, double alpha);
    /// {(A, 1), (not A, exp(-n))}.
    static SpohnObservation shift(const Subset& event, Rank n);

    const WeightedPartition& partition() const { return partition_; }
    const Frame& frame() const { return partition_.frame(); }

    /// The step function pi2(w) = alpha_i for w in A_i.
    PossibilityDistribution as_distribution() const;

private:
    WeightedPartition partition_;
};

/// pi(w) = alpha_i * pi1(w) / Pi1(A_i) for w in A_i. A cell with alpha_i > tol
/// and Pi1(A_i) <= tol throws ConditioningUndefined; weightless cells go to 0.
PossibilityDistribution spohn_partition_update(const PossibilityDistribution& prior, const SpohnObservation& obs,
                                               double tol = kDefaultTolerance);

/// Same rule on the translation of an OCF, evaluated in rank space:
/// pi(w) = alpha_i * exp(-(k(w) - k(A_i))). Always defined.
PossibilityDistribution spohn_partition_update(const Ocf& prior, const SpohnObservation& obs,
                                               double tol = kDefaultTolerance);

/// Side-by-side result of the possibilistic updating rule and Spohn's rule on one observation.
struct RuleComparison {
    PossibilityDistribution prior;
    PossibilityDistribution observation;
    PossibilityDistribution spohn;
    PossibilityDistribution possibilistic;
    std::vector<Warning> possibilistic_warnings;
    /// spohn - possibilistic, per element.
    std::vector<double> difference;
    double max_divergence = 0.0;

    bool observation_dominates_prior = false;  // pi2 >= pi1 everywhere
    bool observation_within_prior = false;     // pi2 <= pi1 everywhere
    bool cores_overlap = false;
    /// The possibilistic posterior equals the prior (within tol).
    bool possibilistic_keeps_prior = false;
    /// Spohn's posterior equals the observation (within tol).
    bool spohn_adopts_observation = false;
};

RuleComparison compare_rules(const PossibilityDistribution& prior, const SpohnObservation& obs,
                             double tol = kDefaultTolerance);
RuleComparison compare_rules(const Ocf& prior, const SpohnObservation& obs, double tol = kDefaultTolerance);

}  // namespace beliefkit

#include "beliefkit/ocf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace beliefkit {

Ocf::Ocf(Frame frame, std::vector<Rank> ranks, Rank cap) : frame_(std::move(frame)), ranks_(std::move(ranks)), cap_(cap) {
    if (ranks_.size() != frame_.size())
        throw Error(ErrorCode::ValidationError, "ocf: one rank per frame element is required");
    for (std::size_t i = 0; i < ranks_.size(); ++i)
        if (ranks_[i] > cap_)
            throw Error(ErrorCode::ValidationError, "ocf rank cap: rank of '" + frame_.label(i) + "' is " +
                                                        std::to_string(ranks_[i]) + " > " + std::to_string(cap_));
    if (*std::min_element(ranks_.begin(), ranks_.end()) != 0)
        throw Error(ErrorCode::ValidationError, "ocf normalization: no element has rank 0");
}

Ocf Ocf::on_partition(Frame frame, const std::vector<std::pair<Subset, Rank>>& cells, Rank cap) {
    std::vector<std::optional<Rank>> assigned(frame.size());
    for (const auto& [set, r] : cells) {
        require_same_frame(frame, set.frame(), "ocf partition");
        for (auto i : set.indices()) {
            if (assigned[i])
                throw Error(ErrorCode::ValidationError, "partition disjointness: '" + frame.label(i) + "' is in two cells");
            assigned[i] = r;
        }
    }
    std::vector<Rank> ranks;
    for (std::size_t i = 0; i < assigned.size(); ++i) {
        if (!assigned[i])
            throw Error(ErrorCode::ValidationError, "partition coverage: '" + frame.label(i) + "' is in no cell");
        ranks.push_back(*assigned[i]);
    }
    return Ocf(std::move(frame), std::move(ranks), cap);
}

bool Ocf::constant_on(const WeightedPartition& partition) const {
    for (const auto& cell : partition.cells()) {
        const auto idx = cell.set.indices();
        for (auto i : idx)
            if (ranks_[i] != ranks_[idx.front()]) return false;
    }
    return true;
}

Rank ocf_rank(const Ocf& k, const Subset& event) {
    require_same_frame(k.frame(), event.frame(), "ocf_rank");
    if (event.is_empty()) throw Error(ErrorCode::EmptySet, "the rank of the empty set is undefined");
    Rank r = std::numeric_limits<Rank>::max();
    for (auto i : event.indices()) r = std::min(r, k.rank(i));
    return r;
}

PartialRanks ocf_a_part(const Ocf& k, const Subset& event) {
    const Rank base = ocf_rank(k, event);
    PartialRanks part{event, std::vector<std::optional<Rank>>(k.frame().size())};
    for (auto i : event.indices()) part.ranks[i] = k.rank(i) - base;
    return part;
}

Ocf ocf_conditionalize(const Ocf& k, const Subset& event, Rank shift) {
    require_same_frame(k.frame(), event.frame(), "ocf_conditionalize");
    if (event.is_empty()) throw Error(ErrorCode::EmptySet, "(A,n)-conditionalization needs a non-empty A");
    const Subset outside = event.complement();
    if (outside.is_empty())
        throw Error(ErrorCode::DegenerateComplement,
                    "(A,n)-conditionalization needs a non-empty complement; use the A-part for A = the whole frame");
    const auto inner = ocf_a_part(k, event);
    const auto outer = ocf_a_part(k, outside);
    std::vector<Rank> ranks(k.frame().size());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (inner.ranks[i]) {
            ranks[i] = *inner.ranks[i];
        } else {
            const std::uint64_t r = std::uint64_t{shift} + *outer.ranks[i];
            if (r > k.cap())
                throw Error(ErrorCode::RankOverflow, "shifted rank " + std::to_string(r) + " exceeds the rank cap");
            ranks[i] = static_cast<Rank>(r);
        }
    }
    return Ocf(k.frame(), std::move(ranks), k.cap());
}

PossibilityDistribution ocf_to_possibility(const Ocf& k) {
    std::vector<double> v;
    v.reserve(k.ranks().size());
    for (Rank r : k.ranks()) v.push_back(std::exp(-static_cast<double>(r)));
    return PossibilityDistribution(k.frame(), std::move(v));
}

PossibilityDistribution ocf_to_possibility(const PartialRanks& part) {
    std::vector<double> v(part.ranks.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (part.ranks[i]) v[i] = std::exp(-static_cast<double>(*part.ranks[i]));
    return PossibilityDistribution(part.domain.frame(), std::move(v));
}

Ocf possibility_to_ocf(const PossibilityDistribution& d, double delta, double tol, Rank cap) {
    std::vector<Rank> ranks;
    for (std::size_t i = 0; i < d.values().size(); ++i) {
        const double p = d.value(i);
        if (p <= tol)
            throw Error(ErrorCode::ZeroPossibility, "'" + d.frame().label(i) + "' has possibility " + format_decimal(p) +
                                                        "; ranks are finite");
        const double r = -std::log(std::min(p, 1.0));
        const double nearest = std::round(r);
        if (std::abs(r - nearest) > delta)
            throw Error(ErrorCode::NotOnRankGrid, "'" + d.frame().label(i) + "': -ln " + format_decimal(p) + " = " +
                                                      format_decimal(r) + " is not an integer rank");
        if (nearest > static_cast<double>(cap))
            throw Error(ErrorCode::RankOverflow, "'" + d.frame().label(i) + "': rank exceeds the cap");
        ranks.push_back(static_cast<Rank>(nearest));
    }
    return Ocf(d.frame(), std::move(ranks), cap);
}

// ---- Spohn observations -----------------------------------------------------

SpohnObservation::SpohnObservation(WeightedPartition partition) : partition_(std::move(partition)) {
    if (partition_.mode() != PartitionNormalization::Max)
        throw Error(ErrorCode::WeightNormalization, "a Spohn observation needs possibilistic weights with max 1");
}

SpohnObservation SpohnObservation::singletons(const PossibilityDistribution& pi2) {
    return SpohnObservation(WeightedPartition::singletons(pi2.frame(), pi2.values(), PartitionNormalization::Max));
}

SpohnObservation SpohnObservation::two_cell(const Subset& event, double alpha) {
    if (event.is_empty() || event.is_full())
        throw Error(ErrorCode::InvalidArgument, "a two-cell observation needs a proper non-empty subset");
    return SpohnObservation(WeightedPartition::two_cell(event, 1.0, alpha, PartitionNormalization::Max));
}

SpohnObservation SpohnObservation::shift(const Subset& event, Rank n) {
    return two_cell(event, std::exp(-static_cast<double>(n)));
}

PossibilityDistribution SpohnObservation::as_distribution() const {
    std::vector<double> v(frame().size(), 0.0);
    for (const auto& cell : partition_.cells())
        for (auto i : cell.set.indices()) v[i] = cell.weight;
    return PossibilityDistribution(frame(), std::move(v));
}

PossibilityDistribution spohn_partition_update(const PossibilityDistribution& prior, const SpohnObservation& obs,
                                               double tol) {
    require_same_frame(prior.frame(), obs.frame(), "spohn_partition_update");
    std::vector<double> v(prior.values().size(), 0.0);
    for (const auto& cell : obs.partition().cells()) {
        const double h = prior.possibility(cell.set);
        if (cell.weight > tol && h <= tol)
            throw Error(ErrorCode::ConditioningUndefined, "cell " + cell.set.to_string() + " has weight " +
                                                              format_decimal(cell.weight) + " but prior possibility " +
                                                              format_decimal(h));
        if (h <= 0.0) continue;
        for (auto i : cell.set.indices()) v[i] = cell.weight * prior.value(i) / h;
    }
    return PossibilityDistribution(prior.frame(), std::move(v), tol);
}

PossibilityDistribution spohn_partition_update(const Ocf& prior, const SpohnObservation& obs, double tol) {
    require_same_frame(prior.frame(), obs.frame(), "spohn_partition_update");
    std::vector<double> v(prior.ranks().size(), 0.0);
    for (const auto& cell : obs.partition().cells()) {
        const Rank base = ocf_rank(prior, cell.set);
        for (auto i : cell.set.indices())
            v[i] = cell.weight * std::exp(-static_cast<double>(prior.rank(i) - base));
    }
    return PossibilityDistribution(prior.frame(), std::move(v), tol);
}

// ---- comparison -------------------------------------------------------------

namespace {

RuleComparison compare_with(PossibilityDistribution prior, PossibilityDistribution spohn, const SpohnObservation& obs,
                            double tol) {
    PossibilityDistribution pi2 = obs.as_distribution();
    auto poss = poss_jeffrey_update(prior, pi2, JeffreyCombination::Min, tol);
    RuleComparison r{prior, pi2, spohn, poss.posterior, poss.warnings, {}, 0.0};

    const std::size_t n = prior.values().size();
    r.observation_dominates_prior = true;
    r.observation_within_prior = true;
    r.possibilistic_keeps_prior = true;
    r.spohn_adopts_observation = true;
    for (std::size_t i = 0; i < n; ++i) {
        const double p1 = prior.value(i);
        const double p2 = pi2.value(i);
        r.difference.push_back(spohn.value(i) - poss.posterior.value(i));
        r.max_divergence = std::max(r.max_divergence, std::abs(r.difference.back()));
        r.observation_dominates_prior = r.observation_dominates_prior && p2 >= p1 - tol;
        r.observation_within_prior = r.observation_within_prior && p2 <= p1 + tol;
        r.possibilistic_keeps_prior = r.possibilistic_keeps_prior && std::abs(poss.posterior.value(i) - p1) <= tol;
        r.spohn_adopts_observation = r.spohn_adopts_observation && std::abs(spohn.value(i) - p2) <= tol;
    }
    r.cores_overlap = prior.core(tol).intersects(pi2.core(tol));
    return r;
}

}  // namespace

RuleComparison compare_rules(const PossibilityDistribution& prior, const SpohnObservation& obs, double tol) {
    return compare_with(prior, spohn_partition_update(prior, obs, tol), obs, tol);
}

RuleComparison compare_rules(const Ocf& prior, const SpohnObservation& obs, double tol) {
    return compare_with(ocf_to_possibility(prior), spohn_partition_update(prior, obs, tol), obs, tol);
}

}  // namespace beliefkit

#pragma once

#include <cstdint>
#include <vector>

#include "beliefkit/evidence.hpp"

namespace beliefkit {

struct ConditionalRange {
    double sup;
    double inf;
};

inline constexpr std::uint64_t kDefaultSelectionCap = 10'000'000;

/// Brute-force view of the credal set of a mass function.
///
/// Every selection function sends the whole mass of each focal element to one
/// of its members. The resulting distributions include every extreme point of
/// the set of probabilities between Bel and Pl, and P(A|B) is linear-fractional,
/// so its sup and inf over that set are attained at a selection. Nothing here
/// goes through Bel or Pl.
class CredalOracle {
public:
    explicit CredalOracle(const MassFunction& m, std::size_t frame_cap = kDefaultEnumerationCap,
                          std::uint64_t selection_cap = kDefaultSelectionCap);

    /// Distinct distributions produced by the selections.
    std::size_t extreme_point_count() const { return points_.size(); }
    const std::vector<std::vector<double>>& extreme_points() const { return points_; }

    /// (sup, inf) of P(event | given) over the selections with P(given) > 0.
    /// Throws NoFeasibleSelection when every selection gives P(given) = 0.
    ConditionalRange conditional_range(const Subset& event, const Subset& given) const;

private:
    double probability(std::size_t point, std::uint64_t mask) const;

    Frame frame_;
    std::vector<std::vector<double>> points_;
    // Per-point probability of every subset, filled for small frames only.
    std::vector<double> table_;
    std::size_t table_stride_ = 0;
};

/// One-shot form of CredalOracle::conditional_range.
ConditionalRange credal_oracle(const MassFunction& m, const Subset& event, const Subset& given);

}  // namespace beliefkit

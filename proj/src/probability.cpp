#include "beliefkit/probability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace beliefkit {

ProbabilityMeasure::ProbabilityMeasure(Frame frame, std::vector<double> weights, double tol)
    : frame_(std::move(frame)), weights_(std::move(weights)) {
    if (weights_.size() != frame_.size())
        throw Error(ErrorCode::ValidationError, "probability: one weight per frame element is required");
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        if (!std::isfinite(w) || w < 0.0 || w > 1.0 + tol)
            throw Error(ErrorCode::ValidationError,
                        "probability range: weight of '" + frame_.label(i) + "' is " + format_decimal(w));
        sum += w;
    }
    if (beyond_tolerance(sum - 1.0, tol))
        throw Error(ErrorCode::ValidationError, "probability normalization: weights sum to " + format_decimal(sum));
}

ProbabilityMeasure ProbabilityMeasure::uniform(Frame frame) {
    const std::size_t n = frame.size();
    return ProbabilityMeasure(std::move(frame), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double ProbabilityMeasure::of(const Subset& event) const {
    require_same_frame(frame_, event.frame(), "probability");
    double s = 0.0;
    for (auto i : event.indices()) s += weights_[i];
    return s;
}

WeightedPartition::WeightedPartition(Frame frame, std::vector<PartitionCell> cells, PartitionNormalization mode,
                                     double tol)
    : frame_(std::move(frame)), cells_(std::move(cells)), mode_(mode) {
    if (cells_.empty()) throw Error(ErrorCode::ValidationError, "partition: at least one cell is required");
    Subset covered = frame_.empty_set();
    double sum = 0.0;
    double max = 0.0;
    for (const auto& c : cells_) {
        require_same_frame(frame_, c.set.frame(), "partition");
        if (c.set.is_empty()) throw Error(ErrorCode::ValidationError, "partition: cells must be non-empty");
        if (covered.intersects(c.set))
            throw Error(ErrorCode::ValidationError, "partition disjointness: cell " + c.set.to_string() + " overlaps another cell");
        if (!std::isfinite(c.weight) || c.weight < 0.0 || c.weight > 1.0 + tol)
            throw Error(ErrorCode::ValidationError, "partition weight range: cell " + c.set.to_string());
        covered = covered.unite(c.set);
        sum += c.weight;
        max = std::max(max, c.weight);
    }
    if (!covered.is_full()) throw Error(ErrorCode::ValidationError, "partition coverage: cells do not cover the frame");
    if (mode_ == PartitionNormalization::Sum && beyond_tolerance(sum - 1.0, tol))
        throw Error(ErrorCode::WeightNormalization, "partition weights sum to " + format_decimal(sum) + ", expected 1");
    if (mode_ == PartitionNormalization::Max && beyond_tolerance(max - 1.0, tol))
        throw Error(ErrorCode::WeightNormalization, "largest partition weight is " + format_decimal(max) + ", expected 1");
}

WeightedPartition WeightedPartition::singletons(Frame frame, const std::vector<double>& weights,
                                                PartitionNormalization mode, double tol) {
    if (weights.size() != frame.size())
        throw Error(ErrorCode::ValidationError, "partition: one weight per frame element is required");
    std::vector<PartitionCell> cells;
    for (std::size_t i = 0; i < frame.size(); ++i) cells.push_back({frame.singleton(i), weights[i]});
    return WeightedPartition(std::move(frame), std::move(cells), mode, tol);
}

WeightedPartition WeightedPartition::two_cell(const Subset& event, double alpha, double other,
                                              PartitionNormalization mode, double tol) {
    return WeightedPartition(event.frame(), {{event, alpha}, {event.complement(), other}}, mode, tol);
}

double WeightedPartition::weight_of_element(std::size_t i) const {
    for (const auto& c : cells_)
        if (c.set.contains(i)) return c.weight;
    throw Error(ErrorCode::UnknownElement, "element index out of range");
}

ProbabilityMeasure bayes_condition(const ProbabilityMeasure& p, const Subset& given, double tol) {
    const double pa = p.of(given);
    if (pa <= tol)
        throw Error(ErrorCode::ConditioningOnNull, "P(" + given.to_string() + ") = " + format_decimal(pa) + " is null");
    std::vector<double> w(p.weights().size(), 0.0);
    for (auto i : given.indices()) w[i] = p.weight(i) / pa;
    return ProbabilityMeasure(p.frame(), std::move(w), tol);
}

ProbabilityMeasure jeffrey_update(const ProbabilityMeasure& p, const WeightedPartition& obs, double tol) {
    require_same_frame(p.frame(), obs.frame(), "jeffrey_update");
    if (obs.mode() != PartitionNormalization::Sum)
        throw Error(ErrorCode::WeightNormalization, "jeffrey_update needs probability weights summing to 1");
    std::vector<double> w(p.weights().size(), 0.0);
    for (const auto& cell : obs.cells()) {
        if (cell.weight <= 0.0) continue;
        const double pa = p.of(cell.set);
        if (pa <= tol)
            throw Error(ErrorCode::ConditioningOnNull,
                        "cell " + cell.set.to_string() + " has weight " + format_decimal(cell.weight) +
                            " but prior probability " + format_decimal(pa));
        for (auto i : cell.set.indices()) w[i] += cell.weight * p.weight(i) / pa;
    }
    // Sum-mode weights may be off by up to tol; absorb it.
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return ProbabilityMeasure(p.frame(), std::move(w), tol);
}

}  // namespace beliefkit

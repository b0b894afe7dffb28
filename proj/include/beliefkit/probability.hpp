#pragma once

#include <string>
#include <vector>

#include "beliefkit/error.hpp"
#include "beliefkit/frame.hpp"

namespace beliefkit {

/// Probability over the elements of a frame; weights are non-negative and sum to 1.
class ProbabilityMeasure {
public:
    ProbabilityMeasure(Frame frame, std::vector<double> weights, double tol = kDefaultTolerance);
    static ProbabilityMeasure uniform(Frame frame);

    const Frame& frame() const { return frame_; }
    const std::vector<double>& weights() const { return weights_; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// P(A).
    double of(const Subset& event) const;

private:
    Frame frame_;
    std::vector<double> weights_;
};

struct PartitionCell {
    Subset set;
    double weight;
};

enum class PartitionNormalization {
    Sum,  // weights are probabilities: they sum to 1
    Max,  // weights are possibilities: the largest is 1
};

/// Disjoint cells covering the frame, each carrying a certainty weight.
class WeightedPartition {
public:
    WeightedPartition(Frame frame, std::vector<PartitionCell> cells, PartitionNormalization mode,
                      double tol = kDefaultTolerance);

    /// One cell per element, weighted by `weights[i]`.
    static WeightedPartition singletons(Frame frame, const std::vector<double>& weights, PartitionNormalization mode,
                                        double tol = kDefaultTolerance);
    /// {(A, alpha), (not A, other)}; `other` defaults to the complement's share under the mode.
    static WeightedPartition two_cell(const Subset& event, double alpha, double other,
                                      PartitionNormalization mode, double tol = kDefaultTolerance);

    const Frame& frame() const { return frame_; }
    const std::vector<PartitionCell>& cells() const { return cells_; }
    PartitionNormalization mode() const { return mode_; }

    /// Weight of the cell holding element i.
    double weight_of_element(std::size_t i) const;

private:
    Frame frame_;
    std::vector<PartitionCell> cells_;
    PartitionNormalization mode_;
};

/// P(.|A) = P(. and A) / P(A). Throws ConditioningOnNull when P(A) <= tol.
ProbabilityMeasure bayes_condition(const ProbabilityMeasure& p, const Subset& given, double tol = kDefaultTolerance);

/// Jeffrey's rule: P'(B) = sum_i alpha_i P(B|A_i). Cells with zero weight are
/// skipped even if P(A_i) = 0; a positive-weight cell with P(A_i) <= tol
/// throws ConditioningOnNull naming the cell.
ProbabilityMeasure jeffrey_update(const ProbabilityMeasure& p, const WeightedPartition& obs,
                                  double tol = kDefaultTolerance);

}  // namespace beliefkit

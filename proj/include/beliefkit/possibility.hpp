#pragma once

#include <string_view>
#include <vector>

#include "beliefkit/error.hpp"
#include "beliefkit/frame.hpp"

namespace beliefkit {

/// pi : frame -> [0,1]. Ordinary construction requires max pi = 1 (within tol).
/// Subnormal distributions exist only as flagged outputs of updates whose
/// observation core misses the prior support; see `subnormal`.
class PossibilityDistribution {
public:
    PossibilityDistribution(Frame frame, std::vector<double> values, double tol = kDefaultTolerance);

    /// Accepts max pi in (0, 1]; used for results that carry an UnnormalizedResult warning.
    static PossibilityDistribution subnormal(Frame frame, std::vector<double> values);
    /// pi = 1 everywhere.
    static PossibilityDistribution vacuous(Frame frame);
    /// Indicator of a non-empty set.
    static PossibilityDistribution crisp(const Subset& set);

    const Frame& frame() const { return frame_; }
    const std::vector<double>& values() const { return values_; }
    double value(std::size_t i) const { return values_[i]; }
    double height() const;
    bool is_normalized(double tol = kDefaultTolerance) const;

    /// Pi(A) = max over A; Pi(empty) = 0.
    double possibility(const Subset& event) const;
    /// N(A) = 1 - Pi(~A).
    double necessity(const Subset& event) const;

    /// {w : pi(w) >= 1 - tol}.
    Subset core(double tol = kDefaultTolerance) const;
    /// {w : pi(w) > 0}.
    Subset support() const;
    /// {w : pi(w) >= alpha}.
    Subset level_cut(double alpha) const;
    /// Distinct positive values, descending.
    std::vector<double> levels() const;

    bool operator==(const PossibilityDistribution& rhs) const;

private:
    struct Unchecked {};
    PossibilityDistribution(Unchecked, Frame frame, std::vector<double> values);

    Frame frame_;
    std::vector<double> values_;
};

double possibility_of(const PossibilityDistribution& d, const Subset& event);
double necessity_of(const PossibilityDistribution& d, const Subset& event);

struct LevelCut {
    double alpha;
    Subset set;
};

/// One cut per distinct positive value, alpha descending, so the sets grow.
std::vector<LevelCut> level_cuts(const PossibilityDistribution& d);

enum class ConjunctionOp { Min, Product, Lukasiewicz };

std::string_view op_name(ConjunctionOp op);
ConjunctionOp parse_conjunction_op(std::string_view name);
double conjoin(ConjunctionOp op, double a, double b);

struct WeightedSource {
    PossibilityDistribution dist;
    double weight;
};

/// pi(w) = pi(w) / Pi(B) on B, 0 elsewhere. Throws ConditioningUndefined when Pi(B) <= tol.
PossibilityDistribution poss_condition(const PossibilityDistribution& d, const Subset& given,
                                       double tol = kDefaultTolerance);

/// Symmetric combination pi1 * pi2 renormalized by its height.
/// Throws TotalConflict when the height is <= tol.
PossibilityDistribution poss_combine(const PossibilityDistribution& d1, const PossibilityDistribution& d2,
                                     ConjunctionOp op = ConjunctionOp::Min, double tol = kDefaultTolerance);

/// pi(w) = max_j (lambda_j * pi_j(w)). Throws WeightNormalization unless max lambda_j = 1.
PossibilityDistribution weighted_max_aggregate(const std::vector<WeightedSource>& sources,
                                               ConjunctionOp op = ConjunctionOp::Min, double tol = kDefaultTolerance);

/// Outer combination in the compact updating formula.
enum class JeffreyCombination { Min, Product };

struct PossibilisticUpdate {
    PossibilityDistribution posterior;
    std::vector<Warning> warnings;
};

/// Updating of pi1 by the uncertain observation pi2 (compact form):
///   [pi1|pi2](w) = min(pi2(w), pi1(w) / Pi1(B(pi2(w))))
/// where B(a) is the level cut {w' : pi2(w') >= a}. When the core of pi2 misses
/// the support of pi1 the result is subnormal and carries UnnormalizedResult.
/// Throws TotalConflict when no element is possible under both.
PossibilisticUpdate poss_jeffrey_update(const PossibilityDistribution& d1, const PossibilityDistribution& d2,
                                        JeffreyCombination outer = JeffreyCombination::Min,
                                        double tol = kDefaultTolerance);

/// Same update evaluated as sup over the level cuts of pi2 of
///   min(alpha, pi1(w) / Pi1(B_alpha), 1[w in B_alpha]).
/// Independent of the compact form; used to cross-check it.
std::vector<double> poss_jeffrey_sup_form(const PossibilityDistribution& d1, const PossibilityDistribution& d2);

/// [Pi1|Pi2](A) = sup_alpha min(alpha, Pi1(A|B_alpha)).
double updated_possibility(const PossibilityDistribution& d1, const PossibilityDistribution& d2, const Subset& event);
/// [N1|Pi2](A) = inf_alpha max(1 - alpha, N1(A|B_alpha)).
double updated_necessity(const PossibilityDistribution& d1, const PossibilityDistribution& d2, const Subset& event);

/// Observation "B, with possibility lambda of being outside B":
///   max(min(pi1(w) / Pi1(B), 1[w in B]), min(lambda, pi1(w))).
/// lambda = 1 is the vacuous observation and returns pi1.
/// Throws ConditioningUndefined when Pi1(B) <= tol.
PossibilityDistribution poss_update_crisp_with_doubt(const PossibilityDistribution& d1, const Subset& given,
                                                     double lambda, double tol = kDefaultTolerance);

/// pi2 = max(1[B], lambda), the observation behind poss_update_crisp_with_doubt.
PossibilityDistribution doubtful_observation(const Subset& given, double lambda);

}  // namespace beliefkit

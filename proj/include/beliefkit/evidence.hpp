#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "beliefkit/error.hpp"
#include "beliefkit/frame.hpp"
#include "beliefkit/probability.hpp"

namespace beliefkit {

struct Focal {
    Subset set;
    double mass;
};

/// Basic probability assignment stored sparsely as its focal elements.
///
/// Construction merges repeated subsets additively, drops zero masses and
/// rejects a positive mass on the empty set. Focals are kept sorted by
/// membership bits, so two equal assignments have identical focal lists.
class MassFunction {
public:
    MassFunction(Frame frame, std::vector<Focal> focals, double tol = kDefaultTolerance);

    static MassFunction vacuous(Frame frame);
    static MassFunction categorical(const Subset& set);
    static MassFunction bayesian(const ProbabilityMeasure& p);

    const Frame& frame() const { return frame_; }
    const std::vector<Focal>& focals() const { return focals_; }

    double mass_of(const Subset& set) const;
    /// Bel(B): mass of the non-empty focals inside B.
    double belief(const Subset& event) const;
    /// Pl(B): mass of the focals meeting B.
    double plausibility(const Subset& event) const;

    /// All focal elements are singletons.
    bool is_bayesian() const;
    std::optional<ProbabilityMeasure> to_probability() const;

private:
    Frame frame_;
    std::vector<Focal> focals_;
};

double belief(const MassFunction& m, const Subset& event);
double plausibility(const MassFunction& m, const Subset& event);

enum class ConditioningRule { Dempster, Geometric, Upper, Lower };

std::string_view rule_name(ConditioningRule rule);
ConditioningRule parse_conditioning_rule(std::string_view name);

struct ProbabilityInterval {
    double upper;
    double lower;
};

/// Upper and lower conditional probabilities given a fixed event, queried per event:
///   P*(B|A)  = Pl(A&B) / (Pl(A&B) + Bel(A&~B))
///   P_*(B|A) = Bel(A&B) / (Bel(A&B) + Pl(A&~B))
/// These are the envelopes of P(B|A) over the probabilities bounded by Bel and Pl.
class ConditionalBounds {
public:
    ConditionalBounds(MassFunction m, Subset given, double tol = kDefaultTolerance);

    const MassFunction& prior() const { return m_; }
    const Subset& given() const { return given_; }

    /// Throws ConditioningUndefined when either denominator is within tol of 0.
    ProbabilityInterval at(const Subset& event) const;
    double upper(const Subset& event) const { return at(event).upper; }
    double lower(const Subset& event) const { return at(event).lower; }
    bool defined_at(const Subset& event) const;

private:
    MassFunction m_;
    Subset given_;
    double tol_;
};

/// Masses transferred to their intersection with `given`, then renormalized.
/// Throws ConditioningUndefined when Pl(given) <= tol.
MassFunction dempster_condition(const MassFunction& m, const Subset& given, double tol = kDefaultTolerance);

/// Only focals inside `given` survive, renormalized by Bel(given).
/// Throws ConditioningUndefined when Bel(given) <= tol.
MassFunction geometric_condition(const MassFunction& m, const Subset& given, double tol = kDefaultTolerance);

ConditionalBounds conditional_bounds(const MassFunction& m, const Subset& given, double tol = kDefaultTolerance);

using Conditioned = std::variant<MassFunction, ConditionalBounds>;

/// Dempster and Geometric yield a mass function; Upper and Lower yield the
/// event-indexed bounds.
Conditioned condition(const MassFunction& m, const Subset& given, ConditioningRule rule,
                      double tol = kDefaultTolerance);

/// K = total product mass of disjoint focal pairs.
double conflict(const MassFunction& m1, const MassFunction& m2);

/// Normalized conjunctive combination. Throws TotalConflict when K >= 1 - tol.
MassFunction dempster_combine(const MassFunction& m1, const MassFunction& m2, double tol = kDefaultTolerance);

/// Jeffrey-style update of m1 on the uncertain observation m2:
///   m(B) = sum_A m2(A) m1(B|A)
/// with m1(.|A) the Dempster (default) or geometric conditional. Each focal A
/// of m2 needs Pl1(A) > tol (Dempster) or Bel1(A) > tol (geometric).
MassFunction jeffrey_ds_update(const MassFunction& m1, const MassFunction& m2,
                               ConditioningRule inner = ConditioningRule::Dempster, double tol = kDefaultTolerance);

/// Bel(B|A) = (Bel(B or ~A) - Bel(~A)) / (1 - Bel(~A)).
/// Throws ConditioningUndefined when Bel(~A) >= 1 - tol.
double bel_conditional(const MassFunction& m, const Subset& event, const Subset& given,
                       double tol = kDefaultTolerance);

}  // namespace beliefkit

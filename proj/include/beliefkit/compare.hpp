#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "beliefkit/evidence.hpp"
#include "beliefkit/ocf.hpp"
#include "beliefkit/possibility.hpp"
#include "beliefkit/probability.hpp"

namespace beliefkit {

/// One generated test case. Families fill only the fields their rules read.
struct Instance {
    Frame frame;
    std::optional<MassFunction> prior_mass;
    std::optional<MassFunction> observation_mass;
    std::optional<WeightedPartition> partition;
    std::optional<PossibilityDistribution> prior_poss;
    std::optional<PossibilityDistribution> observation_poss;
    std::optional<Ocf> ocf;
    std::optional<Subset> given;
    double lambda = 0.0;
    Rank shift = 0;
};

std::string describe(const Instance& instance);

/// Generator description. `constraint` names a registered family, e.g.
/// "no-conflict-pair" or "dominating-pair"; see family_names().
struct InstanceFamily {
    std::string constraint;
    std::size_t min_frame_size = 3;
    std::size_t max_frame_size = 5;
    std::size_t max_focals = 6;
    std::size_t count = 200;
};

inline constexpr std::size_t kMaxRejectionRounds = 100'000;

/// Reproducible instances satisfying the family's constraint, each re-checked
/// after generation. Throws GeneratorConstraintUnsatisfiable when rejection
/// sampling gives up and UnknownRule for an unregistered constraint.
std::vector<Instance> generate_instances(const InstanceFamily& family, std::uint64_t seed);

/// Throws GeneratorConstraintUnsatisfiable when `instance` violates the constraint.
void verify_constraint(const std::string& constraint, const Instance& instance, double tol = kDefaultTolerance);

std::vector<std::string> family_names();

enum class OutputKind {
    Mass,          // dense masses indexed by subset bit mask
    Distribution,  // one value per element
    EventTable,    // one value per subset
    PairTable,     // one value per (event, given) mask pair
    BoundsTable,   // (upper, lower) per (event, given) mask pair
};

std::string_view output_kind_name(OutputKind kind);

/// Output of a rule on one instance. NaN marks a value the rule leaves undefined.
struct RuleOutput {
    OutputKind kind;
    std::vector<double> values;
};

struct RuleRef {
    std::string name;
    std::map<std::string, std::string> params;
};

struct RuleInfo {
    std::string name;
    OutputKind kind;
    std::string summary;
};

const std::vector<RuleInfo>& rule_catalog();

/// Throws UnknownRule for an unregistered name.
RuleOutput evaluate_rule(const RuleRef& rule, const Instance& instance, double tol = kDefaultTolerance);

enum class DeviationMetric { Absolute, Relative };

struct CoincidenceSpec {
    std::string name;
    std::string claim;
    RuleRef rule_a;
    RuleRef rule_b;
    InstanceFamily family;
    std::uint64_t seed = 1;
    double tolerance = 1e-9;
    DeviationMetric metric = DeviationMetric::Absolute;
};

struct ComparisonReport {
    std::string spec_name;
    std::string claim;
    std::string rule_a;
    std::string rule_b;
    std::string family;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    DeviationMetric metric = DeviationMetric::Absolute;
    std::size_t instances = 0;
    std::size_t compared_values = 0;
    /// Maximum deviation per instance, by instance index.
    std::vector<double> deviations;
    double max_deviation = 0.0;
    bool passed = false;
    std::optional<std::size_t> witness_index;
    std::string witness;
    std::string failure_message;
};

/// Evaluates both rules over the generated family and compares their outputs
/// value by value. A value that rule_a defines but rule_b does not counts as
/// an infinite deviation; values rule_a leaves undefined are not compared.
/// Deterministic for a given spec, including the seed, whatever the thread count.
ComparisonReport run_coincidence(const CoincidenceSpec& spec, unsigned threads = 0);

/// Every rule coincidence the library claims, one spec per claim.
const std::vector<CoincidenceSpec>& builtin_suite();
/// Throws UnknownRule when no built-in spec has this name.
const CoincidenceSpec& builtin_spec(const std::string& name);

}  // namespace beliefkit

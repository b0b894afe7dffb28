#include "beliefkit/compare.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "beliefkit/credal.hpp"

namespace beliefkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---- sampling ---------------------------------------------------------------

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    bool coin(double p) { return uniform(0.0, 1.0) < p; }
    std::uint64_t nonempty_mask(std::size_t n) {
        return std::uniform_int_distribution<std::uint64_t>(1, (std::uint64_t{1} << n) - 1)(rng_);
    }

private:
    std::mt19937_64 rng_;
};

Frame make_frame(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("w" + std::to_string(i + 1));
    return Frame(std::move(labels));
}

MassFunction random_mass(Sampler& s, const Frame& frame, std::size_t max_focals, std::uint64_t required_bits = 0) {
    const std::size_t k = s.index(1, std::max<std::size_t>(1, max_focals));
    std::vector<Focal> focals;
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double w = s.uniform(0.05, 1.0);
        focals.push_back({frame.from_word(s.nonempty_mask(frame.size()) | required_bits), w});
        total += w;
    }
    for (auto& f : focals) f.mass /= total;
    return MassFunction(frame, std::move(focals));
}

std::vector<double> random_weights(Sampler& s, std::size_t n, double drop_probability) {
    std::vector<double> w(n, 0.0);
    bool any = false;
    for (auto& x : w) {
        if (s.coin(drop_probability)) continue;
        x = s.uniform(0.05, 1.0);
        any = true;
    }
    if (!any) w[s.index(0, n - 1)] = 1.0;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return w;
}

ProbabilityMeasure random_probability(Sampler& s, const Frame& frame, bool full_support) {
    return ProbabilityMeasure(frame, random_weights(s, frame.size(), full_support ? 0.0 : 0.25));
}

WeightedPartition random_partition(Sampler& s, const Frame& frame, PartitionNormalization mode) {
    const std::size_t n = frame.size();
    const std::size_t cells = s.index(1, n);
    std::vector<Bits> cell_bits(cells, frame.empty_set().bits());
    for (std::size_t i = 0; i < n; ++i) cell_bits[s.index(0, cells - 1)].set(i);
    std::vector<PartitionCell> out;
    for (auto& b : cell_bits)
        if (!b.none()) out.push_back({frame.from_bits(b), 0.0});
    auto w = random_weights(s, out.size(), 0.15);
    if (mode == PartitionNormalization::Max) {
        const double top = *std::max_element(w.begin(), w.end());
        for (auto& x : w) x /= top;
    }
    for (std::size_t c = 0; c < out.size(); ++c) out[c].weight = w[c];
    return WeightedPartition(frame, std::move(out), mode);
}

std::vector<double> random_possibility_values(Sampler& s, std::size_t n) {
    static constexpr double grid[] = {0.25, 0.5, 0.75};
    std::vector<double> v(n);
    for (auto& x : v) {
        const double r = s.uniform(0.0, 1.0);
        if (r < 0.1)
            x = 0.0;
        else if (r < 0.4)
            x = grid[s.index(0, 2)];
        else
            x = s.uniform(0.01, 1.0);
    }
    v[s.index(0, n - 1)] = 1.0;
    if (s.coin(0.3)) v[s.index(0, n - 1)] = 1.0;
    return v;
}

PossibilityDistribution random_possibility(Sampler& s, const Frame& frame) {
    return PossibilityDistribution(frame, random_possibility_values(s, frame.size()));
}

Ocf random_ocf(Sampler& s, const Frame& frame) {
    std::vector<Rank> r(frame.size());
    for (auto& x : r) x = static_cast<Rank>(s.index(0, 12));
    const Rank low = *std::min_element(r.begin(), r.end());
    for (auto& x : r) x -= low;
    return Ocf(frame, std::move(r));
}

MassFunction partition_mass(const WeightedPartition& p) {
    std::vector<Focal> f;
    for (const auto& c : p.cells()) f.push_back({c.set, c.weight});
    return MassFunction(p.frame(), std::move(f));
}

[[noreturn]] void unsatisfied(const std::string& constraint, const std::string& why) {
    throw Error(ErrorCode::GeneratorConstraintUnsatisfiable, constraint + ": " + why);
}

template <class T>
const T& need(const std::optional<T>& field, const char* name) {
    if (!field) throw Error(ErrorCode::InvalidArgument, std::string("instance has no ") + name);
    return *field;
}

// ---- families ---------------------------------------------------------------

using Proposer = std::function<Instance(Sampler&, const InstanceFamily&, const Frame&)>;

struct FamilyEntry {
    std::string name;
    Proposer propose;
};

Instance base(const Frame& frame) { return Instance{frame, {}, {}, {}, {}, {}, {}, {}, 0.0, 0}; }

const std::vector<FamilyEntry>& families() {
    static const std::vector<FamilyEntry> table = {
        {"random-mass",
         [](Sampler& s, const InstanceFamily& f, const Frame& fr) {
             auto in = base(fr);
             in.prior_mass = random_mass(s, fr, f.max_focals);
             return in;
         }},
        {"jeffrey-applicable-pair",
         [](Sampler& s, const InstanceFamily& f, const Frame& fr) {
             auto in = base(fr);
             in.prior_mass = random_mass(s, fr, f.max_focals);
             in.observation_mass = random_mass(s, fr, f.max_focals);
             return in;
         }},
        {"categorical-observation",
         [](Sampler& s, const InstanceFamily& f, const Frame& fr) {
             auto in = base(fr);
             in.prior_mass = random_mass(s, fr, f.max_focals);
             in.given = fr.from_word(s.nonempty_mask(fr.size()));
             in.observation_mass = MassFunction::categorical(*in.given);
             return in;
         }},
        {"bayesian-prior-partition",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_mass = MassFunction::bayesian(random_probability(s, fr, false));
             in.partition = random_partition(s, fr, PartitionNormalization::Sum);
             in.observation_mass = partition_mass(*in.partition);
             return in;
         }},
        {"bayesian-prior-certain-cell",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_mass = MassFunction::bayesian(random_probability(s, fr, false));
             in.given = fr.from_word(s.nonempty_mask(fr.size()));
             if (in.given->is_full())
                 in.partition = WeightedPartition(fr, {{*in.given, 1.0}}, PartitionNormalization::Sum);
             else
                 in.partition = WeightedPartition::two_cell(*in.given, 1.0, 0.0, PartitionNormalization::Sum);
             return in;
         }},
        {"bayesian-prior-event",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_mass = MassFunction::bayesian(random_probability(s, fr, false));
             in.given = fr.from_word(s.nonempty_mask(fr.size()));
             return in;
         }},
        {"no-conflict-pair",
         [](Sampler& s, const InstanceFamily& f, const Frame& fr) {
             auto in = base(fr);
             // Proposal bias: most focals share one anchor element.
             const std::uint64_t anchor = std::uint64_t{1} << s.index(0, fr.size() - 1);
             in.prior_mass = random_mass(s, fr, f.max_focals, anchor);
             in.observation_mass = random_mass(s, fr, f.max_focals, s.coin(0.9) ? anchor : 0);
             return in;
         }},
        {"singleton-partition",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_mass = MassFunction::bayesian(random_probability(s, fr, true));
             in.partition = WeightedPartition::singletons(fr, random_weights(s, fr.size(), 0.25),
                                                          PartitionNormalization::Sum);
             return in;
         }},
        {"possibility-pair",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_poss = random_possibility(s, fr);
             in.observation_poss = random_possibility(s, fr);
             return in;
         }},
        {"dominating-pair",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_poss = random_possibility(s, fr);
             std::vector<double> v = in.prior_poss->values();
             for (auto& x : v) {
                 if (s.coin(0.3)) continue;
                 x = s.coin(0.2) ? 1.0 : x + s.uniform(0.0, 1.0) * (1.0 - x);
             }
             in.observation_poss = PossibilityDistribution(fr, std::move(v));
             return in;
         }},
        {"dominated-pair",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_poss = random_possibility(s, fr);
             const auto core = in.prior_poss->core().indices();
             std::vector<double> v = in.prior_poss->values();
             for (auto& x : v) {
                 if (s.coin(0.3)) continue;
                 x = s.coin(0.15) ? 0.0 : x * s.uniform(0.0, 1.0);
             }
             v[core[s.index(0, core.size() - 1)]] = 1.0;
             in.observation_poss = PossibilityDistribution(fr, std::move(v));
             return in;
         }},
        {"overlapping-cores",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             auto v1 = random_possibility_values(s, fr.size());
             auto v2 = random_possibility_values(s, fr.size());
             const std::size_t x = s.index(0, fr.size() - 1);
             v1[x] = v2[x] = 1.0;
             in.prior_poss = PossibilityDistribution(fr, std::move(v1));
             in.observation_poss = PossibilityDistribution(fr, std::move(v2));
             return in;
         }},
        {"possibility-event",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_poss = random_possibility(s, fr);
             in.given = fr.from_word(s.nonempty_mask(fr.size()));
             return in;
         }},
        {"crisp-with-doubt",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.prior_poss = random_possibility(s, fr);
             in.given = fr.from_word(s.nonempty_mask(fr.size()));
             const double r = s.uniform(0.0, 1.0);
             in.lambda = r < 0.15 ? 0.0 : (r < 0.35 ? 0.25 * static_cast<double>(s.index(1, 3)) : s.uniform(0.0, 1.0));
             return in;
         }},
        {"ocf-shift",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.ocf = random_ocf(s, fr);
             in.given = fr.from_word(s.nonempty_mask(fr.size()));
             in.shift = static_cast<Rank>(s.index(0, 20));
             return in;
         }},
        {"ocf-event",
         [](Sampler& s, const InstanceFamily&, const Frame& fr) {
             auto in = base(fr);
             in.ocf = random_ocf(s, fr);
             in.given = fr.from_word(s.nonempty_mask(fr.size()));
             return in;
         }},
    };
    return table;
}

const FamilyEntry& find_family(const std::string& name) {
    for (const auto& f : families())
        if (f.name == name) return f;
    throw Error(ErrorCode::UnknownRule, "unknown instance family '" + name + "'");
}

bool pointwise(const PossibilityDistribution& a, const PossibilityDistribution& b,
               const std::function<bool(double, double)>& pred) {
    for (std::size_t i = 0; i < a.values().size(); ++i)
        if (!pred(a.value(i), b.value(i))) return false;
    return true;
}

}  // namespace

void verify_constraint(const std::string& constraint, const Instance& in, double tol) {
    const std::string& c = constraint;
    if (c == "random-mass") {
        need(in.prior_mass, "prior mass");
    } else if (c == "jeffrey-applicable-pair") {
        for (const auto& f : need(in.observation_mass, "observation mass").focals())
            if (need(in.prior_mass, "prior mass").plausibility(f.set) <= tol)
                unsatisfied(c, "observation focal " + f.set.to_string() + " is implausible under the prior");
    } else if (c == "categorical-observation") {
        const auto& obs = need(in.observation_mass, "observation mass");
        if (obs.focals().size() != 1 || !(obs.focals().front().set == need(in.given, "event")))
            unsatisfied(c, "observation is not categorical on the event");
        if (need(in.prior_mass, "prior mass").plausibility(*in.given) <= tol)
            unsatisfied(c, "event is implausible under the prior");
    } else if (c == "bayesian-prior-partition" || c == "singleton-partition" || c == "bayesian-prior-certain-cell") {
        const auto& m = need(in.prior_mass, "prior mass");
        if (!m.is_bayesian()) unsatisfied(c, "prior is not Bayesian");
        const auto& p = need(in.partition, "partition");
        for (const auto& cell : p.cells())
            if (cell.weight > 0.0 && m.plausibility(cell.set) <= tol)
                unsatisfied(c, "weighted cell " + cell.set.to_string() + " has null prior probability");
        if (c == "singleton-partition") {
            for (const auto& cell : p.cells())
                if (cell.set.cardinality() != 1) unsatisfied(c, "cells are not singletons");
        }
        if (c == "bayesian-prior-partition") {
            const auto& obs = need(in.observation_mass, "observation mass");
            for (const auto& f : obs.focals()) {
                bool is_cell = false;
                for (const auto& cell : p.cells()) is_cell = is_cell || cell.set == f.set;
                if (!is_cell) unsatisfied(c, "observation focal is not a partition cell");
            }
        }
        if (c == "bayesian-prior-certain-cell" && p.cells().front().weight != 1.0)
            unsatisfied(c, "first cell is not certain");
    } else if (c == "bayesian-prior-event") {
        const auto& m = need(in.prior_mass, "prior mass");
        if (!m.is_bayesian()) unsatisfied(c, "prior is not Bayesian");
        if (m.plausibility(need(in.given, "event")) <= tol) unsatisfied(c, "event has null prior probability");
    } else if (c == "no-conflict-pair") {
        if (conflict(need(in.prior_mass, "prior mass"), need(in.observation_mass, "observation mass")) != 0.0)
            unsatisfied(c, "pair has conflicting focal elements");
    } else if (c == "possibility-pair") {
        const auto& a = need(in.prior_poss, "prior possibility");
        const auto& b = need(in.observation_poss, "observation possibility");
        if (pointwise(a, b, [tol](double x, double y) { return !(x > tol && y > tol); }))
            unsatisfied(c, "total conflict");
    } else if (c == "dominating-pair") {
        if (!pointwise(need(in.prior_poss, "prior possibility"), need(in.observation_poss, "observation possibility"),
                       [](double x, double y) { return y >= x; }))
            unsatisfied(c, "observation does not dominate the prior");
    } else if (c == "dominated-pair") {
        if (!pointwise(need(in.prior_poss, "prior possibility"), need(in.observation_poss, "observation possibility"),
                       [](double x, double y) { return y <= x; }))
            unsatisfied(c, "observation exceeds the prior somewhere");
    } else if (c == "overlapping-cores") {
        if (!need(in.prior_poss, "prior possibility").core(0.0).intersects(need(in.observation_poss, "observation possibility").core(0.0)))
            unsatisfied(c, "cores are disjoint");
    } else if (c == "possibility-event" || c == "crisp-with-doubt") {
        if (need(in.prior_poss, "prior possibility").possibility(need(in.given, "event")) <= tol)
            unsatisfied(c, "event is impossible under the prior");
        if (c == "crisp-with-doubt" && !(in.lambda >= 0.0 && in.lambda < 1.0)) unsatisfied(c, "doubt level outside [0,1)");
    } else if (c == "ocf-shift") {
        need(in.ocf, "ocf");
        const auto& a = need(in.given, "event");
        if (a.is_empty() || a.is_full()) unsatisfied(c, "event must be a proper non-empty subset");
        if (in.shift > 20) unsatisfied(c, "shift above 20");
    } else if (c == "ocf-event") {
        need(in.ocf, "ocf");
        if (need(in.given, "event").is_empty()) unsatisfied(c, "event is empty");
    } else {
        throw Error(ErrorCode::UnknownRule, "unknown instance family '" + c + "'");
    }
}

std::vector<std::string> family_names() {
    std::vector<std::string> out;
    for (const auto& f : families()) out.push_back(f.name);
    return out;
}

std::vector<Instance> generate_instances(const InstanceFamily& family, std::uint64_t seed) {
    const auto& entry = find_family(family.constraint);
    if (family.min_frame_size < 1 || family.max_frame_size < family.min_frame_size || family.max_frame_size > 20)
        throw Error(ErrorCode::GeneratorConstraintUnsatisfiable, "frame sizes must satisfy 1 <= min <= max <= 20");
    Sampler s(seed);
    std::vector<Instance> out;
    out.reserve(family.count);
    std::vector<Frame> frames;
    for (std::size_t n = family.min_frame_size; n <= family.max_frame_size; ++n) frames.push_back(make_frame(n));
    for (std::size_t i = 0; i < family.count; ++i) {
        std::string last_reason;
        bool done = false;
        for (std::size_t round = 0; round < kMaxRejectionRounds && !done; ++round) {
            const Frame& fr = frames[s.index(0, frames.size() - 1)];
            try {
                Instance in = entry.propose(s, family, fr);
                verify_constraint(family.constraint, in);
                out.push_back(std::move(in));
                done = true;
            } catch (const Error& e) {
                if (e.code() == ErrorCode::UnknownRule) throw;
                last_reason = e.what();
            }
        }
        if (!done)
            throw Error(ErrorCode::GeneratorConstraintUnsatisfiable,
                        family.constraint + ": gave up after " + std::to_string(kMaxRejectionRounds) +
                            " rejection rounds (" + last_reason + ")");
    }
    return out;
}

std::string describe(const Instance& in) {
    std::ostringstream os;
    os << "frame [";
    for (std::size_t i = 0; i < in.frame.size(); ++i) os << (i ? "," : "") << in.frame.label(i);
    os << "]";
    auto mass = [&](const char* name, const std::optional<MassFunction>& m) {
        if (!m) return;
        os << "; " << name << " {";
        bool first = true;
        for (const auto& f : m->focals()) {
            os << (first ? "" : ", ") << f.set.to_string() << ": " << format_decimal(f.mass);
            first = false;
        }
        os << "}";
    };
    auto dist = [&](const char* name, const std::optional<PossibilityDistribution>& d) {
        if (!d) return;
        os << "; " << name << " [";
        for (std::size_t i = 0; i < d->values().size(); ++i) os << (i ? ", " : "") << format_decimal(d->value(i));
        os << "]";
    };
    mass("prior mass", in.prior_mass);
    mass("observation mass", in.observation_mass);
    if (in.partition) {
        os << "; partition {";
        bool first = true;
        for (const auto& c : in.partition->cells()) {
            os << (first ? "" : ", ") << c.set.to_string() << ": " << format_decimal(c.weight);
            first = false;
        }
        os << "}";
    }
    dist("prior possibility", in.prior_poss);
    dist("observation possibility", in.observation_poss);
    if (in.ocf) {
        os << "; ranks [";
        for (std::size_t i = 0; i < in.ocf->ranks().size(); ++i) os << (i ? ", " : "") << in.ocf->rank(i);
        os << "]";
    }
    if (in.given) os << "; event " << in.given->to_string();
    os << "; lambda " << format_decimal(in.lambda) << "; shift " << in.shift;
    return os.str();
}

// ---- rules ------------------------------------------------------------------

std::string_view output_kind_name(OutputKind kind) {
    switch (kind) {
        case OutputKind::Mass: return "mass";
        case OutputKind::Distribution: return "distribution";
        case OutputKind::EventTable: return "event-table";
        case OutputKind::PairTable: return "pair-table";
        case OutputKind::BoundsTable: return "bounds-table";
    }
    return "?";
}

namespace {

using Params = std::map<std::string, std::string>;
using RuleFn = std::function<std::vector<double>(const Instance&, const Params&, double)>;

struct RuleEntry {
    RuleInfo info;
    std::vector<std::string> params;
    RuleFn fn;
};

std::uint64_t subset_count(const Frame& f) {
    if (f.size() > kDefaultEnumerationCap)
        throw Error(ErrorCode::FrameTooLarge, "dense rule outputs need a frame within the enumeration cap");
    return std::uint64_t{1} << f.size();
}

std::vector<double> dense(const MassFunction& m) {
    std::vector<double> v(subset_count(m.frame()), 0.0);
    for (const auto& f : m.focals()) v[f.set.bits().low_word()] = f.mass;
    return v;
}

std::vector<double> dense(const ProbabilityMeasure& p) { return dense(MassFunction::bayesian(p)); }

const ProbabilityMeasure probability_of(const Instance& in) {
    auto p = need(in.prior_mass, "prior mass").to_probability();
    if (!p) throw Error(ErrorCode::KindMismatch, "rule needs a Bayesian prior mass");
    return *p;
}

/// Values over all subsets, NaN where `defined` is false.
std::vector<double> event_table(const Frame& fr, const std::function<double(const Subset&)>& f) {
    std::vector<double> v;
    for (auto b : enumerate_subsets(fr)) v.push_back(f(b));
    return v;
}

/// Index (given * 2^n + event); the given set ranges over non-empty subsets.
std::vector<double> pair_table(const Frame& fr, std::size_t slots,
                               const std::function<void(const Subset&, const Subset&, double*)>& f) {
    const std::uint64_t n = subset_count(fr);
    std::vector<double> v(n * n * slots, kNaN);
    for (std::uint64_t g = 1; g < n; ++g) {
        const Subset given = fr.from_word(g);
        for (std::uint64_t e = 0; e < n; ++e) f(fr.from_word(e), given, v.data() + (g * n + e) * slots);
    }
    return v;
}

ConditioningRule inner_rule(const Params& p) {
    auto it = p.find("inner");
    if (it == p.end()) return ConditioningRule::Dempster;
    auto r = parse_conditioning_rule(it->second);
    if (r != ConditioningRule::Dempster && r != ConditioningRule::Geometric)
        throw Error(ErrorCode::InvalidArgument, "inner rule must be dempster or geometric");
    return r;
}

ConjunctionOp op_param(const Params& p) {
    auto it = p.find("op");
    return it == p.end() ? ConjunctionOp::Min : parse_conjunction_op(it->second);
}

JeffreyCombination outer_param(const Params& p) {
    auto it = p.find("outer");
    if (it == p.end() || it->second == "min") return JeffreyCombination::Min;
    if (it->second == "product") return JeffreyCombination::Product;
    throw Error(ErrorCode::InvalidArgument, "outer combination must be min or product");
}

const std::vector<RuleEntry>& rules() {
    using K = OutputKind;
    static const std::vector<RuleEntry> table = {
        // evidence, mass-valued
        {{"dempster_combine", K::Mass, "Dempster combination of prior and observation masses"}, {},
         [](const Instance& in, const Params&, double tol) {
             return dense(dempster_combine(need(in.prior_mass, "prior mass"), need(in.observation_mass, "observation mass"), tol));
         }},
        {{"jeffrey_ds_update", K::Mass, "extended Jeffrey update of the prior mass by the observation mass"}, {"inner"},
         [](const Instance& in, const Params& p, double tol) {
             return dense(jeffrey_ds_update(need(in.prior_mass, "prior mass"), need(in.observation_mass, "observation mass"),
                                            inner_rule(p), tol));
         }},
        {{"dempster_condition", K::Mass, "Dempster conditioning of the prior mass on the event"}, {},
         [](const Instance& in, const Params&, double tol) {
             return dense(dempster_condition(need(in.prior_mass, "prior mass"), need(in.given, "event"), tol));
         }},
        {{"geometric_condition", K::Mass, "geometric conditioning of the prior mass on the event"}, {},
         [](const Instance& in, const Params&, double tol) {
             return dense(geometric_condition(need(in.prior_mass, "prior mass"), need(in.given, "event"), tol));
         }},
        {{"bayes_condition", K::Mass, "Bayes conditioning of the (Bayesian) prior on the event"}, {},
         [](const Instance& in, const Params&, double tol) {
             return dense(bayes_condition(probability_of(in), need(in.given, "event"), tol));
         }},
        {{"jeffrey_update", K::Mass, "Jeffrey's rule on the (Bayesian) prior and the partition"}, {},
         [](const Instance& in, const Params&, double tol) {
             return dense(jeffrey_update(probability_of(in), need(in.partition, "partition"), tol));
         }},
        {{"partition_substitution", K::Mass, "the partition weights placed on their cells"}, {},
         [](const Instance& in, const Params&, double) { return dense(partition_mass(need(in.partition, "partition"))); }},
        // evidence, event tables
        {{"jeffrey_ds_plausibility", K::EventTable, "Pl of the extended Jeffrey posterior"}, {},
         [](const Instance& in, const Params&, double tol) {
             auto m = jeffrey_ds_update(need(in.prior_mass, "prior mass"), need(in.observation_mass, "observation mass"),
                                        ConditioningRule::Dempster, tol);
             return event_table(in.frame, [&](const Subset& b) { return m.plausibility(b); });
         }},
        {{"expected_conditional_plausibility", K::EventTable, "sum_A m2(A) Pl1(B & A) / Pl1(A)"}, {},
         [](const Instance& in, const Params&, double) {
             const auto& m1 = need(in.prior_mass, "prior mass");
             const auto& m2 = need(in.observation_mass, "observation mass");
             return event_table(in.frame, [&](const Subset& b) {
                 double s = 0.0;
                 for (const auto& a : m2.focals()) s += a.mass * m1.plausibility(b.intersect(a.set)) / m1.plausibility(a.set);
                 return s;
             });
         }},
        {{"jeffrey_ds_belief", K::EventTable, "Bel of the extended Jeffrey posterior"}, {},
         [](const Instance& in, const Params&, double tol) {
             auto m = jeffrey_ds_update(need(in.prior_mass, "prior mass"), need(in.observation_mass, "observation mass"),
                                        ConditioningRule::Dempster, tol);
             return event_table(in.frame, [&](const Subset& b) { return m.belief(b); });
         }},
        {{"expected_conditional_belief", K::EventTable, "sum_A m2(A) Bel1(B|A), Bel1(B|A) from Bel1 alone"}, {},
         [](const Instance& in, const Params&, double tol) {
             const auto& m1 = need(in.prior_mass, "prior mass");
             const auto& m2 = need(in.observation_mass, "observation mass");
             return event_table(in.frame, [&](const Subset& b) {
                 double s = 0.0;
                 for (const auto& a : m2.focals()) s += a.mass * bel_conditional(m1, b, a.set, tol);
                 return s;
             });
         }},
        // evidence, pair tables
        {{"upper_lower", K::BoundsTable, "closed-form upper/lower conditional probabilities"}, {},
         [](const Instance& in, const Params&, double tol) {
             const auto& m = need(in.prior_mass, "prior mass");
             return pair_table(in.frame, 2, [&](const Subset& e, const Subset& g, double* out) {
                 ConditionalBounds cb(m, g, tol);
                 if (!cb.defined_at(e)) return;
                 auto iv = cb.at(e);
                 out[0] = iv.upper;
                 out[1] = iv.lower;
             });
         }},
        {{"credal_oracle", K::BoundsTable, "sup/inf of P(event|given) over all selection functions"}, {},
         [](const Instance& in, const Params&, double) {
             CredalOracle oracle(need(in.prior_mass, "prior mass"));
             return pair_table(in.frame, 2, [&](const Subset& e, const Subset& g, double* out) {
                 try {
                     auto r = oracle.conditional_range(e, g);
                     out[0] = r.sup;
                     out[1] = r.inf;
                 } catch (const Error& err) {
                     if (err.code() != ErrorCode::NoFeasibleSelection) throw;
                 }
             });
         }},
        {{"pl_intersection", K::PairTable, "Pl(A & B) wherever Pl(B) > tol"}, {},
         [](const Instance& in, const Params&, double tol) {
             const auto& m = need(in.prior_mass, "prior mass");
             return pair_table(in.frame, 1, [&](const Subset& e, const Subset& g, double* out) {
                 if (m.plausibility(g) > tol) out[0] = m.plausibility(e.intersect(g));
             });
         }},
        {{"pl_conditional_product", K::PairTable, "Pl(A|B) Pl(B) under Dempster conditioning"}, {},
         [](const Instance& in, const Params&, double tol) {
             const auto& m = need(in.prior_mass, "prior mass");
             return pair_table(in.frame, 1, [&](const Subset& e, const Subset& g, double* out) {
                 const double pl = m.plausibility(g);
                 if (pl > tol) out[0] = dempster_condition(m, g, tol).plausibility(e) * pl;
             });
         }},
        {{"bel_intersection", K::PairTable, "Bel(A & B) wherever Bel(B) > tol"}, {},
         [](const Instance& in, const Params&, double tol) {
             const auto& m = need(in.prior_mass, "prior mass");
             return pair_table(in.frame, 1, [&](const Subset& e, const Subset& g, double* out) {
                 if (m.belief(g) > tol) out[0] = m.belief(e.intersect(g));
             });
         }},
        {{"bel_geometric_product", K::PairTable, "Bel_g(A|B) Bel(B) under geometric conditioning"}, {},
         [](const Instance& in, const Params&, double tol) {
             const auto& m = need(in.prior_mass, "prior mass");
             return pair_table(in.frame, 1, [&](const Subset& e, const Subset& g, double* out) {
                 const double bel = m.belief(g);
                 if (bel > tol) out[0] = geometric_condition(m, g, tol).belief(e) * bel;
             });
         }},
        // possibility
        {{"poss_jeffrey_update", K::Distribution, "possibilistic update, compact form"}, {"outer"},
         [](const Instance& in, const Params& p, double tol) {
             return poss_jeffrey_update(need(in.prior_poss, "prior possibility"),
                                        need(in.observation_poss, "observation possibility"), outer_param(p), tol)
                 .posterior.values();
         }},
        {{"poss_jeffrey_sup_form", K::Distribution, "possibilistic update, sup over level cuts"}, {},
         [](const Instance& in, const Params&, double) {
             return poss_jeffrey_sup_form(need(in.prior_poss, "prior possibility"),
                                          need(in.observation_poss, "observation possibility"));
         }},
        {{"poss_necessity_inf_form", K::EventTable, "[N1|Pi2](A) as inf over level cuts"}, {},
         [](const Instance& in, const Params&, double) {
             const auto& d1 = need(in.prior_poss, "prior possibility");
             const auto& d2 = need(in.observation_poss, "observation possibility");
             return event_table(in.frame, [&](const Subset& a) { return updated_necessity(d1, d2, a); });
         }},
        {{"poss_necessity_dual", K::EventTable, "1 - [Pi1|Pi2](not A) from the compact posterior"}, {},
         [](const Instance& in, const Params&, double tol) {
             auto post = poss_jeffrey_update(need(in.prior_poss, "prior possibility"),
                                             need(in.observation_poss, "observation possibility"), JeffreyCombination::Min, tol)
                             .posterior;
             return event_table(in.frame, [&](const Subset& a) { return 1.0 - post.possibility(a.complement()); });
         }},
        {{"prior_possibility", K::Distribution, "the prior distribution itself"}, {},
         [](const Instance& in, const Params&, double) { return need(in.prior_poss, "prior possibility").values(); }},
        {{"observation_possibility", K::Distribution, "the observation distribution itself"}, {},
         [](const Instance& in, const Params&, double) { return need(in.observation_poss, "observation possibility").values(); }},
        {{"pointwise_min", K::Distribution, "min(pi1, pi2)"}, {},
         [](const Instance& in, const Params&, double) {
             const auto& a = need(in.prior_poss, "prior possibility").values();
             const auto& b = need(in.observation_poss, "observation possibility").values();
             std::vector<double> v(a.size());
             for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::min(a[i], b[i]);
             return v;
         }},
        {{"spohn_singleton_update", K::Distribution, "Spohn's rule with the observation as a singleton partition"}, {},
         [](const Instance& in, const Params&, double tol) {
             return spohn_partition_update(need(in.prior_poss, "prior possibility"),
                                           SpohnObservation::singletons(need(in.observation_poss, "observation possibility")), tol)
                 .values();
         }},
        {{"poss_condition", K::Distribution, "possibilistic conditioning on the event"}, {},
         [](const Instance& in, const Params&, double tol) {
             return poss_condition(need(in.prior_poss, "prior possibility"), need(in.given, "event"), tol).values();
         }},
        {{"poss_combine_crisp", K::Distribution, "symmetric combination with the event's indicator"}, {"op"},
         [](const Instance& in, const Params& p, double tol) {
             return poss_combine(need(in.prior_poss, "prior possibility"),
                                 PossibilityDistribution::crisp(need(in.given, "event")), op_param(p), tol)
                 .values();
         }},
        {{"crisp_with_doubt", K::Distribution, "closed-form update on (event, lambda)"}, {},
         [](const Instance& in, const Params&, double tol) {
             return poss_update_crisp_with_doubt(need(in.prior_poss, "prior possibility"), need(in.given, "event"),
                                                 in.lambda, tol)
                 .values();
         }},
        {{"poss_jeffrey_doubtful", K::Distribution, "compact update on pi2 = max(1[event], lambda)"}, {},
         [](const Instance& in, const Params&, double tol) {
             return poss_jeffrey_update(need(in.prior_poss, "prior possibility"),
                                        doubtful_observation(need(in.given, "event"), in.lambda), JeffreyCombination::Min, tol)
                 .posterior.values();
         }},
        // ocf
        {{"ocf_conditionalize_translated", K::Distribution, "exp(-rank) of the (A,n)-conditionalization"}, {},
         [](const Instance& in, const Params&, double) {
             return ocf_to_possibility(ocf_conditionalize(need(in.ocf, "ocf"), need(in.given, "event"), in.shift)).values();
         }},
        {{"spohn_shift_update", K::Distribution, "Spohn's partition rule with cells (A,1), (not A, exp(-n))"}, {},
         [](const Instance& in, const Params&, double tol) {
             return spohn_partition_update(ocf_to_possibility(need(in.ocf, "ocf")),
                                           SpohnObservation::shift(need(in.given, "event"), in.shift), tol)
                 .values();
         }},
        {{"ocf_a_part_translated", K::Distribution, "exp(-rank) of the A-part, 0 off A"}, {},
         [](const Instance& in, const Params&, double) {
             return ocf_to_possibility(ocf_a_part(need(in.ocf, "ocf"), need(in.given, "event"))).values();
         }},
        {{"poss_condition_of_translation", K::Distribution, "possibilistic conditioning of exp(-rank) on A"}, {},
         [](const Instance& in, const Params&, double tol) {
             return poss_condition(ocf_to_possibility(need(in.ocf, "ocf")), need(in.given, "event"), tol).values();
         }},
    };
    return table;
}

const RuleEntry& find_rule(const std::string& name) {
    for (const auto& r : rules())
        if (r.info.name == name) return r;
    throw Error(ErrorCode::UnknownRule, "unknown rule '" + name + "'");
}

double deviation(double a, double b, DeviationMetric metric) {
    const double d = std::abs(a - b);
    if (metric == DeviationMetric::Absolute || d == 0.0) return d;
    return d / std::max(std::abs(a), std::abs(b));
}

std::string rule_label(const RuleRef& r) {
    std::string s = r.name;
    for (const auto& [k, v] : r.params) s += " " + k + "=" + v;
    return s;
}

}  // namespace

const std::vector<RuleInfo>& rule_catalog() {
    static const std::vector<RuleInfo> catalog = [] {
        std::vector<RuleInfo> out;
        for (const auto& r : rules()) out.push_back(r.info);
        return out;
    }();
    return catalog;
}

RuleOutput evaluate_rule(const RuleRef& rule, const Instance& instance, double tol) {
    const auto& entry = find_rule(rule.name);
    for (const auto& [k, v] : rule.params)
        if (std::find(entry.params.begin(), entry.params.end(), k) == entry.params.end())
            throw Error(ErrorCode::InvalidArgument, "rule '" + rule.name + "' has no parameter '" + k + "'");
    return {entry.info.kind, entry.fn(instance, rule.params, tol)};
}

ComparisonReport run_coincidence(const CoincidenceSpec& spec, unsigned threads) {
    const auto& a = find_rule(spec.rule_a.name);
    const auto& b = find_rule(spec.rule_b.name);
    if (a.info.kind != b.info.kind)
        throw Error(ErrorCode::KindMismatch, "rules '" + a.info.name + "' (" + std::string(output_kind_name(a.info.kind)) +
                                                 ") and '" + b.info.name + "' (" +
                                                 std::string(output_kind_name(b.info.kind)) + ") are not comparable");

    const auto instances = generate_instances(spec.family, spec.seed);

    ComparisonReport report;
    report.spec_name = spec.name;
    report.claim = spec.claim;
    report.rule_a = rule_label(spec.rule_a);
    report.rule_b = rule_label(spec.rule_b);
    report.family = spec.family.constraint;
    report.seed = spec.seed;
    report.tolerance = spec.tolerance;
    report.metric = spec.metric;
    report.instances = instances.size();
    report.deviations.assign(instances.size(), 0.0);

    std::vector<std::size_t> compared(instances.size(), 0);
    std::vector<std::string> errors(instances.size());

    auto work = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t i = begin; i < instances.size(); i += stride) {
            try {
                const auto out_a = evaluate_rule(spec.rule_a, instances[i]);
                const auto out_b = evaluate_rule(spec.rule_b, instances[i]);
                if (out_a.values.size() != out_b.values.size()) {
                    report.deviations[i] = std::numeric_limits<double>::infinity();
                    errors[i] = "output sizes differ";
                    continue;
                }
                double worst = 0.0;
                for (std::size_t k = 0; k < out_a.values.size(); ++k) {
                    const double x = out_a.values[k];
                    const double y = out_b.values[k];
                    if (std::isnan(x)) continue;
                    ++compared[i];
                    if (std::isnan(y)) {
                        worst = std::numeric_limits<double>::infinity();
                        errors[i] = "value " + std::to_string(k) + " is defined only by " + spec.rule_a.name;
                        continue;
                    }
                    worst = std::max(worst, deviation(x, y, spec.metric));
                }
                report.deviations[i] = worst;
            } catch (const Error& e) {
                report.deviations[i] = std::numeric_limits<double>::infinity();
                errors[i] = std::string(e.name()) + ": " + e.what();
            }
        }
    };

    unsigned n_threads = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, std::max<std::size_t>(1, instances.size())));
    if (n_threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(work, t, n_threads);
    }

    for (std::size_t i = 0; i < instances.size(); ++i) {
        report.compared_values += compared[i];
        report.max_deviation = std::max(report.max_deviation, report.deviations[i]);
        const bool failed = !(report.deviations[i] < spec.tolerance || report.deviations[i] == 0.0);
        if (failed && !report.witness_index) {
            report.witness_index = i;
            report.witness = describe(instances[i]);
            report.failure_message = errors[i].empty() ? "deviation " + format_decimal(report.deviations[i]) : errors[i];
        }
    }
    report.passed = !report.witness_index;
    return report;
}

const std::vector<CoincidenceSpec>& builtin_suite() {
    using M = DeviationMetric;
    auto fam = [](std::string c, std::size_t lo = 3, std::size_t hi = 5, std::size_t count = 200) {
        return InstanceFamily{std::move(c), lo, hi, 6, count};
    };
    static const std::vector<CoincidenceSpec> suite = {
        {"combination-categorical", "Dempster combination with categorical evidence equals Dempster conditioning",
         {"dempster_combine", {}}, {"dempster_condition", {}}, fam("categorical-observation"), 11, 1e-9, M::Absolute},
        {"extended-jeffrey-categorical", "the extended Jeffrey rule on a categorical observation is Dempster conditioning",
         {"jeffrey_ds_update", {}}, {"dempster_condition", {}}, fam("categorical-observation"), 12, 1e-9, M::Absolute},
        {"extended-jeffrey-bayesian", "Bayesian prior and partition observation reduce the extended rule to Jeffrey's rule",
         {"jeffrey_ds_update", {}}, {"jeffrey_update", {}}, fam("bayesian-prior-partition"), 13, 1e-9, M::Absolute},
        {"geometric-jeffrey-bayesian", "the geometric Jeffrey-like rule also reduces to Jeffrey's rule on Bayesian priors",
         {"jeffrey_ds_update", {{"inner", "geometric"}}}, {"jeffrey_update", {}}, fam("bayesian-prior-partition"), 14, 1e-9,
         M::Absolute},
        {"combination-no-conflict", "without conflict Dempster combination and the extended Jeffrey rule coincide",
         {"dempster_combine", {}}, {"jeffrey_ds_update", {}}, fam("no-conflict-pair"), 15, 1e-9, M::Absolute},
        {"jeffrey-singleton-substitution", "Jeffrey's rule on a singleton partition substitutes the observation",
         {"jeffrey_update", {}}, {"partition_substitution", {}}, fam("singleton-partition"), 16, 1e-9, M::Absolute},
        {"jeffrey-certain-cell", "Jeffrey's rule with a certain cell is Bayes conditioning",
         {"jeffrey_update", {}}, {"bayes_condition", {}}, fam("bayesian-prior-certain-cell"), 17, 1e-9, M::Absolute},
        {"dempster-conditioning-bayesian", "Dempster conditioning of a Bayesian mass is Bayes conditioning",
         {"dempster_condition", {}}, {"bayes_condition", {}}, fam("bayesian-prior-event"), 18, 1e-9, M::Absolute},
        {"geometric-conditioning-bayesian", "geometric conditioning of a Bayesian mass is Bayes conditioning",
         {"geometric_condition", {}}, {"bayes_condition", {}}, fam("bayesian-prior-event"), 19, 1e-9, M::Absolute},
        {"convex-combination-plausibility", "Pl of the extended Jeffrey posterior is the expected conditional plausibility",
         {"jeffrey_ds_plausibility", {}}, {"expected_conditional_plausibility", {}}, fam("jeffrey-applicable-pair"), 20,
         1e-9, M::Absolute},
        {"convex-combination-belief", "Bel of the extended Jeffrey posterior is the expected conditional belief",
         {"jeffrey_ds_belief", {}}, {"expected_conditional_belief", {}}, fam("jeffrey-applicable-pair"), 21, 1e-9,
         M::Absolute},
        {"upper-lower-credal", "closed-form upper/lower conditionals equal the credal-set envelopes",
         {"upper_lower", {}}, {"credal_oracle", {}}, fam("random-mass"), 22, 1e-9, M::Absolute},
        {"cox-plausibility", "Pl(A & B) = Pl(A|B) Pl(B) under Dempster conditioning",
         {"pl_intersection", {}}, {"pl_conditional_product", {}}, fam("random-mass"), 23, 1e-9, M::Absolute},
        {"cox-belief", "Bel(A & B) = Bel_g(A|B) Bel(B) under geometric conditioning",
         {"bel_intersection", {}}, {"bel_geometric_product", {}}, fam("random-mass"), 24, 1e-9, M::Absolute},
        {"possibilistic-compact-sup", "the compact possibilistic update equals its sup-over-level-cuts form",
         {"poss_jeffrey_update", {}}, {"poss_jeffrey_sup_form", {}}, fam("possibility-pair", 1, 8, 500), 25, 1e-12,
         M::Absolute},
        {"possibilistic-necessity-duality", "the inf-form updated necessity is dual to the updated possibility",
         {"poss_necessity_inf_form", {}}, {"poss_necessity_dual", {}}, fam("possibility-pair", 1, 8, 200), 26, 1e-12,
         M::Absolute},
        {"possibilistic-dominating-keeps-prior", "an observation weaker than the prior leaves it unchanged",
         {"poss_jeffrey_update", {}}, {"prior_possibility", {}}, fam("dominating-pair", 1, 8, 500), 27, 1e-12,
         M::Absolute},
        {"possibilistic-overlapping-cores-min", "with overlapping cores the update is the pointwise minimum",
         {"poss_jeffrey_update", {}}, {"pointwise_min", {}}, fam("overlapping-cores", 1, 8, 500), 28, 1e-12, M::Absolute},
        {"possibilistic-dominated-adopts-observation", "a sharper consistent observation is adopted by the possibilistic rule",
         {"poss_jeffrey_update", {}}, {"observation_possibility", {}}, fam("dominated-pair", 1, 8, 500), 29, 1e-12,
         M::Absolute},
        {"spohn-dominated-adopts-observation", "a sharper consistent observation is adopted by Spohn's rule",
         {"spohn_singleton_update", {}}, {"observation_possibility", {}}, fam("dominated-pair", 1, 8, 500), 30, 1e-12,
         M::Absolute},
        {"possibilistic-combination-crisp", "min-combination with a crisp event is possibilistic conditioning",
         {"poss_combine_crisp", {}}, {"poss_condition", {}}, fam("possibility-event", 1, 8), 31, 1e-12, M::Absolute},
        {"crisp-with-doubt-closed-form", "the closed form for a doubtful crisp observation equals the general update",
         {"crisp_with_doubt", {}}, {"poss_jeffrey_doubtful", {}}, fam("crisp-with-doubt", 1, 8), 32, 1e-12, M::Absolute},
        {"ocf-shift-two-path", "the (A,n)-conditionalization translates to Spohn's rule with weights 1 and exp(-n)",
         {"ocf_conditionalize_translated", {}}, {"spohn_shift_update", {}}, fam("ocf-shift", 2, 6), 33, 1e-9, M::Relative},
        {"ocf-a-part-conditioning", "the A-part translates to possibilistic conditioning on A",
         {"ocf_a_part_translated", {}}, {"poss_condition_of_translation", {}}, fam("ocf-event", 1, 6), 34, 1e-12,
         M::Absolute},
    };
    return suite;
}

const CoincidenceSpec& builtin_spec(const std::string& name) {
    for (const auto& s : builtin_suite())
        if (s.name == name) return s;
    throw Error(ErrorCode::UnknownRule, "no built-in coincidence suite named '" + name + "'");
}

}  // namespace beliefkit

#include "beliefkit/possibility.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace beliefkit {

namespace {

void check_range(const Frame& frame, const std::vector<double>& values, double tol) {
    if (values.size() != frame.size())
        throw Error(ErrorCode::ValidationError, "possibility: one value per frame element is required");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0 || values[i] > 1.0 + tol)
            throw Error(ErrorCode::ValidationError,
                        "possibility range: value of '" + frame.label(i) + "' is " + format_decimal(values[i]));
    }
}

double max_over(const std::vector<double>& values, const Subset& set) {
    double m = 0.0;
    for (auto i : set.indices()) m = std::max(m, values[i]);
    return m;
}

}  // namespace

PossibilityDistribution::PossibilityDistribution(Frame frame, std::vector<double> values, double tol)
    : frame_(std::move(frame)), values_(std::move(values)) {
    check_range(frame_, values_, tol);
    const double h = height();
    if (h < 1.0 && beyond_tolerance(1.0 - h, tol))
        throw Error(ErrorCode::ValidationError, "possibility normalization: largest value is " + format_decimal(h));
}

PossibilityDistribution::PossibilityDistribution(Unchecked, Frame frame, std::vector<double> values)
    : frame_(std::move(frame)), values_(std::move(values)) {}

PossibilityDistribution PossibilityDistribution::subnormal(Frame frame, std::vector<double> values) {
    check_range(frame, values, kDefaultTolerance);
    PossibilityDistribution d(Unchecked{}, std::move(frame), std::move(values));
    if (d.height() <= 0.0) throw Error(ErrorCode::ValidationError, "possibility: every value is zero");
    return d;
}

PossibilityDistribution PossibilityDistribution::vacuous(Frame frame) {
    const std::size_t n = frame.size();
    return PossibilityDistribution(std::move(frame), std::vector<double>(n, 1.0));
}

PossibilityDistribution PossibilityDistribution::crisp(const Subset& set) {
    std::vector<double> v(set.frame().size(), 0.0);
    for (auto i : set.indices()) v[i] = 1.0;
    return PossibilityDistribution(set.frame(), std::move(v));
}

double PossibilityDistribution::height() const { return *std::max_element(values_.begin(), values_.end()); }

bool PossibilityDistribution::is_normalized(double tol) const { return height() >= 1.0 - tol; }

double PossibilityDistribution::possibility(const Subset& event) const {
    require_same_frame(frame_, event.frame(), "possibility");
    return max_over(values_, event);
}

double PossibilityDistribution::necessity(const Subset& event) const { return 1.0 - possibility(event.complement()); }

Subset PossibilityDistribution::core(double tol) const {
    Subset s = frame_.empty_set();
    Bits bits = s.bits();
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] >= 1.0 - tol) bits.set(i);
    return frame_.from_bits(std::move(bits));
}

Subset PossibilityDistribution::support() const {
    Bits bits = frame_.empty_set().bits();
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] > 0.0) bits.set(i);
    return frame_.from_bits(std::move(bits));
}

Subset PossibilityDistribution::level_cut(double alpha) const {
    Bits bits = frame_.empty_set().bits();
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] >= alpha) bits.set(i);
    return frame_.from_bits(std::move(bits));
}

std::vector<double> PossibilityDistribution::levels() const {
    std::vector<double> out;
    for (double v : values_)
        if (v > 0.0) out.push_back(v);
    std::sort(out.begin(), out.end(), std::greater<>());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool PossibilityDistribution::operator==(const PossibilityDistribution& rhs) const {
    return frame_.same_as(rhs.frame_) && values_ == rhs.values_;
}

double possibility_of(const PossibilityDistribution& d, const Subset& event) { return d.possibility(event); }
double necessity_of(const PossibilityDistribution& d, const Subset& event) { return d.necessity(event); }

std::vector<LevelCut> level_cuts(const PossibilityDistribution& d) {
    std::vector<LevelCut> cuts;
    for (double a : d.levels()) cuts.push_back({a, d.level_cut(a)});
    return cuts;
}

// ---- conjunctions -----------------------------------------------------------

std::string_view op_name(ConjunctionOp op) {
    switch (op) {
        case ConjunctionOp::Min: return "min";
        case ConjunctionOp::Product: return "product";
        case ConjunctionOp::Lukasiewicz: return "lukasiewicz";
    }
    return "?";
}

ConjunctionOp parse_conjunction_op(std::string_view name) {
    for (auto op : {ConjunctionOp::Min, ConjunctionOp::Product, ConjunctionOp::Lukasiewicz})
        if (op_name(op) == name) return op;
    throw Error(ErrorCode::UnknownRule, "unknown conjunction operation '" + std::string(name) + "'");
}

double conjoin(ConjunctionOp op, double a, double b) {
    switch (op) {
        case ConjunctionOp::Min: return std::min(a, b);
        case ConjunctionOp::Product: return a * b;
        case ConjunctionOp::Lukasiewicz: return std::max(0.0, a + b - 1.0);
    }
    return 0.0;
}

// ---- rules ------------------------------------------------------------------

PossibilityDistribution poss_condition(const PossibilityDistribution& d, const Subset& given, double tol) {
    const double pb = d.possibility(given);
    if (pb <= tol)
        throw Error(ErrorCode::ConditioningUndefined,
                    "possibilistic conditioning on " + given.to_string() + ": Pi = " + format_decimal(pb));
    std::vector<double> v(d.values().size(), 0.0);
    for (auto i : given.indices()) v[i] = d.value(i) / pb;
    return PossibilityDistribution(d.frame(), std::move(v), tol);
}

PossibilityDistribution poss_combine(const PossibilityDistribution& d1, const PossibilityDistribution& d2,
                                     ConjunctionOp op, double tol) {
    require_same_frame(d1.frame(), d2.frame(), "poss_combine");
    std::vector<double> v(d1.values().size());
    double h = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = conjoin(op, d1.value(i), d2.value(i));
        h = std::max(h, v[i]);
    }
    if (h <= tol) throw Error(ErrorCode::TotalConflict, "possibilistic combination: height " + format_decimal(h));
    for (auto& x : v) x /= h;
    return PossibilityDistribution(d1.frame(), std::move(v), tol);
}

PossibilityDistribution weighted_max_aggregate(const std::vector<WeightedSource>& sources, ConjunctionOp op,
                                               double tol) {
    if (sources.empty()) throw Error(ErrorCode::InvalidArgument, "weighted max: no sources");
    double top = 0.0;
    for (const auto& s : sources) {
        require_same_frame(sources.front().dist.frame(), s.dist.frame(), "weighted max");
        if (!(s.weight >= 0.0 && s.weight <= 1.0 + tol))
            throw Error(ErrorCode::WeightNormalization, "source weight " + format_decimal(s.weight) + " outside [0,1]");
        top = std::max(top, s.weight);
    }
    if (beyond_tolerance(top - 1.0, tol))
        throw Error(ErrorCode::WeightNormalization, "largest source weight is " + format_decimal(top) + ", expected 1");
    std::vector<double> v(sources.front().dist.values().size(), 0.0);
    for (const auto& s : sources)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(v[i], conjoin(op, s.weight, s.dist.value(i)));
    return PossibilityDistribution(sources.front().dist.frame(), std::move(v), tol);
}

PossibilisticUpdate poss_jeffrey_update(const PossibilityDistribution& d1, const PossibilityDistribution& d2,
                                        JeffreyCombination outer, double tol) {
    require_same_frame(d1.frame(), d2.frame(), "poss_jeffrey_update");
    const auto& p1 = d1.values();
    const auto& p2 = d2.values();
    const std::size_t n = p1.size();

    bool compatible = false;
    bool core_meets_support = false;
    for (std::size_t i = 0; i < n; ++i) {
        compatible = compatible || (p1[i] > tol && p2[i] > tol);
        core_meets_support = core_meets_support || (p2[i] >= 1.0 - tol && p1[i] > tol);
    }
    if (!compatible)
        throw Error(ErrorCode::TotalConflict, "possibilistic update: no element is possible under both distributions");

    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (p2[i] <= 0.0) continue;
        double cut_height = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (p2[j] >= p2[i]) cut_height = std::max(cut_height, p1[j]);
        if (cut_height <= 0.0) continue;
        const double relative = p1[i] / cut_height;
        v[i] = outer == JeffreyCombination::Min ? std::min(p2[i], relative) : p2[i] * relative;
    }

    if (core_meets_support) return {PossibilityDistribution(d1.frame(), std::move(v), tol), {}};
    return {PossibilityDistribution::subnormal(d1.frame(), std::move(v)),
            {{"UnnormalizedResult",
              "the core of the observation misses the support of the prior; the posterior is subnormal"}}};
}

std::vector<double> poss_jeffrey_sup_form(const PossibilityDistribution& d1, const PossibilityDistribution& d2) {
    require_same_frame(d1.frame(), d2.frame(), "poss_jeffrey_sup_form");
    std::vector<double> v(d1.values().size(), 0.0);
    for (const auto& cut : level_cuts(d2)) {
        const double h = d1.possibility(cut.set);
        if (h <= 0.0) continue;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double member = cut.set.contains(i) ? 1.0 : 0.0;
            v[i] = std::max(v[i], std::min({cut.alpha, d1.value(i) / h, member}));
        }
    }
    return v;
}

double updated_possibility(const PossibilityDistribution& d1, const PossibilityDistribution& d2, const Subset& event) {
    require_same_frame(d1.frame(), d2.frame(), "updated_possibility");
    double best = 0.0;
    for (const auto& cut : level_cuts(d2)) {
        const double h = d1.possibility(cut.set);
        if (h <= 0.0) continue;
        best = std::max(best, std::min(cut.alpha, d1.possibility(event.intersect(cut.set)) / h));
    }
    return best;
}

double updated_necessity(const PossibilityDistribution& d1, const PossibilityDistribution& d2, const Subset& event) {
    require_same_frame(d1.frame(), d2.frame(), "updated_necessity");
    const Subset outside = event.complement();
    double worst = 1.0;
    for (const auto& cut : level_cuts(d2)) {
        const double h = d1.possibility(cut.set);
        const double conditional_necessity = h <= 0.0 ? 1.0 : 1.0 - d1.possibility(outside.intersect(cut.set)) / h;
        worst = std::min(worst, std::max(1.0 - cut.alpha, conditional_necessity));
    }
    return worst;
}

PossibilityDistribution doubtful_observation(const Subset& given, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "doubt level " + format_decimal(lambda) + " outside [0,1]");
    std::vector<double> v(given.frame().size(), lambda);
    for (auto i : given.indices()) v[i] = 1.0;
    return PossibilityDistribution(given.frame(), std::move(v));
}

PossibilityDistribution poss_update_crisp_with_doubt(const PossibilityDistribution& d1, const Subset& given,
                                                     double lambda, double tol) {
    require_same_frame(d1.frame(), given.frame(), "poss_update_crisp_with_doubt");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "doubt level " + format_decimal(lambda) + " outside [0,1]");
    const double pb = d1.possibility(given);
    if (pb <= tol)
        throw Error(ErrorCode::ConditioningUndefined,
                    "update on " + given.to_string() + ": prior possibility " + format_decimal(pb));
    // With lambda = 1 the observation is pi2 = 1 everywhere, whose core is the
    // whole frame rather than B.
    if (lambda == 1.0) return d1;
    std::vector<double> v(d1.values().size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double inside = given.contains(i) ? d1.value(i) / pb : 0.0;
        v[i] = std::max(inside, std::min(lambda, d1.value(i)));
    }
    return PossibilityDistribution(d1.frame(), std::move(v), tol);
}

}  // namespace beliefkit

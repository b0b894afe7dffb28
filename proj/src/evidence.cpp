#include "beliefkit/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace beliefkit {

namespace {

using MassMap = std::map<Subset, double>;

/// Renormalizes accumulated masses, pruning anything that ends up below tol.
MassFunction normalized(const Frame& frame, const MassMap& raw, double tol) {
    double total = 0.0;
    for (const auto& [set, mass] : raw) total += mass;
    std::vector<Focal> kept;
    double kept_total = 0.0;
    for (const auto& [set, mass] : raw) {
        if (mass / total < tol) continue;
        kept.push_back({set, mass});
        kept_total += mass;
    }
    for (auto& f : kept) f.mass /= kept_total;
    return MassFunction(frame, std::move(kept), tol);
}

}  // namespace

// ---- MassFunction -----------------------------------------------------------

MassFunction::MassFunction(Frame frame, std::vector<Focal> focals, double tol) : frame_(std::move(frame)) {
    MassMap merged;
    for (auto& f : focals) {
        require_same_frame(frame_, f.set.frame(), "mass function");
        if (!std::isfinite(f.mass) || f.mass < 0.0)
            throw Error(ErrorCode::ValidationError,
                        "mass range: " + f.set.to_string() + " has mass " + format_decimal(f.mass));
        if (f.mass == 0.0) continue;
        if (f.set.is_empty())
            throw Error(ErrorCode::ValidationError, "empty focal: the empty set must carry zero mass");
        merged[f.set] += f.mass;
    }
    double sum = 0.0;
    for (const auto& [set, mass] : merged) {
        if (mass > 1.0 + tol)
            throw Error(ErrorCode::ValidationError, "mass range: " + set.to_string() + " has mass " + format_decimal(mass));
        focals_.push_back({set, mass});
        sum += mass;
    }
    if (beyond_tolerance(sum - 1.0, tol))
        throw Error(ErrorCode::ValidationError, "mass normalization: masses sum to " + format_decimal(sum));
}

MassFunction MassFunction::vacuous(Frame frame) {
    auto full = frame.full_set();
    return MassFunction(std::move(frame), {{full, 1.0}});
}

MassFunction MassFunction::categorical(const Subset& set) { return MassFunction(set.frame(), {{set, 1.0}}); }

MassFunction MassFunction::bayesian(const ProbabilityMeasure& p) {
    std::vector<Focal> focals;
    for (std::size_t i = 0; i < p.frame().size(); ++i) focals.push_back({p.frame().singleton(i), p.weight(i)});
    return MassFunction(p.frame(), std::move(focals));
}

double MassFunction::mass_of(const Subset& set) const {
    require_same_frame(frame_, set.frame(), "mass_of");
    auto it = std::lower_bound(focals_.begin(), focals_.end(), set,
                               [](const Focal& f, const Subset& s) { return f.set < s; });
    return (it != focals_.end() && it->set == set) ? it->mass : 0.0;
}

double MassFunction::belief(const Subset& event) const {
    require_same_frame(frame_, event.frame(), "belief");
    double s = 0.0;
    for (const auto& f : focals_)
        if (f.set.bits().is_subset_of(event.bits())) s += f.mass;
    return std::min(s, 1.0);
}

double MassFunction::plausibility(const Subset& event) const {
    require_same_frame(frame_, event.frame(), "plausibility");
    double s = 0.0;
    for (const auto& f : focals_)
        if (f.set.bits().intersects(event.bits())) s += f.mass;
    return std::min(s, 1.0);
}

bool MassFunction::is_bayesian() const {
    return std::all_of(focals_.begin(), focals_.end(), [](const Focal& f) { return f.set.cardinality() == 1; });
}

std::optional<ProbabilityMeasure> MassFunction::to_probability() const {
    if (!is_bayesian()) return std::nullopt;
    std::vector<double> w(frame_.size(), 0.0);
    for (const auto& f : focals_) w[f.set.indices().front()] = f.mass;
    return ProbabilityMeasure(frame_, std::move(w));
}

double belief(const MassFunction& m, const Subset& event) { return m.belief(event); }
double plausibility(const MassFunction& m, const Subset& event) { return m.plausibility(event); }

// ---- rule names -------------------------------------------------------------

std::string_view rule_name(ConditioningRule rule) {
    switch (rule) {
        case ConditioningRule::Dempster: return "dempster";
        case ConditioningRule::Geometric: return "geometric";
        case ConditioningRule::Upper: return "upper";
        case ConditioningRule::Lower: return "lower";
    }
    return "?";
}

ConditioningRule parse_conditioning_rule(std::string_view name) {
    for (auto r : {ConditioningRule::Dempster, ConditioningRule::Geometric, ConditioningRule::Upper,
                   ConditioningRule::Lower})
        if (rule_name(r) == name) return r;
    throw Error(ErrorCode::UnknownRule, "unknown conditioning rule '" + std::string(name) + "'");
}

// ---- conditioning -----------------------------------------------------------

ConditionalBounds::ConditionalBounds(MassFunction m, Subset given, double tol)
    : m_(std::move(m)), given_(std::move(given)), tol_(tol) {
    require_same_frame(m_.frame(), given_.frame(), "conditional bounds");
}

bool ConditionalBounds::defined_at(const Subset& event) const {
    const Subset in = event.intersect(given_);
    const Subset out = event.complement().intersect(given_);
    return m_.plausibility(in) + m_.belief(out) > tol_ && m_.belief(in) + m_.plausibility(out) > tol_;
}

ProbabilityInterval ConditionalBounds::at(const Subset& event) const {
    const Subset in = event.intersect(given_);
    const Subset out = event.complement().intersect(given_);
    const double pl_in = m_.plausibility(in);
    const double bel_in = m_.belief(in);
    const double pl_out = m_.plausibility(out);
    const double bel_out = m_.belief(out);
    const double upper_den = pl_in + bel_out;
    const double lower_den = bel_in + pl_out;
    if (upper_den <= tol_)
        throw Error(ErrorCode::ConditioningUndefined, "upper conditional of " + event.to_string() + " given " +
                                                          given_.to_string() + ": Pl(A&B) + Bel(A&~B) is null");
    if (lower_den <= tol_)
        throw Error(ErrorCode::ConditioningUndefined, "lower conditional of " + event.to_string() + " given " +
                                                          given_.to_string() + ": Bel(A&B) + Pl(A&~B) is null");
    return {pl_in / upper_den, bel_in / lower_den};
}

MassFunction dempster_condition(const MassFunction& m, const Subset& given, double tol) {
    const double pl = m.plausibility(given);
    if (pl <= tol)
        throw Error(ErrorCode::ConditioningUndefined,
                    "Dempster conditioning on " + given.to_string() + ": Pl = " + format_decimal(pl));
    MassMap raw;
    for (const auto& f : m.focals()) {
        Subset c = f.set.intersect(given);
        if (!c.is_empty()) raw[std::move(c)] += f.mass;
    }
    return normalized(m.frame(), raw, tol);
}

MassFunction geometric_condition(const MassFunction& m, const Subset& given, double tol) {
    const double bel = m.belief(given);
    if (bel <= tol)
        throw Error(ErrorCode::ConditioningUndefined,
                    "geometric conditioning on " + given.to_string() + ": Bel = " + format_decimal(bel));
    MassMap raw;
    for (const auto& f : m.focals())
        if (f.set.is_subset_of(given)) raw[f.set] += f.mass;
    return normalized(m.frame(), raw, tol);
}

ConditionalBounds conditional_bounds(const MassFunction& m, const Subset& given, double tol) {
    return ConditionalBounds(m, given, tol);
}

Conditioned condition(const MassFunction& m, const Subset& given, ConditioningRule rule, double tol) {
    switch (rule) {
        case ConditioningRule::Dempster: return dempster_condition(m, given, tol);
        case ConditioningRule::Geometric: return geometric_condition(m, given, tol);
        case ConditioningRule::Upper:
        case ConditioningRule::Lower: return conditional_bounds(m, given, tol);
    }
    throw Error(ErrorCode::UnknownRule, "unknown conditioning rule");
}

// ---- combination ------------------------------------------------------------

double conflict(const MassFunction& m1, const MassFunction& m2) {
    require_same_frame(m1.frame(), m2.frame(), "conflict");
    double k = 0.0;
    for (const auto& a : m1.focals())
        for (const auto& b : m2.focals())
            if (!a.set.bits().intersects(b.set.bits())) k += a.mass * b.mass;
    return k;
}

MassFunction dempster_combine(const MassFunction& m1, const MassFunction& m2, double tol) {
    require_same_frame(m1.frame(), m2.frame(), "dempster_combine");
    MassMap raw;
    double k = 0.0;
    for (const auto& a : m1.focals()) {
        for (const auto& b : m2.focals()) {
            Subset c = a.set.intersect(b.set);
            if (c.is_empty())
                k += a.mass * b.mass;
            else
                raw[std::move(c)] += a.mass * b.mass;
        }
    }
    if (k >= 1.0 - tol || raw.empty())
        throw Error(ErrorCode::TotalConflict, "Dempster combination: conflict mass K = " + format_decimal(k));
    for (auto& [set, mass] : raw) mass /= (1.0 - k);
    return normalized(m1.frame(), raw, tol);
}

MassFunction jeffrey_ds_update(const MassFunction& m1, const MassFunction& m2, ConditioningRule inner, double tol) {
    require_same_frame(m1.frame(), m2.frame(), "jeffrey_ds_update");
    if (inner != ConditioningRule::Dempster && inner != ConditioningRule::Geometric)
        throw Error(ErrorCode::InvalidArgument, "extended Jeffrey rule needs a mass-valued inner conditioning rule");
    MassMap raw;
    for (const auto& obs : m2.focals()) {
        if (inner == ConditioningRule::Dempster) {
            const double pl = m1.plausibility(obs.set);
            if (pl <= tol)
                throw Error(ErrorCode::ConditioningUndefined, "observation focal " + obs.set.to_string() +
                                                                  " has prior plausibility " + format_decimal(pl));
            for (const auto& f : m1.focals()) {
                Subset c = f.set.intersect(obs.set);
                if (!c.is_empty()) raw[std::move(c)] += obs.mass * f.mass / pl;
            }
        } else {
            const double bel = m1.belief(obs.set);
            if (bel <= tol)
                throw Error(ErrorCode::ConditioningUndefined, "observation focal " + obs.set.to_string() +
                                                                  " has prior belief " + format_decimal(bel));
            for (const auto& f : m1.focals())
                if (f.set.is_subset_of(obs.set)) raw[f.set] += obs.mass * f.mass / bel;
        }
    }
    return normalized(m1.frame(), raw, tol);
}

double bel_conditional(const MassFunction& m, const Subset& event, const Subset& given, double tol) {
    const Subset not_given = given.complement();
    const double bel_out = m.belief(not_given);
    if (bel_out >= 1.0 - tol)
        throw Error(ErrorCode::ConditioningUndefined,
                    "Bel(~" + given.to_string() + ") = " + format_decimal(bel_out) + " leaves nothing to condition on");
    return (m.belief(event.unite(not_given)) - bel_out) / (1.0 - bel_out);
}

}  // namespace beliefkit

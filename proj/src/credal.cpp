#include "beliefkit/credal.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

namespace beliefkit {

CredalOracle::CredalOracle(const MassFunction& m, std::size_t frame_cap, std::uint64_t selection_cap)
    : frame_(m.frame()) {
    const std::size_t n = frame_.size();
    if (n > frame_cap || n >= 64)
        throw Error(ErrorCode::FrameTooLarge, "credal oracle: frame of " + std::to_string(n) +
                                                  " elements exceeds the enumeration cap");

    std::vector<std::vector<std::size_t>> members;
    std::vector<double> masses;
    std::uint64_t selections = 1;
    for (const auto& f : m.focals()) {
        members.push_back(f.set.indices());
        masses.push_back(f.mass);
        selections *= members.back().size();
        if (selections > selection_cap)
            throw Error(ErrorCode::FrameTooLarge, "credal oracle: more than " + std::to_string(selection_cap) +
                                                      " selection functions");
    }

    // Odometer over one member choice per focal element.
    std::vector<std::size_t> choice(members.size(), 0);
    for (std::uint64_t s = 0; s < selections; ++s) {
        std::vector<double> p(n, 0.0);
        for (std::size_t k = 0; k < members.size(); ++k) p[members[k][choice[k]]] += masses[k];
        points_.push_back(std::move(p));
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (++choice[k] < members[k].size()) break;
            choice[k] = 0;
        }
    }
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());

    const std::uint64_t subsets = std::uint64_t{1} << n;
    if (subsets * points_.size() <= (std::uint64_t{1} << 24)) {
        table_stride_ = static_cast<std::size_t>(subsets);
        table_.assign(points_.size() * table_stride_, 0.0);
        for (std::size_t pt = 0; pt < points_.size(); ++pt) {
            double* row = table_.data() + pt * table_stride_;
            for (std::uint64_t mask = 1; mask < subsets; ++mask) {
                const auto low = static_cast<std::size_t>(std::countr_zero(mask));
                row[mask] = row[mask & (mask - 1)] + points_[pt][low];
            }
        }
    }
}

double CredalOracle::probability(std::size_t point, std::uint64_t mask) const {
    if (table_stride_ != 0) return table_[point * table_stride_ + mask];
    double s = 0.0;
    for (std::size_t i = 0; i < points_[point].size(); ++i)
        if ((mask >> i) & 1u) s += points_[point][i];
    return s;
}

ConditionalRange CredalOracle::conditional_range(const Subset& event, const Subset& given) const {
    require_same_frame(frame_, event.frame(), "credal oracle");
    require_same_frame(frame_, given.frame(), "credal oracle");
    const std::uint64_t b = given.bits().low_word();
    const std::uint64_t ab = event.bits().low_word() & b;
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    bool feasible = false;
    for (std::size_t pt = 0; pt < points_.size(); ++pt) {
        const double pb = probability(pt, b);
        if (!(pb > 0.0)) continue;
        const double ratio = probability(pt, ab) / pb;
        sup = std::max(sup, ratio);
        inf = std::min(inf, ratio);
        feasible = true;
    }
    if (!feasible)
        throw Error(ErrorCode::NoFeasibleSelection, "no selection gives positive probability to " + given.to_string());
    return {sup, inf};
}

ConditionalRange credal_oracle(const MassFunction& m, const Subset& event, const Subset& given) {
    return CredalOracle(m).conditional_range(event, given);
}

}  // namespace beliefkit

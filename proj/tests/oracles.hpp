#pragma once

// Dense brute-force reference computations over bit masks. They only read
// raw numbers out of library objects and never call library algorithms.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "beliefkit/evidence.hpp"
#include "beliefkit/possibility.hpp"

namespace oracle {

using Mask = std::uint64_t;
using Dense = std::vector<double>;

inline Dense dense(const beliefkit::MassFunction& m) {
    Dense d(Mask{1} << m.frame().size(), 0.0);
    for (const auto& f : m.focals()) d[f.set.bits().low_word()] += f.mass;
    return d;
}

inline double bel(const Dense& m, Mask b) {
    double s = 0.0;
    for (Mask a = 1; a < m.size(); ++a)
        if ((a & ~b) == 0) s += m[a];
    return s;
}

inline double pl(const Dense& m, Mask b) {
    double s = 0.0;
    for (Mask a = 1; a < m.size(); ++a)
        if (a & b) s += m[a];
    return s;
}

inline Dense normalize(Dense d) {
    double t = 0.0;
    for (Mask a = 1; a < d.size(); ++a) t += d[a];
    d[0] = 0.0;
    for (auto& x : d) x /= t;
    return d;
}

inline Dense combine(const Dense& m1, const Dense& m2) {
    Dense out(m1.size(), 0.0);
    for (Mask a = 1; a < m1.size(); ++a)
        for (Mask b = 1; b < m2.size(); ++b) out[a & b] += m1[a] * m2[b];
    return normalize(out);
}

inline Dense dempster_condition(const Dense& m, Mask given) {
    Dense out(m.size(), 0.0);
    for (Mask c = 1; c < m.size(); ++c) out[c & given] += m[c];
    return normalize(out);
}

inline Dense geometric_condition(const Dense& m, Mask given) {
    Dense out(m.size(), 0.0);
    for (Mask c = 1; c < m.size(); ++c)
        if ((c & ~given) == 0) out[c] = m[c];
    return normalize(out);
}

inline Dense jeffrey(const Dense& m1, const Dense& m2) {
    Dense out(m1.size(), 0.0);
    for (Mask a = 1; a < m2.size(); ++a) {
        if (m2[a] == 0.0) continue;
        const Dense c = dempster_condition(m1, a);
        for (Mask b = 0; b < out.size(); ++b) out[b] += m2[a] * c[b];
    }
    return out;
}

/// sup and inf of P(event|given) over every way of sending each focal mass to one member.
struct Range {
    double sup = -1.0;
    double inf = 2.0;
    bool feasible = false;
};

inline Range selections(const Dense& m, Mask event, Mask given) {
    std::vector<std::pair<Mask, double>> focals;
    for (Mask a = 1; a < m.size(); ++a)
        if (m[a] > 0.0) focals.emplace_back(a, m[a]);
    const std::size_t n = static_cast<std::size_t>(std::countr_zero(m.size()));
    Range r;
    std::vector<std::size_t> choice(focals.size());
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (k == focals.size()) {
            std::vector<double> p(n, 0.0);
            for (std::size_t j = 0; j < focals.size(); ++j) p[choice[j]] += focals[j].second;
            double pg = 0.0, peg = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (given >> i & 1) pg += p[i];
                if ((given & event) >> i & 1) peg += p[i];
            }
            if (pg <= 0.0) return;
            r.feasible = true;
            r.sup = std::max(r.sup, peg / pg);
            r.inf = std::min(r.inf, peg / pg);
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!(focals[k].first >> i & 1)) continue;
            choice[k] = i;
            self(self, k + 1);
        }
    };
    rec(rec, 0);
    return r;
}

/// sup over a grid holding 0.0001 steps plus every value of pi2 of
/// min(alpha, pi1(w) / Pi1(cut_alpha), 1[w in cut_alpha]).
inline std::vector<double> poss_update_grid(const std::vector<double>& pi1, const std::vector<double>& pi2) {
    std::vector<double> alphas(pi2.begin(), pi2.end());
    for (int k = 1; k <= 10000; ++k) alphas.push_back(k / 10000.0);
    std::vector<double> out(pi1.size(), 0.0);
    for (double a : alphas) {
        if (a <= 0.0) continue;
        double height = 0.0;
        for (std::size_t i = 0; i < pi1.size(); ++i)
            if (pi2[i] >= a) height = std::max(height, pi1[i]);
        for (std::size_t i = 0; i < pi1.size(); ++i) {
            if (pi2[i] < a || height <= 0.0) continue;
            out[i] = std::max(out[i], std::min(a, pi1[i] / height));
        }
    }
    return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

inline beliefkit::Frame letters(std::size_t n) {
    std::vector<std::string> l;
    for (std::size_t i = 0; i < n; ++i) l.push_back(std::string(1, static_cast<char>('a' + i)));
    return beliefkit::Frame(l);
}

/// Random mass function with up to `max_focals` focal elements.
inline beliefkit::MassFunction random_mass(std::mt19937_64& rng, const beliefkit::Frame& f, std::size_t max_focals) {
    std::uniform_int_distribution<Mask> mask(1, (Mask{1} << f.size()) - 1);
    std::uniform_int_distribution<std::size_t> count(1, max_focals);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    std::vector<beliefkit::Focal> focals;
    double total = 0.0;
    for (std::size_t k = count(rng); k > 0; --k) {
        focals.push_back({f.from_word(mask(rng)), w(rng)});
        total += focals.back().mass;
    }
    for (auto& x : focals) x.mass /= total;
    return beliefkit::MassFunction(f, focals);
}

inline std::vector<double> random_possibility(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) {
        const double r = u(rng);
        x = r < 0.15 ? 0.0 : (r < 0.4 ? std::round(u(rng) * 4) / 4 : u(rng));
    }
    v[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
    return v;
}

}  // namespace oracle

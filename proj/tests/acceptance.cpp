// Acceptance run: one line per criterion, nonzero exit when any fails.

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "beliefkit/compare.hpp"
#include "beliefkit/credal.hpp"
#include "beliefkit/io.hpp"
#include "beliefkit/evidence.hpp"
#include "beliefkit/ocf.hpp"
#include "beliefkit/possibility.hpp"
#include "oracles.hpp"

using namespace beliefkit;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Outcome run_specs(const std::vector<std::pair<std::string, std::size_t>>& specs) {
    bool pass = true;
    std::string detail;
    for (const auto& [name, count] : specs) {
        CoincidenceSpec spec = builtin_spec(name);
        spec.family.count = count;
        const auto r = run_coincidence(spec);
        pass = pass && r.passed;
        detail += (detail.empty() ? "" : "; ") + name + " n=" + std::to_string(r.instances) + " max " +
                  fmt(r.max_deviation) + (r.passed ? "" : " FAILED at #" + std::to_string(r.witness_index.value_or(0)));
    }
    return {pass, detail};
}

// ---- 1 ----------------------------------------------------------------------

Outcome worked_example() {
    const Frame f({"a", "b", "c", "d", "e"});
    const auto A1 = f.subset_of({"a", "b"}), B1 = f.subset_of({"b", "c", "d"});
    const auto A2 = f.subset_of({"c", "e"}), B2 = f.subset_of({"a", "d", "e"});
    double dev = 0.0;
    bool same_focals = true;
    for (int i = 1; i <= 9; ++i) {
        for (int j = 1; j <= 9; ++j) {
            const double a = i / 10.0, b = j / 10.0;
            const MassFunction m1(f, {{A1, a}, {B1, 1 - a}});
            const MassFunction m2(f, {{A2, b}, {B2, 1 - b}});
            const auto c = dempster_combine(m1, m2);
            const auto jd = jeffrey_ds_update(m1, m2);
            const double k = 1 - a * b;
            dev = std::max({dev, std::abs(c.mass_of(A1.intersect(B2)) - a * (1 - b) / k),
                            std::abs(c.mass_of(B1.intersect(A2)) - (1 - a) * b / k),
                            std::abs(c.mass_of(B1.intersect(B2)) - (1 - a) * (1 - b) / k),
                            std::abs(jd.mass_of(B1.intersect(A2)) - b),
                            std::abs(jd.mass_of(A1.intersect(B2)) - a * (1 - b)),
                            std::abs(jd.mass_of(B1.intersect(B2)) - (1 - a) * (1 - b))});
            same_focals = same_focals && c.focals().size() == 3 && jd.focals().size() == 3;
            for (std::size_t q = 0; same_focals && q < 3; ++q)
                same_focals = c.focals()[q].set == jd.focals()[q].set;
        }
    }
    return {dev < 1e-9 && same_focals,
            "81 grid points, max deviation " + fmt(dev) + (same_focals ? ", identical focal sets" : ", focal sets differ")};
}

// ---- 2, 3 -------------------------------------------------------------------

std::vector<MassFunction> credal_instances() {
    std::mt19937_64 rng(20240601);
    std::vector<MassFunction> out;
    for (int t = 0; t < 200; ++t) out.push_back(oracle::random_mass(rng, oracle::letters(3 + t % 3), 6));
    return out;
}

Outcome credal_equivalence(const std::vector<MassFunction>& ms) {
    double dev = 0.0;
    std::size_t pairs = 0;
    for (const auto& m : ms) {
        const CredalOracle o(m);
        const auto& f = m.frame();
        for (const auto& B : enumerate_subsets(f)) {
            if (B.is_empty()) continue;
            const ConditionalBounds cb(m, B);
            for (const auto& A : enumerate_subsets(f)) {
                if (!cb.defined_at(A)) continue;
                const auto r = o.conditional_range(A, B);
                dev = std::max({dev, std::abs(cb.upper(A) - r.sup), std::abs(cb.lower(A) - r.inf)});
                ++pairs;
            }
        }
    }
    return {dev < 1e-9, std::to_string(pairs) + " defined (A,B) pairs over 200 masses, max deviation " + fmt(dev)};
}

Outcome ordering(const std::vector<MassFunction>& ms) {
    std::size_t checked = 0, violations = 0;
    for (const auto& m : ms) {
        const auto& f = m.frame();
        for (const auto& B : enumerate_subsets(f)) {
            if (m.plausibility(B) <= kDefaultTolerance) continue;
            const ConditionalBounds cb(m, B);
            const auto dc = dempster_condition(m, B);
            for (const auto& A : enumerate_subsets(f)) {
                if (!cb.defined_at(A)) continue;
                const double up = cb.upper(A), pl = dc.plausibility(A), bel = dc.belief(A), lo = cb.lower(A);
                ++checked;
                if (up < pl - 1e-12 || pl < bel - 1e-12 || bel < lo - 1e-12) ++violations;
            }
        }
    }
    return {violations == 0 && checked > 0,
            std::to_string(checked) + " queries, " + std::to_string(violations) + " violations"};
}

// ---- 6 ----------------------------------------------------------------------

Outcome compact_form() {
    auto out = run_specs({{"possibilistic-compact-sup", 500}});
    std::mt19937_64 rng(66);
    double dev = 0.0;
    int n_pairs = 0;
    while (n_pairs < 500) {
        const std::size_t n = 1 + n_pairs % 8;
        const auto v1 = oracle::random_possibility(rng, n);
        const auto v2 = oracle::random_possibility(rng, n);
        bool overlap = false;
        for (std::size_t i = 0; i < n; ++i) overlap |= v1[i] > 0 && v2[i] > 0;
        if (!overlap) continue;
        const Frame f = oracle::letters(n);
        const auto u = poss_jeffrey_update(PossibilityDistribution(f, v1), PossibilityDistribution(f, v2));
        dev = std::max(dev, oracle::max_abs_diff(u.posterior.values(), oracle::poss_update_grid(v1, v2)));
        ++n_pairs;
    }
    out.pass = out.pass && dev < 1e-12;
    out.detail += "; brute-force level grid, 500 pairs, max " + fmt(dev);
    return out;
}

// ---- 8 ----------------------------------------------------------------------

Outcome crisp_with_doubt() {
    auto out = run_specs({{"crisp-with-doubt-closed-form", 200}});
    InstanceFamily fam = builtin_spec("crisp-with-doubt-closed-form").family;
    fam.count = 200;
    double dev = 0.0, eq_lambda = 0.0;
    for (const auto& x : generate_instances(fam, builtin_spec("crisp-with-doubt-closed-form").seed)) {
        const auto& p1 = *x.prior_poss;
        const auto nb = x.given->complement();
        const auto r = poss_update_crisp_with_doubt(p1, *x.given, x.lambda);
        dev = std::max(dev, std::abs(r.possibility(nb) - std::min(x.lambda, p1.possibility(nb))));
        if (p1.possibility(nb) >= x.lambda) eq_lambda = std::max(eq_lambda, std::abs(r.possibility(nb) - x.lambda));
    }
    out.pass = out.pass && dev < 1e-12 && eq_lambda < 1e-12;
    out.detail += "; complement possibility = min(lambda, prior) max " + fmt(dev) + ", = lambda when prior >= lambda max " +
                  fmt(eq_lambda);
    return out;
}

// ---- 10 ---------------------------------------------------------------------

Outcome limit_behaviour() {
    const Frame f({"a", "b", "c", "d"});
    const Ocf k(f, {0, 2, 1, 4});
    const auto A = f.subset_of({"b", "d"});
    const auto notA = A.complement();
    double prev_max = INFINITY;
    bool decreasing = true;
    double at50 = 0.0;
    for (Rank n : {0u, 1u, 2u, 5u, 10u, 50u}) {
        const auto d = spohn_partition_update(ocf_to_possibility(k), SpohnObservation::shift(A, n));
        const auto direct = ocf_to_possibility(ocf_conditionalize(k, A, n));
        double mx = 0.0;
        for (std::size_t i : notA.indices()) {
            mx = std::max(mx, d.value(i));
            decreasing = decreasing && std::abs(d.value(i) - direct.value(i)) <= 1e-9 * direct.value(i);
        }
        decreasing = decreasing && mx < prev_max;
        prev_max = mx;
        if (n == 50) at50 = mx;
    }
    return {decreasing && at50 <= std::exp(-49.0),
            "ladder 0,1,2,5,10,50 strictly decreasing: " + std::string(decreasing ? "yes" : "no") +
                "; max on complement at n=50 is " + fmt(at50) + " (bound " + fmt(std::exp(-49.0)) + ")"};
}

// ---- 11 ---------------------------------------------------------------------

bool mass_ok(const MassFunction& m) {
    double s = 0.0;
    for (const auto& fc : m.focals()) {
        if (fc.set.is_empty() || fc.mass <= 0.0) return false;
        s += fc.mass;
    }
    if (std::abs(s - 1.0) > 1e-9) return false;
    for (const auto& B : enumerate_subsets(m.frame())) {
        if (std::abs(m.belief(B) - (1.0 - m.plausibility(B.complement()))) > 1e-12) return false;
        if (m.belief(B) > m.plausibility(B) + 1e-12) return false;
    }
    return true;
}

bool poss_ok(const PossibilityDistribution& d, bool normal) {
    if (normal && !d.is_normalized()) return false;
    for (const auto& A : enumerate_subsets(d.frame())) {
        if (normal && std::abs(d.necessity(A) - (1.0 - d.possibility(A.complement()))) > 1e-12) return false;
        for (const auto& B : enumerate_subsets(d.frame()))
            if (d.possibility(A.unite(B)) != std::max(d.possibility(A), d.possibility(B))) return false;
    }
    return true;
}

bool ocf_ok(const Ocf& k) {
    bool zero = false;
    for (Rank r : k.ranks()) zero |= r == 0;
    if (!zero) return false;
    for (const auto& A : enumerate_subsets(k.frame())) {
        if (A.is_empty()) continue;
        Rank m = UINT32_MAX;
        for (std::size_t i : A.indices()) m = std::min(m, k.rank(i));
        if (ocf_rank(k, A) != m) return false;
    }
    return true;
}

Outcome invariants() {
    std::mt19937_64 rng(1111);
    std::size_t cases = 0, failures = 0, outputs = 0;
    auto check = [&](bool ok) {
        ++outputs;
        if (!ok) ++failures;
    };
    for (; cases < 1000; ++cases) {
        const std::size_t n = 2 + cases % 4;
        const Frame f = oracle::letters(n);
        const oracle::Mask full = (oracle::Mask{1} << n) - 1;
        const auto A = f.from_word(std::uniform_int_distribution<oracle::Mask>(1, full - 1)(rng));
        switch (cases % 3) {
        case 0: {
            const auto m1 = oracle::random_mass(rng, f, 6);
            const auto m2 = oracle::random_mass(rng, f, 4);
            check(mass_ok(m1));
            if (m1.plausibility(A) > 1e-9) check(mass_ok(dempster_condition(m1, A)));
            if (m1.belief(A) > 1e-9) check(mass_ok(geometric_condition(m1, A)));
            if (conflict(m1, m2) < 1 - 1e-9) check(mass_ok(dempster_combine(m1, m2)));
            try {
                check(mass_ok(jeffrey_ds_update(m1, m2)));
            } catch (const Error& e) {
                check(e.code() == ErrorCode::ConditioningUndefined);
            }
            break;
        }
        case 1: {
            const PossibilityDistribution p1(f, oracle::random_possibility(rng, n));
            const PossibilityDistribution p2(f, oracle::random_possibility(rng, n));
            check(poss_ok(p1, true));
            if (p1.possibility(A) > 1e-9) {
                check(poss_ok(poss_condition(p1, A), true));
                check(poss_ok(poss_update_crisp_with_doubt(p1, A, std::uniform_real_distribution<double>(0, 1)(rng)), true));
            }
            try {
                const auto u = poss_jeffrey_update(p1, p2);
                check(poss_ok(u.posterior, u.warnings.empty()));
                check(poss_ok(poss_combine(p1, p2), true));
            } catch (const Error& e) {
                check(e.code() == ErrorCode::TotalConflict);
            }
            try {
                check(poss_ok(spohn_partition_update(p1, SpohnObservation::singletons(p2)), true));
            } catch (const Error& e) {
                check(e.code() == ErrorCode::ConditioningUndefined);
            }
            break;
        }
        default: {
            std::vector<Rank> r(n);
            for (auto& x : r) x = static_cast<Rank>(rng() % 10);
            r[rng() % n] = 0;
            const Ocf k(f, r);
            check(ocf_ok(k));
            check(ocf_ok(ocf_conditionalize(k, A, static_cast<Rank>(rng() % 20))));
            check(poss_ok(ocf_to_possibility(k), true));
            check(ocf_ok(possibility_to_ocf(ocf_to_possibility(k))) && possibility_to_ocf(ocf_to_possibility(k)) == k);
            break;
        }
        }
    }
    return {failures == 0, std::to_string(cases) + " random cases, " + std::to_string(outputs) +
                                " constructed or derived values checked, " + std::to_string(failures) + " violations"};
}

// ---- 12 ---------------------------------------------------------------------

Outcome error_paths() {
    const Frame f({"a", "b", "c"});
    const Frame ex({"a", "b", "c", "d", "e"});
    const auto s = [&](std::initializer_list<std::string_view> names) { return f.subset_of(names); };
    const MassFunction only_ab(f, {{s({"a", "b"}), 1.0}});
    const MassFunction only_c(f, {{s({"c"}), 1.0}});
    const PossibilityDistribution pa(f, {1.0, 0.0, 0.0});
    const PossibilityDistribution pbc(f, {0.0, 1.0, 1.0});
    const std::vector<std::pair<std::string, std::pair<ErrorCode, std::function<void()>>>> cases = {
        {"dempster conditioning on Pl = 0", {ErrorCode::ConditioningUndefined, [&] { dempster_condition(only_ab, s({"c"})); }}},
        {"geometric conditioning on Bel = 0", {ErrorCode::ConditioningUndefined, [&] { geometric_condition(only_ab, s({"a"})); }}},
        {"upper/lower with vanishing denominators",
         {ErrorCode::ConditioningUndefined, [&] { ConditionalBounds(only_ab, s({"c"})).at(s({"c"})); }}},
        {"extended Jeffrey with alpha = 1 in the worked example", {ErrorCode::ConditioningUndefined, [&] {
             jeffrey_ds_update(MassFunction(ex, {{ex.subset_of({"a", "b"}), 1.0}}),
                               MassFunction(ex, {{ex.subset_of({"c", "e"}), 0.5}, {ex.subset_of({"a", "d", "e"}), 0.5}}));
         }}},
        {"belief conditional with Bel(not A) = 1",
         {ErrorCode::ConditioningUndefined, [&] { bel_conditional(only_c, s({"a"}), s({"a", "b"})); }}},
        {"possibilistic conditioning on Pi = 0", {ErrorCode::ConditioningUndefined, [&] { poss_condition(pa, s({"b", "c"})); }}},
        {"crisp with doubt on Pi = 0",
         {ErrorCode::ConditioningUndefined, [&] { poss_update_crisp_with_doubt(pa, s({"b"}), 0.5); }}},
        {"Spohn update on an impossible weighted cell", {ErrorCode::ConditioningUndefined, [&] {
             spohn_partition_update(pa, SpohnObservation::two_cell(s({"b", "c"}), 0.5));
         }}},
        {"Dempster combination of disjoint evidence", {ErrorCode::TotalConflict, [&] { dempster_combine(only_ab, only_c); }}},
        {"possibilistic combination of disjoint supports", {ErrorCode::TotalConflict, [&] { poss_combine(pa, pbc); }}},
        {"possibilistic update without common support", {ErrorCode::TotalConflict, [&] { poss_jeffrey_update(pa, pbc); }}},
        {"translation of 0.5 to a rank",
         {ErrorCode::NotOnRankGrid, [&] { possibility_to_ocf(PossibilityDistribution(f, {1.0, 0.5, 1.0})); }}},
        {"pipeline step on the wrong state kind", {ErrorCode::KindMismatch, [&] {
             KnowledgeDocument doc = make_document(pa);
             run_pipeline(doc, parse_pipeline("steps:\n  - op: dempster_condition\n    on: [a]\n"));
         }}},
        {"pipeline observation of the wrong kind", {ErrorCode::KindMismatch, [&] {
             parse_pipeline("steps:\n  - op: poss_jeffrey_update\n    observation:\n      format_version: 1\n"
                            "      kind: ocf\n      frame: [a, b, c]\n      ocf: {a: 0, b: 1, c: 2}\n");
         }}},
    };
    std::size_t ok = 0;
    std::string missed;
    for (const auto& [name, c] : cases) {
        try {
            c.second();
            missed += " [" + name + ": no error]";
        } catch (const Error& e) {
            if (e.code() == c.first)
                ++ok;
            else
                missed += " [" + name + ": got " + std::string(e.name()) + "]";
        }
    }
    return {ok == cases.size(), std::to_string(ok) + "/" + std::to_string(cases.size()) + " cases raise exactly the expected error" + missed};
}

}  // namespace

int main() {
    const auto ms = credal_instances();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"worked example reproduction", worked_example},
        {"credal oracle equivalence", [&] { return credal_equivalence(ms); }},
        {"conditional ordering", [&] { return ordering(ms); }},
        {"coincidence suite (a)-(d)",
         [] {
             return run_specs({{"combination-categorical", 200},
                               {"extended-jeffrey-bayesian", 200},
                               {"combination-no-conflict", 200},
                               {"jeffrey-singleton-substitution", 200}});
         }},
        {"Cox product property", [] { return run_specs({{"cox-plausibility", 200}, {"cox-belief", 200}}); }},
        {"compact = sup form", compact_form},
        {"qualitative laws (a)-(c)",
         [] {
             return run_specs({{"possibilistic-dominating-keeps-prior", 500},
                               {"possibilistic-overlapping-cores-min", 500},
                               {"possibilistic-dominated-adopts-observation", 500},
                               {"spohn-dominated-adopts-observation", 500}});
         }},
        {"crisp observation with doubt", crisp_with_doubt},
        {"OCF two-path equality", [] { return run_specs({{"ocf-shift-two-path", 200}, {"ocf-a-part-conditioning", 200}}); }},
        {"limit behaviour", limit_behaviour},
        {"structural invariants", invariants},
        {"error-path coverage", error_paths},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o{false, ""};
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("unexpected exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        std::printf("criterion %zu: %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

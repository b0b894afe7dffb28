#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "beliefkit/io.hpp"

using namespace beliefkit;
using json = nlohmann::ordered_json;

namespace {

enum Exit : int {
    kOk = 0,
    kCheckFailed = 1,
    kUsage = 2,
    kValidation = 3,
    kRuleUndefined = 4,
    kIo = 5,
};

struct Globals {
    double tolerance = kDefaultTolerance;
    std::string output;
    bool json = false;
};

void emit(const Globals& g, const std::string& text) {
    if (g.output.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::FILE* f = std::fopen(g.output.c_str(), "wb");
    if (!f) throw Error(ErrorCode::IoError, "cannot write '" + g.output + "'");
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    std::fclose(f);
    if (!ok) throw Error(ErrorCode::IoError, "write to '" + g.output + "' failed");
}

void emit_document(const Globals& g, const KnowledgeDocument& doc) {
    for (const auto& w : doc.warnings) std::cerr << "warning: " << w.name << ": " << w.message << "\n";
    emit(g, g.json ? to_json(doc).dump(2) + "\n" : to_text(doc));
}

KnowledgeDocument apply(const Globals& g, const KnowledgeDocument& doc, std::string op,
                        std::map<std::string, std::string> params = {},
                        std::optional<KnowledgeDocument> obs = std::nullopt) {
    return apply_operation(doc, PipelineStep{std::move(op), std::move(params), std::move(obs)}, g.tolerance);
}

json names(const Subset& s) {
    json a = json::array();
    for (const auto& n : s.sorted_names()) a.push_back(n);
    return a;
}

MassFunction mass_state(const KnowledgeDocument& doc, const std::string& what) {
    if (const auto* m = std::get_if<MassFunction>(&doc.payload)) return *m;
    if (const auto* p = std::get_if<ProbabilityMeasure>(&doc.payload)) return MassFunction::bayesian(*p);
    throw Error(ErrorCode::KindMismatch, what + " needs a mass or probability document, got " +
                                             std::string(kind_name(doc.kind())));
}

void query(const Globals& g, const KnowledgeDocument& doc, const std::string& event_text) {
    const Subset event = parse_event(doc.frame(), event_text);
    json j;
    j["event"] = names(event);
    j["kind"] = std::string(kind_name(doc.kind()));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ProbabilityMeasure>) {
                j["probability"] = p.of(event);
            } else if constexpr (std::is_same_v<T, MassFunction>) {
                j["belief"] = p.belief(event);
                j["plausibility"] = p.plausibility(event);
            } else if constexpr (std::is_same_v<T, PossibilityDistribution>) {
                j["possibility"] = p.possibility(event);
                j["necessity"] = p.necessity(event);
            } else if constexpr (std::is_same_v<T, Ocf>) {
                j["rank"] = ocf_rank(p, event);
            } else {
                throw Error(ErrorCode::KindMismatch, "query needs a state document, got a partition");
            }
        },
        doc.payload);
    if (g.json) return emit(g, j.dump(2) + "\n");
    std::string text;
    for (const auto& [k, v] : j.items()) {
        if (k == "event" || k == "kind") continue;
        text += k + "(" + event.to_string() + ") = " + (v.is_number_float() ? format_decimal(v.get<double>()) : v.dump()) + "\n";
    }
    emit(g, text);
}

void condition_bounds(const Globals& g, const MassFunction& m, const Subset& given, bool upper) {
    ConditionalBounds cb(m, given, g.tolerance);
    json rows = json::array();
    std::string text = std::string(upper ? "upper" : "lower") + " conditional given " + given.to_string() + "\n";
    for (const auto& event : enumerate_subsets(m.frame())) {
        json row{{"event", names(event)}};
        std::string value = "undefined";
        if (cb.defined_at(event)) {
            const auto iv = cb.at(event);
            const double v = upper ? iv.upper : iv.lower;
            row["value"] = v;
            value = format_decimal(v);
        } else {
            row["value"] = nullptr;
        }
        rows.push_back(row);
        text += "  " + event.to_string() + ": " + value + "\n";
    }
    if (g.json) return emit(g, json{{"rule", upper ? "upper" : "lower"}, {"given", names(given)}, {"values", rows}}.dump(2) + "\n");
    emit(g, text);
}

void condition(const Globals& g, const KnowledgeDocument& doc, const std::string& on, const std::string& rule,
               std::optional<Rank> shift) {
    if (shift && rule != "ocf") throw Error(ErrorCode::InvalidArgument, "--shift applies only to --rule ocf");
    if (rule == "dempster" || rule == "geometric") {
        const auto m = make_document(mass_state(doc, "condition --rule " + rule));
        return emit_document(g, apply(g, m, rule + "_condition", {{"on", on}}));
    }
    if (rule == "upper" || rule == "lower")
        return condition_bounds(g, mass_state(doc, "condition --rule " + rule), parse_event(doc.frame(), on),
                                rule == "upper");
    if (rule == "possibilistic") return emit_document(g, apply(g, doc, "poss_condition", {{"on", on}}));
    if (rule == "ocf") {
        if (shift) return emit_document(g, apply(g, doc, "ocf_conditionalize", {{"on", on}, {"shift", std::to_string(*shift)}}));
        return emit_document(g, apply(g, doc, "ocf_a_part", {{"on", on}}));
    }
    throw Error(ErrorCode::UnknownRule, "unknown conditioning rule '" + rule + "'");
}

void combine(const Globals& g, const KnowledgeDocument& a, const KnowledgeDocument& b, const std::string& rule) {
    if (rule == "dempster") {
        const double k = conflict(mass_state(a, "combine"), mass_state(b, "combine"));
        std::cerr << "conflict K = " << format_decimal(k) << "\n";
        return emit_document(g, apply(g, a, "dempster_combine", {}, b));
    }
    static const std::map<std::string, std::string> ops = {
        {"poss-min", "min"}, {"poss-product", "product"}, {"poss-luka", "lukasiewicz"}};
    auto it = ops.find(rule);
    if (it == ops.end()) throw Error(ErrorCode::UnknownRule, "unknown combination rule '" + rule + "'");
    emit_document(g, apply(g, a, "poss_combine", {{"op", it->second}}, b));
}

void update(const Globals& g, const KnowledgeDocument& doc, const KnowledgeDocument& obs, const std::string& rule) {
    if (rule == "jeffrey") return emit_document(g, apply(g, doc, "jeffrey_update", {}, obs));
    if (rule == "jeffrey-ds") return emit_document(g, apply(g, doc, "jeffrey_ds_update", {}, obs));
    if (rule == "jeffrey-geometric")
        return emit_document(g, apply(g, doc, "jeffrey_ds_update", {{"inner", "geometric"}}, obs));
    if (rule == "poss-jeffrey") return emit_document(g, apply(g, doc, "poss_jeffrey_update", {}, obs));
    if (rule == "spohn") return emit_document(g, apply(g, doc, "spohn_partition_update", {}, obs));
    throw Error(ErrorCode::UnknownRule, "unknown update rule '" + rule + "'");
}

void translate(const Globals& g, const KnowledgeDocument& doc, const std::string& to) {
    if (to == "possibility") return emit_document(g, apply(g, doc, "ocf_to_possibility"));
    if (to == "ocf") return emit_document(g, apply(g, doc, "possibility_to_ocf"));
    throw Error(ErrorCode::UnknownRule, "unknown translation target '" + to + "'");
}

void compare(const Globals& g, const KnowledgeDocument& doc, const KnowledgeDocument& obs_doc) {
    std::optional<SpohnObservation> obs;
    if (const auto* w = std::get_if<WeightedPartition>(&obs_doc.payload)) obs.emplace(*w);
    else if (const auto* p = std::get_if<PossibilityDistribution>(&obs_doc.payload)) obs = SpohnObservation::singletons(*p);
    else throw Error(ErrorCode::KindMismatch, "compare needs a partition or possibility observation");
    RuleComparison cmp = [&] {
        if (const auto* k = std::get_if<Ocf>(&doc.payload)) return compare_rules(*k, *obs, g.tolerance);
        if (const auto* d = std::get_if<PossibilityDistribution>(&doc.payload)) return compare_rules(*d, *obs, g.tolerance);
        throw Error(ErrorCode::KindMismatch, "compare needs a possibility or ocf document, got " +
                                                 std::string(kind_name(doc.kind())));
    }();
    emit(g, g.json ? to_json(cmp).dump(2) + "\n" : to_text(cmp));
}

int suite(const Globals& g, const std::string& name, std::optional<std::uint64_t> seed, const std::string& spec_file,
          bool list, unsigned threads) {
    std::vector<CoincidenceSpec> specs;
    if (!spec_file.empty()) {
        std::FILE* f = std::fopen(spec_file.c_str(), "rb");
        if (!f) throw Error(ErrorCode::IoError, "cannot read '" + spec_file + "'");
        std::string text;
        char buf[4096];
        for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, f)) > 0;) text.append(buf, n);
        std::fclose(f);
        specs.push_back(parse_coincidence_spec(text, spec_file));
    } else if (!name.empty()) {
        specs.push_back(builtin_spec(name));
    } else {
        specs = builtin_suite();
    }
    if (list) {
        std::string text;
        json a = json::array();
        for (const auto& s : specs) {
            text += s.name + ": " + s.claim + "\n";
            a.push_back(json{{"name", s.name}, {"claim", s.claim}});
        }
        emit(g, g.json ? a.dump(2) + "\n" : text);
        return kOk;
    }
    bool all = true;
    std::string text;
    json reports = json::array();
    for (auto s : specs) {
        if (seed) s.seed = *seed;
        const auto r = run_coincidence(s, threads);
        all = all && r.passed;
        text += to_text(r);
        reports.push_back(to_json(r));
    }
    text += std::string(all ? "all " : "some ") + "coincidences " + (all ? "hold" : "FAILED") + " (" +
            std::to_string(specs.size()) + " specs)\n";
    emit(g, g.json ? json{{"passed", all}, {"reports", reports}}.dump(2) + "\n" : text);
    return all ? kOk : kCheckFailed;
}

int exit_code(ErrorCode code) {
    switch (error_category(code)) {
        case ErrorCategory::Validation: return kValidation;
        case ErrorCategory::RuleUndefined: return kRuleUndefined;
        case ErrorCategory::Io: return kIo;
        case ErrorCategory::Usage: return kUsage;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"beliefkit: conditioning and updating in evidence, possibility and ranking theories"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--tolerance", g.tolerance, "tolerance for positivity and normalization checks")
        ->check(CLI::PositiveNumber);
    app.add_option("--output", g.output, "write the result to this path instead of stdout");
    app.add_flag("--json", g.json, "machine-readable output");

    std::string doc_path, doc2_path, obs_path, event, on, rule, to, name, spec_file, pipe_path;
    std::optional<Rank> shift;
    std::optional<std::uint64_t> seed;
    bool list = false;
    unsigned threads = 0;

    auto* q = app.add_subcommand("query", "Bel/Pl, P, Pi/N or rank of an event");
    q->add_option("doc", doc_path)->required();
    q->add_option("--event", event, "comma-separated element names")->required();

    auto* c = app.add_subcommand("condition", "condition a state on an event");
    c->add_option("doc", doc_path)->required();
    c->add_option("--on", on, "comma-separated element names")->required();
    c->add_option("--rule", rule)
        ->required()
        ->check(CLI::IsMember({"dempster", "geometric", "upper", "lower", "possibilistic", "ocf"}));
    c->add_option("--shift", shift, "rank shift n for (A,n)-conditionalization");

    auto* cb = app.add_subcommand("combine", "combine two states");
    cb->add_option("doc1", doc_path)->required();
    cb->add_option("doc2", doc2_path)->required();
    cb->add_option("--rule", rule)->required()->check(CLI::IsMember({"dempster", "poss-min", "poss-product", "poss-luka"}));

    auto* u = app.add_subcommand("update", "revise a state by an uncertain observation");
    u->add_option("doc", doc_path)->required();
    u->add_option("--obs", obs_path)->required();
    u->add_option("--rule", rule)
        ->required()
        ->check(CLI::IsMember({"jeffrey", "jeffrey-ds", "jeffrey-geometric", "poss-jeffrey", "spohn"}));

    auto* t = app.add_subcommand("translate", "between ranks and possibilities, pi = exp(-rank)");
    t->add_option("doc", doc_path)->required();
    t->add_option("--to", to)->required()->check(CLI::IsMember({"possibility", "ocf"}));

    auto* cm = app.add_subcommand("compare", "Spohn's rule next to the possibilistic rule");
    cm->add_option("doc", doc_path)->required();
    cm->add_option("--obs", obs_path)->required();

    auto* s = app.add_subcommand("suite", "run built-in coincidence specs");
    s->add_option("--name", name, "one built-in spec");
    s->add_option("--seed", seed, "override the spec seed");
    s->add_option("--spec", spec_file, "run a spec file instead of the built-in suite");
    s->add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    s->add_flag("--list", list, "list specs without running them");

    auto* p = app.add_subcommand("pipeline", "apply a pipeline of steps to a prior document");
    p->add_option("prior", doc_path)->required();
    p->add_option("pipeline", pipe_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        const double tol = g.tolerance;
        if (q->parsed()) {
            query(g, load_document(doc_path, tol), event);
        } else if (c->parsed()) {
            condition(g, load_document(doc_path, tol), on, rule, shift);
        } else if (cb->parsed()) {
            combine(g, load_document(doc_path, tol), load_document(doc2_path, tol), rule);
        } else if (u->parsed()) {
            update(g, load_document(doc_path, tol), load_document(obs_path, tol), rule);
        } else if (t->parsed()) {
            translate(g, load_document(doc_path, tol), to);
        } else if (cm->parsed()) {
            compare(g, load_document(doc_path, tol), load_document(obs_path, tol));
        } else if (s->parsed()) {
            return suite(g, name, seed, spec_file, list, threads);
        } else if (p->parsed()) {
            const auto result = run_pipeline(load_document(doc_path, tol), load_pipeline(pipe_path, tol), tol);
            for (const auto& st : result.log)
                for (const auto& w : st.warnings)
                    std::cerr << "warning: step " << st.index << ": " << w.name << ": " << w.message << "\n";
            emit(g, g.json ? to_json(result).dump(2) + "\n" : to_text(result));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return exit_code(e.code());
    }
    return kOk;
}

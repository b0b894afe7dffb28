#include "beliefkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace beliefkit {

using json = nlohmann::ordered_json;

std::string_view kind_name(DocumentKind kind) {
    switch (kind) {
        case DocumentKind::Probability: return "probability";
        case DocumentKind::Mass: return "mass";
        case DocumentKind::Possibility: return "possibility";
        case DocumentKind::Ocf: return "ocf";
        case DocumentKind::Partition: return "partition";
    }
    return "?";
}

DocumentKind parse_kind(std::string_view name) {
    for (auto k : {DocumentKind::Probability, DocumentKind::Mass, DocumentKind::Possibility, DocumentKind::Ocf,
                   DocumentKind::Partition})
        if (kind_name(k) == name) return k;
    throw Error(ErrorCode::ParseError, "unknown document kind '" + std::string(name) + "'");
}

DocumentKind KnowledgeDocument::kind() const { return static_cast<DocumentKind>(payload.index()); }

const Frame& KnowledgeDocument::frame() const {
    return std::visit([](const auto& p) -> const Frame& { return p.frame(); }, payload);
}

namespace {

constexpr const char* kUnnormalized = "UnnormalizedResult";

bool has_warning(const std::vector<Warning>& ws, std::string_view name) {
    return std::any_of(ws.begin(), ws.end(), [&](const Warning& w) { return w.name == name; });
}

}  // namespace

KnowledgeDocument make_document(Payload payload, std::vector<Warning> warnings) {
    if (const auto* d = std::get_if<PossibilityDistribution>(&payload))
        if (!d->is_normalized() && !has_warning(warnings, kUnnormalized))
            warnings.push_back({kUnnormalized, "possibility distribution has height " + format_decimal(d->height())});
    return KnowledgeDocument{kFormatVersion, std::move(payload), std::move(warnings)};
}

// ---- parsing ----------------------------------------------------------------

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(ErrorCode code, const YAML::Node& at, const std::string& field, const std::string& msg) const {
        std::string where = source_;
        if (at.IsDefined() && at.Mark().line >= 0) where += ":" + std::to_string(at.Mark().line + 1);
        else if (last_line_ >= 0) where += ":" + std::to_string(last_line_ + 1);
        throw Error(code, where + ": field '" + field + "': " + msg);
    }

    YAML::Node child(const YAML::Node& parent, const std::string& key, const std::string& path) {
        remember(parent);
        YAML::Node n = parent[key];
        if (!n.IsDefined() || n.IsNull()) fail(ErrorCode::ParseError, parent, path, "missing");
        return n;
    }

    std::string scalar(const YAML::Node& n, const std::string& field) {
        remember(n);
        if (!n.IsScalar()) fail(ErrorCode::ParseError, n, field, "expected a scalar");
        return n.Scalar();
    }

    double decimal(const YAML::Node& n, const std::string& field) {
        const std::string s = scalar(n, field);
        double v = 0.0;
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || ptr != end || !std::isfinite(v))
            fail(ErrorCode::ParseError, n, field, "'" + s + "' is not a decimal number");
        return v;
    }

    std::uint64_t integer(const YAML::Node& n, const std::string& field) {
        const std::string s = scalar(n, field);
        std::uint64_t v = 0;
        const auto* end = s.data() + s.size();
        auto [ptr, ec] = std::from_chars(s.data(), end, v);
        if (ec != std::errc() || ptr != end)
            fail(ErrorCode::ParseError, n, field, "'" + s + "' is not a non-negative integer");
        return v;
    }

    std::vector<std::string> names(const YAML::Node& n, const std::string& field) {
        remember(n);
        std::vector<std::string> out;
        if (n.IsScalar()) {
            std::stringstream ss(n.Scalar());
            for (std::string part; std::getline(ss, part, ',');) {
                part.erase(0, part.find_first_not_of(" \t"));
                part.erase(part.find_last_not_of(" \t") + 1);
                if (!part.empty()) out.push_back(part);
            }
            return out;
        }
        if (!n.IsSequence()) fail(ErrorCode::ParseError, n, field, "expected a list of element names");
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back(scalar(n[i], field + "[" + std::to_string(i) + "]"));
        return out;
    }

    Subset subset(const Frame& frame, const YAML::Node& n, const std::string& field) {
        const auto labels = names(n, field);
        for (const auto& l : labels)
            if (!frame.contains(l)) fail(ErrorCode::UnknownElement, n, field, "'" + l + "' is not in the frame");
        return frame.subset_of(labels);
    }

    /// Re-throws library validation errors with location and field.
    template <class F>
    auto validated(const YAML::Node& at, const std::string& field, F&& make) -> decltype(make()) {
        try {
            return make();
        } catch (const Error& e) {
            if (error_category(e.code()) != ErrorCategory::Validation) throw;
            fail(e.code(), at, field, e.what());
        }
    }

    void remember(const YAML::Node& n) {
        if (n.IsDefined() && n.Mark().line >= 0) last_line_ = n.Mark().line;
    }

    const std::string& source() const { return source_; }

private:
    std::string source_;
    int last_line_ = -1;
};

YAML::Node load_yaml(const std::string& text, const std::string& source) {
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorCode::ParseError, source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_keys(Reader& r, const YAML::Node& map, const std::vector<std::string>& allowed, const std::string& path) {
    for (const auto& kv : map) {
        const std::string key = kv.first.Scalar();
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            r.fail(ErrorCode::ParseError, kv.first, path.empty() ? key : path + "." + key, "unknown field");
    }
}

/// element -> decimal mapping; absent elements default to `missing` unless it is nullopt.
std::vector<double> element_values(Reader& r, const Frame& frame, const YAML::Node& map, const std::string& field,
                                   std::optional<double> missing) {
    r.remember(map);
    if (!map.IsMap()) r.fail(ErrorCode::ParseError, map, field, "expected a mapping from element names to values");
    std::vector<std::optional<double>> seen(frame.size());
    for (const auto& kv : map) {
        const std::string name = r.scalar(kv.first, field);
        const std::string sub = field + "." + name;
        if (!frame.contains(name)) r.fail(ErrorCode::UnknownElement, kv.first, sub, "'" + name + "' is not in the frame");
        auto& slot = seen[frame.index_of(name)];
        if (slot) r.fail(ErrorCode::ParseError, kv.first, sub, "duplicate element");
        slot = r.decimal(kv.second, sub);
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i] && !missing) r.fail(ErrorCode::ParseError, map, field + "." + frame.label(i), "missing");
        out.push_back(seen[i].value_or(missing.value_or(0.0)));
    }
    return out;
}

KnowledgeDocument read_document(Reader& r, const YAML::Node& root, double tol) {
    if (!root.IsMap()) r.fail(ErrorCode::ParseError, root, "<document>", "expected a mapping");
    check_keys(r, root,
               {"format_version", "kind", "frame", "normalization", "metadata", "probability", "mass", "possibility",
                "ocf", "partition"},
               "");
    const auto version = r.integer(r.child(root, "format_version", "format_version"), "format_version");
    if (version != kFormatVersion)
        r.fail(ErrorCode::ParseError, root["format_version"], "format_version",
               "unsupported version " + std::to_string(version));
    const YAML::Node kind_node = r.child(root, "kind", "kind");
    DocumentKind kind;
    try {
        kind = parse_kind(r.scalar(kind_node, "kind"));
    } catch (const Error& e) {
        r.fail(ErrorCode::ParseError, kind_node, "kind", e.what());
    }
    const YAML::Node frame_node = r.child(root, "frame", "frame");
    Frame frame = r.validated(frame_node, "frame", [&] { return Frame(r.names(frame_node, "frame")); });

    std::vector<Warning> warnings;
    if (root["metadata"]) {
        const YAML::Node meta = root["metadata"];
        if (!meta.IsMap()) r.fail(ErrorCode::ParseError, meta, "metadata", "expected a mapping");
        check_keys(r, meta, {"warnings"}, "metadata");
        if (meta["warnings"]) {
            const YAML::Node ws = meta["warnings"];
            if (!ws.IsSequence()) r.fail(ErrorCode::ParseError, ws, "metadata.warnings", "expected a list");
            for (std::size_t i = 0; i < ws.size(); ++i) {
                const std::string f = "metadata.warnings[" + std::to_string(i) + "]";
                warnings.push_back({r.scalar(r.child(ws[i], "name", f + ".name"), f + ".name"),
                                    ws[i]["message"] ? r.scalar(ws[i]["message"], f + ".message") : ""});
            }
        }
    }

    const std::string key(kind_name(kind));
    for (auto other : {"probability", "mass", "possibility", "ocf", "partition"})
        if (other != key && root[other])
            r.fail(ErrorCode::ParseError, root[other], other, "payload does not match kind '" + key + "'");
    if (kind != DocumentKind::Partition && root["normalization"])
        r.fail(ErrorCode::ParseError, root["normalization"], "normalization", "only partition documents have one");
    const YAML::Node body = r.child(root, key, key);

    switch (kind) {
        case DocumentKind::Probability: {
            auto w = element_values(r, frame, body, key, 0.0);
            return make_document(r.validated(body, key, [&] { return ProbabilityMeasure(frame, w, tol); }), warnings);
        }
        case DocumentKind::Possibility: {
            auto v = element_values(r, frame, body, key, 0.0);
            if (has_warning(warnings, kUnnormalized))
                return make_document(
                    r.validated(body, key, [&] { return PossibilityDistribution::subnormal(frame, v); }), warnings);
            return make_document(r.validated(body, key, [&] { return PossibilityDistribution(frame, v, tol); }),
                                 warnings);
        }
        case DocumentKind::Ocf: {
            r.remember(body);
            if (!body.IsMap()) r.fail(ErrorCode::ParseError, body, key, "expected a mapping from element names to ranks");
            std::vector<std::optional<Rank>> ranks(frame.size());
            for (const auto& kv : body) {
                const std::string name = r.scalar(kv.first, key);
                const std::string sub = key + "." + name;
                if (!frame.contains(name))
                    r.fail(ErrorCode::UnknownElement, kv.first, sub, "'" + name + "' is not in the frame");
                const auto v = r.integer(kv.second, sub);
                if (v > kDefaultRankCap)
                    r.fail(ErrorCode::ValidationError, kv.second, sub, "ocf rank cap: " + std::to_string(v) + " > " +
                                                                            std::to_string(kDefaultRankCap));
                ranks[frame.index_of(name)] = static_cast<Rank>(v);
            }
            std::vector<Rank> out;
            for (std::size_t i = 0; i < ranks.size(); ++i) {
                if (!ranks[i]) r.fail(ErrorCode::ParseError, body, key + "." + frame.label(i), "missing");
                out.push_back(*ranks[i]);
            }
            return make_document(r.validated(body, key, [&] { return Ocf(frame, out); }), warnings);
        }
        case DocumentKind::Mass: {
            r.remember(body);
            if (!body.IsSequence()) r.fail(ErrorCode::ParseError, body, key, "expected a list of {subset, mass}");
            std::vector<Focal> focals;
            for (std::size_t i = 0; i < body.size(); ++i) {
                const std::string f = key + "[" + std::to_string(i) + "]";
                check_keys(r, body[i], {"subset", "mass"}, f);
                focals.push_back({r.subset(frame, r.child(body[i], "subset", f + ".subset"), f + ".subset"),
                                  r.decimal(r.child(body[i], "mass", f + ".mass"), f + ".mass")});
            }
            return make_document(r.validated(body, key, [&] { return MassFunction(frame, focals, tol); }), warnings);
        }
        case DocumentKind::Partition: {
            const YAML::Node mode_node = r.child(root, "normalization", "normalization");
            const std::string mode_name = r.scalar(mode_node, "normalization");
            if (mode_name != "sum" && mode_name != "max")
                r.fail(ErrorCode::ParseError, mode_node, "normalization", "expected 'sum' or 'max'");
            const auto mode = mode_name == "sum" ? PartitionNormalization::Sum : PartitionNormalization::Max;
            r.remember(body);
            if (!body.IsSequence()) r.fail(ErrorCode::ParseError, body, key, "expected a list of {cells, weight}");
            std::vector<PartitionCell> cells;
            for (std::size_t i = 0; i < body.size(); ++i) {
                const std::string f = key + "[" + std::to_string(i) + "]";
                check_keys(r, body[i], {"cells", "weight"}, f);
                cells.push_back({r.subset(frame, r.child(body[i], "cells", f + ".cells"), f + ".cells"),
                                 r.decimal(r.child(body[i], "weight", f + ".weight"), f + ".weight")});
            }
            return make_document(r.validated(body, key, [&] { return WeightedPartition(frame, cells, mode, tol); }),
                                 warnings);
        }
    }
    r.fail(ErrorCode::ParseError, root, "kind", "unhandled kind");
}

}  // namespace

KnowledgeDocument parse_document(const std::string& text, double tol, const std::string& source) {
    Reader r(source);
    return read_document(r, load_yaml(text, source), tol);
}

KnowledgeDocument load_document(const std::filesystem::path& path, double tol) {
    return parse_document(read_file(path), tol, path.string());
}

// ---- canonical output -------------------------------------------------------

namespace {

/// Decimal rounded to its canonical 12-significant-digit form.
double canonical(double x) { return std::strtod(format_decimal(x).c_str(), nullptr); }

json names_json(const Subset& s) {
    json a = json::array();
    for (const auto& n : s.sorted_names()) a.push_back(n);
    return a;
}

std::vector<std::size_t> sorted_indices(const Frame& f) {
    std::vector<std::size_t> idx(f.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f.label(a) < f.label(b); });
    return idx;
}

json element_map(const Frame& f, const std::function<json(std::size_t)>& value) {
    json m = json::object();
    for (auto i : sorted_indices(f)) m[f.label(i)] = value(i);
    return m;
}

json warnings_json(const std::vector<Warning>& ws) {
    json a = json::array();
    for (const auto& w : ws) a.push_back(json{{"name", w.name}, {"message", w.message}});
    return a;
}

bool all_scalars(const json& j) {
    return std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
}

void emit(YAML::Emitter& out, const json& j) {
    if (j.is_object()) {
        if (j.empty()) out << YAML::Flow;
        out << YAML::BeginMap;
        for (const auto& [k, v] : j.items()) {
            out << YAML::Key << k << YAML::Value;
            emit(out, v);
        }
        out << YAML::EndMap;
    } else if (j.is_array()) {
        if (all_scalars(j)) out << YAML::Flow;
        out << YAML::BeginSeq;
        for (const auto& v : j) emit(out, v);
        out << YAML::EndSeq;
    } else if (j.is_number_float()) {
        out << format_decimal(j.get<double>());
    } else if (j.is_number_unsigned()) {
        out << std::to_string(j.get<std::uint64_t>());
    } else if (j.is_number_integer()) {
        out << std::to_string(j.get<std::int64_t>());
    } else if (j.is_boolean()) {
        out << (j.get<bool>() ? "true" : "false");
    } else if (j.is_string()) {
        out << j.get<std::string>();
    } else {
        out << YAML::Null;
    }
}

std::string yaml_text(const json& j) {
    YAML::Emitter out;
    emit(out, j);
    return std::string(out.c_str()) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

json frame_json(const Frame& f) {
    json a = json::array();
    for (std::size_t i = 0; i < f.size(); ++i) a.push_back(f.label(i));
    return a;
}

}  // namespace

nlohmann::ordered_json to_json(const KnowledgeDocument& doc) {
    const Frame& f = doc.frame();
    json j;
    j["format_version"] = doc.format_version;
    j["kind"] = std::string(kind_name(doc.kind()));
    j["frame"] = frame_json(f);
    const std::string key(kind_name(doc.kind()));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ProbabilityMeasure>) {
                j[key] = element_map(f, [&](std::size_t i) { return json(canonical(p.weight(i))); });
            } else if constexpr (std::is_same_v<T, PossibilityDistribution>) {
                j[key] = element_map(f, [&](std::size_t i) { return json(canonical(p.value(i))); });
            } else if constexpr (std::is_same_v<T, Ocf>) {
                j[key] = element_map(f, [&](std::size_t i) { return json(p.rank(i)); });
            } else if constexpr (std::is_same_v<T, MassFunction>) {
                json a = json::array();
                for (const auto& fc : p.focals()) a.push_back(json{{"subset", names_json(fc.set)}, {"mass", canonical(fc.mass)}});
                j[key] = a;
            } else {
                j["normalization"] = p.mode() == PartitionNormalization::Sum ? "sum" : "max";
                auto cells = p.cells();
                std::sort(cells.begin(), cells.end(),
                          [](const auto& a, const auto& b) { return a.set.sorted_names() < b.set.sorted_names(); });
                json a = json::array();
                for (const auto& c : cells) a.push_back(json{{"cells", names_json(c.set)}, {"weight", canonical(c.weight)}});
                j[key] = a;
            }
        },
        doc.payload);
    if (!doc.warnings.empty()) j["metadata"] = json{{"warnings", warnings_json(doc.warnings)}};
    return j;
}

std::string to_text(const KnowledgeDocument& doc) { return yaml_text(to_json(doc)); }

void save_document(const KnowledgeDocument& doc, const std::filesystem::path& path) { write_file(path, to_text(doc)); }

Subset parse_event(const Frame& frame, const std::string& list) {
    std::vector<std::string> names;
    std::stringstream ss(list);
    for (std::string part; std::getline(ss, part, ',');) {
        part.erase(0, part.find_first_not_of(" \t"));
        part.erase(part.find_last_not_of(" \t") + 1);
        if (!part.empty()) names.push_back(part);
    }
    return frame.subset_of(names);
}

// ---- operations -------------------------------------------------------------

namespace {

using K = DocumentKind;

struct Outcome {
    Payload payload;
    std::vector<Warning> warnings;
};

using OpFn = std::function<Outcome(const KnowledgeDocument&, const PipelineStep&, double)>;

struct OpEntry {
    OperationInfo info;
    OpFn fn;
};

const std::string& param(const PipelineStep& s, const std::string& name) {
    auto it = s.params.find(name);
    if (it == s.params.end()) throw Error(ErrorCode::InvalidArgument, s.op + " needs parameter '" + name + "'");
    return it->second;
}

std::optional<std::string> opt_param(const PipelineStep& s, const std::string& name) {
    auto it = s.params.find(name);
    if (it == s.params.end()) return std::nullopt;
    return it->second;
}

double decimal_param(const PipelineStep& s, const std::string& name) {
    const std::string& v = param(s, name);
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw Error(ErrorCode::InvalidArgument, s.op + ": parameter '" + name + "' is not a decimal: '" + v + "'");
    return x;
}

Rank rank_param(const PipelineStep& s, const std::string& name) {
    const std::string& v = param(s, name);
    std::uint64_t x = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size() || x > kDefaultRankCap)
        throw Error(ErrorCode::InvalidArgument, s.op + ": parameter '" + name + "' is not a rank: '" + v + "'");
    return static_cast<Rank>(x);
}

Subset on(const KnowledgeDocument& d, const PipelineStep& s) { return parse_event(d.frame(), param(s, "on")); }

const KnowledgeDocument& observation(const PipelineStep& s) {
    if (!s.observation) throw Error(ErrorCode::InvalidArgument, s.op + " needs an observation");
    return *s.observation;
}

MassFunction as_mass(const KnowledgeDocument& d) {
    if (const auto* m = std::get_if<MassFunction>(&d.payload)) return *m;
    if (const auto* p = std::get_if<ProbabilityMeasure>(&d.payload)) return MassFunction::bayesian(*p);
    if (const auto* w = std::get_if<WeightedPartition>(&d.payload)) {
        if (w->mode() != PartitionNormalization::Sum)
            throw Error(ErrorCode::WeightNormalization, "a partition read as masses needs weights summing to 1");
        std::vector<Focal> f;
        for (const auto& c : w->cells()) f.push_back({c.set, c.weight});
        return MassFunction(w->frame(), std::move(f));
    }
    throw Error(ErrorCode::KindMismatch, "a " + std::string(kind_name(d.kind())) + " document cannot be read as masses");
}

SpohnObservation as_spohn(const KnowledgeDocument& d) {
    if (const auto* w = std::get_if<WeightedPartition>(&d.payload)) return SpohnObservation(*w);
    if (const auto* p = std::get_if<PossibilityDistribution>(&d.payload)) return SpohnObservation::singletons(*p);
    throw Error(ErrorCode::KindMismatch, "a Spohn observation is a partition or possibility document");
}

const std::vector<OpEntry>& operations() {
    static const std::vector<OpEntry> table = {
        {{"bayes_condition", {K::Probability}, {}, {"on"}, "P(. | on)"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             return Outcome{bayes_condition(std::get<ProbabilityMeasure>(d.payload), on(d, s), tol), {}};
         }},
        {{"jeffrey_update", {K::Probability}, {K::Partition}, {}, "Jeffrey's rule on a weighted partition"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             return Outcome{jeffrey_update(std::get<ProbabilityMeasure>(d.payload),
                                           std::get<WeightedPartition>(observation(s).payload), tol),
                            {}};
         }},
        {{"to_mass", {K::Probability}, {}, {}, "the Bayesian mass function of a probability"},
         [](const KnowledgeDocument& d, const PipelineStep&, double) {
             return Outcome{MassFunction::bayesian(std::get<ProbabilityMeasure>(d.payload)), {}};
         }},
        {{"dempster_condition", {K::Mass}, {}, {"on"}, "Dempster conditioning"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             return Outcome{dempster_condition(std::get<MassFunction>(d.payload), on(d, s), tol), {}};
         }},
        {{"geometric_condition", {K::Mass}, {}, {"on"}, "geometric conditioning"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             return Outcome{geometric_condition(std::get<MassFunction>(d.payload), on(d, s), tol), {}};
         }},
        {{"dempster_combine", {K::Mass, K::Probability}, {K::Mass, K::Probability}, {}, "Dempster's rule of combination"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             return Outcome{dempster_combine(as_mass(d), as_mass(observation(s)), tol), {}};
         }},
        {{"jeffrey_ds_update", {K::Mass, K::Probability}, {K::Mass, K::Probability, K::Partition}, {"inner"},
          "extended Jeffrey rule; inner = dempster | geometric"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             const auto inner = parse_conditioning_rule(opt_param(s, "inner").value_or("dempster"));
             return Outcome{jeffrey_ds_update(as_mass(d), as_mass(observation(s)), inner, tol), {}};
         }},
        {{"poss_condition", {K::Possibility}, {}, {"on"}, "possibilistic conditioning"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             return Outcome{poss_condition(std::get<PossibilityDistribution>(d.payload), on(d, s), tol), {}};
         }},
        {{"poss_combine", {K::Possibility}, {K::Possibility}, {"op"}, "normalized conjunction; op = min | product | lukasiewicz"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             const auto op = parse_conjunction_op(opt_param(s, "op").value_or("min"));
             return Outcome{poss_combine(std::get<PossibilityDistribution>(d.payload),
                                         std::get<PossibilityDistribution>(observation(s).payload), op, tol),
                            {}};
         }},
        {{"poss_jeffrey_update", {K::Possibility}, {K::Possibility}, {"outer"},
          "possibilistic counterpart of Jeffrey's rule; outer = min | product"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             const std::string outer = opt_param(s, "outer").value_or("min");
             if (outer != "min" && outer != "product")
                 throw Error(ErrorCode::InvalidArgument, "outer must be min or product, got '" + outer + "'");
             auto r = poss_jeffrey_update(std::get<PossibilityDistribution>(d.payload),
                                          std::get<PossibilityDistribution>(observation(s).payload),
                                          outer == "min" ? JeffreyCombination::Min : JeffreyCombination::Product, tol);
             return Outcome{std::move(r.posterior), std::move(r.warnings)};
         }},
        {{"poss_update_crisp_with_doubt", {K::Possibility}, {}, {"on", "lambda"},
          "update on a crisp observation held with doubt lambda"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             return Outcome{poss_update_crisp_with_doubt(std::get<PossibilityDistribution>(d.payload), on(d, s),
                                                         decimal_param(s, "lambda"), tol),
                            {}};
         }},
        {{"spohn_partition_update", {K::Possibility, K::Ocf}, {K::Partition, K::Possibility}, {},
          "Spohn's rule on a max-normalized weighted partition"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             const auto obs = as_spohn(observation(s));
             if (const auto* k = std::get_if<Ocf>(&d.payload)) return Outcome{spohn_partition_update(*k, obs, tol), {}};
             return Outcome{spohn_partition_update(std::get<PossibilityDistribution>(d.payload), obs, tol), {}};
         }},
        {{"possibility_to_ocf", {K::Possibility}, {}, {"delta"}, "ranks -ln pi, which must lie on the integer grid"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double tol) {
             const double delta = s.params.count("delta") ? decimal_param(s, "delta") : kDefaultRankGridTolerance;
             return Outcome{possibility_to_ocf(std::get<PossibilityDistribution>(d.payload), delta, tol), {}};
         }},
        {{"ocf_conditionalize", {K::Ocf}, {}, {"on", "shift"}, "(A,n)-conditionalization"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double) {
             return Outcome{ocf_conditionalize(std::get<Ocf>(d.payload), on(d, s), rank_param(s, "shift")), {}};
         }},
        {{"ocf_a_part", {K::Ocf}, {}, {"on"}, "the A-part, rendered as exp(-rank) with 0 off A"},
         [](const KnowledgeDocument& d, const PipelineStep& s, double) {
             return Outcome{ocf_to_possibility(ocf_a_part(std::get<Ocf>(d.payload), on(d, s))), {}};
         }},
        {{"ocf_to_possibility", {K::Ocf}, {}, {}, "pi = exp(-rank)"},
         [](const KnowledgeDocument& d, const PipelineStep&, double) {
             return Outcome{ocf_to_possibility(std::get<Ocf>(d.payload)), {}};
         }},
    };
    return table;
}

const OpEntry& find_op(const std::string& name) {
    for (const auto& e : operations())
        if (e.info.name == name) return e;
    throw Error(ErrorCode::UnknownRule, "unknown operation '" + name + "'");
}

std::string kinds_list(const std::vector<DocumentKind>& ks) {
    std::string s;
    for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? (i + 1 == ks.size() ? " or " : ", ") : "") + std::string(kind_name(ks[i]));
    return s;
}

void check_step(const OpEntry& e, const PipelineStep& s) {
    for (const auto& [k, v] : s.params)
        if (std::find(e.info.params.begin(), e.info.params.end(), k) == e.info.params.end())
            throw Error(ErrorCode::InvalidArgument, s.op + " has no parameter '" + k + "'");
    for (const char* required : {"on", "shift", "lambda"})
        if (std::find(e.info.params.begin(), e.info.params.end(), required) != e.info.params.end() &&
            !s.params.count(required))
            throw Error(ErrorCode::InvalidArgument, s.op + " needs parameter '" + required + "'");
    if (e.info.observations.empty() && s.observation)
        throw Error(ErrorCode::InvalidArgument, s.op + " takes no observation");
    if (!e.info.observations.empty()) {
        if (!s.observation) throw Error(ErrorCode::InvalidArgument, s.op + " needs an observation");
        const auto k = s.observation->kind();
        if (std::find(e.info.observations.begin(), e.info.observations.end(), k) == e.info.observations.end())
            throw Error(ErrorCode::KindMismatch, s.op + " needs a " + kinds_list(e.info.observations) +
                                                     " observation, got " + std::string(kind_name(k)));
    }
}

}  // namespace

const std::vector<OperationInfo>& pipeline_operations() {
    static const std::vector<OperationInfo> infos = [] {
        std::vector<OperationInfo> out;
        for (const auto& e : operations()) out.push_back(e.info);
        return out;
    }();
    return infos;
}

KnowledgeDocument apply_operation(const KnowledgeDocument& state, const PipelineStep& step, double tol) {
    const auto& e = find_op(step.op);
    const auto kind = state.kind();
    if (std::find(e.info.accepts.begin(), e.info.accepts.end(), kind) == e.info.accepts.end())
        throw Error(ErrorCode::KindMismatch, step.op + " needs a " + kinds_list(e.info.accepts) + " state, got " +
                                                 std::string(kind_name(kind)));
    check_step(e, step);
    auto out = e.fn(state, step, tol);
    return make_document(std::move(out.payload), std::move(out.warnings));
}

std::vector<std::pair<std::string, std::string>> summarize(const KnowledgeDocument& doc) {
    std::vector<std::pair<std::string, std::string>> s;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ProbabilityMeasure>) {
                const auto& w = p.weights();
                std::vector<std::string> support;
                for (std::size_t i = 0; i < w.size(); ++i)
                    if (w[i] > 0.0) support.push_back(p.frame().label(i));
                s.emplace_back("support", p.frame().subset_of(support).to_string());
                s.emplace_back("max_weight", format_decimal(*std::max_element(w.begin(), w.end())));
            } else if constexpr (std::is_same_v<T, MassFunction>) {
                double top = 0.0;
                for (const auto& f : p.focals()) top = std::max(top, f.mass);
                s.emplace_back("focal_count", std::to_string(p.focals().size()));
                s.emplace_back("max_mass", format_decimal(top));
                s.emplace_back("bayesian", p.is_bayesian() ? "true" : "false");
            } else if constexpr (std::is_same_v<T, PossibilityDistribution>) {
                s.emplace_back("height", format_decimal(p.height()));
                s.emplace_back("core", p.core().to_string());
                s.emplace_back("support", p.support().to_string());
            } else if constexpr (std::is_same_v<T, Ocf>) {
                std::vector<std::string> zero;
                Rank top = 0;
                for (std::size_t i = 0; i < p.ranks().size(); ++i) {
                    if (p.rank(i) == 0) zero.push_back(p.frame().label(i));
                    top = std::max(top, p.rank(i));
                }
                s.emplace_back("rank_zero", p.frame().subset_of(zero).to_string());
                s.emplace_back("max_rank", std::to_string(top));
            } else {
                s.emplace_back("cells", std::to_string(p.cells().size()));
                s.emplace_back("normalization", p.mode() == PartitionNormalization::Sum ? "sum" : "max");
            }
        },
        doc.payload);
    return s;
}

PipelineResult run_pipeline(const KnowledgeDocument& prior, const PipelineDocument& pipeline, double tol) {
    PipelineResult result{prior, {}};
    for (std::size_t i = 0; i < pipeline.steps.size(); ++i) {
        const auto& step = pipeline.steps[i];
        StepRecord rec{i + 1, step.op, step.params, result.posterior.kind(), result.posterior.kind(), {}, {}};
        try {
            result.posterior = apply_operation(result.posterior, step, tol);
        } catch (const Error& e) {
            throw Error(e.code(), "step " + std::to_string(i + 1) + " (" + step.op + "): " + e.what());
        }
        rec.output_kind = result.posterior.kind();
        rec.warnings = result.posterior.warnings;
        rec.summary = summarize(result.posterior);
        result.log.push_back(std::move(rec));
    }
    return result;
}

// ---- pipeline parsing -------------------------------------------------------

namespace {

KnowledgeDocument read_observation(Reader& r, const YAML::Node& node, const std::filesystem::path& base, double tol,
                                   const std::string& field) {
    r.remember(node);
    if (node.IsMap() && node["file"]) {
        check_keys(r, node, {"file"}, field);
        std::filesystem::path p = r.scalar(node["file"], field + ".file");
        if (p.is_relative()) p = base / p;
        return load_document(p, tol);
    }
    return read_document(r, node, tol);
}

std::string param_text(Reader& r, const YAML::Node& v, const std::string& field) {
    if (v.IsSequence()) {
        std::string joined;
        for (const auto& n : r.names(v, field)) joined += (joined.empty() ? "" : ",") + n;
        return joined;
    }
    return r.scalar(v, field);
}

}  // namespace

PipelineDocument parse_pipeline(const std::string& text, const std::filesystem::path& base_dir, double tol,
                                const std::string& source) {
    Reader r(source);
    const YAML::Node root = load_yaml(text, source);
    if (!root.IsMap()) r.fail(ErrorCode::ParseError, root, "<pipeline>", "expected a mapping");
    check_keys(r, root, {"format_version", "steps"}, "");
    PipelineDocument doc;
    if (root["format_version"]) {
        const auto v = r.integer(root["format_version"], "format_version");
        if (v != kFormatVersion)
            r.fail(ErrorCode::ParseError, root["format_version"], "format_version", "unsupported version " + std::to_string(v));
    }
    const YAML::Node steps = r.child(root, "steps", "steps");
    if (!steps.IsSequence()) r.fail(ErrorCode::ParseError, steps, "steps", "expected a list");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string f = "steps[" + std::to_string(i) + "]";
        const YAML::Node s = steps[i];
        if (!s.IsMap()) r.fail(ErrorCode::ParseError, s, f, "expected a mapping");
        PipelineStep step;
        step.op = r.scalar(r.child(s, "op", f + ".op"), f + ".op");
        const OpEntry* entry = nullptr;
        try {
            entry = &find_op(step.op);
        } catch (const Error& e) {
            r.fail(ErrorCode::UnknownRule, s["op"], f + ".op", e.what());
        }
        for (const auto& kv : s) {
            const std::string key = kv.first.Scalar();
            if (key == "op") continue;
            if (key == "observation") {
                step.observation = read_observation(r, kv.second, base_dir, tol, f + ".observation");
                continue;
            }
            step.params[key] = param_text(r, kv.second, f + "." + key);
        }
        try {
            check_step(*entry, step);
        } catch (const Error& e) {
            r.fail(e.code(), s, f, e.what());
        }
        doc.steps.push_back(std::move(step));
    }
    return doc;
}

PipelineDocument load_pipeline(const std::filesystem::path& path, double tol) {
    return parse_pipeline(read_file(path), path.parent_path().empty() ? "." : path.parent_path(), tol, path.string());
}

nlohmann::ordered_json to_json(const StepRecord& step) {
    json j;
    j["step"] = step.index;
    j["op"] = step.op;
    json params = json::object();
    for (const auto& [k, v] : step.params) params[k] = v;
    j["params"] = params;
    j["input_kind"] = std::string(kind_name(step.input_kind));
    j["output_kind"] = std::string(kind_name(step.output_kind));
    j["warnings"] = warnings_json(step.warnings);
    json summary = json::object();
    for (const auto& [k, v] : step.summary) summary[k] = v;
    j["summary"] = summary;
    return j;
}

nlohmann::ordered_json to_json(const PipelineResult& result) {
    json log = json::array();
    for (const auto& s : result.log) log.push_back(to_json(s));
    return json{{"log", log}, {"posterior", to_json(result.posterior)}};
}

std::string to_text(const PipelineResult& result) {
    std::ostringstream os;
    for (const auto& s : result.log) {
        os << "step " << s.index << ": " << s.op;
        for (const auto& [k, v] : s.params) os << " " << k << "=" << v;
        os << "  [" << kind_name(s.input_kind) << " -> " << kind_name(s.output_kind) << "]\n";
        for (const auto& [k, v] : s.summary) os << "  " << k << ": " << v << "\n";
        for (const auto& w : s.warnings) os << "  warning " << w.name << ": " << w.message << "\n";
    }
    os << "posterior:\n" << to_text(result.posterior);
    return os.str();
}

// ---- specs and reports ------------------------------------------------------

namespace {

RuleRef read_rule(Reader& r, const YAML::Node& n, const std::string& field) {
    r.remember(n);
    if (n.IsScalar()) return {n.Scalar(), {}};
    if (!n.IsMap()) r.fail(ErrorCode::ParseError, n, field, "expected a rule name or {name, params}");
    check_keys(r, n, {"name", "params"}, field);
    RuleRef ref{r.scalar(r.child(n, "name", field + ".name"), field + ".name"), {}};
    if (n["params"]) {
        if (!n["params"].IsMap()) r.fail(ErrorCode::ParseError, n["params"], field + ".params", "expected a mapping");
        for (const auto& kv : n["params"])
            ref.params[kv.first.Scalar()] = r.scalar(kv.second, field + ".params." + kv.first.Scalar());
    }
    return ref;
}

std::string metric_name(DeviationMetric m) { return m == DeviationMetric::Absolute ? "absolute" : "relative"; }

json rule_json(const RuleRef& r) {
    json p = json::object();
    for (const auto& [k, v] : r.params) p[k] = v;
    return json{{"name", r.name}, {"params", p}};
}

}  // namespace

CoincidenceSpec parse_coincidence_spec(const std::string& text, const std::string& source) {
    Reader r(source);
    const YAML::Node root = load_yaml(text, source);
    if (!root.IsMap()) r.fail(ErrorCode::ParseError, root, "<spec>", "expected a mapping");
    check_keys(r, root, {"name", "claim", "rule_a", "rule_b", "family", "seed", "tolerance", "metric"}, "");
    CoincidenceSpec spec;
    spec.name = r.scalar(r.child(root, "name", "name"), "name");
    if (root["claim"]) spec.claim = r.scalar(root["claim"], "claim");
    spec.rule_a = read_rule(r, r.child(root, "rule_a", "rule_a"), "rule_a");
    spec.rule_b = read_rule(r, r.child(root, "rule_b", "rule_b"), "rule_b");
    const YAML::Node fam = r.child(root, "family", "family");
    if (fam.IsScalar()) {
        spec.family.constraint = fam.Scalar();
    } else {
        check_keys(r, fam, {"constraint", "min_frame_size", "max_frame_size", "max_focals", "count"}, "family");
        spec.family.constraint = r.scalar(r.child(fam, "constraint", "family.constraint"), "family.constraint");
        if (fam["min_frame_size"]) spec.family.min_frame_size = r.integer(fam["min_frame_size"], "family.min_frame_size");
        if (fam["max_frame_size"]) spec.family.max_frame_size = r.integer(fam["max_frame_size"], "family.max_frame_size");
        if (fam["max_focals"]) spec.family.max_focals = r.integer(fam["max_focals"], "family.max_focals");
        if (fam["count"]) spec.family.count = r.integer(fam["count"], "family.count");
    }
    if (root["seed"]) spec.seed = r.integer(root["seed"], "seed");
    if (root["tolerance"]) spec.tolerance = r.decimal(root["tolerance"], "tolerance");
    if (root["metric"]) {
        const std::string m = r.scalar(root["metric"], "metric");
        if (m != "absolute" && m != "relative") r.fail(ErrorCode::ParseError, root["metric"], "metric", "expected absolute or relative");
        spec.metric = m == "absolute" ? DeviationMetric::Absolute : DeviationMetric::Relative;
    }
    return spec;
}

std::string to_text(const CoincidenceSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["claim"] = spec.claim;
    j["rule_a"] = rule_json(spec.rule_a);
    j["rule_b"] = rule_json(spec.rule_b);
    j["family"] = json{{"constraint", spec.family.constraint},
                       {"min_frame_size", spec.family.min_frame_size},
                       {"max_frame_size", spec.family.max_frame_size},
                       {"max_focals", spec.family.max_focals},
                       {"count", spec.family.count}};
    j["seed"] = spec.seed;
    j["tolerance"] = spec.tolerance;
    j["metric"] = metric_name(spec.metric);
    return yaml_text(j);
}

nlohmann::ordered_json to_json(const ComparisonReport& r) {
    json j;
    j["name"] = r.spec_name;
    j["claim"] = r.claim;
    j["rule_a"] = r.rule_a;
    j["rule_b"] = r.rule_b;
    j["family"] = r.family;
    j["seed"] = r.seed;
    j["tolerance"] = r.tolerance;
    j["metric"] = metric_name(r.metric);
    j["instances"] = r.instances;
    j["compared_values"] = r.compared_values;
    j["max_deviation"] = std::isfinite(r.max_deviation) ? json(r.max_deviation) : json("inf");
    j["passed"] = r.passed;
    if (r.witness_index) {
        j["witness"] = json{{"index", *r.witness_index}, {"instance", r.witness}, {"message", r.failure_message}};
    }
    return j;
}

std::string to_text(const ComparisonReport& r) {
    std::ostringstream os;
    os << (r.passed ? "PASS " : "FAIL ") << r.spec_name << ": " << r.rule_a << " vs " << r.rule_b << " on "
       << r.family << " (" << r.instances << " instances, " << r.compared_values << " values, seed " << r.seed
       << ") max " << metric_name(r.metric) << " deviation " << format_decimal(r.max_deviation) << " tolerance "
       << format_decimal(r.tolerance) << "\n";
    if (r.witness_index)
        os << "  witness #" << *r.witness_index << ": " << r.witness << "\n  " << r.failure_message << "\n";
    return os.str();
}

nlohmann::ordered_json to_json(const RuleComparison& c) {
    const Frame& f = c.prior.frame();
    json rows = json::array();
    for (std::size_t i = 0; i < f.size(); ++i)
        rows.push_back(json{{"element", f.label(i)},
                            {"prior", canonical(c.prior.value(i))},
                            {"observation", canonical(c.observation.value(i))},
                            {"spohn", canonical(c.spohn.value(i))},
                            {"possibilistic", canonical(c.possibilistic.value(i))},
                            {"difference", canonical(c.difference[i])}});
    json j;
    j["frame"] = frame_json(f);
    j["rows"] = rows;
    j["max_divergence"] = canonical(c.max_divergence);
    j["flags"] = json{{"observation_dominates_prior", c.observation_dominates_prior},
                      {"observation_within_prior", c.observation_within_prior},
                      {"cores_overlap", c.cores_overlap},
                      {"possibilistic_keeps_prior", c.possibilistic_keeps_prior},
                      {"spohn_adopts_observation", c.spohn_adopts_observation}};
    j["possibilistic_warnings"] = warnings_json(c.possibilistic_warnings);
    return j;
}

std::string to_text(const RuleComparison& c) {
    const Frame& f = c.prior.frame();
    std::size_t w = 7;
    for (std::size_t i = 0; i < f.size(); ++i) w = std::max(w, f.label(i).size());
    std::ostringstream os;
    auto cell = [&](const std::string& s, std::size_t width) {
        os << s << std::string(width > s.size() ? width - s.size() : 1, ' ');
    };
    cell("element", w + 2);
    for (auto h : {"prior", "obs", "spohn", "possib.", "spohn-poss"}) cell(h, 19);
    os << "\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        cell(f.label(i), w + 2);
        for (double v : {c.prior.value(i), c.observation.value(i), c.spohn.value(i), c.possibilistic.value(i),
                         c.difference[i]})
            cell(format_decimal(v), 19);
        os << "\n";
    }
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    os << "max divergence: " << format_decimal(c.max_divergence) << "\n"
       << "observation dominates prior (pi2 >= pi1): " << yn(c.observation_dominates_prior) << "\n"
       << "observation within prior (pi2 <= pi1):    " << yn(c.observation_within_prior) << "\n"
       << "cores overlap:                            " << yn(c.cores_overlap) << "\n"
       << "possibilistic rule keeps the prior:       " << yn(c.possibilistic_keeps_prior) << "\n"
       << "Spohn's rule adopts the observation:      " << yn(c.spohn_adopts_observation) << "\n";
    for (const auto& wr : c.possibilistic_warnings) os << "warning " << wr.name << ": " << wr.message << "\n";
    return os.str();
}

}  // namespace beliefkit

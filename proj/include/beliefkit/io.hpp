#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "beliefkit/compare.hpp"
#include "beliefkit/evidence.hpp"
#include "beliefkit/ocf.hpp"
#include "beliefkit/possibility.hpp"
#include "beliefkit/probability.hpp"

namespace beliefkit {

inline constexpr int kFormatVersion = 1;

enum class DocumentKind { Probability, Mass, Possibility, Ocf, Partition };

std::string_view kind_name(DocumentKind kind);
DocumentKind parse_kind(std::string_view name);

using Payload = std::variant<ProbabilityMeasure, MassFunction, PossibilityDistribution, Ocf, WeightedPartition>;

/// A frame plus exactly one state or observation. Partition documents carry
/// weighted partitions (Jeffrey or Spohn observations).
struct KnowledgeDocument {
    int format_version = kFormatVersion;
    Payload payload;
    /// Carried in `metadata.warnings`; an UnnormalizedResult warning is what
    /// lets a subnormal possibility distribution load.
    std::vector<Warning> warnings;

    DocumentKind kind() const;
    const Frame& frame() const;
};

KnowledgeDocument make_document(Payload payload, std::vector<Warning> warnings = {});

/// Parses the structured text format. `source` names the input in messages.
/// ParseError messages carry "line N" and the dotted field path;
/// ValidationError messages name the violated invariant.
KnowledgeDocument parse_document(const std::string& text, double tol = kDefaultTolerance,
                                 const std::string& source = "<input>");
KnowledgeDocument load_document(const std::filesystem::path& path, double tol = kDefaultTolerance);

/// Canonical serialization: fixed key order, sorted element names,
/// decimals with at most 12 significant digits.
std::string to_text(const KnowledgeDocument& doc);
void save_document(const KnowledgeDocument& doc, const std::filesystem::path& path);

nlohmann::ordered_json to_json(const KnowledgeDocument& doc);

// ---- pipelines --------------------------------------------------------------

struct PipelineStep {
    std::string op;
    std::map<std::string, std::string> params;
    std::optional<KnowledgeDocument> observation;
};

struct PipelineDocument {
    int format_version = kFormatVersion;
    std::vector<PipelineStep> steps;
};

/// Observation payloads may be inline documents or `{file: path}`; relative
/// paths resolve against `base_dir`.
PipelineDocument parse_pipeline(const std::string& text, const std::filesystem::path& base_dir = ".",
                                double tol = kDefaultTolerance, const std::string& source = "<pipeline>");
PipelineDocument load_pipeline(const std::filesystem::path& path, double tol = kDefaultTolerance);

struct StepRecord {
    std::size_t index = 0;
    std::string op;
    std::map<std::string, std::string> params;
    DocumentKind input_kind = DocumentKind::Mass;
    DocumentKind output_kind = DocumentKind::Mass;
    std::vector<Warning> warnings;
    /// Summary statistics of the state after the step.
    std::vector<std::pair<std::string, std::string>> summary;
};

struct PipelineResult {
    KnowledgeDocument posterior;
    std::vector<StepRecord> log;
};

struct OperationInfo {
    std::string name;
    std::vector<DocumentKind> accepts;
    /// Accepted observation kinds; empty when the step takes no observation.
    std::vector<DocumentKind> observations;
    std::vector<std::string> params;
    std::string summary;
};

const std::vector<OperationInfo>& pipeline_operations();

/// Applies the steps in order. KindMismatch when a step does not accept the
/// current state; any rule error aborts with its own code and "step N (op)"
/// prefixed to the message (steps count from 1).
PipelineResult run_pipeline(const KnowledgeDocument& prior, const PipelineDocument& pipeline,
                            double tol = kDefaultTolerance);

/// Applies one operation; the building block of run_pipeline and the CLI.
KnowledgeDocument apply_operation(const KnowledgeDocument& state, const PipelineStep& step,
                                  double tol = kDefaultTolerance);

std::vector<std::pair<std::string, std::string>> summarize(const KnowledgeDocument& doc);

std::string to_text(const PipelineResult& result);
nlohmann::ordered_json to_json(const PipelineResult& result);
nlohmann::ordered_json to_json(const StepRecord& step);

// ---- comparison specs and reports -------------------------------------------

/// Reads a coincidence spec written in the pipeline format:
/// `{name, claim, rule_a: {name, params}, rule_b, family: {...}, seed, tolerance, metric}`.
CoincidenceSpec parse_coincidence_spec(const std::string& text, const std::string& source = "<spec>");
std::string to_text(const CoincidenceSpec& spec);

std::string to_text(const ComparisonReport& report);
nlohmann::ordered_json to_json(const ComparisonReport& report);

std::string to_text(const RuleComparison& cmp);
nlohmann::ordered_json to_json(const RuleComparison& cmp);

/// Element names joined by commas, e.g. "a,b". An empty or blank list is the empty set.
Subset parse_event(const Frame& frame, const std::string& list);

}  // namespace beliefkit

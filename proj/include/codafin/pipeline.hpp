#pragma once

// End-to-end analysis: impute -> clr -> select k -> final k-means ->
// grouped center ratios -> cluster/covariate associations.

#include "codafin/association.hpp"
#include "codafin/clustering.hpp"
#include "codafin/config.hpp"
#include "codafin/errors.hpp"
#include "codafin/imputation.hpp"
#include "codafin/ingest.hpp"
#include "codafin/ratios.hpp"

#include <optional>
#include <string>
#include <vector>

namespace codafin {

// Error raised by a pipeline stage; keeps the category of the cause.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause)
        : Error(cause.kind(), "stage " + stage + ": " + cause.what()), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PipelineStages {
    bool cluster = true;
    bool ratios = true;
    bool associate = true;
};

enum class ImputationMethod { none, em, multiplicative_fallback };
std::string_view to_string(ImputationMethod m);

struct ImputationSummary {
    ZeroPattern pattern;
    DetectionLimits limits;
    EmReport em;
    ImputationMethod method = ImputationMethod::none;
};

struct CovariateAssociation {
    Covariate covariate;
    ContingencyTable table;
    ChiSquare chi_square;  // informational
    MosaicGeometry mosaic;
};

struct GroupedTable {
    GroupKey key;
    std::vector<GroupRatios> groups;
};

struct RunResult {
    RunConfig config;
    std::string input_sha256;
    std::size_t ingested = 0;
    std::vector<ExcludedRow> excluded;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;

    std::vector<FirmYearRecord> records;  // imputed, strictly positive
    ImputationSummary imputation;

    std::optional<ClrMatrix> clr;
    std::optional<KSelectionReport> selection;
    std::optional<ClusterModel> model;
    std::vector<int> cluster_labels;  // 1-based, aligned with records
    std::optional<SilhouetteResult> silhouette;
    std::optional<CalinskiHarabasz> calinski_harabasz;

    std::vector<GroupedTable> grouped;
    std::vector<ClusterProfile> profiles;
    std::vector<CovariateAssociation> associations;
    std::vector<BoxplotSummary> employees;
    bool employees_requested = false;
};

// Throws StageError; EM non-convergence falls back to multiplicative
// replacement and is recorded in the result notes.
RunResult run_pipeline(const Dataset& dataset, const RunConfig& config,
                       const PipelineStages& stages = {});

}  // namespace codafin

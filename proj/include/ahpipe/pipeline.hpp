#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ahpipe/committee.hpp"
#include "ahpipe/ensemble_pso.hpp"

namespace ahpipe {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance record written alongside every command's outputs.
struct RunManifestInfo {
    std::string command_line;
    nlohmann::json config_snapshot;
    uint64_t seed = 0;
    std::map<std::string, std::string> input_digests;
    std::vector<std::string> outputs;
    double wall_time_seconds = 0.0;
    nlohmann::json extra;  // e.g. stage statuses
};

void write_run_manifest(const std::string& path, const RunManifestInfo& info);

struct StageStatus {
    std::string name;
    bool cached = false;
    std::string digest;
};

struct PipelineOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<uint64_t> seed_override;
    int threads = 1;
    bool quiet = false;
    std::string command_line;
};

struct PipelineOutcome {
    std::vector<StageStatus> stages;
    std::string committee_path;
    std::vector<std::string> lambda_report_paths;
    std::string summary_path;
};

// Runs features -> candidates -> committee -> per-lambda PSO -> summary,
// caching each stage by a digest of its inputs and configuration. All
// referenced inputs are validated before anything is written.
PipelineOutcome run_pipeline(const PipelineOptions& opts, std::ostream& log);

// Loads every "<combo>_<algo>.csv" score file from a directory (sorted by
// filename) into samples.scores and returns the candidate list.
std::vector<Candidate> load_candidate_dir(const std::string& dir, SampleSet& samples);

// Restriction of a full vote matrix to one split's columns.
VoteMatrix votes_for_split(const VoteMatrix& full, const SampleSet& samples, Split split);

// Per-split metric report for a weighted hard-voting ensemble: predictions
// follow the hard-vote rule, the BCE term uses the weighted vote share.
MetricReport ensemble_metrics(const VoteMatrix& votes, const std::vector<int>& labels,
                              const WeightVector& weights);

nlohmann::json lambda_report_json(const PsoResult& result, const std::vector<CommitteeMember>& members,
                                  const VoteMatrix& votes_train, const VoteMatrix& votes_val,
                                  const VoteMatrix& votes_test, const std::vector<int>& labels_train,
                                  const std::vector<int>& labels_val,
                                  const std::vector<int>& labels_test);

}  // namespace ahpipe

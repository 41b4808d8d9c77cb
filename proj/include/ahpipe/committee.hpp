#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ahpipe/data_model.hpp"
#include "ahpipe/metrics.hpp"

namespace ahpipe {

// One trained model competing for a modality combination. Scores cover all
// splits and are aligned with the owning SampleSet's ids.
struct Candidate {
    ComboMask combo;
    std::string algorithm;
    std::vector<double> scores;

    std::string score_key() const { return combo.to_string() + "_" + algorithm; }
};

// Winning candidate for one combination plus its fitted decision threshold.
struct CommitteeMember {
    ComboMask combo;
    std::string algorithm;
    double threshold = 0.5;
    double val_bce = 0.0;
    double val_f1 = 0.0;

    std::string score_key() const { return combo.to_string() + "_" + algorithm; }
};

// All 15 non-empty combinations in ascending mask order:
// {text} first, {text,audio,video,stats} last.
std::vector<ComboMask> enumerate_combos();

// Candidate with the lowest validation BCE; ties keep the earliest candidate.
// The winner's threshold is then fitted on the validation split.
CommitteeMember select_member(const std::vector<Candidate>& candidates, const SampleSet& samples);

// Candidate thresholds are midpoints between consecutive distinct sorted
// scores plus a 0.5 fallback; returns the smallest threshold maximizing
// macro F1 under the score >= threshold voting convention.
double fit_threshold(const std::vector<double>& scores, const std::vector<int>& labels);

struct VoteMatrix {
    size_t members = 0;
    size_t samples = 0;
    std::vector<uint8_t> votes;  // row-major, members x samples

    uint8_t at(size_t member, size_t sample) const { return votes[member * samples + sample]; }
    std::vector<uint8_t> column(size_t sample) const;
};

// vote[i][j] = 1 iff the member's score for sample j is >= its threshold.
// Every member's scores must be present in samples.scores under its score key.
VoteMatrix committee_predict(const std::vector<CommitteeMember>& members, const SampleSet& samples);

// Groups candidates by combination (one group per present combo, in
// canonical order) and selects each group's member.
std::vector<CommitteeMember> build_committee(const std::vector<Candidate>& candidates,
                                             const SampleSet& samples);

void save_committee(const std::string& path, const std::vector<CommitteeMember>& members);
std::vector<CommitteeMember> load_committee(const std::string& path);

}  // namespace ahpipe

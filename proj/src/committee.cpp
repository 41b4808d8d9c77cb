#include "ahpipe/committee.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "ahpipe/json_util.hpp"

namespace ahpipe {

using nlohmann::json;

std::vector<ComboMask> enumerate_combos() {
    std::vector<ComboMask> out;
    out.reserve(15);
    for (unsigned mask = 1; mask <= 15; ++mask) out.emplace_back(mask);
    return out;
}

double fit_threshold(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw_data("fit_threshold: score/label length mismatch");
    if (scores.empty()) throw_data("empty input: fit_threshold");
    bool has0 = false, has1 = false;
    for (int v : labels) (v ? has1 : has0) = true;
    if (!has0 || !has1) throw_data("degenerate labels: threshold fitting needs both classes");

    std::vector<double> distinct = scores;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> candidates{0.5};
    for (size_t i = 1; i < distinct.size(); ++i)
        candidates.push_back(0.5 * (distinct[i - 1] + distinct[i]));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    double best_threshold = candidates.front();
    double best_f1 = -1.0;
    std::vector<int> preds(scores.size());
    for (double t : candidates) {
        for (size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= t ? 1 : 0;
        double f1 = f1_scores(labels, preds).f1_macro;
        if (f1 > best_f1) {  // ties keep the smallest threshold
            best_f1 = f1;
            best_threshold = t;
        }
    }
    return best_threshold;
}

CommitteeMember select_member(const std::vector<Candidate>& candidates, const SampleSet& samples) {
    if (candidates.empty()) throw_data("missing candidates: no candidate for combination");
    auto val_idx = samples.indices_of(Split::Val);
    if (val_idx.empty()) throw_data("select_member: validation split is empty");
    std::vector<int> val_labels = samples.labels_of(Split::Val);

    const Candidate* best = nullptr;
    double best_bce = 0.0;
    for (const auto& cand : candidates) {
        if (cand.combo != candidates.front().combo)
            throw_data("select_member: candidates span multiple combinations");
        if (cand.scores.size() != samples.size())
            throw_data("candidate '" + cand.score_key() + "' scores not aligned with sample set");
        std::vector<double> val_scores;
        val_scores.reserve(val_idx.size());
        for (size_t i : val_idx) val_scores.push_back(cand.scores[i]);
        double b = bce(val_labels, val_scores);
        if (!best || b < best_bce) {
            best = &cand;
            best_bce = b;
        }
    }

    std::vector<double> val_scores;
    val_scores.reserve(val_idx.size());
    for (size_t i : val_idx) val_scores.push_back(best->scores[i]);
    CommitteeMember member{best->combo, best->algorithm};
    member.val_bce = best_bce;
    member.threshold = fit_threshold(val_scores, val_labels);
    std::vector<int> preds(val_scores.size());
    for (size_t i = 0; i < val_scores.size(); ++i) preds[i] = val_scores[i] >= member.threshold ? 1 : 0;
    member.val_f1 = f1_scores(val_labels, preds).f1_macro;
    return member;
}

std::vector<uint8_t> VoteMatrix::column(size_t sample) const {
    std::vector<uint8_t> out(members);
    for (size_t m = 0; m < members; ++m) out[m] = at(m, sample);
    return out;
}

VoteMatrix committee_predict(const std::vector<CommitteeMember>& members, const SampleSet& samples) {
    if (members.empty()) throw_data("incomplete committee: no members");
    std::set<unsigned> seen;
    for (const auto& m : members)
        if (!seen.insert(m.combo.mask()).second)
            throw_data("incomplete committee: duplicate combination " + m.combo.to_string());

    VoteMatrix vm;
    vm.members = members.size();
    vm.samples = samples.size();
    vm.votes.resize(vm.members * vm.samples);
    for (size_t m = 0; m < members.size(); ++m) {
        auto it = samples.scores.find(members[m].score_key());
        if (it == samples.scores.end())
            throw_data("incomplete committee: no scores for member '" + members[m].score_key() + "'");
        const auto& s = it->second;
        for (size_t j = 0; j < vm.samples; ++j)
            vm.votes[m * vm.samples + j] = s[j] >= members[m].threshold ? 1 : 0;
    }
    return vm;
}

std::vector<CommitteeMember> build_committee(const std::vector<Candidate>& candidates,
                                             const SampleSet& samples) {
    std::map<unsigned, std::vector<Candidate>> by_combo;
    for (const auto& c : candidates) by_combo[c.combo.mask()].push_back(c);
    std::vector<CommitteeMember> members;
    members.reserve(by_combo.size());
    for (auto& [mask, group] : by_combo) members.push_back(select_member(group, samples));
    return members;
}

void save_committee(const std::string& path, const std::vector<CommitteeMember>& members) {
    json arr = json::array();
    for (const auto& m : members)
        arr.push_back(json{{"combo", m.combo.to_string()},
                           {"mask", m.combo.mask()},
                           {"algorithm", m.algorithm},
                           {"threshold", m.threshold},
                           {"val_bce", m.val_bce},
                           {"val_f1", m.val_f1}});
    write_json_file(path, json{{"members", arr}});
}

std::vector<CommitteeMember> load_committee(const std::string& path) {
    json j = read_json_file(path);
    std::vector<CommitteeMember> members;
    for (const auto& jm : j.at("members")) {
        CommitteeMember m{ComboMask::from_string(jm.at("combo").get<std::string>()),
                          jm.at("algorithm").get<std::string>()};
        m.threshold = jm.at("threshold").get<double>();
        m.val_bce = jm.value("val_bce", 0.0);
        m.val_f1 = jm.value("val_f1", 0.0);
        members.push_back(std::move(m));
    }
    return members;
}

}  // namespace ahpipe

#include "ahpipe/data_model.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ahpipe/csv.hpp"

namespace ahpipe {

using nlohmann::json;

const char* to_string(Modality m) {
    switch (m) {
        case Modality::Text: return "text";
        case Modality::Audio: return "audio";
        case Modality::Video: return "video";
        case Modality::Stats: return "stats";
    }
    return "?";
}

std::optional<Modality> modality_from_string(const std::string& name) {
    for (Modality m : kAllModalities)
        if (name == to_string(m)) return m;
    return std::nullopt;
}

ComboMask::ComboMask(unsigned mask) : mask_(mask) {
    if (mask < 1 || mask > 15)
        throw_data("combo mask must be in [1, 15], got " + std::to_string(mask));
}

ComboMask ComboMask::from_string(const std::string& name) {
    unsigned mask = 0;
    std::stringstream ss(name);
    std::string part;
    while (std::getline(ss, part, '-')) {
        auto m = modality_from_string(part);
        if (!m) throw_data("unknown modality '" + part + "' in combo '" + name + "'");
        mask |= bit(*m);
    }
    return ComboMask(mask);
}

std::vector<Modality> ComboMask::modalities() const {
    std::vector<Modality> out;
    for (Modality m : kAllModalities)
        if (contains(m)) out.push_back(m);
    return out;
}

std::string ComboMask::to_string() const {
    std::string out;
    for (Modality m : kAllModalities) {
        if (!contains(m)) continue;
        if (!out.empty()) out += '-';
        out += ahpipe::to_string(m);
    }
    return out;
}

const char* to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    return "?";
}

std::optional<Split> split_from_string(const std::string& name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    return std::nullopt;
}

std::vector<size_t> SampleSet::indices_of(Split split) const {
    std::vector<size_t> out;
    for (size_t i = 0; i < splits.size(); ++i)
        if (splits[i] == split) out.push_back(i);
    return out;
}

std::vector<int> SampleSet::labels_of(Split split) const {
    std::vector<int> out;
    for (size_t i = 0; i < splits.size(); ++i)
        if (splits[i] == split) out.push_back(labels[i]);
    return out;
}

EmbeddingSequence load_embedding_sequence(const std::string& path) {
    EmbeddingSequence seq;
    seq.video_id = std::filesystem::path(path).stem().string();
    seq.chunks = csv::read_matrix(path);
    return seq;
}

void write_embedding_sequence(const std::string& path, const EmbeddingSequence& seq) {
    csv::write_matrix(path, seq.chunks);
}

SampleSet load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open manifest: " + path);
    SampleSet s;
    std::set<std::string> seen;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw_data("manifest " + path + " line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!obj.contains("id") || !obj.contains("split") || !obj.contains("label"))
            throw_data("manifest " + path + " line " + std::to_string(lineno) +
                       ": each object needs id, split, label");
        std::string id = obj.at("id").get<std::string>();
        if (!seen.insert(id).second)
            throw_data("duplicate id '" + id + "' in manifest " + path);
        auto split = split_from_string(obj.at("split").get<std::string>());
        if (!split)
            throw_data("manifest " + path + " line " + std::to_string(lineno) +
                       ": split must be train|val|test");
        if (!obj.at("label").is_number_integer())
            throw_data("manifest " + path + " line " + std::to_string(lineno) + ": label must be 0 or 1");
        int label = obj.at("label").get<int>();
        if (label != 0 && label != 1)
            throw_data("manifest " + path + " line " + std::to_string(lineno) + ": label must be 0 or 1, got " +
                       std::to_string(label));
        s.ids.push_back(std::move(id));
        s.splits.push_back(*split);
        s.labels.push_back(label);
    }
    if (s.ids.empty()) throw_data("empty input: manifest " + path + " has no entries");
    return s;
}

void write_manifest(const std::string& path, const SampleSet& samples) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write manifest: " + path);
    for (size_t i = 0; i < samples.ids.size(); ++i) {
        json obj{{"id", samples.ids[i]}, {"split", to_string(samples.splits[i])}, {"label", samples.labels[i]}};
        out << obj.dump() << '\n';
    }
}

std::vector<double> load_score_file(const std::string& path, const SampleSet& samples) {
    csv::Table t = csv::read_table(path);
    if (t.header.size() != 2 || t.header[0] != "id" || t.header[1] != "score")
        throw_data("score file " + path + " must have header 'id,score'");
    std::map<std::string, double> by_id;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& id = t.rows[r][0];
        double v = csv::parse_double(t.rows[r][1], path + " row " + std::to_string(r + 2));
        if (v < 0.0 || v > 1.0)
            throw_data("score out of [0,1] at row " + std::to_string(r + 2) + " of " + path + ": " +
                       t.rows[r][1]);
        if (!by_id.emplace(id, v).second)
            throw_data("duplicate id '" + id + "' in score file " + path);
    }
    std::vector<double> out;
    out.reserve(samples.size());
    std::vector<std::string> missing;
    for (const auto& id : samples.ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            missing.push_back(id);
            continue;
        }
        out.push_back(it->second);
    }
    if (!missing.empty()) {
        std::string list;
        for (size_t i = 0; i < missing.size() && i < 8; ++i) list += (i ? ", " : "") + missing[i];
        if (missing.size() > 8) list += ", ...";
        throw_data("score file " + path + " is missing " + std::to_string(missing.size()) + " id(s): " + list);
    }
    return out;
}

void write_score_file(const std::string& path, const SampleSet& samples, const std::vector<double>& scores) {
    if (scores.size() != samples.size()) throw_data("score vector does not match sample count");
    std::ofstream out(path);
    if (!out) throw_data("cannot write file: " + path);
    out << "id,score\n";
    for (size_t i = 0; i < samples.size(); ++i)
        out << samples.ids[i] << ',' << csv::format_double(scores[i]) << '\n';
}

SampleSet load_sample_set(const std::string& manifest_path, const std::vector<std::string>& score_paths) {
    SampleSet s = load_manifest(manifest_path);
    for (const auto& p : score_paths) {
        std::string key = std::filesystem::path(p).stem().string();
        if (s.scores.count(key)) throw_data("duplicate score model name '" + key + "'");
        s.scores[key] = load_score_file(p, s);
    }
    return s;
}

SampleSet split_view(const SampleSet& s, Split split) {
    SampleSet out;
    auto idx = s.indices_of(split);
    out.ids.reserve(idx.size());
    for (size_t i : idx) {
        out.ids.push_back(s.ids[i]);
        out.splits.push_back(s.splits[i]);
        out.labels.push_back(s.labels[i]);
    }
    for (const auto& [name, vec] : s.scores) {
        std::vector<double> sub;
        sub.reserve(idx.size());
        for (size_t i : idx) sub.push_back(vec[i]);
        out.scores[name] = std::move(sub);
    }
    return out;
}

}  // namespace ahpipe

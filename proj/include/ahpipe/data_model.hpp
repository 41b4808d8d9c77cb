#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ahpipe/error.hpp"

namespace ahpipe {

enum class Modality : uint8_t { Text = 0, Audio = 1, Video = 2, Stats = 3 };

inline constexpr std::array<Modality, 4> kAllModalities = {Modality::Text, Modality::Audio,
                                                           Modality::Video, Modality::Stats};

const char* to_string(Modality m);
std::optional<Modality> modality_from_string(const std::string& name);

// Non-empty subset of the four modalities.
// Bit order: Text=1, Audio=2, Video=4, Stats=8; valid masks are 1..15.
class ComboMask {
public:
    explicit ComboMask(unsigned mask);
    static ComboMask from_string(const std::string& name);  // e.g. "text-audio-stats"
    static unsigned bit(Modality m) { return 1u << static_cast<unsigned>(m); }

    unsigned mask() const noexcept { return mask_; }
    bool contains(Modality m) const noexcept { return (mask_ & bit(m)) != 0; }
    std::vector<Modality> modalities() const;
    std::string to_string() const;  // canonical-order names joined by '-'

    friend bool operator==(const ComboMask&, const ComboMask&) = default;
    friend auto operator<=>(const ComboMask& a, const ComboMask& b) { return a.mask_ <=> b.mask_; }

private:
    unsigned mask_;
};

enum class Split : uint8_t { Train = 0, Val = 1, Test = 2 };

const char* to_string(Split s);
std::optional<Split> split_from_string(const std::string& name);

// Ordered per-chunk feature vectors for one video and one modality.
// Chunk i is row i of `chunks`; all rows share the same dimensionality.
struct EmbeddingSequence {
    std::string video_id;
    Modality modality = Modality::Video;
    Eigen::MatrixXd chunks;

    Eigen::Index dim() const { return chunks.cols(); }
    Eigen::Index chunk_count() const { return chunks.rows(); }
};

// Aligned ids, split assignment, binary labels, and per-model probability
// scores. Immutable after construction; safe to share across threads.
struct SampleSet {
    std::vector<std::string> ids;
    std::vector<Split> splits;
    std::vector<int> labels;
    std::map<std::string, std::vector<double>> scores;  // model name -> aligned scores

    size_t size() const { return ids.size(); }
    std::vector<size_t> indices_of(Split split) const;
    std::vector<int> labels_of(Split split) const;
};

EmbeddingSequence load_embedding_sequence(const std::string& path);
void write_embedding_sequence(const std::string& path, const EmbeddingSequence& seq);

// Manifest JSONL: one object per line with keys id, split, label.
SampleSet load_manifest(const std::string& path);
void write_manifest(const std::string& path, const SampleSet& samples);

// Score CSV with header "id,score"; rows are joined on id, so file order is
// irrelevant. Every manifest id must be covered exactly once.
std::vector<double> load_score_file(const std::string& path, const SampleSet& samples);
void write_score_file(const std::string& path, const SampleSet& samples, const std::vector<double>& scores);

// Loads the manifest, then each score file; the score key is the file stem.
SampleSet load_sample_set(const std::string& manifest_path, const std::vector<std::string>& score_paths);

// Restriction of all fields to ids with the given split, order preserved.
SampleSet split_view(const SampleSet& s, Split split);

}  // namespace ahpipe

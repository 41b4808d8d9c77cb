#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ahpipe/feature_ops.hpp"

namespace ahpipe {

struct TextStats {
    int64_t word_count = 0;
    int64_t short_pauses = 0;             // commas
    int64_t long_pauses = 0;              // terminal punctuation . ! ?
    int64_t consecutive_repetitions = 0;  // adjacent identical tokens
    double lexical_diversity = 0.0;       // unique words / total words, 0 when empty
};

// Whitespace-delimited tokens, lowercased, surrounding punctuation stripped.
std::vector<std::string> tokenize_words(const std::string& transcript);
std::vector<std::string> split_sentences(const std::string& transcript);
TextStats compute_text_stats(const std::string& transcript);

inline constexpr std::array<const char*, 4> kHesitancyCategories = {"filler_words", "filler_sounds",
                                                                    "hedging", "corrections"};

struct LexiconCategory {
    std::vector<std::string> expressions;
    Eigen::MatrixXd embeddings;  // one row per expression
};

// Expression dictionaries with precomputed embeddings, one entry per
// hesitancy category; all embeddings share one dimension.
struct HesitancyLexicon {
    std::map<std::string, LexiconCategory> categories;

    Eigen::Index dim() const;
};

HesitancyLexicon load_hesitancy_lexicon(const std::string& path);

struct SentenceRecord {
    std::string text;
    Eigen::VectorXd embedding;
};

// JSONL with one {"text": ..., "embedding": [...]} object per line.
std::vector<SentenceRecord> load_sentence_records(const std::string& path);

// Category order follows kHesitancyCategories. raw_max is the best cosine
// similarity within a category; margin subtracts the mean of the other
// categories' raw maxima, so margins sum to zero across the four categories.
struct HesitancyScores {
    std::array<double, 4> raw_max{};
    std::array<double, 4> margin{};
};

HesitancyScores hesitancy_scores(const SentenceRecord& sentence, const HesitancyLexicon& lex);

inline constexpr std::array<const char*, 6> kAmbivalenceCategories = {
    "sentiment", "capability", "excuse", "success", "motivation", "opportunity"};
inline constexpr std::array<const char*, 4> kAmbivalencePoles = {"neutral", "negative", "positive",
                                                                 "both"};

// Prompt embeddings for each category and pole, plus the softmax temperature
// multiplier applied to the cosine similarities.
struct AmbivalenceProbe {
    std::map<std::string, std::array<Eigen::VectorXd, 4>> categories;  // pole order as above
    double temperature = 10.0;

    Eigen::Index dim() const;
};

AmbivalenceProbe load_ambivalence_probe(const std::string& path);

// Per category, a probability distribution over the four poles.
std::map<std::string, std::array<double, 4>> ambivalence_distribution(
    const Eigen::VectorXd& text_embedding, const AmbivalenceProbe& probe);

struct SentencePool {
    PooledStats stats;
    bool valid = true;  // false for an empty transcript; stats zero-filled
};

// Pools per-sentence category scores (rows = sentences, cols = categories).
SentencePool sentence_level_pool(const Eigen::MatrixXd& per_sentence);

// Visual chunk statistics from a MAD filter report, one row per chunk:
// [valid, valid_ratio, similarity_mean].
Eigen::MatrixXd visual_chunk_stats(const MadFilterReport& report);

}  // namespace ahpipe

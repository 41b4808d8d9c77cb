#include "ahpipe/text_behavior.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ahpipe/json_util.hpp"

namespace ahpipe {

using nlohmann::json;

namespace {

std::string normalize_token(const std::string& raw) {
    size_t begin = 0, end = raw.size();
    while (begin < end && std::ispunct(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && std::ispunct(static_cast<unsigned char>(raw[end - 1]))) --end;
    std::string out;
    out.reserve(end - begin);
    for (size_t i = begin; i < end; ++i)
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i]))));
    return out;
}

}  // namespace

std::vector<std::string> tokenize_words(const std::string& transcript) {
    std::vector<std::string> words;
    std::istringstream ss(transcript);
    std::string raw;
    while (ss >> raw) {
        std::string tok = normalize_token(raw);
        if (!tok.empty()) words.push_back(std::move(tok));
    }
    return words;
}

std::vector<std::string> split_sentences(const std::string& transcript) {
    std::vector<std::string> sentences;
    std::string current;
    for (char c : transcript) {
        current.push_back(c);
        if (c == '.' || c == '!' || c == '?') {
            // trim surrounding whitespace
            size_t b = current.find_first_not_of(" \t\n\r");
            size_t e = current.find_last_not_of(" \t\n\r");
            if (b != std::string::npos) sentences.push_back(current.substr(b, e - b + 1));
            current.clear();
        }
    }
    size_t b = current.find_first_not_of(" \t\n\r");
    if (b != std::string::npos)
        sentences.push_back(current.substr(b, current.find_last_not_of(" \t\n\r") - b + 1));
    return sentences;
}

TextStats compute_text_stats(const std::string& transcript) {
    TextStats s;
    for (char c : transcript) {
        if (c == ',') ++s.short_pauses;
        if (c == '.' || c == '!' || c == '?') ++s.long_pauses;
    }
    auto words = tokenize_words(transcript);
    s.word_count = static_cast<int64_t>(words.size());
    for (size_t i = 1; i < words.size(); ++i)
        if (words[i] == words[i - 1]) ++s.consecutive_repetitions;
    if (!words.empty()) {
        std::set<std::string> unique(words.begin(), words.end());
        s.lexical_diversity = static_cast<double>(unique.size()) / static_cast<double>(words.size());
    }
    return s;
}

Eigen::Index HesitancyLexicon::dim() const {
    for (const auto& [name, cat] : categories)
        if (cat.embeddings.rows() > 0) return cat.embeddings.cols();
    return 0;
}

HesitancyLexicon load_hesitancy_lexicon(const std::string& path) {
    json j = read_json_file(path);
    HesitancyLexicon lex;
    for (const char* name : kHesitancyCategories) {
        if (!j.contains(name)) throw_data("lexicon " + path + " missing category '" + name + "'");
        const json& cat = j.at(name);
        LexiconCategory out;
        out.expressions = cat.at("expressions").get<std::vector<std::string>>();
        out.embeddings = matrix_from_json(cat.at("embeddings"));
        if (out.expressions.empty()) throw_data("lexicon category '" + std::string(name) + "' is empty");
        if (static_cast<size_t>(out.embeddings.rows()) != out.expressions.size())
            throw_data("lexicon category '" + std::string(name) + "': expression/embedding count mismatch");
        lex.categories[name] = std::move(out);
    }
    Eigen::Index dim = lex.dim();
    for (const auto& [name, cat] : lex.categories)
        if (cat.embeddings.cols() != dim)
            throw_data("lexicon category '" + name + "': embedding dimension mismatch");
    return lex;
}

std::vector<SentenceRecord> load_sentence_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open file: " + path);
    std::vector<SentenceRecord> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw_data("sentences " + path + " line " + std::to_string(lineno) + ": " + e.what());
        }
        SentenceRecord rec;
        rec.text = obj.value("text", "");
        rec.embedding = vector_from_json(obj.at("embedding"));
        out.push_back(std::move(rec));
    }
    return out;
}

HesitancyScores hesitancy_scores(const SentenceRecord& sentence, const HesitancyLexicon& lex) {
    if (sentence.embedding.norm() == 0.0)
        throw_numeric("hesitancy_scores: undefined similarity for zero-norm sentence embedding");
    HesitancyScores out;
    for (size_t c = 0; c < kHesitancyCategories.size(); ++c) {
        const auto& cat = lex.categories.at(kHesitancyCategories[c]);
        double best = -1.0;
        for (Eigen::Index r = 0; r < cat.embeddings.rows(); ++r)
            best = std::max(best, cosine_similarity(sentence.embedding, cat.embeddings.row(r).transpose()));
        out.raw_max[c] = best;
    }
    for (size_t c = 0; c < 4; ++c) {
        double others = 0.0;
        for (size_t o = 0; o < 4; ++o)
            if (o != c) others += out.raw_max[o];
        out.margin[c] = out.raw_max[c] - others / 3.0;
    }
    return out;
}

Eigen::Index AmbivalenceProbe::dim() const {
    for (const auto& [name, poles] : categories)
        if (poles[0].size() > 0) return poles[0].size();
    return 0;
}

AmbivalenceProbe load_ambivalence_probe(const std::string& path) {
    json j = read_json_file(path);
    AmbivalenceProbe probe;
    probe.temperature = j.value("temperature", 10.0);
    if (probe.temperature <= 0.0) throw_data("probe temperature must be positive");
    const json& cats = j.contains("categories") ? j.at("categories") : j;
    for (const char* name : kAmbivalenceCategories) {
        if (!cats.contains(name)) throw_data("probe " + path + " missing category '" + name + "'");
        std::array<Eigen::VectorXd, 4> poles;
        for (size_t p = 0; p < kAmbivalencePoles.size(); ++p) {
            if (!cats.at(name).contains(kAmbivalencePoles[p]))
                throw_data("probe category '" + std::string(name) + "' missing pole '" +
                           kAmbivalencePoles[p] + "'");
            poles[p] = vector_from_json(cats.at(name).at(kAmbivalencePoles[p]));
        }
        probe.categories[name] = std::move(poles);
    }
    Eigen::Index dim = probe.dim();
    for (const auto& [name, poles] : probe.categories)
        for (const auto& v : poles)
            if (v.size() != dim) throw_data("probe category '" + name + "': embedding dimension mismatch");
    return probe;
}

std::map<std::string, std::array<double, 4>> ambivalence_distribution(const Eigen::VectorXd& text_embedding,
                                                                      const AmbivalenceProbe& probe) {
    if (text_embedding.norm() == 0.0)
        throw_numeric("ambivalence_distribution: undefined similarity for zero-norm embedding");
    std::map<std::string, std::array<double, 4>> out;
    for (const auto& [name, poles] : probe.categories) {
        Eigen::VectorXd sims(4);
        for (size_t p = 0; p < 4; ++p)
            sims(static_cast<Eigen::Index>(p)) = cosine_similarity(text_embedding, poles[p]);
        Eigen::VectorXd dist = softmax_temperature(sims, probe.temperature);
        std::array<double, 4> arr{};
        for (size_t p = 0; p < 4; ++p) arr[p] = dist(static_cast<Eigen::Index>(p));
        out[name] = arr;
    }
    return out;
}

SentencePool sentence_level_pool(const Eigen::MatrixXd& per_sentence) {
    SentencePool pool;
    if (per_sentence.rows() == 0) {
        pool.valid = false;
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(per_sentence.cols());
        pool.stats.min = zero;
        pool.stats.max = zero;
        pool.stats.mean = zero;
        pool.stats.std = zero;
        return pool;
    }
    pool.stats = stat_pool(per_sentence);
    return pool;
}

Eigen::MatrixXd visual_chunk_stats(const MadFilterReport& report) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(report.kept.size()), 3);
    for (size_t i = 0; i < report.kept.size(); ++i) {
        const double valid = report.kept[i] ? 1.0 : 0.0;
        out.row(static_cast<Eigen::Index>(i)) << valid, valid, report.scores[i];
    }
    return out;
}

}  // namespace ahpipe

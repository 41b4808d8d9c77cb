#include "ahpipe/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include "ahpipe/csv.hpp"
#include "ahpipe/feature_ops.hpp"
#include "ahpipe/hash.hpp"
#include "ahpipe/json_util.hpp"
#include "ahpipe/learners.hpp"

namespace ahpipe {

namespace fs = std::filesystem;
using nlohmann::json;

void write_run_manifest(const std::string& path, const RunManifestInfo& info) {
    json digests = json::object();
    for (const auto& [file, digest] : info.input_digests) digests[file] = digest;
    json j{{"command_line", info.command_line},
           {"config", info.config_snapshot},
           {"seed", info.seed},
           {"version", kToolVersion},
           {"inputs", digests},
           {"outputs", info.outputs},
           {"wall_time_seconds", info.wall_time_seconds}};
    if (!info.extra.is_null()) j["stages"] = info.extra;
    write_json_file(path, j);
}

namespace {

struct ModalityPlan {
    Modality modality = Modality::Text;
    std::string embeddings_dir;
    std::string features_csv;
    double mad_multiplier = 50.0;
    bool scale = false;
    bool use_pca = false;
    Eigen::Index pca_target_dim = 512;
    double pca_min_variance = 0.99;
};

struct PipelineConfig {
    std::string manifest;
    std::map<Modality, ModalityPlan> modalities;
    std::vector<std::string> native_algorithms{"logistic", "mlp"};
    json mlp_overrides = json::object();
    json logistic_overrides = json::object();
    std::string external_dir;
    PsoConfig pso;
    std::vector<double> lambdas{0.0, 0.2, 0.4, 0.6, 0.8};
    uint64_t seed = 0;
    json raw;
};

std::string resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path.string() : (base / path).string();
}

PipelineConfig parse_config(const std::string& path) {
    json j = read_json_file(path);
    const fs::path base = fs::path(path).parent_path();
    PipelineConfig cfg;
    cfg.raw = j;
    if (!j.contains("manifest")) throw_data("pipeline config: missing 'manifest'");
    cfg.manifest = resolve(base, j.at("manifest").get<std::string>());
    if (!j.contains("modalities")) throw_data("pipeline config: missing 'modalities'");

    for (Modality m : kAllModalities) {
        const char* name = to_string(m);
        if (!j.at("modalities").contains(name))
            throw_data(std::string("pipeline config: missing modality '") + name + "'");
        const json& jm = j.at("modalities").at(name);
        ModalityPlan plan;
        plan.modality = m;
        if (jm.contains("embeddings_dir")) plan.embeddings_dir = resolve(base, jm.at("embeddings_dir"));
        if (jm.contains("features_csv")) plan.features_csv = resolve(base, jm.at("features_csv"));
        if (plan.embeddings_dir.empty() == plan.features_csv.empty())
            throw_data(std::string("pipeline config: modality '") + name +
                       "' needs exactly one of embeddings_dir or features_csv");
        // video and stats are scaled by default; PCA applies to video only
        plan.scale = (m == Modality::Video || m == Modality::Stats);
        plan.use_pca = (m == Modality::Video);
        plan.mad_multiplier = jm.value("mad_multiplier", 50.0);
        plan.scale = jm.value("scale", plan.scale);
        plan.use_pca = jm.value("pca", plan.use_pca);
        plan.pca_target_dim = jm.value("pca_target_dim", Eigen::Index{512});
        plan.pca_min_variance = jm.value("pca_min_variance", 0.99);
        cfg.modalities[m] = plan;
    }

    if (j.contains("candidates")) {
        const json& jc = j.at("candidates");
        if (jc.contains("native"))
            cfg.native_algorithms = jc.at("native").get<std::vector<std::string>>();
        for (const auto& a : cfg.native_algorithms)
            if (a != "mlp" && a != "logistic")
                throw_data("pipeline config: unknown native algorithm '" + a + "'");
        if (jc.contains("external_dir")) cfg.external_dir = resolve(base, jc.at("external_dir"));
        if (jc.contains("mlp")) cfg.mlp_overrides = jc.at("mlp");
        if (jc.contains("logistic")) cfg.logistic_overrides = jc.at("logistic");
    }
    if (cfg.native_algorithms.empty() && cfg.external_dir.empty())
        throw_data("pipeline config: no candidate source (native algorithms or external_dir)");

    if (j.contains("pso")) {
        const json& jp = j.at("pso");
        cfg.pso.particles = jp.value("particles", cfg.pso.particles);
        cfg.pso.epochs = jp.value("epochs", cfg.pso.epochs);
        cfg.pso.inertia = jp.value("inertia", cfg.pso.inertia);
        cfg.pso.cognitive = jp.value("cognitive", cfg.pso.cognitive);
        cfg.pso.social = jp.value("social", cfg.pso.social);
        cfg.pso.velocity_clamp = jp.value("velocity_clamp", cfg.pso.velocity_clamp);
    }
    if (j.contains("lambdas")) cfg.lambdas = j.at("lambdas").get<std::vector<double>>();
    if (cfg.lambdas.empty()) throw_data("pipeline config: lambdas must not be empty");
    cfg.seed = j.value("seed", uint64_t{0});
    cfg.pso.seed = cfg.seed;
    cfg.pso.validate();
    return cfg;
}

MlpConfig mlp_config_from_json(const json& j) {
    MlpConfig cfg;
    if (j.contains("hidden_sizes")) {
        auto hs = j.at("hidden_sizes").get<std::vector<Eigen::Index>>();
        if (hs.size() != 3) throw_data("mlp config: hidden_sizes must have exactly 3 entries");
        cfg.hidden_sizes = {hs[0], hs[1], hs[2]};
    }
    cfg.input_noise_sigma = j.value("input_noise_sigma", cfg.input_noise_sigma);
    cfg.dropout_p = j.value("dropout_p", cfg.dropout_p);
    cfg.use_batch_norm = j.value("use_batch_norm", cfg.use_batch_norm);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    return cfg;
}

LogisticConfig logistic_config_from_json(const json& j) {
    LogisticConfig cfg;
    cfg.l2 = j.value("l2", cfg.l2);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
    return cfg;
}

class StageCache {
public:
    explicit StageCache(fs::path dir) : dir_(std::move(dir)) {}

    bool hit(const std::string& stage, const std::string& digest,
             const std::vector<std::string>& outputs) const {
        fs::path f = dir_ / (stage + ".json");
        if (!fs::exists(f)) return false;
        json j;
        try {
            j = read_json_file(f.string());
        } catch (const Error&) {
            return false;
        }
        if (j.value("digest", "") != digest) return false;
        for (const auto& out : outputs)
            if (!fs::exists(out)) return false;
        return true;
    }

    void store(const std::string& stage, const std::string& digest,
               const std::vector<std::string>& outputs) const {
        write_json_file((dir_ / (stage + ".json")).string(),
                        json{{"digest", digest}, {"outputs", outputs}});
    }

private:
    fs::path dir_;
};

std::string digest_of(const json& j, const std::vector<std::string>& files) {
    Fnv1a h;
    h.update(json(kToolVersion).dump());
    h.update(j.dump());
    for (const auto& f : files) {
        h.update(f.substr(f.find_last_of('/') + 1));  // name only, not location
        h.update(file_digest_hex(f));
    }
    return h.hex();
}

std::vector<std::string> sorted_csv_files(const std::string& dir) {
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    return files;
}

// ---- features stage -------------------------------------------------------

Eigen::MatrixXd rows_at(const Eigen::MatrixXd& m, const std::vector<size_t>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (size_t i = 0; i < idx.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
    return out;
}

csv::IdTable compute_modality_features(const ModalityPlan& plan, const SampleSet& samples,
                                       const fs::path& feature_dir, std::vector<std::string>& outputs) {
    csv::IdTable table;
    table.ids = samples.ids;

    if (!plan.features_csv.empty()) {
        csv::IdTable raw = csv::read_id_table(plan.features_csv);
        std::map<std::string, Eigen::Index> row_of;
        for (size_t i = 0; i < raw.ids.size(); ++i) {
            if (!row_of.emplace(raw.ids[i], static_cast<Eigen::Index>(i)).second)
                throw_data("duplicate id '" + raw.ids[i] + "' in " + plan.features_csv);
        }
        table.feature_names = raw.feature_names;
        table.values.resize(static_cast<Eigen::Index>(samples.size()), raw.values.cols());
        for (size_t i = 0; i < samples.ids.size(); ++i) {
            auto it = row_of.find(samples.ids[i]);
            if (it == row_of.end())
                throw_data("feature table " + plan.features_csv + " is missing id '" + samples.ids[i] + "'");
            table.values.row(static_cast<Eigen::Index>(i)) = raw.values.row(it->second);
        }
    } else {
        std::vector<Eigen::VectorXd> rows;
        rows.reserve(samples.size());
        Eigen::Index dim = -1;
        for (const auto& id : samples.ids) {
            fs::path p = fs::path(plan.embeddings_dir) / (id + ".csv");
            if (!fs::exists(p))
                throw_data("missing embedding file for id '" + id + "': " + p.string());
            EmbeddingSequence seq = load_embedding_sequence(p.string());
            seq.modality = plan.modality;
            Eigen::VectorXd row;
            switch (plan.modality) {
                case Modality::Video: {
                    seq.chunks = l2_normalize_rows(seq.chunks);
                    MadFilterReport report = mad_filter(seq, plan.mad_multiplier);
                    EmbeddingSequence filtered = apply_mad_filter(seq, report);
                    row = derivative_pool(filtered);
                    break;
                }
                case Modality::Stats:
                    row = stat_pool(seq.chunks).concat();
                    break;
                case Modality::Text:
                case Modality::Audio: {
                    Eigen::MatrixXd unit = l2_normalize_rows(seq.chunks);
                    row = unit.colwise().mean().transpose();
                    break;
                }
            }
            if (dim < 0) dim = row.size();
            if (row.size() != dim)
                throw_data("embedding dimension mismatch for id '" + id + "' in " + plan.embeddings_dir);
            rows.push_back(std::move(row));
        }
        table.values.resize(static_cast<Eigen::Index>(rows.size()), dim);
        for (size_t i = 0; i < rows.size(); ++i) table.values.row(static_cast<Eigen::Index>(i)) = rows[i];
        table.feature_names.resize(static_cast<size_t>(dim));
        for (Eigen::Index c = 0; c < dim; ++c)
            table.feature_names[static_cast<size_t>(c)] =
                std::string(to_string(plan.modality)) + "_f" + std::to_string(c);
    }

    auto train_idx = samples.indices_of(Split::Train);
    if (plan.scale) {
        ScalerModel scaler = fit_scaler(rows_at(table.values, train_idx));
        table.values = apply_scaler(scaler, table.values);
        std::string path = (feature_dir / (std::string(to_string(plan.modality)) + "_scaler.json")).string();
        save_scaler(path, scaler);
        outputs.push_back(path);
    }
    if (plan.use_pca) {
        Eigen::Index target = std::min<Eigen::Index>(plan.pca_target_dim, table.values.cols());
        PcaModel pca = fit_pca(rows_at(table.values, train_idx), target, plan.pca_min_variance);
        table.values = apply_pca(pca, table.values);
        table.feature_names.resize(static_cast<size_t>(pca.k));
        for (Eigen::Index c = 0; c < pca.k; ++c)
            table.feature_names[static_cast<size_t>(c)] =
                std::string(to_string(plan.modality)) + "_pc" + std::to_string(c);
        std::string path = (feature_dir / (std::string(to_string(plan.modality)) + "_pca.json")).string();
        save_pca(path, pca);
        outputs.push_back(path);
    }
    return table;
}

// ---- candidate helpers ----------------------------------------------------

struct ParsedCandidateName {
    ComboMask combo;
    std::string algorithm;
};

ParsedCandidateName parse_candidate_name(const std::string& stem) {
    auto pos = stem.find_last_of('_');
    if (pos == std::string::npos || pos == 0 || pos + 1 >= stem.size())
        throw_data("candidate file name must be <combo>_<algorithm>.csv, got '" + stem + "'");
    return {ComboMask::from_string(stem.substr(0, pos)), stem.substr(pos + 1)};
}

uint64_t derive_seed(uint64_t base, const std::string& tag) {
    Fnv1a h;
    h.update(std::to_string(base));
    h.update("|");
    h.update(tag);
    return h.value();
}

}  // namespace

std::vector<Candidate> load_candidate_dir(const std::string& dir, SampleSet& samples) {
    if (!fs::is_directory(dir)) throw_data("candidate directory not found: " + dir);
    std::vector<Candidate> candidates;
    for (const auto& file : sorted_csv_files(dir)) {
        std::string stem = fs::path(file).stem().string();
        ParsedCandidateName name = parse_candidate_name(stem);
        std::vector<double> scores = load_score_file(file, samples);
        Candidate cand{name.combo, name.algorithm, scores};
        if (samples.scores.count(cand.score_key()))
            throw_data("duplicate candidate '" + cand.score_key() + "' in " + dir);
        samples.scores[cand.score_key()] = std::move(scores);
        candidates.push_back(std::move(cand));
    }
    if (candidates.empty()) throw_data("no candidate score files in " + dir);
    return candidates;
}

VoteMatrix votes_for_split(const VoteMatrix& full, const SampleSet& samples, Split split) {
    auto idx = samples.indices_of(split);
    VoteMatrix out;
    out.members = full.members;
    out.samples = idx.size();
    out.votes.resize(out.members * out.samples);
    for (size_t m = 0; m < full.members; ++m)
        for (size_t j = 0; j < idx.size(); ++j)
            out.votes[m * out.samples + j] = full.at(m, idx[j]);
    return out;
}

MetricReport ensemble_metrics(const VoteMatrix& votes, const std::vector<int>& labels,
                              const WeightVector& weights) {
    std::vector<int> preds = hard_vote_all(votes, weights);
    std::vector<double> share = vote_share(votes, weights);
    return metric_report(labels, share, preds);
}

json lambda_report_json(const PsoResult& result, const std::vector<CommitteeMember>& members,
                        const VoteMatrix& votes_train, const VoteMatrix& votes_val,
                        const VoteMatrix& votes_test, const std::vector<int>& labels_train,
                        const std::vector<int>& labels_val, const std::vector<int>& labels_test) {
    json weights = json::array();
    for (size_t m = 0; m < members.size(); ++m)
        weights.push_back(json{{"combo", members[m].combo.to_string()},
                               {"algorithm", members[m].algorithm},
                               {"threshold", members[m].threshold},
                               {"weight", result.best_weights[m]}});
    json metrics{{"train", to_json(ensemble_metrics(votes_train, labels_train, result.best_weights))},
                 {"val", to_json(ensemble_metrics(votes_val, labels_val, result.best_weights))}};
    if (votes_test.samples > 0 && !labels_test.empty())
        metrics["test"] = to_json(ensemble_metrics(votes_test, labels_test, result.best_weights));
    return json{{"lambda", result.lambda},
                {"seed", result.seed},
                {"best_fitness", result.best_fitness},
                {"best_epoch", result.best_epoch},
                {"fitness", json{{"f1_train", result.best_report.f1_train},
                                 {"f1_val", result.best_report.f1_val},
                                 {"harmonic_mean", result.best_report.harmonic_mean},
                                 {"penalty", result.best_report.penalty},
                                 {"fitness", result.best_report.fitness}}},
                {"weights", weights},
                {"zero_weight_count", result.zero_weight_count},
                {"fitness_trace", result.fitness_trace},
                {"metrics", metrics}};
}

PipelineOutcome run_pipeline(const PipelineOptions& opts, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    PipelineConfig cfg = parse_config(opts.config_path);
    if (opts.seed_override) {
        cfg.seed = *opts.seed_override;
        cfg.pso.seed = cfg.seed;
    }

    // fail-fast validation of every referenced input before writing anything
    std::vector<std::string> input_files{opts.config_path, cfg.manifest};
    if (!fs::exists(cfg.manifest)) throw_data("manifest not found: " + cfg.manifest);
    SampleSet samples = load_manifest(cfg.manifest);
    for (const auto& [m, plan] : cfg.modalities) {
        if (!plan.features_csv.empty()) {
            if (!fs::exists(plan.features_csv))
                throw_data("feature table not found: " + plan.features_csv);
            input_files.push_back(plan.features_csv);
        } else {
            if (!fs::is_directory(plan.embeddings_dir))
                throw_data("embeddings directory not found: " + plan.embeddings_dir);
            for (const auto& id : samples.ids) {
                fs::path p = fs::path(plan.embeddings_dir) / (id + ".csv");
                if (!fs::exists(p))
                    throw_data("missing embedding file for id '" + id + "': " + p.string());
                input_files.push_back(p.string());
            }
        }
    }
    std::vector<std::string> external_files;
    if (!cfg.external_dir.empty()) {
        if (!fs::is_directory(cfg.external_dir))
            throw_data("external candidate directory not found: " + cfg.external_dir);
        external_files = sorted_csv_files(cfg.external_dir);
        for (const auto& f : external_files) input_files.push_back(f);
    }

    const fs::path out(opts.out_dir);
    const fs::path cache_dir = out / "cache";
    const fs::path feature_dir = out / "features";
    const fs::path candidate_dir = out / "candidates";
    const fs::path sweep_dir = out / "sweep";
    for (const auto& d : {out, cache_dir, feature_dir, candidate_dir, sweep_dir, candidate_dir / "models"})
        fs::create_directories(d);
    StageCache cache(cache_dir);

    PipelineOutcome outcome;
    auto note = [&](const StageStatus& st) {
        outcome.stages.push_back(st);
        if (!opts.quiet) log << "stage " << st.name << ": " << (st.cached ? "cached" : "computed") << "\n";
    };

    // ---- features ----
    json features_cfg = cfg.raw.value("modalities", json::object());
    std::vector<std::string> feature_inputs{cfg.manifest};
    for (const auto& [m, plan] : cfg.modalities) {
        if (!plan.features_csv.empty()) feature_inputs.push_back(plan.features_csv);
        else
            for (const auto& id : samples.ids)
                feature_inputs.push_back((fs::path(plan.embeddings_dir) / (id + ".csv")).string());
    }
    std::string features_digest = digest_of(features_cfg, feature_inputs);
    std::vector<std::string> feature_outputs;
    for (Modality m : kAllModalities)
        feature_outputs.push_back((feature_dir / (std::string(to_string(m)) + ".csv")).string());
    bool features_cached = cache.hit("features", features_digest, feature_outputs);
    if (!features_cached) {
        std::vector<std::string> extra;
        for (Modality m : kAllModalities) {
            csv::IdTable table = compute_modality_features(cfg.modalities.at(m), samples, feature_dir, extra);
            csv::write_id_table((feature_dir / (std::string(to_string(m)) + ".csv")).string(), table);
        }
        feature_outputs.insert(feature_outputs.end(), extra.begin(), extra.end());
        cache.store("features", features_digest, feature_outputs);
    }
    note({"features", features_cached, features_digest});

    // ---- candidates ----
    json cand_cfg{{"native", cfg.native_algorithms},
                  {"mlp", cfg.mlp_overrides},
                  {"logistic", cfg.logistic_overrides},
                  {"seed", cfg.seed},
                  {"features_digest", features_digest}};
    std::string cand_digest = digest_of(cand_cfg, external_files);
    std::vector<std::string> cand_outputs;
    {
        std::vector<std::string> algos = cfg.native_algorithms;
        for (const ComboMask& combo : enumerate_combos())
            for (const auto& algo : algos)
                cand_outputs.push_back(
                    (candidate_dir / (combo.to_string() + "_" + algo + ".csv")).string());
        for (const auto& f : external_files)
            cand_outputs.push_back((candidate_dir / fs::path(f).filename()).string());
    }
    bool cand_cached = cache.hit("candidates", cand_digest, cand_outputs);
    if (!cand_cached) {
        std::map<Modality, csv::IdTable> features;
        for (Modality m : kAllModalities)
            features[m] = csv::read_id_table((feature_dir / (std::string(to_string(m)) + ".csv")).string());
        auto train_idx = samples.indices_of(Split::Train);
        std::vector<int> train_labels = samples.labels_of(Split::Train);

        for (const ComboMask& combo : enumerate_combos()) {
            Eigen::Index width = 0;
            for (Modality m : combo.modalities()) width += features[m].values.cols();
            Eigen::MatrixXd X(static_cast<Eigen::Index>(samples.size()), width);
            Eigen::Index at = 0;
            for (Modality m : combo.modalities()) {
                X.middleCols(at, features[m].values.cols()) = features[m].values;
                at += features[m].values.cols();
            }
            Eigen::MatrixXd X_train = rows_at(X, train_idx);

            for (const auto& algo : cfg.native_algorithms) {
                const std::string tag = combo.to_string() + "_" + algo;
                TrainResult trained;
                if (algo == "mlp") {
                    MlpConfig mc = mlp_config_from_json(cfg.mlp_overrides);
                    mc.seed = derive_seed(cfg.seed, tag);
                    trained = train_mlp(X_train, train_labels, mc);
                } else {
                    LogisticConfig lc = logistic_config_from_json(cfg.logistic_overrides);
                    lc.seed = derive_seed(cfg.seed, tag);
                    trained = train_logistic(X_train, train_labels, lc);
                }
                std::vector<double> scores = trained.model->predict_proba(X);
                write_score_file((candidate_dir / (tag + ".csv")).string(), samples, scores);
                trained.model->save((candidate_dir / "models" / (tag + ".json")).string());
            }
        }
        for (const auto& f : external_files) {
            // validate and rewrite in manifest order
            std::string stem = fs::path(f).stem().string();
            parse_candidate_name(stem);
            fs::path dest = candidate_dir / fs::path(f).filename();
            std::vector<double> scores = load_score_file(f, samples);
            write_score_file(dest.string(), samples, scores);
        }
        cache.store("candidates", cand_digest, cand_outputs);
    }
    note({"candidates", cand_cached, cand_digest});

    // ---- committee ----
    json committee_cfg{{"candidates_digest", cand_digest}};
    std::string committee_digest = digest_of(committee_cfg, {cfg.manifest});
    outcome.committee_path = (out / "committee.json").string();
    bool committee_cached = cache.hit("committee", committee_digest, {outcome.committee_path});
    SampleSet scored = samples;  // candidate scores attach here
    std::vector<Candidate> candidates = load_candidate_dir(candidate_dir.string(), scored);
    {
        std::set<unsigned> present;
        for (const auto& c : candidates) present.insert(c.combo.mask());
        std::string missing;
        for (const ComboMask& combo : enumerate_combos())
            if (!present.count(combo.mask())) missing += (missing.empty() ? "" : ", ") + combo.to_string();
        if (!missing.empty())
            throw_data("incomplete committee: no candidates for combinations: " + missing);
    }
    std::vector<CommitteeMember> members;
    if (!committee_cached) {
        members = build_committee(candidates, scored);
        save_committee(outcome.committee_path, members);
        cache.store("committee", committee_digest, {outcome.committee_path});
    } else {
        members = load_committee(outcome.committee_path);
    }
    note({"committee", committee_cached, committee_digest});

    // ---- per-lambda sweep ----
    VoteMatrix votes_full = committee_predict(members, scored);
    VoteMatrix votes_train = votes_for_split(votes_full, scored, Split::Train);
    VoteMatrix votes_val = votes_for_split(votes_full, scored, Split::Val);
    VoteMatrix votes_test = votes_for_split(votes_full, scored, Split::Test);
    std::vector<int> labels_train = scored.labels_of(Split::Train);
    std::vector<int> labels_val = scored.labels_of(Split::Val);
    std::vector<int> labels_test = scored.labels_of(Split::Test);

    json pso_cfg{{"particles", cfg.pso.particles},
                 {"epochs", cfg.pso.epochs},
                 {"inertia", cfg.pso.inertia},
                 {"cognitive", cfg.pso.cognitive},
                 {"social", cfg.pso.social},
                 {"velocity_clamp", cfg.pso.velocity_clamp},
                 {"seed", cfg.seed},
                 {"committee_digest", committee_digest}};
    std::vector<std::string> lambda_digests;
    for (size_t i = 0; i < cfg.lambdas.size(); ++i) {
        json stage_cfg = pso_cfg;
        stage_cfg["lambda"] = cfg.lambdas[i];
        stage_cfg["index"] = i;
        std::string digest = digest_of(stage_cfg, {});
        lambda_digests.push_back(digest);
        std::string stage_name = "sweep_" + std::to_string(i);
        std::string report_path = (sweep_dir / ("lambda_" + std::to_string(i) + ".json")).string();
        outcome.lambda_report_paths.push_back(report_path);
        bool hit = cache.hit(stage_name, digest, {report_path});
        if (!hit) {
            PsoConfig run_cfg = cfg.pso;
            run_cfg.lambda = cfg.lambdas[i];
            run_cfg.seed = cfg.seed + i;
            PsoResult result =
                pso_optimize(votes_train, votes_val, labels_train, labels_val, run_cfg, opts.threads);
            write_json_file(report_path, lambda_report_json(result, members, votes_train, votes_val,
                                                            votes_test, labels_train, labels_val,
                                                            labels_test));
            cache.store(stage_name, digest, {report_path});
        }
        note({stage_name, hit, digest});
    }

    // ---- summary ----
    Fnv1a sum_h;
    for (const auto& d : lambda_digests) sum_h.update(d);
    std::string summary_digest = sum_h.hex();
    outcome.summary_path = (sweep_dir / "summary.json").string();
    bool summary_cached = cache.hit("summary", summary_digest, {outcome.summary_path});
    if (!summary_cached) {
        json rows = json::array();
        size_t best_idx = 0;
        double best_val = -1.0;
        for (size_t i = 0; i < outcome.lambda_report_paths.size(); ++i) {
            json rep = read_json_file(outcome.lambda_report_paths[i]);
            json row{{"lambda", rep.at("lambda")},
                     {"best_fitness", rep.at("best_fitness")},
                     {"zero_weight_count", rep.at("zero_weight_count")},
                     {"train_f1_macro", rep.at("metrics").at("train").at("f1_macro")},
                     {"train_f1_weighted", rep.at("metrics").at("train").at("f1_weighted")},
                     {"val_f1_macro", rep.at("metrics").at("val").at("f1_macro")},
                     {"val_f1_weighted", rep.at("metrics").at("val").at("f1_weighted")}};
            if (rep.at("metrics").contains("test")) {
                row["test_f1_macro"] = rep.at("metrics").at("test").at("f1_macro");
                row["test_f1_weighted"] = rep.at("metrics").at("test").at("f1_weighted");
            }
            double val_f1 = rep.at("metrics").at("val").at("f1_macro").get<double>();
            if (val_f1 > best_val) {
                best_val = val_f1;
                best_idx = i;
            }
            rows.push_back(std::move(row));
        }
        json summary{{"rows", rows},
                     {"best_by_val", json{{"index", best_idx}, {"lambda", cfg.lambdas[best_idx]}}}};
        write_json_file(outcome.summary_path, summary);
        cache.store("summary", summary_digest, {outcome.summary_path});
    }
    note({"summary", summary_cached, summary_digest});

    // ---- run manifest ----
    RunManifestInfo manifest_info;
    manifest_info.command_line = opts.command_line;
    manifest_info.config_snapshot = cfg.raw;
    manifest_info.seed = cfg.seed;
    for (const auto& f : input_files) manifest_info.input_digests[f] = file_digest_hex(f);
    manifest_info.outputs = feature_outputs;
    manifest_info.outputs.insert(manifest_info.outputs.end(), cand_outputs.begin(), cand_outputs.end());
    manifest_info.outputs.push_back(outcome.committee_path);
    manifest_info.outputs.insert(manifest_info.outputs.end(), outcome.lambda_report_paths.begin(),
                                 outcome.lambda_report_paths.end());
    manifest_info.outputs.push_back(outcome.summary_path);
    manifest_info.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json stages = json::array();
    for (const auto& st : outcome.stages)
        stages.push_back(json{{"name", st.name}, {"cached", st.cached}, {"digest", st.digest}});
    manifest_info.extra = stages;
    write_run_manifest((out / "run_manifest.json").string(), manifest_info);
    return outcome;
}

}  // namespace ahpipe

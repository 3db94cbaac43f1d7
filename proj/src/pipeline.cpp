#include "oriole/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "oriole/configfile.hpp"
#include "oriole/csvfmt.hpp"
#include "oriole/errors.hpp"
#include "oriole/rng.hpp"
#include "oriole/targetsel.hpp"

namespace fs = std::filesystem;

namespace oriole {

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::basic: return "basic";
        case Scenario::fawkes: return "fawkes";
        case Scenario::oriole: return "oriole";
    }
    throw InputError("unknown scenario");
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "basic") return Scenario::basic;
    if (name == "fawkes") return Scenario::fawkes;
    if (name == "oriole") return Scenario::oriole;
    throw InputError("unknown scenario: " + name);
}

void ScenarioConfig::validate() const {
    cloak.validate();
    train.validate();
    split.validate();
    if (scenario == Scenario::oriole && m < 1)
        throw InputError("ScenarioConfig: oriole requires m >= 1");
}

double EvalCounts::accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

double EvalCounts::recall(int label) const {
    auto it = per_label.find(label);
    if (it == per_label.end() || it->second.first == 0) return 0.0;
    return static_cast<double>(it->second.second) / static_cast<double>(it->second.first);
}

EvalCounts evaluate(const ClassifierModel& model, const LabeledDataset& test) {
    for (int l : test.labels)
        if (model.label_index(l) < 0)
            throw InputError("evaluate: test label " + std::to_string(l) +
                             " is not among the model's classes");
    const long n = static_cast<long>(test.size());
    std::vector<int> predicted(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        predicted[static_cast<std::size_t>(i)] = model.predict(test.images[static_cast<std::size_t>(i)]);

    EvalCounts counts;
    counts.total = test.size();
    for (std::size_t i = 0; i < test.size(); ++i) {
        auto& [cnt, hit] = counts.per_label[test.labels[i]];
        cnt++;
        if (predicted[i] == test.labels[i]) {
            hit++;
            counts.correct++;
        }
    }
    return counts;
}

namespace {

constexpr std::uint64_t kPhiPurpose = 0x706869ULL;
constexpr std::uint64_t kTrainPurpose = 0x747261696eULL;
constexpr std::uint64_t kUserSplitPurpose = 0x75736572ULL;

void validate_bundle(const DatasetBundle& data) {
    if (data.attacker_pool.empty()) throw InputError("pipeline: empty attacker pool");
    if (data.user.empty()) throw InputError("pipeline: empty user image set");
    if (data.public_pool.empty()) throw InputError("pipeline: empty public pool");
    // label-range convention: public < attacker < user
    for (int l : data.public_pool.labels)
        if (l < 0 || l >= data.n_public)
            throw InputError("pipeline: public-pool label outside its range");
    for (int l : data.attacker_pool.labels)
        if (l < data.n_public || l >= data.n_public + data.n_attacker)
            throw InputError("pipeline: attacker-pool label outside its range");
    for (int l : data.user.labels)
        if (l != data.user_label) throw InputError("pipeline: user label mismatch");
}

struct ScenarioState {
    UserSplit split;
    EmbeddingModel phi;
    CentroidTable table;
    int upload_target = -1;  // collection-level most-dissimilar class
};

ScenarioState prepare_protected(const DatasetBundle& data, const ScenarioConfig& cfg) {
    ScenarioState st;
    st.split = split_user(data.user.images, cfg.split, derive_seed(cfg.seed, kUserSplitPurpose));
    TrainConfig phi_cfg = cfg.train;
    phi_cfg.seed = derive_seed(cfg.seed, kPhiPurpose);
    st.phi = pretrain_feature_extractor(data.public_pool, phi_cfg);
    st.table = compute_centroids(data.public_pool, st.phi);
    auto distances = distance_set(st.split.train, st.table, st.phi);
    st.upload_target =
        select_targets(distances, st.table, 1, data.user_label).labels.front();
    return st;
}

/// User-side cloaks of the uploaded set U_A, all toward one chosen class.
std::vector<CloakResult> cloak_uploads(const ScenarioState& st, const ScenarioConfig& cfg) {
    const FeatureVector& target = *st.table.find(st.upload_target);
    std::vector<CloakResult> out(st.split.train.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(st.split.train.size()); ++i)
        out[static_cast<std::size_t>(i)] =
            cloak_to_target(st.split.train[static_cast<std::size_t>(i)], target, st.phi,
                            cfg.cloak, st.upload_target);
    return out;
}

void add_target_classes(LabeledDataset& train_set, const DatasetBundle& data,
                        const std::set<int>& target_labels) {
    for (std::size_t i = 0; i < data.public_pool.size(); ++i)
        if (target_labels.count(data.public_pool.labels[i]))
            train_set.push_back(data.public_pool.images[i], data.public_pool.labels[i]);
}

MetricsReport finish(const ScenarioConfig& cfg, const LabeledDataset& train_set,
                     const LabeledDataset& test_set, int user_label,
                     std::size_t n_multi_cloaks, RunArtifacts* artifacts) {
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = derive_seed(cfg.seed, kTrainPurpose);
    ClassifierModel model = train_classifier(train_set, train_cfg);
    EvalCounts counts = evaluate(model, test_set);

    MetricsReport report;
    report.scenario = scenario_name(cfg.scenario);
    report.user_recall = counts.recall(user_label);
    report.overall_accuracy = counts.accuracy();
    report.multi_cloak_fraction =
        static_cast<double>(n_multi_cloaks) / static_cast<double>(train_set.size());
    report.n_train = train_set.size();
    report.n_test = test_set.size();
    report.config = cfg;
    if (artifacts) artifacts->model = std::move(model);
    return report;
}

}  // namespace

UserSplit scenario_user_split(const DatasetBundle& data, const ScenarioConfig& cfg) {
    cfg.validate();
    return split_user(data.user.images, cfg.split, derive_seed(cfg.seed, kUserSplitPurpose));
}

MetricsReport run_basic(const DatasetBundle& data, const ScenarioConfig& cfg,
                        RunArtifacts* artifacts) {
    cfg.validate();
    validate_bundle(data);
    UserSplit split =
        split_user(data.user.images, cfg.split, derive_seed(cfg.seed, kUserSplitPurpose));

    LabeledDataset train_set = data.attacker_pool;
    for (const Image& img : split.train) train_set.push_back(img, data.user_label);
    LabeledDataset test_set;
    for (const Image& img : split.test) test_set.push_back(img, data.user_label);

    return finish(cfg, train_set, test_set, data.user_label, 0, artifacts);
}

MetricsReport run_fawkes(const DatasetBundle& data, const ScenarioConfig& cfg,
                         RunArtifacts* artifacts) {
    cfg.validate();
    validate_bundle(data);
    ScenarioState st = prepare_protected(data, cfg);
    std::vector<CloakResult> uploads = cloak_uploads(st, cfg);

    LabeledDataset train_set = data.attacker_pool;
    for (const CloakResult& r : uploads) train_set.push_back(r.cloaked, data.user_label);
    if (cfg.include_targets) add_target_classes(train_set, data, {st.upload_target});

    LabeledDataset test_set;
    for (const Image& img : st.split.test) test_set.push_back(img, data.user_label);

    if (artifacts) {
        artifacts->have_phi = true;
        artifacts->phi = st.phi;
        artifacts->upload_target = st.upload_target;
        artifacts->upload_cloaks = std::move(uploads);
    }
    return finish(cfg, train_set, test_set, data.user_label, 0, artifacts);
}

MetricsReport run_oriole(const DatasetBundle& data, const ScenarioConfig& cfg,
                         RunArtifacts* artifacts) {
    cfg.validate();
    validate_bundle(data);
    if (cfg.m < 1) throw InputError("run_oriole: m must be >= 1");
    ScenarioState st = prepare_protected(data, cfg);
    std::vector<CloakResult> uploads = cloak_uploads(st, cfg);

    // S_O: every leaked image cloaked toward each of the top-m targets
    auto distances = distance_set(st.split.leaked, st.table, st.phi);
    TargetSet targets = select_targets(distances, st.table, cfg.m, data.user_label);
    const std::size_t n_pairs = st.split.leaked.size() * targets.size();
    std::vector<CloakResult> multi(n_pairs);
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < static_cast<long>(n_pairs); ++k) {
        const std::size_t img = static_cast<std::size_t>(k) / targets.size();
        const std::size_t t = static_cast<std::size_t>(k) % targets.size();
        multi[static_cast<std::size_t>(k)] = cloak_to_target(
            st.split.leaked[img], targets.centroids[t], st.phi, cfg.cloak, targets.labels[t]);
    }

    LabeledDataset train_set = data.attacker_pool;
    for (const CloakResult& r : uploads) train_set.push_back(r.cloaked, data.user_label);
    for (const CloakResult& r : multi) train_set.push_back(r.cloaked, data.user_label);
    if (cfg.include_targets) {
        std::set<int> inc(targets.labels.begin(), targets.labels.end());
        inc.insert(st.upload_target);
        add_target_classes(train_set, data, inc);
    }

    // evasion phase: Fawkes-cloak each clean test image before classifying,
    // selecting the target from that image alone
    std::vector<CloakResult> test_cloaks(st.split.test.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(st.split.test.size()); ++i) {
        const std::vector<Image> own{st.split.test[static_cast<std::size_t>(i)]};
        test_cloaks[static_cast<std::size_t>(i)] = fawkes_cloak(
            st.split.test[static_cast<std::size_t>(i)], own, st.table, st.phi, cfg.cloak,
            data.user_label);
    }
    LabeledDataset test_set;
    for (const CloakResult& r : test_cloaks) test_set.push_back(r.cloaked, data.user_label);

    if (artifacts) {
        artifacts->have_phi = true;
        artifacts->phi = st.phi;
        artifacts->upload_target = st.upload_target;
        artifacts->targets = targets;
        artifacts->upload_cloaks = std::move(uploads);
        artifacts->multi_cloak_set = std::move(multi);
        artifacts->test_cloaks = std::move(test_cloaks);
    }
    return finish(cfg, train_set, test_set, data.user_label, n_pairs, artifacts);
}

MetricsReport run_scenario(const DatasetBundle& data, const ScenarioConfig& cfg,
                           RunArtifacts* artifacts) {
    switch (cfg.scenario) {
        case Scenario::basic: return run_basic(data, cfg, artifacts);
        case Scenario::fawkes: return run_fawkes(data, cfg, artifacts);
        case Scenario::oriole: return run_oriole(data, cfg, artifacts);
    }
    throw InputError("unknown scenario");
}

std::string metrics_csv_header() {
    return "# oriole metrics v1\n"
           "scenario,user_recall,overall_accuracy,multi_cloak_fraction,n_train,n_test,"
           "rho,m,leak_ratio,train_test_ratio,include_targets,seed\n";
}

std::string metrics_csv_row(const MetricsReport& r) {
    std::ostringstream out;
    out << r.scenario << "," << csv::fmt(r.user_recall) << "," << csv::fmt(r.overall_accuracy)
        << "," << csv::fmt(r.multi_cloak_fraction) << "," << r.n_train << "," << r.n_test << ","
        << csv::fmt(r.config.cloak.rho) << "," << r.config.m << ","
        << csv::fmt(r.config.split.leak_ratio) << "," << csv::fmt(r.config.split.train_test_ratio)
        << "," << (r.config.include_targets ? 1 : 0) << "," << r.config.seed << "\n";
    return out.str();
}

std::string metrics_text(const MetricsReport& r) {
    std::ostringstream out;
    out << "scenario:             " << r.scenario << "\n"
        << "user recall:          " << csv::fmt(r.user_recall) << "\n"
        << "overall accuracy:     " << csv::fmt(r.overall_accuracy) << "\n"
        << "multi-cloak fraction: " << csv::fmt(r.multi_cloak_fraction) << "\n"
        << "training images:      " << r.n_train << "\n"
        << "test images:          " << r.n_test << "\n";
    return out.str();
}

MetricsReport run_scenario_to_dir(const DatasetBundle& data, const ScenarioConfig& cfg,
                                  const std::string& out_dir) {
    fs::create_directories(out_dir);
    RunArtifacts artifacts;
    MetricsReport report = run_scenario(data, cfg, &artifacts);

    {
        std::ofstream f(fs::path(out_dir) / "config_echo.txt", std::ios::binary);
        f << echo_scenario_config(cfg);
    }
    {
        std::ofstream f(fs::path(out_dir) / "cloak_audit.csv", std::ios::binary);
        write_cloak_audit_header(f);
        for (const CloakResult& r : artifacts.upload_cloaks)
            write_cloak_audit_row(f, r, cfg.cloak.rho);
        for (const CloakResult& r : artifacts.multi_cloak_set)
            write_cloak_audit_row(f, r, cfg.cloak.rho);
        for (const CloakResult& r : artifacts.test_cloaks)
            write_cloak_audit_row(f, r, cfg.cloak.rho);
    }
    if (artifacts.have_phi)
        save_model(artifacts.phi, (fs::path(out_dir) / "model_phi.bin").string());
    save_classifier(artifacts.model, (fs::path(out_dir) / "model_m.bin").string());
    {
        std::ofstream f(fs::path(out_dir) / "metrics.csv", std::ios::binary);
        f << metrics_csv_header() << metrics_csv_row(report);
    }
    {
        std::ofstream f(fs::path(out_dir) / "metrics.txt", std::ios::binary);
        f << metrics_text(report);
    }
    return report;
}

}  // namespace oriole

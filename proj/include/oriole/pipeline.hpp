#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oriole/cloak.hpp"
#include "oriole/datagen.hpp"
#include "oriole/dataset.hpp"
#include "oriole/model.hpp"

namespace oriole {

enum class Scenario { basic, fawkes, oriole };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

struct ScenarioConfig {
    Scenario scenario = Scenario::oriole;
    CloakConfig cloak;
    TrainConfig train;
    SplitSpec split;
    int m = 20;
    std::uint64_t seed = 1;
    // when set, the attacker's training pool also contains the selected
    // target classes under their own labels
    bool include_targets = false;

    void validate() const;
};

struct MetricsReport {
    std::string scenario;
    double user_recall = 0.0;
    double overall_accuracy = 0.0;
    double multi_cloak_fraction = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    ScenarioConfig config;
};

/// Classification counts on a labeled test set.
struct EvalCounts {
    std::size_t total = 0;
    std::size_t correct = 0;
    std::map<int, std::pair<std::size_t, std::size_t>> per_label;  // label -> (count, correct)

    double accuracy() const;
    double recall(int label) const;
};

/// Argmax-probability classification; throws InputError when a test label is
/// not among the model's classes.
EvalCounts evaluate(const ClassifierModel& model, const LabeledDataset& test);

/// Side artifacts of a scenario run, for audit logs and run directories.
struct RunArtifacts {
    bool have_phi = false;
    EmbeddingModel phi;
    ClassifierModel model;
    TargetSet targets;                         // S_O target set (oriole only)
    int upload_target = -1;                    // user-side Fawkes target class
    std::vector<CloakResult> upload_cloaks;    // user-side cloaks of U_A
    std::vector<CloakResult> multi_cloak_set;  // S_O in (image, target) order
    std::vector<CloakResult> test_cloaks;      // S_F in U_B order
};

/// The U_A / U_B / leaked split a scenario run with this config would use.
UserSplit scenario_user_split(const DatasetBundle& data, const ScenarioConfig& cfg);

MetricsReport run_basic(const DatasetBundle& data, const ScenarioConfig& cfg,
                        RunArtifacts* artifacts = nullptr);
MetricsReport run_fawkes(const DatasetBundle& data, const ScenarioConfig& cfg,
                         RunArtifacts* artifacts = nullptr);
MetricsReport run_oriole(const DatasetBundle& data, const ScenarioConfig& cfg,
                         RunArtifacts* artifacts = nullptr);
MetricsReport run_scenario(const DatasetBundle& data, const ScenarioConfig& cfg,
                           RunArtifacts* artifacts = nullptr);

/// Full run directory: config echo, cloak audit log, model binaries, metrics
/// CSV and a text summary.
MetricsReport run_scenario_to_dir(const DatasetBundle& data, const ScenarioConfig& cfg,
                                  const std::string& out_dir);

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& r);
std::string metrics_text(const MetricsReport& r);

}  // namespace oriole

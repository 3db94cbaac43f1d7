#include "oriole/reproduce.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>

#include "oriole/configfile.hpp"
#include "oriole/csvfmt.hpp"
#include "oriole/errors.hpp"
#include "oriole/pca.hpp"
#include "oriole/rng.hpp"

namespace fs = std::filesystem;

namespace oriole {

namespace configs {

ExperimentConfig table1(std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.data.n_public_identities = 20;
    cfg.data.n_attacker_identities = 10;
    cfg.data.images_per_identity = 100;
    cfg.data.seed = derive_seed(seed, 0x743164ULL);

    cfg.scenario.scenario = Scenario::oriole;
    cfg.scenario.cloak.rho = 0.008;
    cfg.scenario.cloak.iterations = 120;
    cfg.scenario.m = 20;
    cfg.scenario.split.leak_ratio = 1.0;
    cfg.scenario.train.epochs = 20;
    cfg.scenario.train.batch_size = 16;
    cfg.scenario.train.learning_rate = 0.1;
    cfg.scenario.seed = derive_seed(seed, 0x743173ULL);
    return cfg;
}

ExperimentConfig sweep_base(std::uint64_t seed) {
    ExperimentConfig cfg = table1(seed);
    cfg.data.n_attacker_identities = 6;
    cfg.data.images_per_identity = 40;
    cfg.data.seed = derive_seed(seed, 0x737764ULL);
    cfg.scenario.cloak.iterations = 80;
    cfg.scenario.seed = derive_seed(seed, 0x737773ULL);
    return cfg;
}

ExperimentConfig fig6(std::uint64_t seed) {
    ExperimentConfig cfg = sweep_base(seed);
    cfg.scenario.m = 4;
    cfg.data.seed = derive_seed(seed, 0x663664ULL);
    cfg.scenario.seed = derive_seed(seed, 0x663673ULL);
    return cfg;
}

}  // namespace configs

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write: " + path.string());
    f << text;
}

void run_table1(const DatasetBundle& data, const ExperimentConfig& base, bool include_targets,
                const fs::path& out, std::ostream& log) {
    const std::string tag = include_targets ? "included" : "excluded";
    std::string summary = metrics_csv_header();
    for (Scenario s : {Scenario::basic, Scenario::fawkes, Scenario::oriole}) {
        ScenarioConfig cfg = base.scenario;
        cfg.scenario = s;
        cfg.include_targets = include_targets;
        const fs::path run_dir = out / ("table1_" + tag) / scenario_name(s);
        MetricsReport r = run_scenario_to_dir(data, cfg, run_dir.string());
        summary += metrics_csv_row(r);
        log << "table1 " << tag << " " << r.scenario << ": user_recall=" << r.user_recall
            << " accuracy=" << r.overall_accuracy << "\n";
    }
    write_file(out / ("table1_" + tag + ".csv"), summary);
}

std::vector<SweepRow> sweep_to_files(SweepSpec spec, const fs::path& csv_path,
                                     const fs::path& audit_path, std::ostream& log) {
    std::ofstream csv(csv_path, std::ios::binary);
    std::ofstream audit(audit_path, std::ios::binary);
    auto rows = run_sweep(spec, &csv, &audit);
    log << csv_path.filename().string() << ":";
    for (const auto& r : rows) log << " " << r.value << "->" << r.mean_user_recall;
    log << "\n";
    return rows;
}

void run_fig6(std::uint64_t seed, const fs::path& out, std::ostream& log) {
    ExperimentConfig cfg = configs::fig6(seed);
    DatasetBundle data = generate(cfg.data);
    RunArtifacts artifacts;
    ScenarioConfig sc = cfg.scenario;
    sc.scenario = Scenario::oriole;
    run_oriole(data, sc, &artifacts);
    UserSplit split = scenario_user_split(data, sc);

    std::vector<std::pair<FeatureVector, std::string>> features;
    for (const Image& img : split.leaked) features.emplace_back(forward(artifacts.phi, img), "user_leaked");
    for (const Image& img : split.test) features.emplace_back(forward(artifacts.phi, img), "user_test");
    for (const CloakResult& r : artifacts.multi_cloak_set)
        features.emplace_back(forward(artifacts.phi, r.cloaked), "multi_cloak");
    std::set<int> target_labels(artifacts.targets.labels.begin(), artifacts.targets.labels.end());
    for (std::size_t i = 0; i < data.public_pool.size(); ++i)
        if (target_labels.count(data.public_pool.labels[i]))
            features.emplace_back(forward(artifacts.phi, data.public_pool.images[i]), "target_class");
    for (const CloakResult& r : artifacts.test_cloaks)
        features.emplace_back(forward(artifacts.phi, r.cloaked), "cloaked_test");
    const int other_label = data.attacker_pool.labels.front();
    for (std::size_t i = 0; i < data.attacker_pool.size(); ++i)
        if (data.attacker_pool.labels[i] == other_label)
            features.emplace_back(forward(artifacts.phi, data.attacker_pool.images[i]), "other_class");

    write_file(out / "fig6_pca.csv", pca_csv(pca_project(features)));

    // sample dump: one clean leaked image with its multi-cloaks
    fs::create_directories(out / "fig6_cloaks");
    write_pgm(split.leaked.front(), (out / "fig6_cloaks" / "clean.pgm").string());
    for (std::size_t t = 0; t < artifacts.targets.size(); ++t) {
        char name[48];
        std::snprintf(name, sizeof name, "cloak_t%02d.pgm",
                      artifacts.targets.labels[t]);
        write_pgm(artifacts.multi_cloak_set[t].cloaked, (out / "fig6_cloaks" / name).string());
    }
    log << "fig6: " << features.size() << " projected feature vectors\n";
}

}  // namespace

void reproduce_all(std::uint64_t seed, const std::string& out_dir, std::ostream& log) {
    const fs::path out(out_dir);
    fs::create_directories(out);

    // flagship comparison on the committed table-1 dataset, both variants
    ExperimentConfig t1 = configs::table1(seed);
    DatasetBundle t1_data = generate(t1.data);
    save_bundle(t1_data, (out / "dataset_table1").string());
    DatasetBundle t1_loaded = load_bundle((out / "dataset_table1").string());
    write_file(out / "table1_config.txt", echo_experiment_config(t1));
    run_table1(t1_loaded, t1, false, out, log);
    run_table1(t1_loaded, t1, true, out, log);

    // trend sweeps on the lighter committed dataset
    ExperimentConfig base = configs::sweep_base(seed);
    write_file(out / "sweep_config.txt", echo_experiment_config(base));

    SweepSpec fig5;
    fig5.axis = SweepAxis::rho;
    fig5.values = {0.002, 0.004, 0.008, 0.016};
    fig5.base = base;
    auto fig5_rows = sweep_to_files(fig5, out / "fig5_rho_sweep.csv",
                                    out / "fig5_cloak_audit.csv", log);

    std::vector<SweepRow> m_rows_excluded;
    for (bool included : {false, true}) {
        SweepSpec fig7m;
        fig7m.axis = SweepAxis::m;
        fig7m.values = {1, 4, 8, 20};
        fig7m.base = base;
        fig7m.base.scenario.include_targets = included;
        const char* tag = included ? "included" : "excluded";
        auto rows = sweep_to_files(fig7m, out / (std::string("fig7_m_sweep_") + tag + ".csv"),
                                   out / (std::string("fig7_m_audit_") + tag + ".csv"), log);
        if (!included) m_rows_excluded = rows;
    }

    std::vector<SweepRow> r_rows_excluded;
    for (bool included : {false, true}) {
        SweepSpec fig7r;
        fig7r.axis = SweepAxis::leak_ratio;
        fig7r.values = {0.1, 0.5, 1.0};
        fig7r.base = base;
        fig7r.base.scenario.include_targets = included;
        const char* tag = included ? "included" : "excluded";
        auto rows = sweep_to_files(fig7r, out / (std::string("fig7_r_sweep_") + tag + ".csv"),
                                   out / (std::string("fig7_r_audit_") + tag + ".csv"), log);
        if (!included) r_rows_excluded = rows;
    }

    {
        SweepSpec table2;
        table2.axis = SweepAxis::split_ratio;
        table2.values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        table2.base = base;
        table2.base.scenario.scenario = Scenario::basic;
        sweep_to_files(table2, out / "table2_split_sweep.csv", out / "table2_audit.csv", log);
    }

    // Eq. 5 diagnostic fit over the grid assembled from the sweeps above
    std::vector<GridPoint> grid;
    for (const auto& r : fig5_rows)
        grid.push_back({base.scenario.split.leak_ratio, static_cast<double>(base.scenario.m),
                        r.value, r.mean_user_recall});
    for (const auto& r : m_rows_excluded)
        grid.push_back({base.scenario.split.leak_ratio, r.value, base.scenario.cloak.rho,
                        r.mean_user_recall});
    for (const auto& r : r_rows_excluded)
        grid.push_back({r.value, static_cast<double>(base.scenario.m), base.scenario.cloak.rho,
                        r.mean_user_recall});
    write_file(out / "eq5_grid.csv", grid_csv(grid));
    FitResult fit = fit_eq5(grid);
    write_file(out / "eq5_fit.csv", fit_csv(fit, grid.size()));
    log << "eq5 fit: k=" << fit.k << " r_squared=" << fit.r_squared << "\n";

    run_fig6(seed, out, log);
}

}  // namespace oriole

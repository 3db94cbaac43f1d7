#include "oriole/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>

#include "oriole/configfile.hpp"
#include "oriole/errors.hpp"
#include "oriole/pca.hpp"
#include "oriole/reproduce.hpp"

namespace fs = std::filesystem;

namespace oriole::cli {

namespace {

struct CommonArgs {
    std::string config_path;
    std::string data_dir;
    std::string out_dir = "out";
    std::string phi_path;
    std::string scenario;
    std::string input_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> rho;
    std::optional<int> m;
    std::optional<double> leak_ratio;
    bool include_targets = false;
};

ExperimentConfig build_experiment(const CommonArgs& args) {
    ExperimentConfig cfg;
    if (!args.config_path.empty()) apply_experiment_keys(parse_config_file(args.config_path), cfg);
    if (args.seed) {
        cfg.scenario.seed = *args.seed;
        cfg.data.seed = *args.seed;
    }
    if (!args.scenario.empty()) cfg.scenario.scenario = scenario_from_name(args.scenario);
    if (args.rho) cfg.scenario.cloak.rho = *args.rho;
    if (args.m) cfg.scenario.m = *args.m;
    if (args.leak_ratio) cfg.scenario.split.leak_ratio = *args.leak_ratio;
    if (args.include_targets) cfg.scenario.include_targets = true;
    return cfg;
}

int cmd_generate(const CommonArgs& args, std::ostream& out) {
    ExperimentConfig cfg = build_experiment(args);
    DatasetBundle data = generate(cfg.data);
    save_bundle(data, args.out_dir);
    std::ofstream echo(fs::path(args.out_dir) / "generate_config.txt", std::ios::binary);
    echo << echo_experiment_config(cfg);
    out << "dataset written to " << args.out_dir << " ("
        << data.public_pool.size() + data.attacker_pool.size() + data.user.size()
        << " images)\n";
    return 0;
}

int cmd_pretrain(const CommonArgs& args, std::ostream& out) {
    if (args.data_dir.empty()) throw InputError("pretrain: --data <dir> is required");
    ExperimentConfig cfg = build_experiment(args);
    DatasetBundle data = load_bundle(args.data_dir);
    TrainConfig tc = cfg.scenario.train;
    tc.seed = cfg.scenario.seed;
    EmbeddingModel phi = pretrain_feature_extractor(data.public_pool, tc);
    fs::create_directories(args.out_dir);
    const std::string path = (fs::path(args.out_dir) / "model_phi.bin").string();
    save_model(phi, path);
    out << "feature extractor written to " << path << "\n";
    return 0;
}

int cmd_run(const CommonArgs& args, std::ostream& out) {
    if (args.data_dir.empty())
        throw InputError("run: --data <dir> is required (generate a dataset first)");
    ExperimentConfig cfg = build_experiment(args);
    DatasetBundle data = load_bundle(args.data_dir);
    MetricsReport report = run_scenario_to_dir(data, cfg.scenario, args.out_dir);
    out << metrics_text(report);
    out << "run artifacts written to " << args.out_dir << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args, std::ostream& out) {
    if (args.config_path.empty())
        throw InputError("sweep: --config <file> with sweep_axis/sweep_values is required");
    SweepSpec spec;
    ConfigMap map = parse_config_file(args.config_path);
    apply_sweep_keys(map, spec);
    if (args.seed) spec.base.scenario.seed = *args.seed;
    fs::create_directories(args.out_dir);
    std::ofstream csv(fs::path(args.out_dir) / "sweep.csv", std::ios::binary);
    std::ofstream audit(fs::path(args.out_dir) / "sweep_cloak_audit.csv", std::ios::binary);
    run_sweep(spec, &csv, &audit);
    out << "sweep results written to " << (fs::path(args.out_dir) / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_pca(const CommonArgs& args, std::ostream& out) {
    ExperimentConfig cfg = build_experiment(args);
    if (args.config_path.empty()) cfg = configs::fig6(args.seed.value_or(1));
    DatasetBundle data = generate(cfg.data);
    ScenarioConfig sc = cfg.scenario;
    sc.scenario = Scenario::oriole;
    RunArtifacts artifacts;
    run_oriole(data, sc, &artifacts);
    UserSplit split = scenario_user_split(data, sc);

    std::vector<std::pair<FeatureVector, std::string>> features;
    for (const Image& img : split.leaked)
        features.emplace_back(forward(artifacts.phi, img), "user_leaked");
    for (const Image& img : split.test)
        features.emplace_back(forward(artifacts.phi, img), "user_test");
    for (const CloakResult& r : artifacts.multi_cloak_set)
        features.emplace_back(forward(artifacts.phi, r.cloaked), "multi_cloak");
    for (const CloakResult& r : artifacts.test_cloaks)
        features.emplace_back(forward(artifacts.phi, r.cloaked), "cloaked_test");
    std::set<int> target_labels(artifacts.targets.labels.begin(), artifacts.targets.labels.end());
    for (std::size_t i = 0; i < data.public_pool.size(); ++i)
        if (target_labels.count(data.public_pool.labels[i]))
            features.emplace_back(forward(artifacts.phi, data.public_pool.images[i]), "target_class");

    fs::create_directories(args.out_dir);
    std::ofstream f(fs::path(args.out_dir) / "pca.csv", std::ios::binary);
    f << pca_csv(pca_project(features));
    out << "pca coordinates written to " << (fs::path(args.out_dir) / "pca.csv").string() << "\n";
    return 0;
}

int cmd_fit_eq5(const CommonArgs& args, std::ostream& out) {
    if (args.input_path.empty()) throw InputError("fit-eq5: --in <grid.csv> is required");
    std::ifstream f(args.input_path);
    if (!f) throw InputError("cannot open: " + args.input_path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    auto points = parse_grid_csv(text);
    FitResult fit = fit_eq5(points);
    const std::string csv = fit_csv(fit, points.size());
    fs::create_directories(args.out_dir);
    std::ofstream o(fs::path(args.out_dir) / "eq5_fit.csv", std::ios::binary);
    o << csv;
    out << csv;
    return 0;
}

int cmd_reproduce_all(const CommonArgs& args, std::ostream& out) {
    reproduce_all(args.seed.value_or(7), args.out_dir, out);
    out << "all figure and table CSVs written to " << args.out_dir << "\n";
    return 0;
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"oriole: multi-cloak data poisoning against Fawkes-style image cloaking"};
    app.require_subcommand(1);
    CommonArgs args;

    auto add_common = [&](CLI::App* cmd, bool with_scenario) {
        cmd->add_option("--config", args.config_path, "key = value config file");
        cmd->add_option("--seed", args.seed, "master seed");
        cmd->add_option("--out", args.out_dir, "output directory");
        if (with_scenario) {
            cmd->add_option("--scenario", args.scenario, "basic | fawkes | oriole");
            cmd->add_option("--rho", args.rho, "DSSIM perturbation budget");
            cmd->add_option("--m", args.m, "multi-cloak count");
            cmd->add_option("--leak-ratio", args.leak_ratio, "leaked fraction R of U_A");
            cmd->add_flag("--include-targets", args.include_targets,
                          "add the selected target classes to the training pool");
        }
    };

    CLI::App* generate = app.add_subcommand("generate", "write a synthetic dataset");
    add_common(generate, false);
    CLI::App* pretrain = app.add_subcommand("pretrain", "train the feature extractor");
    add_common(pretrain, false);
    pretrain->add_option("--data", args.data_dir, "dataset directory");
    CLI::App* run = app.add_subcommand("run", "run one scenario end to end");
    add_common(run, true);
    run->add_option("--data", args.data_dir, "dataset directory");
    run->add_option("--phi", args.phi_path, "pretrained feature extractor (unused: runs pretrain)");
    CLI::App* sweep = app.add_subcommand("sweep", "run an axis sweep from a config file");
    add_common(sweep, false);
    CLI::App* pca = app.add_subcommand("pca", "export 2-D PCA feature coordinates");
    add_common(pca, false);
    CLI::App* fit = app.add_subcommand("fit-eq5", "fit accuracy = k*R*m/rho on a grid CSV");
    add_common(fit, false);
    fit->add_option("--in", args.input_path, "grid CSV produced by the sweeps");
    CLI::App* repro = app.add_subcommand("reproduce-all", "emit every figure/table CSV");
    add_common(repro, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        if (generate->parsed()) return cmd_generate(args, out);
        if (pretrain->parsed()) return cmd_pretrain(args, out);
        if (run->parsed()) return cmd_run(args, out);
        if (sweep->parsed()) return cmd_sweep(args, out);
        if (pca->parsed()) return cmd_pca(args, out);
        if (fit->parsed()) return cmd_fit_eq5(args, out);
        if (repro->parsed()) return cmd_reproduce_all(args, out);
        err << "no subcommand\n";
        return 1;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace oriole::cli

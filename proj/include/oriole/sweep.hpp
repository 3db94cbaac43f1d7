#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "oriole/pipeline.hpp"

namespace oriole {

/// Full run description: dataset recipe plus scenario settings.
struct ExperimentConfig {
    SyntheticSpec data;
    ScenarioConfig scenario;
};

enum class SweepAxis { rho, leak_ratio, m, split_ratio };

std::string axis_name(SweepAxis axis);
SweepAxis axis_from_name(const std::string& name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::rho;
    std::vector<double> values;  // strictly increasing
    int repeats = 3;
    ExperimentConfig base;

    void validate() const;
};

struct SweepRow {
    double value = 0.0;
    double mean_user_recall = 0.0;
    double std_user_recall = 0.0;
    std::vector<double> recalls;  // one per repeat
};

std::string sweep_csv_header(int repeats);
std::string sweep_csv_row(SweepAxis axis, const SweepRow& row);

/// Runs the scenario at every axis value with `repeats` derived seeds.
/// Rows are flushed to csv_out as soon as they complete; per-cloak audit
/// rows stream to audit_out when given.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::ostream* csv_out = nullptr,
                                std::ostream* audit_out = nullptr);

/// One grid observation for the accuracy = k * R * m / rho fit.
struct GridPoint {
    double leak_ratio = 0.0;
    double m = 0.0;
    double rho = 0.0;
    double accuracy = 0.0;
};

struct FitResult {
    double k = 0.0;
    double residual = 0.0;
    double r_squared = 0.0;
};

/// Least-squares fit of accuracy against z = R*m/rho through the origin.
FitResult fit_eq5(const std::vector<GridPoint>& points);

std::string grid_csv(const std::vector<GridPoint>& points);
std::vector<GridPoint> parse_grid_csv(const std::string& text);
std::string fit_csv(const FitResult& fit, std::size_t n_points);

}  // namespace oriole

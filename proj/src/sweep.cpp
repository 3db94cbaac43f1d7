#include "oriole/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "oriole/csvfmt.hpp"
#include "oriole/errors.hpp"
#include "oriole/rng.hpp"

namespace oriole {

std::string axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::rho: return "rho";
        case SweepAxis::leak_ratio: return "leak_ratio";
        case SweepAxis::m: return "m";
        case SweepAxis::split_ratio: return "split_ratio";
    }
    throw InputError("unknown sweep axis");
}

SweepAxis axis_from_name(const std::string& name) {
    if (name == "rho") return SweepAxis::rho;
    if (name == "leak_ratio") return SweepAxis::leak_ratio;
    if (name == "m") return SweepAxis::m;
    if (name == "split_ratio") return SweepAxis::split_ratio;
    throw InputError("unknown sweep axis: " + name);
}

void SweepSpec::validate() const {
    if (values.empty()) throw InputError("SweepSpec: values must be non-empty");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw InputError("SweepSpec: values must be strictly increasing");
    if (repeats < 1) throw InputError("SweepSpec: repeats must be >= 1");
    base.data.validate();
    base.scenario.validate();
}

std::string sweep_csv_header(int repeats) {
    std::ostringstream out;
    out << "# oriole sweep v1\naxis,value,mean_user_recall,std_user_recall";
    for (int r = 0; r < repeats; ++r) out << ",recall_rep" << r;
    out << "\n";
    return out.str();
}

std::string sweep_csv_row(SweepAxis axis, const SweepRow& row) {
    std::ostringstream out;
    out << axis_name(axis) << "," << csv::fmt(row.value) << ","
        << csv::fmt(row.mean_user_recall) << "," << csv::fmt(row.std_user_recall);
    for (double r : row.recalls) out << "," << csv::fmt(r);
    out << "\n";
    return out.str();
}

namespace {

constexpr std::uint64_t kRepeatPurpose = 0x726570656174ULL;

void apply_axis_value(ExperimentConfig& cfg, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::rho:
            cfg.scenario.cloak.rho = value;
            return;
        case SweepAxis::leak_ratio:
            cfg.scenario.split.leak_ratio = value;
            return;
        case SweepAxis::m: {
            const double rounded = std::round(value);
            if (std::abs(rounded - value) > 1e-9 || rounded < 1.0)
                throw InputError("sweep: m axis values must be positive integers");
            cfg.scenario.m = static_cast<int>(rounded);
            return;
        }
        case SweepAxis::split_ratio:
            cfg.scenario.split.train_test_ratio = value;
            return;
    }
    throw InputError("unknown sweep axis");
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, std::ostream* csv_out,
                                std::ostream* audit_out) {
    spec.validate();
    if (csv_out) {
        *csv_out << sweep_csv_header(spec.repeats);
        csv_out->flush();
    }
    if (audit_out) {
        write_cloak_audit_header(*audit_out);
        audit_out->flush();
    }

    // the dataset and the feature extractor do not depend on the axis value,
    // so each repeat's context is built once and reused across values
    struct RepeatContext {
        DatasetBundle data;
        std::uint64_t scenario_seed = 0;
    };
    std::vector<RepeatContext> contexts(static_cast<std::size_t>(spec.repeats));
    std::vector<bool> ready(static_cast<std::size_t>(spec.repeats), false);

    std::vector<SweepRow> rows;
    for (double value : spec.values) {
        SweepRow row;
        row.value = value;
        for (int rep = 0; rep < spec.repeats; ++rep) {
            auto& ctx = contexts[static_cast<std::size_t>(rep)];
            if (!ready[static_cast<std::size_t>(rep)]) {
                const std::uint64_t rep_seed =
                    derive_seed(spec.base.scenario.seed, kRepeatPurpose + rep);
                SyntheticSpec data_spec = spec.base.data;
                data_spec.seed = derive_seed(rep_seed, 0x64617461ULL);
                ctx.data = generate(data_spec);
                ctx.scenario_seed = rep_seed;
                ready[static_cast<std::size_t>(rep)] = true;
            }
            ExperimentConfig cfg = spec.base;
            cfg.scenario.seed = ctx.scenario_seed;
            apply_axis_value(cfg, spec.axis, value);

            RunArtifacts artifacts;
            MetricsReport report = run_scenario(ctx.data, cfg.scenario, &artifacts);
            row.recalls.push_back(report.user_recall);
            if (audit_out) {
                for (const CloakResult& r : artifacts.upload_cloaks)
                    write_cloak_audit_row(*audit_out, r, cfg.scenario.cloak.rho);
                for (const CloakResult& r : artifacts.multi_cloak_set)
                    write_cloak_audit_row(*audit_out, r, cfg.scenario.cloak.rho);
                for (const CloakResult& r : artifacts.test_cloaks)
                    write_cloak_audit_row(*audit_out, r, cfg.scenario.cloak.rho);
                audit_out->flush();
            }
        }
        double sum = 0.0;
        for (double r : row.recalls) sum += r;
        row.mean_user_recall = sum / static_cast<double>(row.recalls.size());
        double var = 0.0;
        for (double r : row.recalls) {
            const double d = r - row.mean_user_recall;
            var += d * d;
        }
        row.std_user_recall = std::sqrt(var / static_cast<double>(row.recalls.size()));
        rows.push_back(row);
        if (csv_out) {
            *csv_out << sweep_csv_row(spec.axis, row);
            csv_out->flush();  // partial results survive a later abort
        }
    }
    return rows;
}

FitResult fit_eq5(const std::vector<GridPoint>& points) {
    std::vector<double> z(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].rho > 0.0)) throw InputError("fit_eq5: rho must be > 0");
        z[i] = points[i].leak_ratio * points[i].m / points[i].rho;
    }
    std::vector<double> distinct = z;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2)
        throw InputError("fit_eq5: need at least 2 grid points with distinct R*m/rho");

    double num = 0.0, den = 0.0, mean_a = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        num += points[i].accuracy * z[i];
        den += z[i] * z[i];
        mean_a += points[i].accuracy;
    }
    if (den == 0.0) throw InputError("fit_eq5: all R*m/rho values are zero");
    mean_a /= static_cast<double>(points.size());

    FitResult fit;
    fit.k = num / den;
    double tss = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double r = points[i].accuracy - fit.k * z[i];
        fit.residual += r * r;
        const double c = points[i].accuracy - mean_a;
        tss += c * c;
    }
    fit.r_squared = tss == 0.0 ? (fit.residual == 0.0 ? 1.0 : 0.0) : 1.0 - fit.residual / tss;
    fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
    return fit;
}

std::string grid_csv(const std::vector<GridPoint>& points) {
    std::ostringstream out;
    out << "# oriole eq5-grid v1\nleak_ratio,m,rho,user_recall\n";
    for (const GridPoint& p : points)
        out << csv::fmt(p.leak_ratio) << "," << csv::fmt(p.m) << "," << csv::fmt(p.rho) << ","
            << csv::fmt(p.accuracy) << "\n";
    return out.str();
}

std::vector<GridPoint> parse_grid_csv(const std::string& text) {
    std::istringstream in(text);
    std::vector<GridPoint> out;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "leak_ratio,m,rho,user_recall")
                throw InputError("eq5 grid: unexpected header: " + line);
            saw_header = true;
            continue;
        }
        GridPoint p;
        std::istringstream row(line);
        std::string cell;
        double* fields[4] = {&p.leak_ratio, &p.m, &p.rho, &p.accuracy};
        for (double* field : fields) {
            if (!std::getline(row, cell, ',')) throw InputError("eq5 grid: short row: " + line);
            try {
                *field = std::stod(cell);
            } catch (const std::exception&) {
                throw InputError("eq5 grid: bad number: " + cell);
            }
        }
        out.push_back(p);
    }
    if (!saw_header) throw InputError("eq5 grid: missing header");
    return out;
}

std::string fit_csv(const FitResult& fit, std::size_t n_points) {
    std::ostringstream out;
    out << "# oriole eq5-fit v1\nk,residual,r_squared,n_points\n"
        << csv::fmt(fit.k) << "," << csv::fmt(fit.residual) << "," << csv::fmt(fit.r_squared)
        << "," << n_points << "\n";
    return out.str();
}

}  // namespace oriole

// Experiment runners and output emission: CSV time series, convergence
// records, and the flat key-value run summary.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qoc/models.hpp"
#include "qoc/pmp.hpp"

namespace qoc {

/// Everything the summary document reports about one run.
struct RunSummary {
    std::string mode;
    double cost = 0.0;
    double coherence_initial = 0.0;
    double coherence_final = 0.0;
    double coherence_min = 0.0;
    double coherence_max = 0.0;
    int iterations = 0;
    bool converged = false;
    double wall_seconds = 0.0;
};

/// A double rendered with 17 significant digits (lossless round-trip).
std::string format_float(double value);

/// trajectory.csv: one row per grid node with t, Re/Im of the upper-triangle
/// state entries, C, u, and (when given) mu. Controls and multipliers are
/// per-interval; the last node repeats the final interval's value.
void write_timeseries(const StateTrajectory& traj, std::span<const CoherencePair> pairs,
                      const ControlGrid& controls, const std::vector<double>* multipliers,
                      const std::string& path);

/// adjoint.csv: t plus Re/Im of the costate entries (0,0), (0,1), (1,2), (1,0).
void write_adjoint_csv(const AdjointTrajectory& adjoint, const std::string& path);

/// convergence.csv: iteration index (1-based) and the composite metric.
void write_convergence_csv(const std::vector<double>& history, const std::string& path);

/// summary.txt: flat key-value echo of the configuration plus the results.
void write_summary(const RunSummary& summary, const ExperimentConfig& cfg,
                   const std::string& path);

/// Run a non-optimizing experiment (free evolution or constant control) and
/// write trajectory.csv + summary.txt into cfg.out_dir.
RunSummary run_simulate(const ExperimentConfig& cfg, RunMode mode);

/// Solve the constrained problem and write trajectory.csv, adjoint.csv,
/// convergence.csv, and summary.txt into cfg.out_dir.
RunSummary run_optimize(const ExperimentConfig& cfg);

/// Exit-status wrappers used by the command-line tool. Errors are reported
/// on stderr and mapped to a nonzero status.
int cmd_simulate(const ExperimentConfig& cfg, RunMode mode, bool quiet);
int cmd_optimize(const ExperimentConfig& cfg, bool quiet);

}  // namespace qoc

#include "qoc/run.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qoc {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    return out;
}

std::string out_path(const ExperimentConfig& cfg, const char* name) {
    fs::path dir = cfg.out_dir.empty() ? fs::path("out") / to_string(cfg.mode)
                                       : fs::path(cfg.out_dir);
    return (dir / name).string();
}

double interval_value(const std::vector<double>& per_interval, std::size_t node) {
    // Node m carries interval m's value; the final node repeats the last one.
    return per_interval[std::min(node, per_interval.size() - 1)];
}

std::string pairs_to_string(std::span<const CoherencePair> pairs) {
    std::ostringstream out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i > 0) out << " ";
        out << pairs[i].j << "-" << pairs[i].k;
    }
    return out.str();
}

std::string rho_to_string(const Matrix& rho) {
    std::ostringstream out;
    for (Index i = 0; i < rho.rows(); ++i)
        for (Index j = 0; j < rho.cols(); ++j) {
            if (i != 0 || j != 0) out << " ";
            out << "[" << format_float(rho(i, j).real()) << ", "
                << format_float(rho(i, j).imag()) << "]";
        }
    return out.str();
}

RunSummary summarize(const ExperimentConfig& cfg, const std::vector<double>& c_path, double j,
                     int iterations, bool converged, double wall_seconds) {
    RunSummary s;
    s.mode = to_string(cfg.mode);
    s.cost = j;
    s.coherence_initial = c_path.front();
    s.coherence_final = c_path.back();
    s.coherence_min = *std::min_element(c_path.begin(), c_path.end());
    s.coherence_max = *std::max_element(c_path.begin(), c_path.end());
    s.iterations = iterations;
    s.converged = converged;
    s.wall_seconds = wall_seconds;
    return s;
}

}  // namespace

std::string format_float(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", value);
    return buf;
}

void write_timeseries(const StateTrajectory& traj, std::span<const CoherencePair> pairs,
                      const ControlGrid& controls, const std::vector<double>* multipliers,
                      const std::string& path) {
    if (traj.states.empty() || traj.states.size() != traj.times.size())
        throw DimensionMismatch("write_timeseries: malformed trajectory");
    if (controls.u().size() + 1 != traj.states.size())
        throw DimensionMismatch("write_timeseries: controls do not match trajectory");
    if (multipliers && multipliers->size() + 1 != traj.states.size())
        throw DimensionMismatch("write_timeseries: multipliers do not match trajectory");

    const Index dim = traj.states.front().dim();
    std::ofstream out = open_output(path);
    out << "t";
    for (Index i = 0; i < dim; ++i)
        for (Index j = i; j < dim; ++j)
            out << ",re_rho" << i << j << ",im_rho" << i << j;
    out << ",C,u";
    if (multipliers) out << ",mu";
    out << "\n";

    for (std::size_t m = 0; m < traj.states.size(); ++m) {
        const Matrix& rho = traj.states[m].matrix();
        out << format_float(traj.times[m]);
        for (Index i = 0; i < dim; ++i)
            for (Index j = i; j < dim; ++j)
                out << "," << format_float(rho(i, j).real()) << ","
                    << format_float(rho(i, j).imag());
        out << "," << format_float(coherence(traj.states[m], pairs));
        out << "," << format_float(interval_value(controls.u(), m));
        if (multipliers) out << "," << format_float(interval_value(*multipliers, m));
        out << "\n";
    }
}

void write_adjoint_csv(const AdjointTrajectory& adjoint, const std::string& path) {
    static constexpr std::pair<int, int> kEntries[] = {{0, 0}, {0, 1}, {1, 2}, {1, 0}};
    std::ofstream out = open_output(path);
    out << "t";
    for (const auto& [i, j] : kEntries) out << ",re_pi" << i << j << ",im_pi" << i << j;
    out << "\n";
    for (std::size_t m = 0; m < adjoint.costates.size(); ++m) {
        out << format_float(adjoint.times[m]);
        for (const auto& [i, j] : kEntries) {
            const Complex v = adjoint.costates[m](i, j);
            out << "," << format_float(v.real()) << "," << format_float(v.imag());
        }
        out << "\n";
    }
}

void write_convergence_csv(const std::vector<double>& history, const std::string& path) {
    std::ofstream out = open_output(path);
    out << "iteration,metric\n";
    for (std::size_t i = 0; i < history.size(); ++i)
        out << (i + 1) << "," << format_float(history[i]) << "\n";
}

void write_summary(const RunSummary& summary, const ExperimentConfig& cfg,
                   const std::string& path) {
    std::ofstream out = open_output(path);
    out << "mode = " << summary.mode << "\n";
    out << "qutrit.e0 = " << format_float(cfg.qutrit.e0) << "\n";
    out << "qutrit.e1 = " << format_float(cfg.qutrit.e1) << "\n";
    out << "qutrit.e2 = " << format_float(cfg.qutrit.e2) << "\n";
    out << "qutrit.gamma0 = " << format_float(cfg.qutrit.gamma0) << "\n";
    out << "qutrit.gamma1 = " << format_float(cfg.qutrit.gamma1) << "\n";
    out << "qutrit.gamma_d = " << format_float(cfg.qutrit.gamma_d) << "\n";
    out << "qutrit.omega_d = " << format_float(cfg.qutrit.omega_d) << "\n";
    out << "qutrit.phi_d = " << format_float(cfg.qutrit.phi_d) << "\n";
    out << "grid.t0 = " << format_float(cfg.t0) << "\n";
    out << "grid.tf = " << format_float(cfg.tf) << "\n";
    out << "grid.steps = " << cfg.steps << "\n";
    out << "grid.u0 = " << format_float(cfg.u0) << "\n";
    out << "constraint.alpha = " << format_float(cfg.alpha) << "\n";
    out << "constraint.beta = " << format_float(cfg.beta) << "\n";
    out << "constraint.pairs = " << pairs_to_string(cfg.pairs) << "\n";
    out << "solver.eta_i = " << format_float(cfg.solver.eta_i) << "\n";
    out << "solver.eta_d = " << format_float(cfg.solver.eta_d) << "\n";
    out << "solver.zeta1 = " << format_float(cfg.solver.zeta1) << "\n";
    out << "solver.zeta2 = " << format_float(cfg.solver.zeta2) << "\n";
    out << "solver.eps = " << format_float(cfg.solver.eps) << "\n";
    out << "solver.eps_active = " << format_float(cfg.solver.eps_active) << "\n";
    out << "solver.eps_phi = " << format_float(cfg.solver.eps_phi) << "\n";
    out << "solver.max_iters = " << cfg.solver.max_iters << "\n";
    out << "rho0 = " << rho_to_string(cfg.rho0) << "\n";
    out << "cost = " << format_float(summary.cost) << "\n";
    out << "coherence_initial = " << format_float(summary.coherence_initial) << "\n";
    out << "coherence_final = " << format_float(summary.coherence_final) << "\n";
    out << "coherence_min = " << format_float(summary.coherence_min) << "\n";
    out << "coherence_max = " << format_float(summary.coherence_max) << "\n";
    out << "iterations = " << summary.iterations << "\n";
    out << "converged = " << (summary.converged ? "true" : "false") << "\n";
    out << "wall_seconds = " << summary.wall_seconds << "\n";
}

RunSummary run_simulate(const ExperimentConfig& cfg, RunMode mode) {
    if (mode == RunMode::optimize)
        throw ValidationError("run_simulate handles free and constant_control modes only");
    ExperimentConfig run_cfg = cfg;
    run_cfg.mode = mode;

    const auto start = std::chrono::steady_clock::now();
    const SystemModel model = build_qutrit(run_cfg.qutrit);
    const DensityMatrix rho0(run_cfg.rho0);
    const double amplitude = (mode == RunMode::constant_control) ? run_cfg.u0 : 0.0;
    const ControlGrid grid = run_cfg.grid(amplitude);
    const StateTrajectory traj = integrate_forward(model, rho0, grid);

    std::vector<double> c_path;
    c_path.reserve(traj.states.size());
    for (const auto& rho : traj.states) c_path.push_back(coherence(rho, run_cfg.pairs));

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const RunSummary summary = summarize(run_cfg, c_path, cost(grid), 0, true, wall);

    write_timeseries(traj, run_cfg.pairs, grid, nullptr, out_path(run_cfg, "trajectory.csv"));
    write_summary(summary, run_cfg, out_path(run_cfg, "summary.txt"));
    return summary;
}

RunSummary run_optimize(const ExperimentConfig& cfg) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.mode = RunMode::optimize;

    const auto start = std::chrono::steady_clock::now();
    const SystemModel model = build_qutrit(run_cfg.qutrit);
    const DensityMatrix rho0(run_cfg.rho0);
    // The sweep starts from zero control; grid.u0 only drives constant runs.
    const ControlGrid grid0 = run_cfg.grid(0.0);
    const SweepResult result = sweep(model, rho0, grid0, run_cfg.solver_config());

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const RunSummary summary = summarize(run_cfg, result.coherence_path, result.cost,
                                         result.iterations, result.converged, wall);

    write_timeseries(result.trajectory, run_cfg.pairs, result.controls, &result.multipliers.mu,
                     out_path(run_cfg, "trajectory.csv"));
    write_adjoint_csv(result.adjoint, out_path(run_cfg, "adjoint.csv"));
    write_convergence_csv(result.convergence_history, out_path(run_cfg, "convergence.csv"));
    write_summary(summary, run_cfg, out_path(run_cfg, "summary.txt"));
    return summary;
}

namespace {

void report(const RunSummary& s, bool quiet) {
    if (quiet) return;
    std::cout << "mode=" << s.mode << " cost=" << s.cost
              << " C0=" << s.coherence_initial << " Cf=" << s.coherence_final
              << " iterations=" << s.iterations << " converged=" << (s.converged ? "yes" : "no")
              << " wall=" << s.wall_seconds << "s\n";
}

}  // namespace

int cmd_simulate(const ExperimentConfig& cfg, RunMode mode, bool quiet) {
    try {
        report(run_simulate(cfg, mode), quiet);
        return 0;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

int cmd_optimize(const ExperimentConfig& cfg, bool quiet) {
    try {
        report(run_optimize(cfg), quiet);
        return 0;
    } catch (const InfeasibleStart& err) {
        std::cerr << "error: " << err.what()
                  << "\nThe initial state must satisfy the coherence band; adjust "
                     "constraint.alpha/constraint.beta or rho0.\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}

}  // namespace qoc

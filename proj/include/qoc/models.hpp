// Concrete system builders (the three-level qutrit with decay and dephasing)
// and experiment-configuration ingestion and validation.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qoc/dynamics.hpp"
#include "qoc/operators.hpp"
#include "qoc/pmp.hpp"
#include "qoc/types.hpp"

namespace qoc {

/// Qutrit parameters: level energies, decay rates |2> -> |0| and |2> -> |1>,
/// dephasing rate between |0> and |1>, and the drive carrier.
struct QutritParams {
    double e0 = 1.0;
    double e1 = 1.5;
    double e2 = 2.0;
    double gamma0 = 0.1;
    double gamma1 = 0.001;
    double gamma_d = 0.005;
    double omega_d = 0.1;   // driving frequency
    double phi_d = 0.0;     // initial phase (the default scenario uses pi/2)
};

enum class RunMode { free_evolution, constant_control, optimize };

/// A fully validated experiment description. `alpha` and `beta` bound the
/// coherence C itself; the solver receives them squared as the C^2 band.
struct ExperimentConfig {
    QutritParams qutrit;
    Matrix rho0;
    double t0 = 0.0;
    double tf = 20.0;
    int steps = 1000;
    double u0 = 0.1;  // constant-control amplitude; ignored by other modes
    double alpha = 0.550;
    double beta = 0.553;
    std::vector<CoherencePair> pairs{{0, 1}};
    SolverConfig solver;
    RunMode mode = RunMode::free_evolution;
    std::string out_dir;

    /// Solver config with the constraint band expressed on C^2.
    SolverConfig solver_config() const;
    ControlGrid grid(double u_init) const { return {t0, tf, steps, u_init}; }
};

/// Assemble the qutrit SystemModel: traceless drift from pairwise population
/// differences, dipole envelope e^{i phi_d}|0><1| + h.c. times cos(omega_d t),
/// and Lindblad operators |0><2|, |1><2|, |0><0| - |1><1|.
SystemModel build_qutrit(const QutritParams& params);

/// The bundled default scenario: qutrit decay/dephasing rates (0.1, 0.001,
/// 0.005), levels (1, 1.5, 2), drive (omega_d = 0.1, phi_d = pi/2), horizon
/// [0, 20] with 1000 steps, coherence band [0.550, 0.553] on pair (0, 1).
ExperimentConfig default_experiment();

/// Parse a flat key-value config file; unspecified fields keep the defaults
/// of default_experiment(). See configs/qutrit.conf for the schema.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig load_config(std::istream& in);

std::string to_string(RunMode mode);

}  // namespace qoc

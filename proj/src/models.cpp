#include "qoc/models.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace qoc {

namespace {

Matrix ketbra(Index i, Index j, Index dim) {
    Matrix m = Matrix::Zero(dim, dim);
    m(i, j) = 1.0;
    return m;
}

}  // namespace

SolverConfig ExperimentConfig::solver_config() const {
    SolverConfig cfg = solver;
    cfg.constraint = ConstraintSpec(alpha * alpha, beta * beta, pairs);
    return cfg;
}

SystemModel build_qutrit(const QutritParams& params) {
    for (double rate : {params.gamma0, params.gamma1, params.gamma_d})
        if (!(rate >= 0.0)) throw ValidationError("qutrit rates must be non-negative");

    const Index dim = 3;
    Matrix h0 = Matrix::Zero(dim, dim);
    h0 += (params.e2 - params.e0) / 3.0 * (ketbra(2, 2, dim) - ketbra(0, 0, dim));
    h0 += (params.e2 - params.e1) / 3.0 * (ketbra(2, 2, dim) - ketbra(1, 1, dim));
    h0 += (params.e0 - params.e1) / 3.0 * (ketbra(0, 0, dim) - ketbra(1, 1, dim));

    Matrix dipole = Matrix::Zero(dim, dim);
    dipole(0, 1) = std::exp(kI * params.phi_d);
    dipole(1, 0) = std::exp(-kI * params.phi_d);

    DecoherenceChannel channel(
        {ketbra(0, 2, dim), ketbra(1, 2, dim), ketbra(0, 0, dim) - ketbra(1, 1, dim)},
        {params.gamma0, params.gamma1, params.gamma_d});

    const double omega = params.omega_d;
    SystemModel model;
    model.dim = dim;
    model.h0 = std::move(h0);
    model.hc_envelope = [dipole, omega](double t) -> Matrix {
        return dipole * std::cos(omega * t);
    };
    model.channel = std::move(channel);
    model.hbar = 1.0;
    return model;
}

ExperimentConfig default_experiment() {
    ExperimentConfig cfg;
    cfg.qutrit = QutritParams{};
    cfg.qutrit.phi_d = std::numbers::pi / 2.0;
    Matrix rho0(3, 3);
    rho0 << Complex{0.21, 0.0}, Complex{0.195, -0.195}, Complex{0.0, 0.0},
            Complex{0.195, 0.195}, Complex{0.78, 0.0}, Complex{0.0, 0.0},
            Complex{0.0, 0.0}, Complex{0.0, 0.0}, Complex{0.01, 0.0};
    cfg.rho0 = std::move(rho0);
    cfg.t0 = 0.0;
    cfg.tf = 20.0;
    cfg.steps = 1000;
    cfg.u0 = 0.1;
    cfg.alpha = 0.550;
    cfg.beta = 0.553;
    cfg.pairs = {{0, 1}};
    cfg.solver = SolverConfig{};
    cfg.mode = RunMode::free_evolution;
    cfg.out_dir = "";
    return cfg;
}

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::free_evolution: return "free";
        case RunMode::constant_control: return "constant_control";
        case RunMode::optimize: return "optimize";
    }
    return "unknown";
}

namespace {

// --- flat key-value config parsing ---------------------------------------

struct RawConfig {
    std::map<std::string, std::string> values;  // key -> raw text
    std::map<std::string, int> lines;           // key -> line number
};

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

RawConfig read_raw(std::istream& in) {
    RawConfig raw;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "line " << lineno << ": expected 'key = value', got '" << stripped << "'";
            throw ParseError(msg.str());
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream msg;
            msg << "line " << lineno << ": empty key";
            throw ParseError(msg.str());
        }
        if (value.empty()) {
            std::ostringstream msg;
            msg << "line " << lineno << ": key '" << key << "' has no value";
            throw MissingField(msg.str());
        }
        raw.values[key] = value;
        raw.lines[key] = lineno;
    }
    return raw;
}

double parse_double(const std::string& key, const std::string& text) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &consumed);
    } catch (const std::exception&) {
        throw ParseError("key '" + key + "': cannot parse number '" + text + "'");
    }
    if (consumed != text.size())
        throw ParseError("key '" + key + "': trailing characters in '" + text + "'");
    return value;
}

int parse_int(const std::string& key, const std::string& text) {
    const double value = parse_double(key, text);
    const int rounded = static_cast<int>(std::lround(value));
    if (std::abs(value - rounded) > 0.0)
        throw ParseError("key '" + key + "': expected an integer, got '" + text + "'");
    return rounded;
}

// rho0 = [re, im] [re, im] ... row-major, N*N bracketed pairs.
Matrix parse_rho(const std::string& key, const std::string& text) {
    std::vector<Complex> entries;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == ','))
            ++pos;
        if (pos >= text.size()) break;
        if (text[pos] != '[')
            throw ParseError("key '" + key + "': expected '[' at position " +
                             std::to_string(pos));
        const auto close = text.find(']', pos);
        if (close == std::string::npos)
            throw ParseError("key '" + key + "': unbalanced '['");
        std::string body = text.substr(pos + 1, close - pos - 1);
        const auto comma = body.find(',');
        if (comma == std::string::npos)
            throw ParseError("key '" + key + "': entry must be [re, im]");
        const double re = parse_double(key, trim(body.substr(0, comma)));
        const double im = parse_double(key, trim(body.substr(comma + 1)));
        entries.emplace_back(re, im);
        pos = close + 1;
    }
    const auto count = entries.size();
    const auto dim = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(count))));
    if (dim < 1 || static_cast<std::size_t>(dim * dim) != count)
        throw ParseError("key '" + key + "': expected a square number of [re, im] entries, got " +
                         std::to_string(count));
    Matrix rho(dim, dim);
    for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j) rho(i, j) = entries[static_cast<std::size_t>(i * dim + j)];
    return rho;
}

std::vector<CoherencePair> parse_pairs(const std::string& key, const std::string& text) {
    std::vector<CoherencePair> pairs;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        if (!token.empty() && token.back() == ',') token.pop_back();
        const auto dash = token.find('-');
        if (dash == std::string::npos)
            throw ParseError("key '" + key + "': pair '" + token + "' must look like 'j-k'");
        const int j = parse_int(key, token.substr(0, dash));
        const int k = parse_int(key, token.substr(dash + 1));
        pairs.push_back({j, k});
    }
    if (pairs.empty()) throw ParseError("key '" + key + "': no pairs given");
    return pairs;
}

RunMode parse_mode(const std::string& text) {
    if (text == "free") return RunMode::free_evolution;
    if (text == "constant_control") return RunMode::constant_control;
    if (text == "optimize") return RunMode::optimize;
    throw ParseError("key 'mode': expected free | constant_control | optimize, got '" + text +
                     "'");
}

void validate_config(const ExperimentConfig& cfg) {
    std::vector<std::string> problems;
    if (!(cfg.qutrit.gamma0 >= 0.0)) problems.push_back("qutrit.gamma0 must be >= 0");
    if (!(cfg.qutrit.gamma1 >= 0.0)) problems.push_back("qutrit.gamma1 must be >= 0");
    if (!(cfg.qutrit.gamma_d >= 0.0)) problems.push_back("qutrit.gamma_d must be >= 0");
    if (!(cfg.tf > cfg.t0)) problems.push_back("grid.tf must exceed grid.t0");
    if (cfg.steps < 1) problems.push_back("grid.steps must be >= 1");
    if (!std::isfinite(cfg.u0)) problems.push_back("grid.u0 must be finite");
    if (!(cfg.alpha >= 0.0 && cfg.alpha < cfg.beta))
        problems.push_back("constraint requires 0 <= constraint.alpha < constraint.beta");
    if (cfg.rho0.rows() != 3 || cfg.rho0.cols() != 3)
        problems.push_back("rho0 must be 3x3 for the qutrit experiments");
    for (const auto& p : cfg.pairs)
        if (!(p.j >= 0 && p.j < p.k && p.k < 3))
            problems.push_back("constraint.pairs entries must satisfy 0 <= j < k < 3");
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << "invalid config:";
        for (const auto& p : problems) msg << "\n  - " << p;
        throw ValidationError(msg.str());
    }
    // Re-validate rho0 from scratch rather than trusting the file.
    DensityMatrix checked(cfg.rho0);
    (void)checked;
    cfg.solver.validate();
}

}  // namespace

ExperimentConfig load_config(std::istream& in) {
    RawConfig raw = read_raw(in);
    ExperimentConfig cfg = default_experiment();

    auto take = [&](const std::string& key) -> const std::string* {
        const auto it = raw.values.find(key);
        return it == raw.values.end() ? nullptr : &it->second;
    };
    auto take_double = [&](const std::string& key, double& out) {
        if (const auto* v = take(key)) {
            out = parse_double(key, *v);
            raw.values.erase(key);
        }
    };
    auto take_int = [&](const std::string& key, int& out) {
        if (const auto* v = take(key)) {
            out = parse_int(key, *v);
            raw.values.erase(key);
        }
    };

    take_double("qutrit.e0", cfg.qutrit.e0);
    take_double("qutrit.e1", cfg.qutrit.e1);
    take_double("qutrit.e2", cfg.qutrit.e2);
    take_double("qutrit.gamma0", cfg.qutrit.gamma0);
    take_double("qutrit.gamma1", cfg.qutrit.gamma1);
    take_double("qutrit.gamma_d", cfg.qutrit.gamma_d);
    take_double("qutrit.omega_d", cfg.qutrit.omega_d);
    take_double("qutrit.phi_d", cfg.qutrit.phi_d);
    take_double("grid.t0", cfg.t0);
    take_double("grid.tf", cfg.tf);
    take_int("grid.steps", cfg.steps);
    take_double("grid.u0", cfg.u0);
    take_double("constraint.alpha", cfg.alpha);
    take_double("constraint.beta", cfg.beta);
    take_double("solver.eta_i", cfg.solver.eta_i);
    take_double("solver.eta_d", cfg.solver.eta_d);
    take_double("solver.zeta1", cfg.solver.zeta1);
    take_double("solver.zeta2", cfg.solver.zeta2);
    take_double("solver.eps", cfg.solver.eps);
    take_double("solver.eps_rho", cfg.solver.eps_rho);
    take_double("solver.eps_pi", cfg.solver.eps_pi);
    take_double("solver.eps_u", cfg.solver.eps_u);
    take_double("solver.eps_mu", cfg.solver.eps_mu);
    take_double("solver.eps_active", cfg.solver.eps_active);
    take_double("solver.eps_phi", cfg.solver.eps_phi);
    take_int("solver.max_iters", cfg.solver.max_iters);
    if (const auto* v = take("solver.multiplier_reset")) {
        if (*v == "warm_start") cfg.solver.reset = MultiplierReset::warm_start;
        else if (*v == "zero") cfg.solver.reset = MultiplierReset::zero;
        else throw ParseError("key 'solver.multiplier_reset': expected warm_start | zero");
        raw.values.erase("solver.multiplier_reset");
    }
    if (const auto* v = take("constraint.pairs")) {
        cfg.pairs = parse_pairs("constraint.pairs", *v);
        raw.values.erase("constraint.pairs");
    }
    if (const auto* v = take("rho0")) {
        cfg.rho0 = parse_rho("rho0", *v);
        raw.values.erase("rho0");
    }
    if (const auto* v = take("mode")) {
        cfg.mode = parse_mode(*v);
        raw.values.erase("mode");
    }
    if (const auto* v = take("output.dir")) {
        cfg.out_dir = *v;
        raw.values.erase("output.dir");
    }

    if (!raw.values.empty()) {
        std::ostringstream msg;
        msg << "unknown config key '" << raw.values.begin()->first << "' (line "
            << raw.lines[raw.values.begin()->first] << ")";
        throw ParseError(msg.str());
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    return load_config(in);
}

}  // namespace qoc

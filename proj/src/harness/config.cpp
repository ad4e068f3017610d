#include "cho/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cho/harness/snapshot.hpp"
#include "cho/random.hpp"

namespace cho::harness {

namespace sp = cho::spectral;
using potentials::PotentialSpec;
using potentials::Regularization;
using potentials::Variant;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& v, const std::string& key) {
    double out = 0.0;
    const std::string t = trim(v);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ParseError("key '" + key + "': expected a number, got '" + v + "'");
    }
    return out;
}

long long to_int(const std::string& v, const std::string& key) {
    long long out = 0;
    const std::string t = trim(v);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ParseError("key '" + key + "': expected an integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ParseError("key '" + key + "': expected true/false, got '" + v + "'");
}

Variant to_variant(const std::string& v) {
    if (v == "regular") return Variant::Regular;
    if (v == "logarithmic") return Variant::Logarithmic;
    if (v == "double_obstacle") return Variant::DoubleObstacle;
    throw ParseError("key 'potential.variant': unknown variant '" + v + "'");
}

Regularization to_regularization(const std::string& v) {
    if (v == "none") return Regularization::None;
    if (v == "yosida") return Regularization::Yosida;
    if (v == "piecewise_log") return Regularization::PiecewiseLog;
    throw ParseError("key 'potential.regularization': unknown regularization '" + v + "'");
}

}  // namespace

std::string Descriptor::to_string() const {
    if (kind == "file") return "file:" + path;
    std::string out = kind + ":";
    for (std::size_t i = 0; i < args.size(); ++i) out += (i ? "," : "") + fmt::format("{}", args[i]);
    return out;
}

Descriptor parse_descriptor(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ParseError("descriptor '" + text + "' lacks a ':'");
    Descriptor d;
    d.kind = trim(text.substr(0, colon));
    const std::string rest = trim(text.substr(colon + 1));
    if (d.kind == "file") {
        if (rest.empty()) throw ParseError("descriptor 'file:' needs a path");
        d.path = rest;
        return d;
    }
    for (const std::string& a : split(rest, ',')) d.args.push_back(to_double(a, "descriptor " + d.kind));
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (d.args.size() < lo || d.args.size() > hi) {
            throw ParseError("descriptor '" + text + "' has the wrong number of arguments");
        }
    };
    if (d.kind == "constant") {
        need(1, 1);
    } else if (d.kind == "eigen") {
        need(3, 3);
    } else if (d.kind == "bandlimited") {
        need(2, 2);
    } else if (d.kind == "random_smooth") {
        need(1, 3);
    } else {
        throw ParseError("unknown descriptor kind '" + d.kind + "'");
    }
    return d;
}

void apply_override(RunConfig& c, const std::string& section, const std::string& key, const std::string& value) {
    const std::string k = section + "." + key;
    auto dbl = [&] { return to_double(value, k); };
    auto integer = [&] { return static_cast<int>(to_int(value, k)); };
    if (k == "grid.nx") c.nx = integer();
    else if (k == "grid.ny") c.ny = integer();
    else if (k == "grid.lx") c.lx = dbl();
    else if (k == "grid.ly") c.ly = dbl();
    else if (k == "time.T") c.final_time = dbl();
    else if (k == "time.nt") c.steps = integer();
    else if (k == "potential.variant") c.potential.variant = to_variant(value);
    else if (k == "potential.regularization") c.potential.reg = to_regularization(value);
    else if (k == "potential.c1") c.potential.c1 = dbl();
    else if (k == "potential.c2") c.potential.c2 = dbl();
    else if (k == "potential.eps") c.potential.eps = dbl();
    else if (k == "potential.stabilization") {
        if (value == "auto") {
            c.auto_stabilization = true;
        } else {
            c.auto_stabilization = false;
            c.potential.stabilization = dbl();
        }
    } else if (k == "initial.phi0") c.phi0 = parse_descriptor(value);
    else if (k == "control.M") c.M = dbl();
    else if (k == "control.Mprime") c.Mprime = dbl();
    else if (k == "control.initial") c.control = parse_descriptor(value);
    else if (k == "cost.alpha1") c.alpha[0] = dbl();
    else if (k == "cost.alpha2") c.alpha[1] = dbl();
    else if (k == "cost.alpha3") c.alpha[2] = dbl();
    else if (k == "cost.alpha4") c.alpha[3] = dbl();
    else if (k == "cost.targets") {
        if (value != "zero" && value != "from_control") {
            throw ParseError("key 'cost.targets': expected zero or from_control, got '" + value + "'");
        }
        c.targets = value;
    } else if (k == "cost.target_control") c.target_control = parse_descriptor(value);
    else if (k == "optimizer.max_iters") c.optimizer.max_iters = integer();
    else if (k == "optimizer.armijo_c") c.optimizer.armijo_c = dbl();
    else if (k == "optimizer.backtrack") c.optimizer.backtrack = dbl();
    else if (k == "optimizer.initial_step") c.optimizer.initial_step = dbl();
    else if (k == "optimizer.tolerance") c.optimizer.tolerance = dbl();
    else if (k == "optimizer.dykstra_iters") c.optimizer.dykstra_iters = integer();
    else if (k == "optimizer.max_backtracks") c.optimizer.max_backtracks = integer();
    else if (k == "optimizer.vi_probes") c.vi_probes = integer();
    else if (k == "oracle.modes") c.oracle_modes = integer();
    else if (k == "oracle.substeps") c.oracle_substeps = integer();
    else if (k == "verify.checks") c.checks = split(value, ',');
    else if (k == "verify.fd_directions") c.fd_directions = integer();
    else if (k == "output.snapshot_every") c.snapshot_every = integer();
    else if (k == "run.seed") {
        const long long s = to_int(value, k);
        if (s < 0) throw ParseError("key 'run.seed': must be >= 0");
        c.seed = static_cast<std::uint64_t>(s);
    } else if (k == "run.override_compatibility") c.override_compatibility = to_bool(value, k);
    else if (k == "run.compatibility_margin") c.compatibility_margin = dbl();
    else if (k == "run.out") c.out = value;
    else throw ParseError("unknown key '" + k + "'");
    c.optimizer.seed = c.seed;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                            const Overrides& overrides) {
    RunConfig c;
    c.base_dir = base_dir;
    std::stringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(fmt::format("line {}: malformed section header", lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(fmt::format("line {}: expected key = value", lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ParseError(fmt::format("line {}: key '{}' outside any section", lineno, key));
        try {
            apply_override(c, section, key, value);
        } catch (const ParseError& e) {
            throw ParseError(fmt::format("line {}: {}", lineno, e.what()));
        }
    }
    for (const auto& [name, value] : overrides) {
        const auto dot = name.find('.');
        if (dot == std::string::npos) throw ParseError("override '" + name + "' is not of the form section.key");
        apply_override(c, name.substr(0, dot), name.substr(dot + 1), value);
    }
    c.validate();
    return c;
}

RunConfig parse_config(const std::filesystem::path& path, const Overrides& overrides) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.parent_path().empty() ? "." : path.parent_path(), overrides);
}

void RunConfig::validate() const {
    if (nx < 2) throw ValidationError("grid.nx >= 2 required");
    if (ny < 1) throw ValidationError("grid.ny >= 1 required");
    if (!(lx > 0.0) || !(ly > 0.0)) throw ValidationError("grid lengths must be > 0");
    if (!(final_time > 0.0)) throw ValidationError("time.T > 0 required");
    if (steps < 1) throw ValidationError("time.nt >= 1 required");
    potential.validate();
    if (!(M >= 0.0) || !(Mprime >= 0.0)) throw ValidationError("control bounds M, Mprime must be >= 0");
    for (double a : alpha) {
        if (!(a >= 0.0)) throw ValidationError("cost weights alpha_i >= 0 required");
    }
    if (std::all_of(alpha.begin(), alpha.end(), [](double a) { return a == 0.0; })) {
        throw ValidationError("cost weights must not all be zero");
    }
    if (alpha[2] > 0.0 && potential.variant == Variant::DoubleObstacle) {
        throw ValidationError("alpha3 > 0 is not allowed with the double obstacle potential");
    }
    try {
        optimizer.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("optimizer: ") + e.what());
    }
    if (vi_probes < 0) throw ValidationError("optimizer.vi_probes >= 0 required");
    if (oracle_modes < 1 || oracle_modes > nx * ny) throw ValidationError("oracle.modes must lie in [1, nx*ny]");
    if (oracle_substeps < 1) throw ValidationError("oracle.substeps >= 1 required");
    if (fd_directions < 1) throw ValidationError("verify.fd_directions >= 1 required");
    if (snapshot_every < 1) throw ValidationError("output.snapshot_every >= 1 required");
    if (!(compatibility_margin >= 0.0)) throw ValidationError("run.compatibility_margin >= 0 required");
    for (const Descriptor* d : {&phi0, &control, &target_control}) {
        if (d->kind == "file" && !std::filesystem::exists(base_dir / d->path)) {
            throw ValidationError("referenced file does not exist: " + (base_dir / d->path).string());
        }
    }
    if (!override_compatibility && potential.singular()) {
        const Field f = initial_state(*this);
        const state::ControlFunction u(time(), zero_series(grid(), time()), M, Mprime);
        const state::CompatibilityReport rep =
            state::validate_compatibility(f, u, potential, compatibility_margin);
        if (!rep.ok) {
            throw ValidationError("compatibility of phi0 with the control bound M fails (" + rep.message +
                                  "); pass --override-compatibility to run anyway");
        }
    }
}

Field make_field(const Descriptor& d, const Grid& grid, std::uint64_t seed, std::uint64_t salt,
                 const std::filesystem::path& base_dir) {
    random::Engine rng(seed * 1000003ULL + salt);
    if (d.kind == "constant") return Field(grid, d.args[0]);
    if (d.kind == "eigen") {
        const int j = static_cast<int>(d.args[0]);
        const int k = static_cast<int>(d.args[1]);
        if (j < 0 || k < 0 || j >= grid.nx() || k >= grid.ny()) throw ValidationError("eigen: mode outside grid");
        return d.args[2] * sp::eigenfunction(grid, j, k);
    }
    if (d.kind == "bandlimited") {
        const int n = static_cast<int>(d.args[1]);
        const galerkin::GalerkinSystem sys = galerkin::make_system(grid, n);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = d.args[0] * random::symmetric_unit(rng);
        return galerkin::reconstruct(sys, y);
    }
    if (d.kind == "random_smooth") {
        const int modes = d.args.size() > 1 ? static_cast<int>(d.args[1]) : 3;
        return random::smooth_field(grid, rng, modes, d.args[0]);
    }
    if (d.kind == "file") {
        const Snapshot s = read_snapshot(base_dir / d.path);
        if (s.nx != grid.nx() || s.ny != grid.ny() || s.frames.empty()) {
            throw ValidationError("snapshot " + d.path + " does not match the grid");
        }
        return Field(grid, s.frames.front());
    }
    throw ValidationError("unknown descriptor kind '" + d.kind + "'");
}

FieldSeries make_series(const Descriptor& d, const Grid& grid, const TimeGrid& time, std::uint64_t seed,
                        std::uint64_t salt, const std::filesystem::path& base_dir) {
    if (d.kind == "random_smooth") {
        random::Engine rng(seed * 1000003ULL + salt);
        const int modes = d.args.size() > 1 ? static_cast<int>(d.args[1]) : 3;
        const int tmodes = d.args.size() > 2 ? static_cast<int>(d.args[2]) : 2;
        return random::smooth_series(grid, time, rng, modes, tmodes, d.args[0]);
    }
    if (d.kind == "file") {
        const Snapshot s = read_snapshot(base_dir / d.path);
        if (s.nx != grid.nx() || s.ny != grid.ny() || s.frames.size() != static_cast<std::size_t>(time.steps()) + 1) {
            throw ValidationError("snapshot " + d.path + " does not match the grid or nt + 1 frames");
        }
        FieldSeries out;
        for (const auto& f : s.frames) out.emplace_back(grid, f);
        return out;
    }
    return FieldSeries(static_cast<std::size_t>(time.steps()) + 1, make_field(d, grid, seed, salt, base_dir));
}

Field initial_state(const RunConfig& c) { return make_field(c.phi0, c.grid(), c.seed, 1, c.base_dir); }

FieldSeries initial_control(const RunConfig& c) {
    return control::project_Uad(make_series(c.control, c.grid(), c.time(), c.seed, 2, c.base_dir), c.time(), c.M,
                                c.Mprime, c.optimizer);
}

PotentialSpec effective_potential(const RunConfig& c) {
    PotentialSpec spec = c.potential;
    if (!c.auto_stabilization) return spec;
    if (spec.variant == Variant::Regular) {
        spec.stabilization = potentials::sup_abs_f_d2(spec, -1.2, 1.2);
        return spec;
    }
    const Field f = initial_state(c);
    const double m = sp::mean(f);
    const auto [mn, mx] = std::minmax_element(f.values().begin(), f.values().end());
    double lo = std::min(*mn, m - c.M);
    double hi = std::max(*mx, m + c.M);
    lo = std::max(lo, -1.0 + 1e-6);
    hi = std::min(hi, 1.0 - 1e-6);
    spec.stabilization = lo < hi ? potentials::sup_abs_f_d2(spec, lo, hi) : 0.0;
    return spec;
}

control::CostSpec cost_spec(const RunConfig& c) {
    const Grid g = c.grid();
    const TimeGrid t = c.time();
    control::CostSpec cost = control::CostSpec::zero_targets(g, t, c.alpha);
    if (c.targets == "from_control") {
        const FieldSeries ut = control::project_Uad(make_series(c.target_control, g, t, c.seed, 3, c.base_dir), t,
                                                    c.M, c.Mprime, c.optimizer);
        const state::StateTrajectory tr = state::simulate(initial_state(c), ut, t, effective_potential(c));
        cost.phi_Q = tr.phi;
        cost.mu_Q = tr.mu;
        cost.phi_Omega = tr.phi.back();
    }
    return cost;
}

}  // namespace cho::harness

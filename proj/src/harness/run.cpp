#include "cho/harness/run.hpp"

#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>

#include "cho/harness/invariants.hpp"
#include "cho/harness/snapshot.hpp"

namespace cho::harness {

namespace sp = cho::spectral;
using nlohmann::ordered_json;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const ordered_json& j) { write_text(path, j.dump(2) + "\n"); }

std::filesystem::path prepare_out(const RunConfig& c) {
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    if (ec) throw IoError("cannot create output directory " + c.out.string() + ": " + ec.message());
    return c.out;
}

ordered_json config_echo(const RunConfig& c) {
    return {{"grid", {c.nx, c.ny, c.lx, c.ly}},
            {"T", c.final_time},
            {"nt", c.steps},
            {"potential", potentials::to_string(c.potential.variant)},
            {"regularization", potentials::to_string(c.potential.reg)},
            {"stabilization", effective_potential(c).stabilization},
            {"M", c.M},
            {"Mprime", c.Mprime},
            {"phi0", c.phi0.to_string()},
            {"control", c.control.to_string()},
            {"seed", c.seed}};
}

}  // namespace

std::string diagnostics_csv(const state::StateTrajectory& traj) {
    std::string out = "t,mean,energy,min_phi,max_phi,grad_mu\n";
    for (const state::StepDiagnostics& d : traj.diagnostics) {
        out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", d.t, d.mean, d.energy, d.min_phi,
                           d.max_phi, d.grad_mu);
    }
    return out;
}

state::StateTrajectory simulate_config(const RunConfig& c) {
    const state::ControlFunction u(c.time(), initial_control(c), c.M, c.Mprime);
    return state::simulate(initial_state(c), u, effective_potential(c),
                           {c.override_compatibility, c.compatibility_margin});
}

control::ControlProblem control_problem(const RunConfig& c) {
    return {initial_state(c), effective_potential(c), c.time(), c.M, c.Mprime,
            {c.override_compatibility, c.compatibility_margin}};
}

int run_simulate(const RunConfig& c, std::ostream& log) {
    const auto dir = prepare_out(c);
    const state::StateTrajectory traj = simulate_config(c);
    write_text(dir / "diagnostics.csv", diagnostics_csv(traj));
    FieldSeries frames;
    for (int n = 0; n <= c.steps; n += c.snapshot_every) frames.push_back(traj.phi[n]);
    if (c.steps % c.snapshot_every != 0) frames.push_back(traj.phi.back());
    write_snapshot(dir / "phi.cho", frames);
    const auto& last = traj.diagnostics.back();
    write_json(dir / "summary.json", {{"status", "ok"},
                                      {"command", "simulate"},
                                      {"config", config_echo(c)},
                                      {"final", {{"t", last.t},
                                                 {"mean", last.mean},
                                                 {"energy", last.energy},
                                                 {"min_phi", last.min_phi},
                                                 {"max_phi", last.max_phi}}},
                                      {"snapshots", frames.size()}});
    fmt::print(log, "simulate: {} steps, final mean {:.6g}, energy {:.6g}, phi in [{:.6g}, {:.6g}]\n", c.steps,
               last.mean, last.energy, last.min_phi, last.max_phi);
    return 0;
}

int run_optimize(const RunConfig& c, std::ostream& log) {
    const auto dir = prepare_out(c);
    const control::ControlProblem problem = control_problem(c);
    const control::CostSpec cost = cost_spec(c);
    const control::OptimizeResult r = control::optimize(initial_control(c), problem, cost, c.optimizer);
    write_text(dir / "history.csv", control::history_csv(r.history));
    write_snapshot(dir / "u_star.cho", r.u_star);
    ordered_json summary = {{"status", "ok"},
                            {"command", "optimize"},
                            {"config", config_echo(c)},
                            {"J", r.J},
                            {"iterations", r.history.size() - 1},
                            {"stationarity", r.history.back().stationarity},
                            {"converged", r.converged},
                            {"stalled", r.stalled}};
    if (c.vi_probes > 0) {
        const checks::Measurement vi = checks::variational_inequality(r, problem, cost, c.vi_probes, c.optimizer);
        summary["variational_inequality"] = {{"min_normalized", vi.value}, {"detail", vi.detail}};
    }
    write_json(dir / "summary.json", summary);
    fmt::print(log, "optimize: J = {:.10g} after {} iterations, stationarity {:.3g}{}{}\n", r.J, r.history.size() - 1,
               r.history.back().stationarity, r.converged ? ", converged" : "", r.stalled ? ", stalled" : "");
    return 0;
}

int run_verify(const RunConfig& c, std::ostream& log) {
    const auto dir = prepare_out(c);
    const std::vector<std::string> names = select_checks(c.checks);
    fmt::print(log, "{:<48} {:>6} {:>14} {:>14} {:>8}\n", "invariant", "status", "value", "threshold", "seconds");
    const auto results = run_checks(c, names, [&](const CheckResult& r) {
        fmt::print(log, "{:<48} {:>6} {:>14.6g} {:>14.6g} {:>8.3f}  {}\n", r.name,
                   r.measurement.passed ? "pass" : "FAIL", r.measurement.value, r.measurement.threshold, r.seconds,
                   r.measurement.detail);
    });
    write_text(dir / "verify.csv", verify_csv(results));
    int failed = 0;
    ordered_json list = ordered_json::array();
    for (const CheckResult& r : results) {
        if (!r.measurement.passed) {
            ++failed;
            list.push_back(r.name);
        }
    }
    write_json(dir / "summary.json", {{"status", failed ? "fail" : "ok"},
                                      {"command", "verify"},
                                      {"checks", results.size()},
                                      {"failed", list}});
    fmt::print(log, "{} of {} invariants passed\n", results.size() - failed, results.size());
    return failed ? 1 : 0;
}

int run_oracle_compare(const RunConfig& c, std::ostream& log) {
    const auto dir = prepare_out(c);
    const Field phi0 = initial_state(c);
    const FieldSeries u = initial_control(c);
    const potentials::PotentialSpec spec = effective_potential(c);
    const galerkin::GalerkinSystem sys = galerkin::make_system(c.grid(), c.oracle_modes);
    galerkin::IntegrateOptions opt;
    opt.substeps = c.oracle_substeps;
    const auto oracle = galerkin::integrate(sys, galerkin::project_initial(sys, phi0), u, spec, c.time(), opt);
    const auto pde = simulate_config(c);
    const auto rep = galerkin::compare_to_pde(sys, oracle, pde);
    std::string csv = "t,err_phi,err_mu\n";
    for (std::size_t n = 0; n < rep.err_phi.size(); ++n) {
        csv += fmt::format("{:.17g},{:.17g},{:.17g}\n", c.time().t(static_cast<int>(n)), rep.err_phi[n],
                           rep.err_mu[n]);
    }
    write_text(dir / "oracle.csv", csv);
    write_json(dir / "summary.json", {{"status", "ok"},
                                      {"command", "oracle-compare"},
                                      {"config", config_echo(c)},
                                      {"modes", c.oracle_modes},
                                      {"max_err_phi", rep.max_err_phi},
                                      {"max_err_mu", rep.max_err_mu}});
    fmt::print(log, "oracle-compare: n = {}, max relative error phi {:.3g}, mu {:.3g}\n", c.oracle_modes,
               rep.max_err_phi, rep.max_err_mu);
    return 0;
}

void write_failure(const std::filesystem::path& dir, const std::string& kind, const std::string& message,
                   std::optional<int> step) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    ordered_json j = {{"status", "error"}, {"kind", kind}, {"message", message}, {"step", nullptr}};
    if (step) j["step"] = *step;
    std::ofstream(dir / "failure.json", std::ios::binary) << j.dump(2) << "\n";
}

int run_command(const std::string& command, const RunConfig& c, std::ostream& log) {
    try {
        if (command == "simulate") return run_simulate(c, log);
        if (command == "optimize") return run_optimize(c, log);
        if (command == "verify") return run_verify(c, log);
        if (command == "oracle-compare") return run_oracle_compare(c, log);
        throw InvalidArgument("unknown command '" + command + "'");
    } catch (const NonFinite& e) {
        write_failure(c.out, e.kind(), e.what(), e.step());
        fmt::print(log, "error [{}] at step {}: {}\n", e.kind(), e.step(), e.what());
    } catch (const Error& e) {
        write_failure(c.out, e.kind(), e.what());
        fmt::print(log, "error [{}]: {}\n", e.kind(), e.what());
    } catch (const std::exception& e) {
        write_failure(c.out, "InternalError", e.what());
        fmt::print(log, "error: {}\n", e.what());
    }
    return 2;
}

}  // namespace cho::harness

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cho/harness/invariants.hpp"
#include "cho/harness/run.hpp"
#include "cho/harness/snapshot.hpp"

using namespace cho;
using namespace cho::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cho_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path preset(const std::string& name) { return fs::path(CHO_PRESET_DIR) / (name + ".cfg"); }

template <class E>
std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const E& e) {
        return e.what();
    }
    return "<no throw>";
}

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
    const RunConfig c = parse_config_text("# nothing\n\n");
    EXPECT_EQ(c.nx, 32);
    EXPECT_EQ(c.steps, 100);
    EXPECT_EQ(c.potential.variant, potentials::Variant::Regular);
    EXPECT_EQ(c.phi0.to_string(), "constant:0");
    EXPECT_EQ(c.checks, std::vector<std::string>{"all"});
}

TEST(Config, ReadsSectionsAndComments) {
    const RunConfig c = parse_config_text(
        "[grid]\nnx = 16  # trailing comment\nny=1\n[time]\nT = 0.5\nnt = 20\n"
        "[potential]\nvariant = logarithmic\nc1 = 3\nregularization = yosida\neps = 0.05\nstabilization = 1.5\n"
        "[control]\nM = 0.3\n[verify]\nchecks = state, spectral.parseval\n");
    EXPECT_EQ(c.nx, 16);
    EXPECT_EQ(c.ny, 1);
    EXPECT_DOUBLE_EQ(c.final_time, 0.5);
    EXPECT_EQ(c.potential.reg, potentials::Regularization::Yosida);
    EXPECT_FALSE(c.auto_stabilization);
    EXPECT_DOUBLE_EQ(c.potential.stabilization, 1.5);
    EXPECT_EQ(c.checks, (std::vector<std::string>{"state", "spectral.parseval"}));
}

TEST(Config, ParseErrorsNameLineAndKey) {
    const std::string a = message_of<ParseError>([] { (void)parse_config_text("[grid]\nnx = 16\nbogus = 1\n"); });
    EXPECT_NE(a.find("line 3"), std::string::npos) << a;
    EXPECT_NE(a.find("grid.bogus"), std::string::npos) << a;
    const std::string b = message_of<ParseError>([] { (void)parse_config_text("[time]\nnt = ten\n"); });
    EXPECT_NE(b.find("line 2"), std::string::npos) << b;
    EXPECT_NE(b.find("time.nt"), std::string::npos) << b;
    EXPECT_THROW((void)parse_config_text("nx = 3\n"), ParseError);
    EXPECT_THROW((void)parse_config_text("[grid\n"), ParseError);
    EXPECT_THROW((void)parse_config_text("[grid]\nnx 3\n"), ParseError);
}

TEST(Config, EpsOutOfRange) {
    const std::string m = message_of<ValidationError>(
        [] { (void)parse_config_text("[potential]\nvariant = logarithmic\nregularization = yosida\neps = 1.5\n"); });
    EXPECT_NE(m.find("eps ∈ (0,1)"), std::string::npos) << m;
}

TEST(Config, OtherValidation) {
    EXPECT_THROW((void)parse_config_text("[grid]\nnx = 1\n"), ValidationError);
    EXPECT_THROW((void)parse_config_text("[cost]\nalpha1 = 0\nalpha4 = 0\n"), ValidationError);
    EXPECT_THROW((void)parse_config_text("[initial]\nphi0 = file:missing.cho\n"), ValidationError);
    EXPECT_THROW((void)parse_config_text("[potential]\nvariant = double_obstacle\nregularization = yosida\n"
                                         "[cost]\nalpha3 = 1\n"),
                 ValidationError);
}

TEST(Config, LogarithmicCompatibility) {
    const std::string text =
        "[potential]\nvariant = logarithmic\nregularization = piecewise_log\n[control]\nM = 1.5\n";
    const std::string m = message_of<ValidationError>([&] { (void)parse_config_text(text); });
    EXPECT_NE(m.find("compatibility"), std::string::npos) << m;
    const RunConfig c = parse_config_text(text, ".", {{"run.override_compatibility", "true"}});
    EXPECT_TRUE(c.override_compatibility);
    EXPECT_NO_THROW((void)parse_config_text(
        "[potential]\nvariant = logarithmic\nregularization = piecewise_log\n[control]\nM = 0.5\n"));
}

TEST(Config, OverridesApplyBeforeValidation) {
    const RunConfig c = parse_config_text("[grid]\nnx = 8\n", ".", {{"grid.nx", "12"}, {"run.seed", "5"}});
    EXPECT_EQ(c.nx, 12);
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.optimizer.seed, 5u);
    EXPECT_THROW((void)parse_config_text("", ".", {{"nodot", "1"}}), ParseError);
}

TEST(Config, AllPresetsParse) {
    for (const char* name : {"stationary", "separation2d", "gradient-check", "inverse-crime", "continuous-dependence"}) {
        EXPECT_NO_THROW((void)parse_config(preset(name))) << name;
    }
}

TEST(Config, IncompatiblePresetRefusedWithoutOverride) {
    const std::string m = message_of<ValidationError>([] { (void)parse_config(preset("remark22")); });
    EXPECT_NE(m.find("compatibility"), std::string::npos) << m;
    const RunConfig c = parse_config(preset("remark22"), {{"run.override_compatibility", "true"}});
    const auto traj = simulate_config(c);
    // the mean leaves D(beta) = (-1, 1) at t = ln 2
    const auto it = std::find_if(traj.diagnostics.begin(), traj.diagnostics.end(),
                                 [](const state::StepDiagnostics& d) { return d.mean > 1.0; });
    ASSERT_NE(it, traj.diagnostics.end());
    EXPECT_NEAR(it->t, std::log(2.0), 0.02 * std::log(2.0));
}

TEST(Descriptor, ParseAndPrint) {
    EXPECT_EQ(parse_descriptor("constant:0.25").to_string(), "constant:0.25");
    EXPECT_EQ(parse_descriptor("eigen: 1, 2, 0.5").to_string(), "eigen:1,2,0.5");
    EXPECT_EQ(parse_descriptor("random_smooth:0.5,3").args.size(), 2u);
    EXPECT_EQ(parse_descriptor("file:a/b.cho").path, "a/b.cho");
    EXPECT_THROW((void)parse_descriptor("constant"), ParseError);
    EXPECT_THROW((void)parse_descriptor("constant:1,2"), ParseError);
    EXPECT_THROW((void)parse_descriptor("wave:1"), ParseError);
    EXPECT_THROW((void)parse_descriptor("eigen:1,x,2"), ParseError);
}

TEST(Descriptor, Realization) {
    const Grid g(8, 4, 2.0, 1.0);
    const TimeGrid t(1.0, 4);
    EXPECT_EQ(spectral::max_abs(make_field(parse_descriptor("constant:0.3"), g, 0, 1, ".") - Field(g, 0.3)), 0.0);
    const Field e = make_field(parse_descriptor("eigen:1,0,2"), g, 0, 1, ".");
    EXPECT_NEAR(spectral::norm_H(e), 2.0, 1e-12);
    EXPECT_THROW((void)make_field(parse_descriptor("eigen:9,0,1"), g, 0, 1, "."), ValidationError);
    const Field r1 = make_field(parse_descriptor("random_smooth:0.7"), g, 3, 1, ".");
    const Field r2 = make_field(parse_descriptor("random_smooth:0.7"), g, 3, 1, ".");
    const Field r3 = make_field(parse_descriptor("random_smooth:0.7"), g, 4, 1, ".");
    EXPECT_EQ(spectral::max_abs(r1 - r2), 0.0);
    EXPECT_GT(spectral::max_abs(r1 - r3), 0.0);
    EXPECT_NEAR(spectral::max_abs(r1), 0.7, 1e-12);
    const FieldSeries s = make_series(parse_descriptor("random_smooth:1,2,3"), g, t, 0, 2, ".");
    EXPECT_EQ(s.size(), 5u);
    EXPECT_NEAR(linf(s), 1.0, 1e-12);
    const Field b = make_field(parse_descriptor("bandlimited:0.5,3"), g, 0, 1, ".");
    const spectral::SpectralField c = spectral::to_spectral(b);
    // (0,0), (1,0) and, of the tied pair (0,1)/(2,0), (0,1) on a 2 x 1 box
    for (int k = 0; k < g.ny(); ++k) {
        for (int j = 0; j < g.nx(); ++j) {
            if (!((j == 0 && k == 0) || (j == 1 && k == 0) || (j == 0 && k == 1))) {
                EXPECT_NEAR(c.at(j, k), 0.0, 1e-14);
            }
        }
    }
}

TEST(Snapshot, RoundTripAndFileDescriptor) {
    const fs::path dir = scratch("snap");
    const Grid g(5, 3, 1.0, 1.0);
    const TimeGrid t(1.0, 2);
    FieldSeries frames;
    for (int n = 0; n < 3; ++n) {
        Field f(g);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.1 * n + 1e-3 * static_cast<double>(i) - 1.0 / 3.0;
        frames.push_back(f);
    }
    write_snapshot(dir / "u.cho", frames);
    const std::string bytes = slurp(dir / "u.cho");
    ASSERT_EQ(bytes.size(), 4u + 12u + 3u * 15u * 8u);
    EXPECT_EQ(bytes.substr(0, 4), "CHO1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 5);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 3);
    EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 3);
    const Snapshot s = read_snapshot(dir / "u.cho");
    ASSERT_EQ(s.frames.size(), 3u);
    for (int n = 0; n < 3; ++n) {
        for (std::size_t i = 0; i < 15; ++i) EXPECT_EQ(s.frames[n][i], frames[n][i]);
    }
    const FieldSeries back = make_series(parse_descriptor("file:u.cho"), g, t, 0, 2, dir);
    EXPECT_EQ(linf(axpy(back, -1.0, frames)), 0.0);
    EXPECT_THROW((void)make_series(parse_descriptor("file:u.cho"), g, TimeGrid(1.0, 3), 0, 2, dir), ValidationError);

    std::ofstream(dir / "bad.cho", std::ios::binary) << "XXXX";
    EXPECT_THROW((void)read_snapshot(dir / "bad.cho"), IoError);
    std::ofstream(dir / "short.cho", std::ios::binary) << bytes.substr(0, bytes.size() - 3);
    EXPECT_THROW((void)read_snapshot(dir / "short.cho"), IoError);
    EXPECT_THROW((void)read_snapshot(dir / "none.cho"), IoError);
}

TEST(Registry, CoversEveryModuleInvariant) {
    const std::vector<std::string> required = {
        "spectral.parseval", "spectral.n_symmetry", "spectral.poincare", "spectral.laplacian_inverse",
        "potentials.monotonicity", "potentials.yosida_lipschitz", "potentials.sandwich", "potentials.pi_lipschitz",
        "potentials.exp_derivative_bound", "potentials.young_inequality",
        "state.discrete_mean_law", "state.mean_formula_consistency", "state.separation", "state.xi_bound",
        "state.continuous_dependence",
        "galerkin.constant_mode_law", "galerkin.refinement_convergence",
        "sensitivity.adjoint_exactness", "sensitivity.tangent_linearity", "sensitivity.frechet_order",
        "sensitivity.tangent_continuity",
        "control.cost_nonnegative", "control.projection_idempotent_nonexpansive", "control.monotone_descent",
        "control.existence_sanity", "control.variational_inequality"};
    std::set<std::string> names;
    for (const Check& c : registry()) {
        EXPECT_TRUE(names.insert(c.name).second) << "duplicate " << c.name;
        EXPECT_FALSE(c.description.empty()) << c.name;
    }
    for (const std::string& r : required) EXPECT_TRUE(names.count(r)) << r;
}

TEST(Registry, Selectors) {
    EXPECT_EQ(select_checks({"all"}).size(), registry().size());
    const auto st = select_checks({"state"});
    EXPECT_EQ(st.size(), 5u);
    for (const auto& n : st) EXPECT_EQ(n.rfind("state.", 0), 0u);
    EXPECT_EQ(select_checks({"spectral.parseval", "spectral"}).size(), 4u);
    EXPECT_THROW((void)select_checks({"stat"}), ValidationError);
    EXPECT_THROW((void)select_checks({"nothing.here"}), ValidationError);
}

TEST(Registry, FailingCheckIsReportedNotThrown) {
    RunConfig c = parse_config_text("[grid]\nnx = 8\nny = 8\n[time]\nnt = 10\n");
    // oracle.modes beyond the grid makes the Galerkin check throw inside
    c.oracle_modes = 1000;
    const auto r = run_checks(c, {"galerkin.constant_mode_law", "spectral.parseval"});
    ASSERT_EQ(r.size(), 2u);
    EXPECT_FALSE(r[0].measurement.passed);
    EXPECT_NE(r[0].error.find("BadModeCount"), std::string::npos) << r[0].error;
    EXPECT_TRUE(r[1].measurement.passed);
    const std::string csv = verify_csv(r);
    EXPECT_EQ(csv.rfind("name,status,value,threshold,detail\n", 0), 0u);
    EXPECT_NE(csv.find("galerkin.constant_mode_law,fail,nan"), std::string::npos) << csv;
}

TEST(Run, SimulateArtifactsAndDeterminism) {
    const std::string text = "[grid]\nnx = 16\nny = 16\n[time]\nT = 0.2\nnt = 20\n[initial]\n"
                             "phi0 = random_smooth:0.5\n[control]\ninitial = random_smooth:0.5,3,2\n"
                             "[output]\nsnapshot_every = 3\n[run]\nseed = 11\n";
    std::ostringstream log;
    std::string first;
    for (const char* name : {"sim_a", "sim_b"}) {
        RunConfig c = parse_config_text(text);
        c.out = scratch(name);
        ASSERT_EQ(run_command("simulate", c, log), 0);
        const std::string csv = slurp(c.out / "diagnostics.csv");
        EXPECT_EQ(csv.rfind("t,mean,energy,min_phi,max_phi,grad_mu\n", 0), 0u);
        EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);
        EXPECT_EQ(csv.find('\r'), std::string::npos);
        const Snapshot s = read_snapshot(c.out / "phi.cho");
        EXPECT_EQ(s.frames.size(), 8u);  // 0, 3, ..., 18 and the final slice
        EXPECT_TRUE(fs::exists(c.out / "summary.json"));
        if (first.empty()) {
            first = csv;
        } else {
            EXPECT_EQ(csv, first);
        }
    }
}

TEST(Run, OptimizeDeterministicHistory) {
    const std::string text = "[grid]\nnx = 8\nny = 8\n[time]\nT = 0.2\nnt = 10\n[initial]\n"
                             "phi0 = random_smooth:0.5\n[control]\nM = 0.5\nMprime = 0.5\n[cost]\nalpha2 = 1\n"
                             "targets = from_control\ntarget_control = random_smooth:0.4,2,2\n"
                             "[optimizer]\nmax_iters = 15\nvi_probes = 5\n";
    std::ostringstream log;
    std::string first;
    for (const char* name : {"opt_a", "opt_b"}) {
        RunConfig c = parse_config_text(text);
        c.out = scratch(name);
        ASSERT_EQ(run_command("optimize", c, log), 0);
        const std::string csv = slurp(c.out / "history.csv");
        EXPECT_EQ(csv.rfind("iter,J,step,stationarity,feasibility_linf,feasibility_h1\n", 0), 0u);
        EXPECT_EQ(read_snapshot(c.out / "u_star.cho").frames.size(), 11u);
        if (first.empty()) {
            first = csv;
        } else {
            EXPECT_EQ(csv, first);
        }
    }
}

TEST(Run, OracleCompareWritesCsv) {
    RunConfig c = parse_config_text("[grid]\nnx = 16\nny = 16\n[time]\nT = 0.1\nnt = 20\n"
                                    "[initial]\nphi0 = bandlimited:0.2,8\n[oracle]\nmodes = 8\n");
    c.out = scratch("oracle");
    std::ostringstream log;
    ASSERT_EQ(run_command("oracle-compare", c, log), 0);
    const std::string csv = slurp(c.out / "oracle.csv");
    EXPECT_EQ(csv.rfind("t,err_phi,err_mu\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 22);
}

TEST(Run, ErrorsBecomeFailureRecords) {
    RunConfig c = parse_config_text("[grid]\nnx = 8\nny = 8\n[verify]\nchecks = nothing\n");
    c.out = scratch("fail");
    std::ostringstream log;
    EXPECT_EQ(run_command("verify", c, log), 2);
    const std::string j = slurp(c.out / "failure.json");
    EXPECT_NE(j.find("\"status\": \"error\""), std::string::npos) << j;
    EXPECT_NE(j.find("\"kind\": \"ValidationError\""), std::string::npos) << j;
    EXPECT_NE(j.find("\"step\": null"), std::string::npos) << j;
    EXPECT_EQ(run_command("dance", c, log), 2);
}

TEST(Run, VerifyStationaryPreset) {
    RunConfig c = parse_config(preset("stationary"));
    c.out = scratch("verify");
    std::ostringstream log;
    const auto t0 = std::chrono::steady_clock::now();
    EXPECT_EQ(run_command("verify", c, log), 0) << log.str();
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 10.0);
    const std::string csv = slurp(c.out / "verify.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(registry().size()) + 1);
    EXPECT_EQ(csv.find(",fail,"), std::string::npos) << csv;
}

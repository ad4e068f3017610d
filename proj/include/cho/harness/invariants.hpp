#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cho/harness/checks.hpp"
#include "cho/harness/config.hpp"

/// Named invariants addressable from `verify`. Names are "<module>.<property>";
/// a selector is a full name, a module prefix such as "state", or "all".
namespace cho::harness {

/// Lazily built pieces of the configured problem shared between checks.
class VerifyContext {
public:
    explicit VerifyContext(RunConfig config);

    [[nodiscard]] const RunConfig& config() const { return config_; }
    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] const TimeGrid& time() const { return time_; }
    [[nodiscard]] const potentials::PotentialSpec& spec() const { return spec_; }
    [[nodiscard]] const Field& phi0() const { return phi0_; }
    [[nodiscard]] const FieldSeries& u0() const { return u0_; }

    const control::CostSpec& cost();
    const state::StateTrajectory& base();
    const control::ControlProblem& problem();
    const control::OptimizeResult& optimum();

private:
    RunConfig config_;
    Grid grid_;
    TimeGrid time_;
    potentials::PotentialSpec spec_;
    Field phi0_;
    FieldSeries u0_;
    std::optional<control::CostSpec> cost_;
    std::optional<state::StateTrajectory> base_;
    std::optional<control::ControlProblem> problem_;
    std::optional<control::OptimizeResult> optimum_;
};

struct Check {
    std::string name;
    std::string description;
    std::function<checks::Measurement(VerifyContext&)> run;
};

[[nodiscard]] const std::vector<Check>& registry();

/// Expands selectors into registry names in registry order. ValidationError on
/// a selector that matches nothing.
[[nodiscard]] std::vector<std::string> select_checks(const std::vector<std::string>& selectors);

struct CheckResult {
    std::string name;
    checks::Measurement measurement;
    double seconds = 0.0;
    /// set when the check threw; the measurement then counts as failed
    std::string error;
};

/// A check that throws is reported as failed with the error text.
[[nodiscard]] std::vector<CheckResult> run_checks(const RunConfig& config, const std::vector<std::string>& names,
                                                  const std::function<void(const CheckResult&)>& on_result = {});

/// name,status,value,threshold,detail (timings are left out so reruns match byte for byte)
[[nodiscard]] std::string verify_csv(const std::vector<CheckResult>& results);

}  // namespace cho::harness

#ifndef QMHEAT_CORE_SCENARIO_HPP
#define QMHEAT_CORE_SCENARIO_HPP

#include <string>
#include <vector>

namespace qmheat {

// Rendered artifact of one scenario run. `text` holds the CSV or JSON payload;
// `gnuplot` (CSV table runs only) is a plotting script that takes the data
// file as ARG1, e.g. `gnuplot -c curve.gp curve.csv`.
struct ScenarioResult {
    std::string text;
    std::string format; // "csv" or "json"
    std::string gnuplot;
    std::vector<std::string> warnings;
};

// Runs one scenario described by a JSON config (schema in the README).
// Kinds: steady_sweep_theta, transient, excess_sweep_theta, lambda_sweep_gamma,
// custom_lindblad — with aliases fig2b, fig4a, fig4b, qex, lambda, run.
// Throws ConfigError on malformed configs (field names; line/column for parse
// errors); model/solver errors propagate with their own types.
ScenarioResult run_scenario(const std::string& config_json);

// Deterministic cross-check battery over the closed forms, the generic engine
// and the quadratures. Appends one line per check to `report` and a final
// summary line; returns the number of failed checks.
int selftest(std::string& report);

} // namespace qmheat

#endif

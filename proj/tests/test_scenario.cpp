#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/heat.hpp"
#include "core/scenario.hpp"

using namespace qmheat;
using nlohmann::json;

namespace {

ScenarioResult run(const json& cfg) { return run_scenario(cfg.dump()); }

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv out;
    std::istringstream in(text);
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            out.comments.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        if (!header_done) {
            out.header = cells;
            header_done = true;
        } else {
            std::vector<double> row;
            for (const auto& c : cells)
                row.push_back(std::stod(c));
            out.rows.push_back(std::move(row));
        }
    }
    return out;
}

} // namespace

TEST_CASE("steady sweep: artifact layout and closed-form content") {
    const ScenarioResult r = run({{"kind", "steady_sweep_theta"},
                                  {"theta_points", 5},
                                  {"gammas", {0.001, 0.01}}});
    CHECK(r.format == "csv");
    CHECK_FALSE(r.gnuplot.empty());

    const Csv csv = parse_csv(r.text);
    REQUIRE(csv.comments.size() == 2);
    CHECK(csv.comments[0] == "# units: hbar=kB=Delta=1");
    CHECK(csv.comments[1].find("kind=steady_sweep_theta") != std::string::npos);
    REQUIRE(csv.header.size() == 3);
    CHECK(csv.header[0] == "theta");
    REQUIRE(csv.rows.size() == 5);

    // theta runs from 0 to pi; each current matches the closed form.
    CHECK(csv.rows.front()[0] == 0.0);
    CHECK(csv.rows.back()[0] == doctest::Approx(M_PI).epsilon(1e-15));
    const double gammas[2] = {0.001, 0.01};
    for (const auto& row : csv.rows)
        for (int c = 0; c < 2; ++c) {
            const QubitModel m =
                QubitModel::from_rates(1.0, 0.01, 0.005, {gammas[c], row[0], 0.0});
            CHECK(row[c + 1] == doctest::Approx(steady_state_heat_current(m)).epsilon(1e-13));
        }
}

TEST_CASE("fig2b alias selects the steady sweep") {
    const ScenarioResult a = run({{"kind", "fig2b"}, {"theta_points", 7}});
    const ScenarioResult b = run({{"kind", "steady_sweep_theta"}, {"theta_points", 7}});
    CHECK(parse_csv(a.text).rows == parse_csv(b.text).rows);
    CHECK(parse_csv(a.text).comments[1].find("kind=steady_sweep_theta") != std::string::npos);
}

TEST_CASE("transient: fig4a/fig4b aliases pin the initial state") {
    json base = {{"kind", "fig4a"}, {"t_end", 5.0}, {"dt", 0.05}, {"thetas", {M_PI / 2}}};
    const Csv a = parse_csv(run(base).text);
    REQUIRE(a.header.size() == 2);
    CHECK(a.header[0] == "t");
    REQUIRE_FALSE(a.rows.empty());
    CHECK(a.rows.front()[0] == 0.0);
    CHECK(a.rows.back()[0] == doctest::Approx(5.0));

    // fig4b starts from the bath steady state: J(0) = gamma*Delta*|beta|^2*Gm/Gp.
    base["kind"] = "fig4b";
    const Csv b = parse_csv(run(base).text);
    CHECK(b.rows.front()[1] == doctest::Approx(0.01 * 0.25 * 0.5).epsilon(1e-13));

    // Explicit Bloch-vector initial state, multiple angles -> one column each.
    const Csv c = parse_csv(run({{"kind", "transient"},
                                 {"init", {0.0, 0.0, 0.25}},
                                 {"thetas", {0.5, 1.0, 1.5}},
                                 {"t_end", 2.0},
                                 {"dt", 0.1}})
                                .text);
    REQUIRE(c.header.size() == 4);

    // 'transient' without init is an error with an actionable message.
    try {
        (void)run({{"kind", "transient"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("init") != std::string::npos);
    }
    // Unphysical Bloch vectors are rejected.
    CHECK_THROWS_AS((void)run({{"kind", "transient"}, {"init", {1.0, 1.0, 1.0}}}), ConfigError);
}

TEST_CASE("excess sweep reproduces the closed-form peak") {
    const ScenarioResult r = run({{"kind", "qex"}, {"theta_points", 5}});
    const Csv csv = parse_csv(r.text);
    REQUIRE(csv.header.size() == 2);
    CHECK(csv.header[1] == "Q_ex");
    REQUIRE(csv.rows.size() == 5);
    // Endpoints vanish; the equator value is the analytic peak 0.01.
    CHECK(std::abs(csv.rows.front()[1]) <= 1e-12);
    CHECK(std::abs(csv.rows.back()[1]) <= 1e-12);
    CHECK(csv.rows[2][0] == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(csv.rows[2][1] == doctest::Approx(0.01).epsilon(1e-5));

    CHECK_THROWS_AS((void)run({{"kind", "qex"}, {"gamma", 0.01}, {"gammas", {0.01, 0.02}}}),
                    ConfigError);
}

TEST_CASE("lambda sweep artifact") {
    const ScenarioResult r = run({{"kind", "lambda"}, {"gammas", {1e-3, 1e-2}}});
    const Csv csv = parse_csv(r.text);
    REQUIRE(csv.header.size() == 6);
    CHECK(csv.header[0] == "gamma");
    CHECK(csv.header[1] == "J_M");
    CHECK(csv.header[5] == "inversion_flag");
    REQUIRE(csv.rows.size() == 2);
    for (const auto& row : csv.rows) {
        CHECK(row[1] < 0.0);           // default bias drives heat out
        CHECK(row[5] == 1.0);          // inversion flag set
        CHECK(row[3] > row[2]);        // rho11 > rho00
    }
    // An explicit gammas list and the log-grid parameters are mutually exclusive.
    CHECK_THROWS_AS((void)run({{"kind", "lambda"}, {"gammas", {1e-3}}, {"gamma_points", 5}}),
                    ConfigError);
}

TEST_CASE("custom model: steady summary and path equivalence with the qubit") {
    // H = (1/2) sigma_z with emission/absorption and an equator measurement;
    // written out entry by entry as a user would.
    const json cfg = {
        {"kind", "run"},
        {"dim", 2},
        {"hamiltonian", {{0.5, 0.0}, {0.0, -0.5}}},
        {"channels",
         {{{"op", {{0.0, 0.0}, {1.0, 0.0}}}, {"weight", 0.015}},
          {{"op", {{0.0, 1.0}, {0.0, 0.0}}}, {"weight", 0.005}}}},
        {"measurement", {{"op", {{0.5, 0.5}, {0.5, 0.5}}}, {"gamma", 0.01}}},
        {"task", "steady"}};
    const std::string text = run(cfg).text;
    CHECK(text.find("quantity,value\n") != std::string::npos);

    double j = NAN, residual = NAN, trace_dev = NAN, min_eig = NAN;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string name, value;
        std::getline(ls, name, ',');
        std::getline(ls, value, ',');
        if (name == "J_M")
            j = std::stod(value);
        else if (name == "residual")
            residual = std::stod(value);
        else if (name == "trace_dev")
            trace_dev = std::stod(value);
        else if (name == "min_eig")
            min_eig = std::stod(value);
    }
    // Same physics through the closed form: Gp = 0.02, Gm = 0.01, equator.
    const QubitModel q = QubitModel::from_rates(1.0, 0.02, 0.01, {0.01, M_PI / 2, 0.0});
    CHECK(j == doctest::Approx(steady_state_heat_current(q)).epsilon(1e-9));
    CHECK(residual <= 1e-12);
    CHECK(std::abs(trace_dev) <= 1e-14);
    CHECK(min_eig >= -1e-12);
}

TEST_CASE("custom model: evolution diagnostics stay clean") {
    const json cfg = {{"kind", "run"},
                      {"dim", 2},
                      {"hamiltonian", {{0.5, 0.0}, {0.0, -0.5}}},
                      {"channels", {{{"op", {{0.0, 0.0}, {1.0, 0.0}}}, {"weight", 0.02}}}},
                      {"task", "evolve"},
                      {"initial", {{1.0, 0.0}, {0.0, 0.0}}},
                      {"t_end", 50.0},
                      {"dt", 1.0}};
    const Csv csv = parse_csv(run(cfg).text);
    REQUIRE_FALSE(csv.rows.empty());
    CHECK(csv.rows.front()[0] == 0.0);
    // Columns: t, rho_0_0, rho_1_1, trace_dev, herm_dev, min_eig (no measurement).
    REQUIRE(csv.header.size() == 6);
    // Exponential decay of the excited population at the channel weight.
    for (const auto& row : csv.rows)
        CHECK(row[1] == doctest::Approx(std::exp(-0.02 * row[0])).epsilon(1e-9));
    for (const auto& row : csv.rows) {
        CHECK(std::abs(row[3]) <= 1e-10);
        CHECK(std::abs(row[4]) <= 1e-10);
        CHECK(row[5] >= -1e-9);
    }

    // t_grid and t_end/dt are mutually exclusive.
    json bad = cfg;
    bad["t_grid"] = {0.0, 1.0};
    CHECK_THROWS_AS((void)run(bad), ConfigError);
    // Non-Hermitian Hamiltonians are named in the error.
    json nonherm = cfg;
    nonherm["hamiltonian"] = {{0.5, 1.0}, {0.0, -0.5}};
    try {
        (void)run(nonherm);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("hamiltonian") != std::string::npos);
    }
}

TEST_CASE("config hygiene: parse errors, unknown kinds, unknown fields, format") {
    try {
        (void)run_scenario("{ \"kind\": \n\"fig2b\", }");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line") != std::string::npos);
    }
    CHECK_THROWS_AS((void)run_scenario("[1,2]"), ConfigError);
    CHECK_THROWS_AS((void)run({{"format", "csv"}}), ConfigError);       // kind missing
    CHECK_THROWS_AS((void)run({{"kind", "mystery"}}), ConfigError);     // unknown kind
    CHECK_THROWS_AS((void)run({{"kind", 3}}), ConfigError);             // kind not a string
    CHECK_THROWS_AS((void)run({{"kind", "fig2b"}, {"format", "xml"}}), ConfigError);

    // Unknown fields are rejected by name instead of silently ignored.
    try {
        (void)run({{"kind", "fig2b"}, {"theta_pointz", 11}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("theta_pointz") != std::string::npos);
    }
}

TEST_CASE("json format carries the same numbers as csv") {
    const json cfg = {{"kind", "fig2b"}, {"theta_points", 5}, {"gammas", {0.01}}};
    json with_json = cfg;
    with_json["format"] = "json";
    const ScenarioResult rj = run(with_json);
    CHECK(rj.format == "json");
    CHECK(rj.gnuplot.empty());

    const json payload = json::parse(rj.text);
    CHECK(payload.at("units").get<std::string>() == "hbar=kB=Delta=1");
    CHECK(payload.at("kind").get<std::string>() == "steady_sweep_theta");
    REQUIRE(payload.at("columns").size() == 2);
    REQUIRE(payload.at("rows").size() == 5);

    const Csv csv = parse_csv(run(cfg).text);
    for (size_t i = 0; i < 5; ++i)
        for (size_t c = 0; c < 2; ++c)
            CHECK(payload.at("rows")[i][c].get<double>() == csv.rows[i][c]);
}

TEST_CASE("scenario runs are deterministic") {
    const json cfg = {{"kind", "fig4b"}, {"t_end", 3.0}, {"dt", 0.05}};
    const ScenarioResult a = run(cfg);
    const ScenarioResult b = run(cfg);
    CHECK(a.text == b.text);
    CHECK(a.gnuplot == b.gnuplot);
}

TEST_CASE("gnuplot script references the data through ARG1") {
    const ScenarioResult r = run({{"kind", "fig2b"}, {"theta_points", 5}});
    CHECK(r.gnuplot.find("ARG1") != std::string::npos);
    CHECK(r.gnuplot.find("set datafile separator \",\"") != std::string::npos);
    CHECK(r.gnuplot.find("plot") != std::string::npos);
}

TEST_CASE("selftest battery passes and reports every check") {
    std::string report;
    const int failures = selftest(report);
    CHECK(failures == 0);
    CHECK(report.find("selftest:") != std::string::npos);
    CHECK(report.find(" 0 failures") != std::string::npos);
    // One line per check plus the summary.
    const auto lines = std::count(report.begin(), report.end(), '\n');
    CHECK(lines >= 15);
}

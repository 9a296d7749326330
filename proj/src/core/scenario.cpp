#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "bloch.hpp"
#include "errors.hpp"
#include "heat.hpp"
#include "lambda_model.hpp"
#include "lindblad.hpp"
#include "rates.hpp"

namespace qmheat {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kPi = std::numbers::pi;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmtg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Json parse_config(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        size_t line = 1, col = 1;
        const size_t stop = e.byte > 0 ? static_cast<size_t>(e.byte) - 1 : 0;
        for (size_t i = 0; i < stop && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                          std::to_string(col) + ": " + e.what());
    }
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const std::string& where = "") {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("unknown config field '" + item.key() + "'" +
                              (where.empty() ? "" : " in " + where));
    }
}

double get_num(const Json& j, const char* key, double dflt) {
    if (!j.contains(key))
        return dflt;
    const auto& v = j.at(key);
    if (!v.is_number())
        throw ConfigError(std::string("field '") + key + "': expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ConfigError(std::string("field '") + key + "': must be finite");
    return x;
}

long get_int(const Json& j, const char* key, long dflt) {
    if (!j.contains(key))
        return dflt;
    const auto& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError(std::string("field '") + key + "': expected an integer");
    return v.get<long>();
}

std::string get_str(const Json& j, const char* key, const std::string& dflt) {
    if (!j.contains(key))
        return dflt;
    const auto& v = j.at(key);
    if (!v.is_string())
        throw ConfigError(std::string("field '") + key + "': expected a string");
    return v.get<std::string>();
}

std::vector<double> get_num_array(const Json& j, const char* key, std::vector<double> dflt) {
    if (!j.contains(key))
        return dflt;
    const auto& v = j.at(key);
    if (!v.is_array() || v.empty())
        throw ConfigError(std::string("field '") + key + "': expected a non-empty array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) {
        if (!e.is_number())
            throw ConfigError(std::string("field '") + key + "': expected a non-empty array of numbers");
        const double x = e.get<double>();
        if (!std::isfinite(x))
            throw ConfigError(std::string("field '") + key + "': entries must be finite");
        out.push_back(x);
    }
    return out;
}

// ---------------------------------------------------------------- rendering

struct Table {
    std::string kind;
    Json params; // ordered; echoed on the second comment line and in JSON meta
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string echo_params(const std::string& kind, const Json& params) {
    std::string s = "kind=" + kind;
    for (const auto& item : params.items()) {
        s += " " + item.key() + "=";
        const auto& v = item.value();
        if (v.is_string()) {
            s += v.get<std::string>();
        } else if (v.is_array()) {
            bool first = true;
            for (const auto& e : v) {
                if (!first)
                    s += ",";
                s += e.is_number() ? fmt17(e.get<double>()) : e.get<std::string>();
                first = false;
            }
        } else if (v.is_number_integer() || v.is_number_unsigned()) {
            s += std::to_string(v.get<long>());
        } else {
            s += fmt17(v.get<double>());
        }
    }
    return s;
}

std::string render_csv(const Table& t) {
    std::string s;
    s.reserve(t.rows.size() * (t.columns.size() + 1) * 20 + 256);
    s += "# units: hbar=kB=Delta=1\n# " + echo_params(t.kind, t.params) + "\n";
    for (size_t c = 0; c < t.columns.size(); ++c) {
        if (c)
            s += ",";
        s += t.columns[c];
    }
    s += "\n";
    for (const auto& row : t.rows) {
        for (size_t c = 0; c < row.size(); ++c) {
            if (c)
                s += ",";
            s += fmt17(row[c]);
        }
        s += "\n";
    }
    return s;
}

std::string render_json(const Table& t) {
    Json out;
    out["units"] = "hbar=kB=Delta=1";
    out["kind"] = t.kind;
    out["params"] = t.params;
    out["columns"] = t.columns;
    Json rows = Json::array();
    for (const auto& r : t.rows)
        rows.push_back(r);
    out["rows"] = std::move(rows);
    return out.dump(2) + "\n";
}

std::string gnuplot_curves(const Table& t, const std::string& ylabel, bool logx, int y_first,
                           int y_last) {
    std::string s;
    s += "# usage: gnuplot -c <this script> <data.csv>\n";
    s += "datafile = ARG1\n";
    s += "set datafile separator \",\"\n";
    s += "set key autotitle columnhead\n";
    s += "set xlabel \"" + t.columns[0] + "\"\n";
    s += "set ylabel \"" + ylabel + "\"\n";
    if (logx)
        s += "set logscale x\n";
    if (y_first == y_last)
        s += "plot datafile using 1:" + std::to_string(y_first) + " with lines\n";
    else
        s += "plot for [i=" + std::to_string(y_first) + ":" + std::to_string(y_last) +
             "] datafile using 1:i with lines\n";
    return s;
}

ScenarioResult finish_table(Table t, const std::string& format, const std::string& ylabel,
                            bool logx, int y_first, int y_last,
                            std::vector<std::string> warnings) {
    ScenarioResult r;
    r.format = format;
    r.warnings = std::move(warnings);
    if (format == "csv") {
        r.text = render_csv(t);
        r.gnuplot = gnuplot_curves(t, ylabel, logx, y_first, y_last);
    } else {
        r.text = render_json(t);
    }
    return r;
}

// ------------------------------------------------------------------- grids

std::vector<double> theta_grid(long n) {
    if (n < 2)
        throw ConfigError("field 'theta_points': must be >= 2");
    std::vector<double> g(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i)
        g[static_cast<size_t>(i)] = kPi * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

std::vector<double> log_grid(double lo, double hi, long n) {
    if (!(lo > 0.0) || !(hi > lo))
        throw ConfigError("fields 'gamma_min'/'gamma_max': need 0 < gamma_min < gamma_max");
    if (n < 2)
        throw ConfigError("field 'gamma_points': must be >= 2");
    std::vector<double> g(static_cast<size_t>(n));
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (long i = 0; i < n; ++i)
        g[static_cast<size_t>(i)] =
            std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

void collect_warnings(const std::vector<std::string>& in, std::vector<std::string>& out) {
    for (const auto& s : in)
        if (std::find(out.begin(), out.end(), s) == out.end())
            out.push_back(s);
}

double require_positive(double v, const char* field) {
    if (!(v > 0.0))
        throw ConfigError(std::string("field '") + field + "': must be > 0");
    return v;
}

// ------------------------------------------------------------------ runners

ScenarioResult run_steady_sweep(const Json& cfg, const std::string& format) {
    check_keys(cfg, {"kind", "format", "delta", "gamma_plus", "gamma_minus", "phi", "theta_points",
                     "gammas"});
    const double delta = require_positive(get_num(cfg, "delta", 1.0), "delta");
    const double gp = get_num(cfg, "gamma_plus", 0.01);
    const double gm = get_num(cfg, "gamma_minus", 0.5 * gp);
    const double phi = get_num(cfg, "phi", 0.0);
    const long n = get_int(cfg, "theta_points", 181);
    const auto gammas = get_num_array(cfg, "gammas", {0.001, 0.01, 0.05});

    Table t;
    t.kind = "steady_sweep_theta";
    t.params["delta"] = delta;
    t.params["gamma_plus"] = gp;
    t.params["gamma_minus"] = gm;
    t.params["phi"] = phi;
    t.params["theta_points"] = n;
    t.params["gammas"] = gammas;
    t.columns.emplace_back("theta");
    for (size_t k = 0; k < gammas.size(); ++k)
        t.columns.push_back("J_M_gamma" + std::to_string(k + 1));

    std::vector<std::string> warnings;
    for (const double theta : theta_grid(n)) {
        std::vector<double> row{theta};
        for (const double g : gammas) {
            const QubitModel m = QubitModel::from_rates(delta, gp, gm, {g, theta, phi});
            collect_warnings(m.warnings(), warnings);
            row.push_back(steady_state_heat_current(m));
        }
        t.rows.push_back(std::move(row));
    }
    return finish_table(std::move(t), format, "J_M [Delta^2]", false, 2,
                        1 + static_cast<int>(gammas.size()), std::move(warnings));
}

BlochState initial_state(const Json& cfg, double gp, double gm) {
    if (!cfg.contains("init"))
        throw ConfigError(
            "field 'init' is required for kind 'transient' (\"sigma_x\", \"bath_steady\" or [x,y,z])");
    const auto& v = cfg.at("init");
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "sigma_x")
            return {1.0, 0.0, 0.0, 0.0};
        if (s == "bath_steady") {
            if (!(gp > 0.0))
                throw ConfigError("init 'bath_steady' requires gamma_plus > 0");
            return {0.0, 0.0, -gm / gp, 0.0};
        }
        throw ConfigError("field 'init': unknown name '" + s + "'");
    }
    if (v.is_array() && v.size() == 3) {
        double c[3];
        for (int i = 0; i < 3; ++i) {
            if (!v[static_cast<size_t>(i)].is_number())
                throw ConfigError("field 'init': expected [x, y, z] numbers");
            c[i] = v[static_cast<size_t>(i)].get<double>();
            if (!std::isfinite(c[i]))
                throw ConfigError("field 'init': must be finite");
        }
        if (c[0] * c[0] + c[1] * c[1] + c[2] * c[2] > 1.0 + 1e-12)
            throw ConfigError("field 'init': Bloch vector must satisfy |r| <= 1");
        return {c[0], c[1], c[2], 0.0};
    }
    throw ConfigError("field 'init': expected \"sigma_x\", \"bath_steady\" or [x, y, z]");
}

ScenarioResult run_transient(const Json& cfg, const std::string& format) {
    check_keys(cfg, {"kind", "format", "delta", "gamma_plus", "gamma_minus", "gamma", "phi",
                     "thetas", "init", "t_end", "dt"});
    const double delta = require_positive(get_num(cfg, "delta", 1.0), "delta");
    const double gp = get_num(cfg, "gamma_plus", 0.02);
    const double gm = get_num(cfg, "gamma_minus", 0.01);
    const double g = get_num(cfg, "gamma", 0.01);
    const double phi = get_num(cfg, "phi", 0.0);
    const auto thetas =
        get_num_array(cfg, "thetas", {0.0, kPi / 6.0, kPi / 4.0, kPi / 3.0, kPi / 2.0});
    const double t_end = get_num(cfg, "t_end", 600.0 / delta);
    const double dt = get_num(cfg, "dt", 0.01 / delta);
    const BlochState init = initial_state(cfg, gp, gm);

    Table t;
    t.kind = "transient";
    t.params["delta"] = delta;
    t.params["gamma_plus"] = gp;
    t.params["gamma_minus"] = gm;
    t.params["gamma"] = g;
    t.params["phi"] = phi;
    t.params["thetas"] = thetas;
    t.params["init"] = cfg.at("init");
    t.params["t_end"] = t_end;
    t.params["dt"] = dt;
    t.columns.emplace_back("t");
    for (size_t k = 0; k < thetas.size(); ++k)
        t.columns.push_back("J_M_theta" + std::to_string(k + 1));

    std::vector<std::string> warnings;
    std::vector<double> times;
    std::vector<std::vector<double>> curves;
    for (const double theta : thetas) {
        const QubitModel m = QubitModel::from_rates(delta, gp, gm, {g, theta, phi});
        collect_warnings(m.warnings(), warnings);
        const Trajectory traj = integrate(m, init, t_end, dt);
        std::vector<double> j;
        j.reserve(traj.states.size());
        for (const auto& s : traj.states)
            j.push_back(heat_current_instant(s, m.meas(), delta));
        if (times.empty())
            for (const auto& s : traj.states)
                times.push_back(s.t);
        else if (times.size() != j.size())
            throw NumericalError("transient: trajectory lengths differ across thetas");
        curves.push_back(std::move(j));
    }
    t.rows.reserve(times.size());
    for (size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row;
        row.reserve(1 + curves.size());
        row.push_back(times[i]);
        for (const auto& c : curves)
            row.push_back(c[i]);
        t.rows.push_back(std::move(row));
    }
    return finish_table(std::move(t), format, "J_M [Delta^2]", false, 2,
                        1 + static_cast<int>(thetas.size()), std::move(warnings));
}

ScenarioResult run_excess_sweep(const Json& cfg, const std::string& format) {
    check_keys(cfg, {"kind", "format", "delta", "gamma_plus", "gamma_minus", "gamma", "gammas",
                     "phi", "theta_points", "t_end", "dt"});
    if (cfg.contains("gamma") && cfg.contains("gammas"))
        throw ConfigError("use either 'gamma' or 'gammas', not both");
    const double delta = require_positive(get_num(cfg, "delta", 1.0), "delta");
    const double gp = get_num(cfg, "gamma_plus", 0.02);
    const double gm = get_num(cfg, "gamma_minus", 0.01);
    const double phi = get_num(cfg, "phi", 0.0);
    const long n = get_int(cfg, "theta_points", 181);
    std::vector<double> gammas;
    if (cfg.contains("gammas"))
        gammas = get_num_array(cfg, "gammas", {});
    else
        gammas = {get_num(cfg, "gamma", 0.01)};
    if (!(gp > 0.0))
        throw ConfigError("excess sweep requires gamma_plus > 0 (start is the bath steady state)");

    Table t;
    t.kind = "excess_sweep_theta";
    t.params["delta"] = delta;
    t.params["gamma_plus"] = gp;
    t.params["gamma_minus"] = gm;
    t.params["phi"] = phi;
    t.params["theta_points"] = n;
    t.params["gammas"] = gammas;
    t.params["t_end"] = cfg.contains("t_end") ? Json(get_num(cfg, "t_end", 0.0)) : Json("auto");
    t.params["dt"] = cfg.contains("dt") ? Json(get_num(cfg, "dt", 0.0)) : Json("auto");
    t.columns.emplace_back("theta");
    if (gammas.size() == 1)
        t.columns.emplace_back("Q_ex");
    else
        for (size_t k = 0; k < gammas.size(); ++k)
            t.columns.push_back("Q_ex_gamma" + std::to_string(k + 1));

    std::vector<std::string> warnings;
    for (const double theta : theta_grid(n)) {
        std::vector<double> row{theta};
        for (const double g : gammas) {
            const QubitModel m = QubitModel::from_rates(delta, gp, gm, {g, theta, phi});
            collect_warnings(m.warnings(), warnings);
            const double t_end = get_num(cfg, "t_end", 12.0 / std::min(gp, m.gamma_tilde_plus()));
            const double dt = get_num(cfg, "dt", default_step(m));
            const BlochState init{0.0, 0.0, -gm / gp, 0.0};
            const HeatSeries hs = heat_series(m, init, t_end, dt);
            try {
                row.push_back(excess_heat(hs).value);
            } catch (const ConvergenceError& e) {
                throw ConvergenceError("theta = " + fmtg(theta) + ", gamma = " + fmtg(g) + ": " +
                                       e.what());
            }
        }
        t.rows.push_back(std::move(row));
    }
    return finish_table(std::move(t), format, "Q_ex [Delta]", false, 2,
                        1 + static_cast<int>(gammas.size()), std::move(warnings));
}

ScenarioResult run_lambda_sweep(const Json& cfg, const std::string& format) {
    check_keys(cfg, {"kind", "format", "delta", "delta_small", "temp_hot", "temp_cold", "kappa_hot",
                     "kappa_cold", "cutoff", "phi", "gammas", "gamma_points", "gamma_min",
                     "gamma_max"});
    if (cfg.contains("gammas") &&
        (cfg.contains("gamma_points") || cfg.contains("gamma_min") || cfg.contains("gamma_max")))
        throw ConfigError("use either 'gammas' or 'gamma_points'/'gamma_min'/'gamma_max'");
    const double delta = require_positive(get_num(cfg, "delta", 1.0), "delta");
    const double delta_small = get_num(cfg, "delta_small", 0.5 * delta);
    const double temp_hot = get_num(cfg, "temp_hot", 5.0 * delta);
    const double temp_cold = get_num(cfg, "temp_cold", 2.0 * delta);
    const double kappa_hot = get_num(cfg, "kappa_hot", 0.01);
    const double kappa_cold = get_num(cfg, "kappa_cold", 0.01);
    const double cutoff = get_num(cfg, "cutoff", 10.0 * delta);
    const double phi = get_num(cfg, "phi", 0.0);
    std::vector<double> gammas;
    if (cfg.contains("gammas"))
        gammas = get_num_array(cfg, "gammas", {});
    else
        gammas = log_grid(get_num(cfg, "gamma_min", 1e-4 * delta),
                          get_num(cfg, "gamma_max", 0.1 * delta), get_int(cfg, "gamma_points", 25));

    LambdaParams p;
    p.delta_big = delta;
    p.delta_small = delta_small;
    p.hot = BathSpec{kappa_hot, temp_hot, cutoff, "hot"};
    p.cold = BathSpec{kappa_cold, temp_cold, cutoff, "cold"};
    p.gamma = 0.0;
    p.phi = phi;
    std::vector<std::string> warnings;
    collect_warnings(p.validate(), warnings);

    Table t;
    t.kind = "lambda_sweep_gamma";
    t.params["delta"] = delta;
    t.params["delta_small"] = delta_small;
    t.params["temp_hot"] = temp_hot;
    t.params["temp_cold"] = temp_cold;
    t.params["kappa_hot"] = kappa_hot;
    t.params["kappa_cold"] = kappa_cold;
    t.params["cutoff"] = cutoff;
    t.params["phi"] = phi;
    t.params["gammas"] = gammas;
    t.columns = {"gamma", "J_M", "rho00", "rho11", "rho22", "inversion_flag"};

    for (const auto& pt : lambda_heat_current_sweep(p, gammas))
        t.rows.push_back(
            {pt.gamma, pt.current, pt.rho00, pt.rho11, pt.rho22, pt.inverted ? 1.0 : 0.0});
    return finish_table(std::move(t), format, "J_M [Delta^2]", true, 2, 2, std::move(warnings));
}

// ------------------------------------------------------------ custom models

std::complex<double> parse_entry(const Json& v, const std::string& path) {
    if (v.is_number()) {
        const double x = v.get<double>();
        if (!std::isfinite(x))
            throw ConfigError(path + ": must be finite");
        return {x, 0.0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        const double re = v[0].get<double>(), im = v[1].get<double>();
        if (!std::isfinite(re) || !std::isfinite(im))
            throw ConfigError(path + ": must be finite");
        return {re, im};
    }
    throw ConfigError(path + ": expected a number or [re, im]");
}

Mat parse_matrix(const Json& j, int dim, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw ConfigError(path + ": expected " + std::to_string(dim) + " rows");
    Mat m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        const auto& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw ConfigError(path + "[" + std::to_string(i) + "]: expected " +
                              std::to_string(dim) + " entries");
        for (int k = 0; k < dim; ++k)
            m(i, k) = parse_entry(row[static_cast<size_t>(k)],
                                  path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

void require_hermitian(const Mat& h, const std::string& name) {
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = i; j < h.cols(); ++j)
            if (std::abs(h(i, j) - std::conj(h(j, i))) > 1e-12 * scale)
                throw ConfigError(name + ": not Hermitian at entry (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
}

// Tr(H D_M[rho]) evaluated in extended precision.
double current_trace_h(const Mat& hamiltonian, const Channel& meas, const MatLD& rho) {
    const MatLD h = hamiltonian.cast<std::complex<long double>>();
    const MatLD p = meas.op.cast<std::complex<long double>>();
    const long double g = static_cast<long double>(meas.weight);
    const MatLD pdp = p.adjoint() * p;
    const MatLD d = g * (p * rho * p.adjoint() - 0.5L * (pdp * rho + rho * pdp));
    return static_cast<double>((h * d).trace().real());
}

Json custom_params(const LindbladModel& model, const std::string& task) {
    Json params;
    params["dim"] = model.dim;
    params["task"] = task;
    const bool has_meas = model.measurement() != nullptr;
    params["channels"] = static_cast<long>(model.channels.size()) - (has_meas ? 1 : 0);
    params["measurement"] = static_cast<long>(has_meas ? 1 : 0);
    return params;
}

ScenarioResult run_custom_steady(const LindbladModel& model, const std::string& format) {
    const MatLD rho_ld = steady_state_ld(model);
    const Mat rho = rho_ld.cast<std::complex<double>>();
    const Channel* meas = model.measurement();
    const double j_m = meas ? current_trace_h(model.hamiltonian, *meas, rho_ld) : 0.0;

    const Mat liou = build_liouvillian(model);
    const Vec v = Eigen::Map<const Vec>(rho.data(), rho.size());
    const double residual = (liou * v).cwiseAbs().maxCoeff();
    const double trace_dev = std::abs(rho.trace() - std::complex<double>(1.0));
    const double herm_dev = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
    const Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    const double min_eig = es.eigenvalues().minCoeff();

    const Json params = custom_params(model, "steady");
    ScenarioResult r;
    r.format = format;
    if (format == "csv") {
        std::string s = "# units: hbar=kB=Delta=1\n# " + echo_params("custom_lindblad", params) +
                        "\nquantity,value\n";
        if (meas)
            s += "J_M," + fmt17(j_m) + "\n";
        s += "residual," + fmt17(residual) + "\n";
        s += "trace_dev," + fmt17(trace_dev) + "\n";
        s += "herm_dev," + fmt17(herm_dev) + "\n";
        s += "min_eig," + fmt17(min_eig) + "\n";
        for (int i = 0; i < model.dim; ++i)
            for (int k = 0; k < model.dim; ++k) {
                const std::string base = "rho_" + std::to_string(i) + "_" + std::to_string(k);
                s += base + "_re," + fmt17(rho(i, k).real()) + "\n";
                s += base + "_im," + fmt17(rho(i, k).imag()) + "\n";
            }
        r.text = std::move(s);
    } else {
        Json out;
        out["units"] = "hbar=kB=Delta=1";
        out["kind"] = "custom_lindblad";
        out["params"] = params;
        if (meas)
            out["J_M"] = j_m;
        out["residual"] = residual;
        out["trace_dev"] = trace_dev;
        out["herm_dev"] = herm_dev;
        out["min_eig"] = min_eig;
        Json re = Json::array(), im = Json::array();
        for (int i = 0; i < model.dim; ++i) {
            Json rrow = Json::array(), irow = Json::array();
            for (int k = 0; k < model.dim; ++k) {
                rrow.push_back(rho(i, k).real());
                irow.push_back(rho(i, k).imag());
            }
            re.push_back(std::move(rrow));
            im.push_back(std::move(irow));
        }
        out["rho_re"] = std::move(re);
        out["rho_im"] = std::move(im);
        r.text = out.dump(2) + "\n";
    }
    return r;
}

ScenarioResult run_custom_evolve(const Json& cfg, const LindbladModel& model,
                                 const std::string& format) {
    if (!cfg.contains("initial"))
        throw ConfigError("field 'initial' is required for task 'evolve'");
    Mat rho0 = parse_matrix(cfg.at("initial"), model.dim, "initial");
    require_hermitian(rho0, "initial");
    rho0 = 0.5 * (rho0 + rho0.adjoint().eval());
    if (std::abs(rho0.trace() - std::complex<double>(1.0)) > 1e-8)
        throw ConfigError("initial: trace must be 1 (within 1e-8)");
    rho0 /= rho0.trace().real();
    {
        const Eigen::SelfAdjointEigenSolver<Mat> es0(rho0);
        if (es0.eigenvalues().minCoeff() < -1e-8)
            throw ConfigError("initial: not positive semidefinite");
    }

    if (cfg.contains("t_grid") && (cfg.contains("t_end") || cfg.contains("dt")))
        throw ConfigError("use either 't_grid' or 't_end'/'dt'");
    std::vector<double> grid;
    double dt_echo = 0.0;
    if (cfg.contains("t_grid")) {
        grid = get_num_array(cfg, "t_grid", {});
        if (grid.front() < 0.0)
            throw ConfigError("field 't_grid': times must be >= 0");
        for (size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw ConfigError("field 't_grid': must be strictly increasing");
    } else {
        if (!cfg.contains("t_end"))
            throw ConfigError("task 'evolve' requires 't_grid' or 't_end'");
        const double t_end = require_positive(get_num(cfg, "t_end", 0.0), "t_end");
        const double dt = require_positive(get_num(cfg, "dt", t_end / 600.0), "dt");
        dt_echo = dt;
        const long long nf = static_cast<long long>(t_end / dt + 1e-9);
        for (long long i = 0; i <= nf; ++i)
            grid.push_back(static_cast<double>(i) * dt);
        if (t_end - static_cast<double>(nf) * dt > 1e-12 * dt)
            grid.push_back(t_end);
    }

    const std::vector<Mat> states = evolve(build_liouvillian(model), rho0, grid);
    const Channel* meas = model.measurement();

    Table t;
    t.kind = "custom_lindblad";
    t.params = custom_params(model, "evolve");
    t.params["t_points"] = static_cast<long>(grid.size());
    if (dt_echo > 0.0)
        t.params["dt"] = dt_echo;
    t.columns.emplace_back("t");
    for (int k = 0; k < model.dim; ++k)
        t.columns.push_back("rho_" + std::to_string(k) + "_" + std::to_string(k));
    if (meas)
        t.columns.emplace_back("J_M");
    t.columns.emplace_back("trace_dev");
    t.columns.emplace_back("herm_dev");
    t.columns.emplace_back("min_eig");

    for (size_t i = 0; i < states.size(); ++i) {
        const Mat& rho = states[i];
        std::vector<double> row;
        row.reserve(t.columns.size());
        row.push_back(grid[i]);
        for (int k = 0; k < model.dim; ++k)
            row.push_back(rho(k, k).real());
        if (meas)
            row.push_back((model.hamiltonian * dissipator_apply(*meas, rho)).trace().real());
        row.push_back(std::abs(rho.trace() - std::complex<double>(1.0)));
        row.push_back((rho - rho.adjoint().eval()).cwiseAbs().maxCoeff());
        const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint().eval()));
        row.push_back(es.eigenvalues().minCoeff());
        t.rows.push_back(std::move(row));
    }
    return finish_table(std::move(t), format, "population", false, 2, 1 + model.dim, {});
}

ScenarioResult run_custom(const Json& cfg, const std::string& format) {
    check_keys(cfg, {"kind", "format", "dim", "hamiltonian", "channels", "measurement", "task",
                     "initial", "t_grid", "t_end", "dt"});
    const long dim = get_int(cfg, "dim", 0);
    if (dim < 2 || dim > 10)
        throw ConfigError("field 'dim': expected an integer in [2, 10]");
    if (!cfg.contains("hamiltonian"))
        throw ConfigError("field 'hamiltonian' is required");
    Mat h = parse_matrix(cfg.at("hamiltonian"), static_cast<int>(dim), "hamiltonian");
    require_hermitian(h, "hamiltonian");

    LindbladModel model;
    model.dim = static_cast<int>(dim);
    model.hamiltonian = std::move(h);
    if (cfg.contains("channels")) {
        const auto& chs = cfg.at("channels");
        if (!chs.is_array())
            throw ConfigError("field 'channels': expected an array");
        for (size_t k = 0; k < chs.size(); ++k) {
            const std::string path = "channels[" + std::to_string(k) + "]";
            const auto& c = chs[k];
            if (!c.is_object())
                throw ConfigError(path + ": expected an object {op, weight}");
            check_keys(c, {"op", "weight"}, path);
            if (!c.contains("op"))
                throw ConfigError(path + ".op is required");
            Mat op = parse_matrix(c.at("op"), static_cast<int>(dim), path + ".op");
            const double w = get_num(c, "weight", 0.0);
            if (w < 0.0)
                throw ConfigError(path + ".weight: must be >= 0");
            model.channels.push_back({std::move(op), w});
        }
    }
    if (cfg.contains("measurement")) {
        const auto& mj = cfg.at("measurement");
        if (!mj.is_object())
            throw ConfigError("field 'measurement': expected an object {op, gamma}");
        check_keys(mj, {"op", "gamma"}, "measurement");
        if (!mj.contains("op"))
            throw ConfigError("measurement.op is required");
        const Mat p = parse_matrix(mj.at("op"), static_cast<int>(dim), "measurement.op");
        const double g = get_num(mj, "gamma", 0.0);
        if (g < 0.0)
            throw ConfigError("measurement.gamma: must be >= 0");
        model.channels.push_back(measurement_channel(p, g));
        model.measurement_index = static_cast<int>(model.channels.size()) - 1;
    }
    model.validate();

    const std::string task = get_str(cfg, "task", "steady");
    if (task == "steady") {
        for (const char* key : {"initial", "t_grid", "t_end", "dt"})
            if (cfg.contains(key))
                throw ConfigError(std::string("field '") + key + "' only applies to task 'evolve'");
        return run_custom_steady(model, format);
    }
    if (task == "evolve")
        return run_custom_evolve(cfg, model, format);
    throw ConfigError("field 'task': expected \"steady\" or \"evolve\"");
}

} // namespace

ScenarioResult run_scenario(const std::string& config_json) {
    Json cfg = parse_config(config_json);
    if (!cfg.is_object())
        throw ConfigError("config root must be a JSON object");
    if (!cfg.contains("kind"))
        throw ConfigError("field 'kind' is required");
    if (!cfg.at("kind").is_string())
        throw ConfigError("field 'kind': expected a string");
    std::string kind = cfg.at("kind").get<std::string>();
    if (kind == "fig2b") {
        kind = "steady_sweep_theta";
    } else if (kind == "fig4a") {
        kind = "transient";
        if (!cfg.contains("init"))
            cfg["init"] = "sigma_x";
    } else if (kind == "fig4b") {
        kind = "transient";
        if (!cfg.contains("init"))
            cfg["init"] = "bath_steady";
    } else if (kind == "qex") {
        kind = "excess_sweep_theta";
    } else if (kind == "lambda") {
        kind = "lambda_sweep_gamma";
    } else if (kind == "run") {
        kind = "custom_lindblad";
    }
    const std::string format = get_str(cfg, "format", "csv");
    if (format != "csv" && format != "json")
        throw ConfigError("field 'format': expected \"csv\" or \"json\"");

    if (kind == "steady_sweep_theta")
        return run_steady_sweep(cfg, format);
    if (kind == "transient")
        return run_transient(cfg, format);
    if (kind == "excess_sweep_theta")
        return run_excess_sweep(cfg, format);
    if (kind == "lambda_sweep_gamma")
        return run_lambda_sweep(cfg, format);
    if (kind == "custom_lindblad")
        return run_custom(cfg, format);
    throw ConfigError("field 'kind': unknown scenario kind '" + kind + "'");
}

// -------------------------------------------------------------- selftest

namespace {

struct Selftest {
    std::string& report;
    int failures = 0;
    int total = 0;

    void check(const std::string& name, bool ok, const std::string& detail) {
        report += (ok ? "ok " : "FAIL ") + name + ": " + detail + "\n";
        ++total;
        if (!ok)
            ++failures;
    }
};

double max_closed_form_err(const QubitModel& m, const BlochState& init, double t_end, double dt,
                           BlochState (*closed)(double, const BlochState&, const QubitModel&)) {
    const Trajectory traj = integrate(m, init, t_end, dt);
    double err = 0.0;
    for (const auto& s : traj.states) {
        const BlochState c = closed(s.t, init, m);
        err = std::max({err, std::abs(s.x - c.x), std::abs(s.y - c.y), std::abs(s.z - c.z)});
    }
    return err;
}

double rel_dev(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace

int selftest(std::string& report) {
    Selftest st{report};
    report += "qmheat selftest: closed forms vs generic engine vs quadrature\n";

    { // Ohmic spectral density at the cutoff: I = 2*0.01*10*e^{-1}.
        const BathSpec b{0.01, 5.0, 10.0, "bath"};
        const double v = ohmic_spectral_density(10.0, b);
        const double ref = 0.07357588823428847;
        st.check("ohmic_at_cutoff", std::abs(v - ref) <= 1e-15,
                 "I(10)=" + fmtg(v) + " ref=" + fmtg(ref));
    }
    { // Bose-Einstein occupation at energy 1, temperature 5.
        const double v = bose_einstein(1.0, 5.0);
        const double ref = 4.516655566126994;
        st.check("bose_occupation", std::abs(v - ref) <= 1e-13,
                 "n(1;5)=" + fmtg(v) + " ref=" + fmtg(ref));
    }
    { // Detailed balance of one bath's golden-rule rates.
        const RatePair r = bath_rates(1.0, BathSpec{0.01, 0.5, 10.0, "bath"});
        const double dev = rel_dev(r.emit / r.absorb, std::exp(2.0));
        st.check("detailed_balance", dev <= 1e-13, "emit/absorb vs e^2 rel_dev=" + fmtg(dev));
    }
    { // Equator steady state z = -Gamma_-/(Gamma_+ + gamma/2) = -0.4.
        const QubitModel m = QubitModel::from_rates(1.0, 0.02, 0.01, {0.01, kPi / 2.0, 0.0});
        const double z = steady_state_bloch(m).z;
        st.check("equator_steady_z", std::abs(z + 0.4) <= 1e-12, "z_ss=" + fmtg(z) + " ref=-0.4");
    }
    const QubitModel probe = QubitModel::from_rates(1.0, 0.02, 0.013, {0.037, 1.1, 0.7});
    double j_closed = 0.0;
    { // Steady current: closed form vs Bloch fixed point vs generic engine.
        j_closed = steady_state_heat_current(probe);
        const double j_bloch = heat_current_instant(steady_state_bloch(probe), probe.meas(), 1.0);
        const double j_engine = steady_state_current_engine(probe);
        const double dev_b = rel_dev(j_closed, j_bloch);
        const double dev_e = rel_dev(j_closed, j_engine);
        st.check("steady_current_paths", dev_b <= 1e-12 && dev_e <= 1e-9,
                 "J=" + fmtg(j_closed) + " rel_dev_bloch=" + fmtg(dev_b) +
                     " rel_dev_engine=" + fmtg(dev_e));
    }
    { // Steady current inside its bounds.
        const auto [lo, hi] = heat_current_bounds(probe);
        st.check("current_bounds", j_closed >= lo - 1e-15 && j_closed <= hi + 1e-12,
                 "J=" + fmtg(j_closed) + " bound=" + fmtg(hi));
    }
    const BlochState init0{0.6, -0.3, 0.2, 0.0};
    { // Pole measurement: RK4 against the exact solution.
        const QubitModel m = QubitModel::from_rates(1.0, 0.02, 0.01, {0.01, 0.0, 0.0});
        const double err =
            max_closed_form_err(m, init0, 10.0 / m.gamma_tilde_plus(), 0.01, &closed_form_case_i);
        st.check("pole_closed_form", err <= 1e-8, "max_err=" + fmtg(err));
    }
    { // Equator measurement at phi = pi/3: RK4 against the exact solution.
        const QubitModel m = QubitModel::from_rates(1.0, 0.02, 0.01, {0.01, kPi / 2.0, kPi / 3.0});
        const double err =
            max_closed_form_err(m, init0, 10.0 / m.gamma_tilde_plus(), 0.01, &closed_form_case_ii);
        st.check("equator_closed_form", err <= 1e-8, "max_err=" + fmtg(err));
    }
    const QubitModel equator = QubitModel::from_rates(1.0, 0.02, 0.01, {0.01, kPi / 2.0, 0.0});
    const BlochState bath_init{0.0, 0.0, -0.5, 0.0};
    { // Switch-on transient of the current at the equator.
        const double j0 = transient_heat_current_equator(0.0, -0.5, equator);
        const HeatSeries hs = heat_series(equator, bath_init, 600.0, 0.01);
        double err = 0.0;
        for (size_t i = 0; i < hs.times.size(); ++i)
            err = std::max(err, std::abs(hs.values[i] - transient_heat_current_equator(
                                                            hs.times[i], -0.5, equator)));
        st.check("equator_current_transient", std::abs(j0 - 1.25e-3) <= 1e-12 && err <= 1e-8,
                 "J(0)=" + fmtg(j0) + " ref=0.00125 max_err=" + fmtg(err));
    }
    { // Excess heat from quadrature vs the closed form.
        const HeatSeries hs = heat_series(equator, bath_init, 600.0, 0.01);
        const double q = excess_heat(hs).value;
        const double q_ref = excess_heat_max(equator);
        const double dev = rel_dev(q, q_ref);
        st.check("excess_heat_peak", dev <= 1e-5 && std::abs(q_ref - 0.01) <= 1e-12,
                 "Q_ex=" + fmtg(q) + " ref=" + fmtg(q_ref) + " rel_dev=" + fmtg(dev));
    }
    LambdaParams lp; // defaults: delta=1, delta_small=0.5, T_h=5, T_c=2, kappa=0.01
    { // Lambda system: inversion and a negative steady current.
        const auto pts = lambda_heat_current_sweep(lp, {0.01});
        const bool pred = population_inversion_predicted(lp);
        st.check("lambda_inversion",
                 pred && pts[0].inverted && pts[0].current < 0.0,
                 "J=" + fmtg(pts[0].current) + " rho11-rho00=" + fmtg(pts[0].rho11 - pts[0].rho00));
    }
    { // Equal temperatures: no inversion, non-negative current.
        LambdaParams lb = lp;
        lb.hot.temperature = 2.0;
        const auto pts = lambda_heat_current_sweep(lb, {0.01});
        st.check("lambda_balanced",
                 !population_inversion_predicted(lb) && !pts[0].inverted &&
                     pts[0].current >= -1e-15,
                 "J=" + fmtg(pts[0].current));
    }
    { // Currents do not depend on the measurement phase.
        double dev_closed = 0.0, dev_engine = 0.0;
        const QubitModel m0 = QubitModel::from_rates(1.0, 0.02, 0.01, {0.05, 0.9, 0.0});
        const double jc0 = steady_state_heat_current(m0);
        const double je0 = steady_state_current_engine(m0);
        for (const double phi : {kPi / 4.0, kPi / 2.0, kPi}) {
            const QubitModel m = QubitModel::from_rates(1.0, 0.02, 0.01, {0.05, 0.9, phi});
            dev_closed = std::max(dev_closed, std::abs(steady_state_heat_current(m) - jc0));
            dev_engine = std::max(dev_engine, std::abs(steady_state_current_engine(m) - je0));
        }
        const double tol = 1e-12 * std::abs(jc0);
        st.check("phi_invariance", dev_closed <= tol && dev_engine <= tol,
                 "dev_closed=" + fmtg(dev_closed) + " dev_engine=" + fmtg(dev_engine) +
                     " tol=" + fmtg(tol));
    }
    { // CPTP on a fixed three-level model driven through the generic engine.
        LindbladModel m;
        m.dim = 3;
        m.hamiltonian = Mat::Zero(3, 3);
        m.hamiltonian(0, 0) = 0.3;
        m.hamiltonian(1, 1) = -0.2;
        m.hamiltonian(2, 2) = 0.5;
        m.hamiltonian(0, 1) = {0.1, 0.05};
        m.hamiltonian(1, 0) = {0.1, -0.05};
        m.hamiltonian(1, 2) = {0.0, 0.07};
        m.hamiltonian(2, 1) = {0.0, -0.07};
        Mat l1 = Mat::Zero(3, 3);
        l1(0, 2) = 1.0;
        Mat l2 = Mat::Zero(3, 3);
        l2(0, 1) = 0.2;
        l2(1, 2) = 0.3;
        l2(2, 0) = 0.1;
        m.channels.push_back({l1, 0.04});
        m.channels.push_back({l2, 0.02});
        Vec n(3);
        n << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
        m.channels.push_back(measurement_channel(n * n.adjoint(), 0.05));
        m.measurement_index = 2;
        m.validate();

        Mat rho0 = Mat::Zero(3, 3);
        rho0(0, 0) = 0.5;
        rho0(1, 1) = 0.3;
        rho0(2, 2) = 0.2;
        const Mat liou = build_liouvillian(m);
        std::vector<double> grid;
        for (int i = 1; i <= 10; ++i)
            grid.push_back(0.7 * i);
        double tr_dev = 0.0, he_dev = 0.0, min_eig = 1.0;
        for (const Mat& rho : evolve(liou, rho0, grid)) {
            tr_dev = std::max(tr_dev, std::abs(rho.trace() - std::complex<double>(1.0)));
            he_dev = std::max(he_dev, (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff());
            const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint().eval()));
            min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
        }
        const Mat one = (liou * 1.4).exp();
        const Mat two = (liou * 0.7).exp();
        const double semigroup = (one - two * two).cwiseAbs().maxCoeff();
        st.check("cptp_three_level",
                 tr_dev <= 1e-9 && he_dev <= 1e-9 && min_eig >= -1e-8 && semigroup <= 1e-10,
                 "trace_dev=" + fmtg(tr_dev) + " herm_dev=" + fmtg(he_dev) +
                     " min_eig=" + fmtg(min_eig) + " semigroup=" + fmtg(semigroup));
    }
    { // Generic-engine trajectory agrees with the Bloch RK4 path.
        const QubitModel m = QubitModel::from_rates(1.0, 0.02, 0.01, {0.05, 1.1, 0.7});
        const Mat rho0 = density_from_bloch(init0);
        const std::vector<Mat> rhos =
            evolve(build_liouvillian(lindblad_model_from_qubit(m)), rho0, {5.0});
        const BlochState a = bloch_from_density(rhos[0]);
        const Trajectory traj = integrate(m, init0, 5.0, 0.001);
        const BlochState& b = traj.states.back();
        const double err =
            std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
        st.check("engine_vs_bloch_dynamics", err <= 1e-8, "max_err=" + fmtg(err));
    }

    char buf[64];
    std::snprintf(buf, sizeof buf, "selftest: %d checks, %d failures\n", st.total, st.failures);
    report += buf;
    return st.failures;
}

} // namespace qmheat

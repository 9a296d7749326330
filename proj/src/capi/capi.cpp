#include "qmheat.h"

#include <cstring>
#include <new>
#include <string>

#include "../core/bloch.hpp"
#include "../core/errors.hpp"
#include "../core/heat.hpp"
#include "../core/lambda_model.hpp"
#include "../core/rates.hpp"
#include "../core/scenario.hpp"

struct qmh_qubit {
    qmheat::QubitModel model;
};

struct qmh_series {
    qmheat::HeatSeries series;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
qmh_status guarded(F&& body) noexcept {
    try {
        body();
        g_last_error.clear();
        return QMH_OK;
    } catch (const qmheat::InvalidArgument& e) {
        g_last_error = e.what();
        return QMH_ERR_INVALID;
    } catch (const qmheat::DomainError& e) {
        g_last_error = e.what();
        return QMH_ERR_DOMAIN;
    } catch (const qmheat::DegenerateModel& e) {
        g_last_error = e.what();
        return QMH_ERR_DEGENERATE;
    } catch (const qmheat::ConvergenceError& e) {
        g_last_error = e.what();
        return QMH_ERR_UNCONVERGED;
    } catch (const qmheat::ConfigError& e) {
        g_last_error = e.what();
        return QMH_ERR_CONFIG;
    } catch (const qmheat::IoError& e) {
        g_last_error = e.what();
        return QMH_ERR_IO;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return QMH_ERR_NUMERIC;
    } catch (const std::exception& e) { // NumericalError and anything unexpected
        g_last_error = e.what();
        return QMH_ERR_NUMERIC;
    } catch (...) {
        g_last_error = "unknown error";
        return QMH_ERR_NUMERIC;
    }
}

void require(bool cond, const char* msg) {
    if (!cond)
        throw qmheat::InvalidArgument(msg);
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* qmh_last_error(void) {
    return g_last_error.c_str();
}

const char* qmh_version(void) {
    return "qmheat 1.0.0";
}

void qmh_string_free(char* s) {
    delete[] s;
}

qmh_status qmh_qubit_create(double delta, double gamma_plus, double gamma_minus, double gamma,
                            double theta, double phi, qmh_qubit** out) {
    return guarded([&] {
        require(out != nullptr, "qmh_qubit_create: out must not be NULL");
        *out = new qmh_qubit{
            qmheat::QubitModel::from_rates(delta, gamma_plus, gamma_minus, {gamma, theta, phi})};
    });
}

void qmh_qubit_free(qmh_qubit* q) {
    delete q;
}

qmh_status qmh_qubit_rates(const qmh_qubit* q, double* gamma_plus, double* gamma_minus,
                           double* gamma_tilde_plus) {
    return guarded([&] {
        require(q != nullptr, "qmh_qubit_rates: q must not be NULL");
        if (gamma_plus)
            *gamma_plus = q->model.gamma_plus();
        if (gamma_minus)
            *gamma_minus = q->model.gamma_minus();
        if (gamma_tilde_plus)
            *gamma_tilde_plus = q->model.gamma_tilde_plus();
    });
}

qmh_status qmh_qubit_steady_state(const qmh_qubit* q, double* x, double* y, double* z) {
    return guarded([&] {
        require(q != nullptr, "qmh_qubit_steady_state: q must not be NULL");
        const qmheat::BlochState s = qmheat::steady_state_bloch(q->model);
        if (x)
            *x = s.x;
        if (y)
            *y = s.y;
        if (z)
            *z = s.z;
    });
}

qmh_status qmh_qubit_steady_current(const qmh_qubit* q, double* j) {
    return guarded([&] {
        require(q != nullptr && j != nullptr, "qmh_qubit_steady_current: NULL argument");
        *j = qmheat::steady_state_heat_current(q->model);
    });
}

qmh_status qmh_qubit_steady_current_engine(const qmh_qubit* q, double* j) {
    return guarded([&] {
        require(q != nullptr && j != nullptr, "qmh_qubit_steady_current_engine: NULL argument");
        *j = qmheat::steady_state_current_engine(q->model);
    });
}

qmh_status qmh_qubit_current_bounds(const qmh_qubit* q, double* lo, double* hi) {
    return guarded([&] {
        require(q != nullptr, "qmh_qubit_current_bounds: q must not be NULL");
        const auto [l, h] = qmheat::heat_current_bounds(q->model);
        if (lo)
            *lo = l;
        if (hi)
            *hi = h;
    });
}

qmh_status qmh_qubit_excess_heat_max(const qmh_qubit* q, double* q_ex) {
    return guarded([&] {
        require(q != nullptr && q_ex != nullptr, "qmh_qubit_excess_heat_max: NULL argument");
        *q_ex = qmheat::excess_heat_max(q->model);
    });
}

qmh_status qmh_qubit_heat_series(const qmh_qubit* q, double x0, double y0, double z0, double t_end,
                                 double dt, qmh_series** out) {
    return guarded([&] {
        require(q != nullptr && out != nullptr, "qmh_qubit_heat_series: NULL argument");
        *out = new qmh_series{
            qmheat::heat_series(q->model, {x0, y0, z0, 0.0}, t_end, dt)};
    });
}

void qmh_series_free(qmh_series* s) {
    delete s;
}

size_t qmh_series_length(const qmh_series* s) {
    return s ? s->series.times.size() : 0;
}

qmh_status qmh_series_copy(const qmh_series* s, double* times, double* values, size_t len) {
    return guarded([&] {
        require(s != nullptr, "qmh_series_copy: s must not be NULL");
        const size_t n = s->series.times.size() < len ? s->series.times.size() : len;
        if (times)
            std::memcpy(times, s->series.times.data(), n * sizeof(double));
        if (values)
            std::memcpy(values, s->series.values.data(), n * sizeof(double));
    });
}

qmh_status qmh_series_steady_value(const qmh_series* s, double* j) {
    return guarded([&] {
        require(s != nullptr && j != nullptr, "qmh_series_steady_value: NULL argument");
        *j = s->series.steady_value;
    });
}

qmh_status qmh_series_excess_heat(const qmh_series* s, double* value, double* tail_bound) {
    return guarded([&] {
        require(s != nullptr && value != nullptr, "qmh_series_excess_heat: NULL argument");
        const qmheat::ExcessHeat q = qmheat::excess_heat(s->series);
        *value = q.value;
        if (tail_bound)
            *tail_bound = q.tail_bound;
    });
}

qmh_status qmh_spectral_density(double omega, double kappa, double cutoff, double* out) {
    return guarded([&] {
        require(out != nullptr, "qmh_spectral_density: out must not be NULL");
        *out = qmheat::ohmic_spectral_density(omega, qmheat::BathSpec{kappa, 1.0, cutoff, "bath"});
    });
}

qmh_status qmh_bose_occupation(double energy, double temperature, double* out) {
    return guarded([&] {
        require(out != nullptr, "qmh_bose_occupation: out must not be NULL");
        *out = qmheat::bose_einstein(energy, temperature);
    });
}

qmh_status qmh_lambda_sweep(double delta, double delta_small, double temp_hot, double temp_cold,
                            double kappa_hot, double kappa_cold, double cutoff, double phi,
                            const double* gammas, size_t n, double* currents, double* rho00,
                            double* rho11, double* rho22) {
    return guarded([&] {
        require(gammas != nullptr || n == 0, "qmh_lambda_sweep: gammas must not be NULL");
        qmheat::LambdaParams p;
        p.delta_big = delta;
        p.delta_small = delta_small;
        p.hot = qmheat::BathSpec{kappa_hot, temp_hot, cutoff, "hot"};
        p.cold = qmheat::BathSpec{kappa_cold, temp_cold, cutoff, "cold"};
        p.gamma = 0.0;
        p.phi = phi;
        const std::vector<double> gs(gammas, gammas + n);
        const auto points = qmheat::lambda_heat_current_sweep(p, gs);
        for (size_t i = 0; i < points.size(); ++i) {
            if (currents)
                currents[i] = points[i].current;
            if (rho00)
                rho00[i] = points[i].rho00;
            if (rho11)
                rho11[i] = points[i].rho11;
            if (rho22)
                rho22[i] = points[i].rho22;
        }
    });
}

qmh_status qmh_lambda_inversion_predicted(double delta, double delta_small, double temp_hot,
                                          double temp_cold, int* out) {
    return guarded([&] {
        require(out != nullptr, "qmh_lambda_inversion_predicted: out must not be NULL");
        qmheat::LambdaParams p;
        p.delta_big = delta;
        p.delta_small = delta_small;
        p.hot.temperature = temp_hot;
        p.cold.temperature = temp_cold;
        *out = qmheat::population_inversion_predicted(p) ? 1 : 0;
    });
}

qmh_status qmh_scenario_run(const char* config_json, char** out_text, char** out_gnuplot,
                            char** out_warnings) {
    return guarded([&] {
        require(config_json != nullptr, "qmh_scenario_run: config_json must not be NULL");
        require(out_text != nullptr, "qmh_scenario_run: out_text must not be NULL");
        const qmheat::ScenarioResult r = qmheat::run_scenario(config_json);
        *out_text = dup_string(r.text);
        if (out_gnuplot)
            *out_gnuplot = dup_string(r.gnuplot);
        if (out_warnings) {
            std::string joined;
            for (size_t i = 0; i < r.warnings.size(); ++i) {
                if (i)
                    joined += "\n";
                joined += r.warnings[i];
            }
            *out_warnings = dup_string(joined);
        }
    });
}

qmh_status qmh_selftest(char** out_report) {
    std::string report;
    int failures = 0;
    const qmh_status st = guarded([&] { failures = qmheat::selftest(report); });
    if (st != QMH_OK)
        return st;
    if (out_report)
        *out_report = dup_string(report);
    if (failures != 0) {
        g_last_error = std::to_string(failures) + " selftest check(s) failed";
        return QMH_ERR_NUMERIC;
    }
    return QMH_OK;
}

} // extern "C"

// qmheat command-line front end. Talks to the library exclusively through the
// C API in qmheat.h; config plumbing (JSON merge, flag overrides) lives here.

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmheat.h"

namespace {

using Json = nlohmann::ordered_json;

int status_exit_code(qmh_status st) {
    switch (st) {
    case QMH_OK:
        return 0;
    case QMH_ERR_CONFIG:
    case QMH_ERR_INVALID:
    case QMH_ERR_DOMAIN:
        return 2;
    default:
        return 3; // numerical failure: degenerate kernel, unconverged integral, IO
    }
}

bool read_file(const std::string& path, std::string& text) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    return true;
}

bool write_file(const std::string& path, const char* text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        return false;
    out << text;
    out.flush();
    return static_cast<bool>(out);
}

std::string gnuplot_path(const std::string& out_path) {
    const auto dot = out_path.rfind('.');
    const auto slash = out_path.find_last_of('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return out_path.substr(0, dot) + ".gp";
    return out_path + ".gp";
}

void print_warnings(const char* warnings) {
    if (!warnings || !*warnings)
        return;
    std::string s(warnings);
    size_t pos = 0;
    while (pos < s.size()) {
        size_t nl = s.find('\n', pos);
        if (nl == std::string::npos)
            nl = s.size();
        std::fprintf(stderr, "warning: %s\n", s.substr(pos, nl - pos).c_str());
        pos = nl + 1;
    }
}

struct Strings {
    char* text = nullptr;
    char* script = nullptr;
    char* warnings = nullptr;
    ~Strings() {
        qmh_string_free(text);
        qmh_string_free(script);
        qmh_string_free(warnings);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(qmh_version()) +
                 " — heat exchange between a continuous measurement apparatus and "
                 "dissipative few-level systems (hbar = kB = Delta = 1)"};
    app.require_subcommand(1);

    std::string config_path, out_path, format;
    double dt = 0.0, t_end = 0.0, gamma_single = 0.0;
    long theta_points = 0;
    std::vector<double> gammas;
    bool want_gnuplot = false;

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its fields");
        sub->add_option("--out", out_path, "output path (default: stdout)");
        sub->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--gnuplot-script", want_gnuplot,
                      "also write a gnuplot script next to the output (requires --out)");
    };

    CLI::App* fig2b = app.add_subcommand("fig2b", "steady-state current J_M vs measured angle");
    add_io(fig2b);
    fig2b->add_option("--theta-points", theta_points, "points on the [0, pi] grid");
    fig2b->add_option("--gamma", gammas, "measurement strengths (repeatable)");

    CLI::App* fig4a = app.add_subcommand("fig4a", "transient J_M(t) from <sigma_x> = 1");
    CLI::App* fig4b = app.add_subcommand("fig4b", "transient J_M(t) from the bath steady state");
    for (CLI::App* sub : {fig4a, fig4b}) {
        add_io(sub);
        sub->add_option("--dt", dt, "integrator step");
        sub->add_option("--t-end", t_end, "integration horizon");
        sub->add_option("--gamma", gamma_single, "measurement strength");
    }

    CLI::App* qex = app.add_subcommand("qex", "excess heat Q_ex vs measured angle");
    add_io(qex);
    qex->add_option("--theta-points", theta_points, "points on the [0, pi] grid");
    qex->add_option("--dt", dt, "integrator step");
    qex->add_option("--t-end", t_end, "integration horizon");
    qex->add_option("--gamma", gammas, "measurement strengths (repeatable)");

    CLI::App* lambda = app.add_subcommand("lambda", "three-level steady current vs gamma");
    add_io(lambda);
    lambda->add_option("--gamma", gammas, "measurement strengths (repeatable)");

    CLI::App* run = app.add_subcommand("run", "custom Lindblad model from a JSON config");
    add_io(run);
    run->add_option("--dt", dt, "grid step for task 'evolve'");
    run->add_option("--t-end", t_end, "horizon for task 'evolve'");

    CLI::App* selftest = app.add_subcommand("selftest", "deterministic oracle cross-checks");
    selftest->add_option("--out", out_path, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    auto given = [&](const char* flag) {
        const CLI::Option* o = sub->get_option_no_throw(flag);
        return o != nullptr && o->count() > 0;
    };

    if (name == "selftest") {
        char* report = nullptr;
        const qmh_status st = qmh_selftest(&report);
        if (report) {
            if (given("--out")) {
                if (!write_file(out_path, report)) {
                    std::fprintf(stderr, "error: cannot write '%s'\n", out_path.c_str());
                    qmh_string_free(report);
                    return 3;
                }
            } else {
                std::fputs(report, stdout);
            }
            qmh_string_free(report);
        } else if (st != QMH_OK) {
            std::fprintf(stderr, "error: %s\n", qmh_last_error());
        }
        return status_exit_code(st);
    }

    Json cfg = Json::object();
    if (given("--config")) {
        std::string raw;
        if (!read_file(config_path, raw)) {
            std::fprintf(stderr, "error: cannot read config file '%s'\n", config_path.c_str());
            return 2;
        }
        try {
            cfg = Json::parse(raw);
        } catch (const nlohmann::json::parse_error&) {
            // Let the engine produce its line/column diagnostics.
            Strings s;
            const qmh_status st = qmh_scenario_run(raw.c_str(), &s.text, nullptr, nullptr);
            std::fprintf(stderr, "error: %s\n", qmh_last_error());
            return status_exit_code(st == QMH_OK ? QMH_ERR_CONFIG : st);
        }
        if (!cfg.is_object()) {
            std::fprintf(stderr, "error: config root must be a JSON object\n");
            return 2;
        }
    } else if (name == "run") {
        std::fprintf(stderr, "error: 'run' requires --config with the model description\n");
        return 2;
    }

    cfg["kind"] = name;
    if (given("--format"))
        cfg["format"] = format;
    if (given("--dt"))
        cfg["dt"] = dt;
    if (given("--t-end"))
        cfg["t_end"] = t_end;
    if (given("--theta-points"))
        cfg["theta_points"] = theta_points;
    if (given("--gamma")) {
        if (name == "fig4a" || name == "fig4b") {
            cfg["gamma"] = gamma_single;
        } else {
            cfg.erase("gamma");
            cfg["gammas"] = gammas;
        }
    }
    if (want_gnuplot && !given("--out")) {
        std::fprintf(stderr, "error: --gnuplot-script requires --out\n");
        return 2;
    }

    Strings s;
    const std::string cfg_text = cfg.dump();
    const qmh_status st =
        qmh_scenario_run(cfg_text.c_str(), &s.text, want_gnuplot ? &s.script : nullptr, &s.warnings);
    print_warnings(s.warnings);
    if (st != QMH_OK) {
        std::fprintf(stderr, "error: %s\n", qmh_last_error());
        return status_exit_code(st);
    }

    if (given("--out")) {
        if (!write_file(out_path, s.text)) {
            std::fprintf(stderr, "error: cannot write '%s'\n", out_path.c_str());
            return 3;
        }
        if (want_gnuplot && s.script && *s.script) {
            const std::string gp = gnuplot_path(out_path);
            if (!write_file(gp, s.script)) {
                std::fprintf(stderr, "error: cannot write '%s'\n", gp.c_str());
                return 3;
            }
        }
    } else {
        std::fputs(s.text, stdout);
    }
    return 0;
}

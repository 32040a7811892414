// sinekrein command line front end. Talks to the core exclusively through the
// shared-library C API (sinekrein.h); formatting and configuration live here.

#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sinekrein.h"
#include "toml_lite.hpp"

using json = nlohmann::json;

namespace {

int g_log_level = 1;  // 0 silent, 1 info, 2 debug

void log_info(const std::string& msg) {
    if (g_log_level >= 1) std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (g_log_level >= 2) std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_field(const json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt17(v.get<double>());
    return v.get<std::string>();
}

// "a+bi" | "a-bi" | "bi" | "a" | "i" | "re,im"
std::complex<double> parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw CLI::ValidationError("complex", "empty complex literal");
    if (const auto comma = s.find(','); comma != std::string::npos) {
        try {
            return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
        } catch (...) {
            throw CLI::ValidationError("complex", "cannot parse '" + text + "'");
        }
    }
    if (s.back() == 'i' || s.back() == 'I') {
        s.pop_back();
        // split at the last +/- that is not an exponent sign
        int split = -1;
        for (int i = static_cast<int>(s.size()) - 1; i > 0; --i) {
            if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
                split = i;
                break;
            }
        }
        const std::string re = split > 0 ? s.substr(0, split) : "0";
        std::string im = split > 0 ? s.substr(split) : s;
        if (im.empty() || im == "+") im = "1";
        if (im == "-") im = "-1";
        try {
            return {std::stod(re), std::stod(im)};
        } catch (...) {
            throw CLI::ValidationError("complex", "cannot parse '" + text + "'");
        }
    }
    try {
        return {std::stod(s), 0.0};
    } catch (...) {
        throw CLI::ValidationError("complex", "cannot parse '" + text + "'");
    }
}

struct ReportDeleter {
    void operator()(sk_report* r) const { sk_report_destroy(r); }
};
using ReportPtr = std::unique_ptr<sk_report, ReportDeleter>;

[[noreturn]] void fail_status(sk_status st) {
    std::fprintf(stderr, "error: %s\n", sk_last_error());
    std::exit(st == SK_ERR_CONFIG || st == SK_ERR_INVALID ? 2 : 1);
}

ReportPtr take_report(sk_status st, sk_report* raw) {
    if (st != SK_OK) fail_status(st);
    return ReportPtr(raw);
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::fwrite(text.data(), 1, text.size(), stdout);
        if (text.empty() || text.back() != '\n') std::fputc('\n', stdout);
        return;
    }
    std::ofstream out(path);
    if (!out) {
        std::fprintf(stderr, "error: cannot open output file %s\n", path.c_str());
        std::exit(2);
    }
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
    log_info("wrote " + path);
}

std::string rows_to_csv(const json& rows, const std::vector<std::string>& columns) {
    std::string out;
    for (size_t i = 0; i < columns.size(); ++i)
        out += (i ? "," : "") + columns[i];
    out += '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ',';
            if (row.contains(columns[i])) out += csv_field(row[columns[i]]);
        }
        out += '\n';
    }
    return out;
}

// Long-form key,x,value table for the factor report.
std::string factor_to_csv(const json& j) {
    std::string out = "key,x,value\n";
    auto scalar = [&](const std::string& key, const json& v) {
        out += key + ",," + csv_field(v) + '\n';
    };
    scalar("factor_residual", j["factor_residual"]);
    scalar("triangular_lower", j["triangular"]["lower"]);
    scalar("triangular_worst_violation", j["triangular"]["worst_violation"]);
    scalar("kernel_max_rel_error", j["kernel_comparison"]["max_rel_error"]);
    scalar("kernel_pairs_checked", j["kernel_comparison"]["pairs_checked"]);
    scalar("m_prime_positive", j["m_prime_positive"]);
    for (const auto& row : j["q_table"]) {
        const std::string x = csv_field(row["x"]);
        out += "q1," + x + "," + csv_field(row["q1"]) + '\n';
        out += "q2," + x + "," + csv_field(row["q2"]) + '\n';
        out += "q_product_defect," + x + "," + csv_field(row["product_defect"]) + '\n';
    }
    for (const auto& row : j["criterion_table"]) {
        const std::string x = csv_field(row["xi"]);
        out += "m," + x + "," + csv_field(row["m"]) + '\n';
        if (row.contains("m_prime")) {
            out += "m_prime," + x + "," + csv_field(row["m_prime"]) + '\n';
            out += "r," + x + "," + csv_field(row["r"]) + '\n';
        }
        out += "m_consistency," + x + "," + csv_field(row["m_consistency"]) + '\n';
    }
    return out;
}

void emit_report(const ReportPtr& report, const std::string& format,
                 const std::string& out_file, const std::vector<std::string>& csv_columns) {
    const json j = json::parse(sk_report_json(report.get()));
    if (format == "json") {
        write_text(j.dump(2), out_file);
        return;
    }
    if (csv_columns.empty()) {
        std::fprintf(stderr,
                     "error: this subcommand has no CSV table; use --output json\n");
        std::exit(2);
    }
    if (j["schema"] == "sinekrein-factor/1") {
        write_text(factor_to_csv(j), out_file);
        return;
    }
    write_text(rows_to_csv(j["rows"], csv_columns), out_file);
}

double config_or(const json& cfg, const std::string& key, double fallback) {
    if (cfg.contains(key) && cfg[key].is_number()) return cfg[key].get<double>();
    return fallback;
}

int config_or_int(const json& cfg, const std::string& key, int fallback) {
    if (cfg.contains(key) && cfg[key].is_number()) return cfg[key].get<int>();
    return fallback;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "sinekrein: finite sections, Krein factorization and spectral identity checks\n"
        "for the half-line sine-kernel operator S = I - mu * sinc convolution"};
    app.require_subcommand(1);
    app.fallthrough();
    app.get_formatter()->column_width(34);

    std::string log_level = "info";
    std::string config_path;
    int jobs = 0;
    app.add_option("--log-level", log_level, "Logging level: info or debug")
        ->check(CLI::IsMember({"info", "debug", "silent"}));
    app.add_option("--config", config_path, "TOML run configuration");
    app.add_option("--jobs", jobs, "Worker parallelism for the suite (default: cores)");

    // Shared per-subcommand state.
    struct {
        double mu = 0.5, xi = 10.0;
        int ppu = 2, order = 10;
        std::string format = "json", out_file;
        double t_min = 2.0, t_max = 10.0, dt = 0.05;
        double x_max = 40.0, ladder_step = 0.125;
        int asym_order = 4, kode_order = 6;
        bool hat = false;
        std::string z_text = "0+2i";
        std::vector<std::string> probes;
        std::string t_list_text = "5,10,20";
        std::string z_probes_text = "0+1i,0+2i";
    } opt;

    auto add_common = [&](CLI::App* cmd, bool with_mu = true) {
        if (with_mu)
            cmd->add_option("--mu", opt.mu, "Coupling constant, 0 < mu < 1")
                ->check(CLI::Range(1e-12, 1.0 - 1e-12));
        cmd->add_option("--output", opt.format, "Output format: csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--out-file", opt.out_file, "Write to file instead of stdout");
    };

    auto* quad = app.add_subcommand("quad", "Emit a composite Gauss-Legendre grid");
    quad->add_option("--xi", opt.xi, "Interval length")->required();
    quad->add_option("--panels-per-unit", opt.ppu, "Panels per unit length");
    quad->add_option("--order", opt.order, "Gauss points per panel");
    add_common(quad, false);

    auto* resolvent =
        app.add_subcommand("resolvent", "Corner diagnostics and resolvent probes");
    resolvent->add_option("--xi", opt.xi, "Section length");
    resolvent->add_option("--panels-per-unit", opt.ppu, "Panels per unit length");
    resolvent->add_option("--order", opt.order, "Gauss points per panel");
    resolvent->add_option("--probe", opt.probes, "Probe point x,t (repeatable)");
    add_common(resolvent);

    auto* factor = app.add_subcommand(
        "factor", "Reverse-Cholesky factorization, q-pair and scalar criterion tables");
    factor->add_option("--xi", opt.xi, "Section length");
    factor->add_option("--panels-per-unit", opt.ppu, "Panels per unit length");
    factor->add_option("--order", opt.order, "Gauss points per panel");
    add_common(factor);

    auto* asym = app.add_subcommand(
        "asymptotics", "Diagonal limit, corner oscillation and the diagonal ODE residual");
    asym->add_option("--t-min", opt.t_min, "Smallest t");
    asym->add_option("--t-max", opt.t_max, "Largest t");
    asym->add_option("--dt", opt.dt, "t spacing (2*dt must divide 1)");
    asym->add_option("--order", opt.asym_order, "Gauss points per ladder panel");
    add_common(asym);

    auto* kode = app.add_subcommand("krein-ode",
                                    "Integrate the coefficient-driven system and compare "
                                    "against the closed spectral forms");
    kode->add_option("--z", opt.z_text, "Spectral parameter, e.g. 0+2i");
    kode->add_option("--x-max", opt.x_max, "Integration length");
    kode->add_option("--ladder-step", opt.ladder_step, "Coefficient table spacing");
    kode->add_option("--order", opt.kode_order, "Gauss points per ladder panel");
    kode->add_flag("--hat", opt.hat, "Second-kind initial values (1/2, -1/2)");
    add_common(kode);

    auto* obstruction = app.add_subcommand(
        "obstruction", "Constant-mismatch report and divergence trends (JSON only)");
    obstruction->add_option("--t-list", opt.t_list_text, "Comma-separated T values");
    obstruction->add_option("--z-probes", opt.z_probes_text,
                            "Comma-separated complex probes, Im z > 0");
    add_common(obstruction);

    auto* volterra = app.add_subcommand(
        "volterra-demo", "Similarity transport of the damped Volterra operator (JSON only)");
    volterra->add_option("--xi", opt.xi, "Section length");
    volterra->add_option("--panels-per-unit", opt.ppu, "Panels per unit length");
    volterra->add_option("--order", opt.order, "Gauss points per panel");
    add_common(volterra);

    auto* suite = app.add_subcommand("suite", "Run the full acceptance suite (JSON bundle)");
    suite->add_option("--mu", opt.mu, "Coupling constant override");
    suite->add_option("--out-file", opt.out_file, "Write the bundle to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    g_log_level = (log_level == "debug") ? 2 : (log_level == "silent" ? 0 : 1);

    json cfg = json::object();
    if (!config_path.empty()) {
        try {
            cfg = toml_lite::parse_file(config_path);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return 2;
        }
        log_debug("config: " + cfg.dump());
    }
    // Config supplies defaults; explicitly given flags always win. The [grid]
    // table feeds the section-grid subcommands only (ladder-based subcommands
    // carry their own order defaults).
    const json grid_cfg = cfg.contains("grid") ? cfg["grid"] : json::object();
    const auto flag_given = [&](const char* name) {
        for (const CLI::App* cmd : {quad, resolvent, factor, asym, kode, obstruction,
                                    volterra, suite})
            if (cmd->get_option_no_throw(name) && cmd->count(name)) return true;
        return false;
    };
    const bool section_grid_cmd =
        quad->parsed() || resolvent->parsed() || factor->parsed() || volterra->parsed();
    if (section_grid_cmd && !flag_given("--panels-per-unit"))
        opt.ppu = config_or_int(grid_cfg, "panels_per_unit", opt.ppu);
    if (section_grid_cmd && !flag_given("--order"))
        opt.order = config_or_int(grid_cfg, "order", opt.order);
    if (!flag_given("--mu")) opt.mu = config_or(cfg, "mu", opt.mu);

    try {
        if (quad->parsed()) {
            sk_report* raw = nullptr;
            const sk_status st = sk_quad_report(opt.xi, opt.ppu, opt.order, &raw);
            auto rep = take_report(st, raw);
            emit_report(rep, opt.format, opt.out_file, {"index", "node", "weight", "panel"});
            return 0;
        }
        if (resolvent->parsed()) {
            std::vector<double> px, pt;
            for (const auto& p : opt.probes) {
                const auto comma = p.find(',');
                if (comma == std::string::npos) {
                    std::fprintf(stderr, "error: --probe expects x,t (got '%s')\n", p.c_str());
                    return 2;
                }
                px.push_back(std::stod(p.substr(0, comma)));
                pt.push_back(std::stod(p.substr(comma + 1)));
            }
            log_info("building section mu=" + std::to_string(opt.mu) +
                     " xi=" + std::to_string(opt.xi));
            sk_report* raw = nullptr;
            const sk_status st = sk_resolvent_report(opt.mu, opt.xi, opt.ppu, opt.order, px.data(), pt.data(),
                                    static_cast<int>(px.size()), &raw);
            auto rep = take_report(st, raw);
            emit_report(rep, opt.format, opt.out_file, {"xi", "x", "t", "value"});
            return 0;
        }
        if (factor->parsed()) {
            sk_report* raw = nullptr;
            const sk_status st = sk_factor_report(opt.mu, opt.xi, opt.ppu, opt.order, &raw);
            auto rep = take_report(st, raw);
            emit_report(rep, opt.format, opt.out_file, {"key", "x", "value"});
            return 0;
        }
        if (asym->parsed()) {
            sk_report* raw = nullptr;
            const sk_status st = sk_asymptotics_report(opt.mu, opt.t_min, opt.t_max, opt.dt, opt.order, &raw);
            auto rep = take_report(st, raw);
            emit_report(rep, opt.format, opt.out_file,
                        {"t", "diag", "corner", "ode_residual", "envelope", "sigma"});
            return 0;
        }
        if (kode->parsed()) {
            const auto z = parse_complex(opt.z_text);
            sk_report* raw = nullptr;
            const sk_status st = sk_krein_ode_report(opt.mu, z.real(), z.imag(), opt.x_max, opt.hat ? 1 : 0,
                                    opt.ladder_step, opt.order, &raw);
            auto rep = take_report(st, raw);
            emit_report(rep, opt.format, opt.out_file,
                        {"x", "p_re", "p_im", "pstar_re", "pstar_im"});
            return 0;
        }
        if (obstruction->parsed()) {
            std::vector<double> ts;
            std::vector<double> zr, zi;
            {
                std::stringstream ss(opt.t_list_text);
                std::string item;
                while (std::getline(ss, item, ',')) ts.push_back(std::stod(item));
            }
            {
                std::stringstream ss(opt.z_probes_text);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const auto z = parse_complex(item);
                    zr.push_back(z.real());
                    zi.push_back(z.imag());
                }
            }
            if (opt.format == "csv") {
                std::fprintf(stderr, "error: obstruction emits JSON only\n");
                return 2;
            }
            log_info("obstruction run to xi = " + std::to_string(2.0 * ts.back()));
            sk_report* raw = nullptr;
            const sk_status st = sk_obstruction_report(opt.mu, ts.data(), static_cast<int>(ts.size()),
                                      zr.data(), zi.data(), static_cast<int>(zr.size()),
                                      &raw);
            auto rep = take_report(st, raw);
            emit_report(rep, "json", opt.out_file, {});
            return 0;
        }
        if (volterra->parsed()) {
            if (opt.format == "csv") {
                std::fprintf(stderr, "error: volterra-demo emits JSON only\n");
                return 2;
            }
            sk_report* raw = nullptr;
            const sk_status st = sk_volterra_report(opt.mu, opt.xi, opt.ppu, opt.order, &raw);
            auto rep = take_report(st, raw);
            emit_report(rep, "json", opt.out_file, {});
            return 0;
        }
        if (suite->parsed()) {
            json suite_cfg = cfg.contains("suite") ? cfg["suite"] : json::object();
            if (suite->count("--mu")) suite_cfg["mu"] = opt.mu;
            if (jobs > 0) suite_cfg["jobs"] = jobs;
            if (!suite_cfg.contains("jobs")) {
                const unsigned hc = std::thread::hardware_concurrency();
                suite_cfg["jobs"] = hc > 0 ? static_cast<int>(hc) : 1;
            }
            log_info("running acceptance suite, config " + suite_cfg.dump());
            sk_report* raw = nullptr;
            const sk_status st = sk_suite_run(suite_cfg.dump().c_str(), &raw);
            auto rep = take_report(st, raw);
            emit_report(rep, "json", opt.out_file, {});
            const int pass = sk_report_pass(rep.get());
            log_info(pass == 1 ? "suite: all checks passed" : "suite: CHECK FAILURES");
            return pass == 1 ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}

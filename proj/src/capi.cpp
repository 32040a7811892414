#include "sinekrein.h"

#include <cmath>
#include <complex>
#include <cstring>
#include <string>

#include <json.hpp>

#include "asymptotics.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "finite_section.hpp"
#include "krein_factor.hpp"
#include "krein_system.hpp"
#include "quadrature.hpp"

using json = nlohmann::json;
using Complex = std::complex<double>;
namespace fsec = sk::finite_section;
namespace ksys = sk::krein_system;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename F>
sk_status guard(F&& fn) {
    try {
        fn();
        return SK_OK;
    } catch (const sk::ConfigError& e) {
        set_error(e.what());
        return SK_ERR_CONFIG;
    } catch (const sk::NumericalError& e) {
        set_error(e.what());
        return SK_ERR_NUMERICAL;
    } catch (const sk::DimensionMismatch& e) {
        set_error(e.what());
        return SK_ERR_DIMENSION;
    } catch (const sk::StepSizeError& e) {
        set_error(e.what());
        return SK_ERR_STEP_SIZE;
    } catch (const sk::BranchError& e) {
        set_error(e.what());
        return SK_ERR_BRANCH;
    } catch (const sk::PoleError& e) {
        set_error(e.what());
        return SK_ERR_POLE;
    } catch (const nlohmann::json::exception& e) {
        set_error(e.what());
        return SK_ERR_CONFIG;
    } catch (const std::exception& e) {
        set_error(e.what());
        return SK_ERR_INTERNAL;
    } catch (...) {
        set_error("unknown error");
        return SK_ERR_INTERNAL;
    }
}

void require_user_mu(double mu) {
    if (!(mu > 0.0) || !(mu < 1.0)) throw sk::ConfigError("mu must satisfy 0 < mu < 1");
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

}  // namespace

struct sk_grid {
    sk::quadrature::Grid grid;
};
struct sk_section {
    fsec::Section section;
};
struct sk_ladder {
    fsec::IncrementalLadder ladder;
};
struct sk_trajectory {
    ksys::Trajectory traj;
};
struct sk_report {
    json j;
    std::string serialized;
    int pass = -1;
};

extern "C" {

const char* sk_last_error(void) { return g_last_error.c_str(); }

sk_status sk_grid_create(double xi, int panels_per_unit, int order, sk_grid** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] { *out = new sk_grid{sk::quadrature::Grid(xi, panels_per_unit, order)}; });
}

int sk_grid_size(const sk_grid* grid) { return grid ? grid->grid.size() : 0; }

sk_status sk_grid_copy(const sk_grid* grid, double* nodes, double* weights, int* panel) {
    if (!grid) return SK_ERR_INVALID;
    return guard([&] {
        const int n = grid->grid.size();
        for (int i = 0; i < n; ++i) {
            if (nodes) nodes[i] = grid->grid.nodes()[i];
            if (weights) weights[i] = grid->grid.weights()[i];
            if (panel) panel[i] = grid->grid.panel_of(i);
        }
    });
}

void sk_grid_destroy(sk_grid* grid) { delete grid; }

double sk_sinc_kernel(double x) { return sk::quadrature::sinc_kernel(x); }

sk_status sk_m_function(double x, double mu, double* out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] { *out = fsec::m_function(x, mu); });
}

sk_status sk_section_create(double mu, double xi, int panels_per_unit, int order,
                            sk_section** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] {
        require_user_mu(mu);
        *out = new sk_section{fsec::Section(mu, xi, {panels_per_unit, order})};
    });
}

int sk_section_size(const sk_section* sec) { return sec ? sec->section.size() : 0; }

sk_status sk_section_apply_inverse(const sk_section* sec, const double* f, int n, double* out) {
    if (!sec || !f || !out) return SK_ERR_INVALID;
    return guard([&] {
        const auto res = sec->section.apply_inverse(std::span<const double>(f, n));
        std::memcpy(out, res.data(), res.size() * sizeof(double));
    });
}

sk_status sk_section_resolvent(const sk_section* sec, double x, double t, double* out) {
    if (!sec || !out) return SK_ERR_INVALID;
    return guard([&] { *out = sec->section.resolvent_point(x, t); });
}

sk_status sk_section_corners(const sk_section* sec, double* r_xi_xi, double* r_xi_0) {
    if (!sec) return SK_ERR_INVALID;
    return guard([&] {
        const double xi = sec->section.xi();
        if (r_xi_xi) *r_xi_xi = sec->section.resolvent_point(xi, xi);
        if (r_xi_0) *r_xi_0 = sec->section.resolvent_point(xi, 0.0);
    });
}

void sk_section_destroy(sk_section* sec) { delete sec; }

sk_status sk_ladder_create(double mu, double x_max, int panels_per_unit, int order,
                           sk_ladder** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] {
        require_user_mu(mu);
        *out = new sk_ladder{fsec::IncrementalLadder(mu, x_max, panels_per_unit, order)};
    });
}

int sk_ladder_count(const sk_ladder* ladder) {
    return ladder ? static_cast<int>(ladder->ladder.records().size()) : 0;
}

sk_status sk_ladder_copy(const sk_ladder* ladder, double* x, double* b, double* diag,
                         double* q1, double* q2) {
    if (!ladder) return SK_ERR_INVALID;
    return guard([&] {
        const auto& recs = ladder->ladder.records();
        for (size_t i = 0; i < recs.size(); ++i) {
            if (x) x[i] = recs[i].x;
            if (b) b[i] = recs[i].b;
            if (diag) diag[i] = recs[i].diag;
            if (q1) q1[i] = recs[i].q1;
            if (q2) q2[i] = recs[i].q2;
        }
    });
}

void sk_ladder_destroy(sk_ladder* ladder) { delete ladder; }

sk_status sk_pi_closed(double mu, double z_re, double z_im, double* re, double* im) {
    if (!re || !im) return SK_ERR_INVALID;
    return guard([&] {
        const Complex v = ksys::pi_closed(mu, Complex{z_re, z_im});
        *re = v.real();
        *im = v.imag();
    });
}

sk_status sk_pi_quadrature(double mu, double z_re, double z_im, int panels, int order,
                           double* re, double* im) {
    if (!re || !im) return SK_ERR_INVALID;
    return guard([&] {
        const Complex v = ksys::pi_by_quadrature(mu, Complex{z_re, z_im}, panels, order);
        *re = v.real();
        *im = v.imag();
    });
}

sk_status sk_weyl_v(double mu, double z_re, double z_im, double* re, double* im) {
    if (!re || !im) return SK_ERR_INVALID;
    return guard([&] {
        const Complex v = ksys::weyl_v(mu, Complex{z_re, z_im});
        *re = v.real();
        *im = v.imag();
    });
}

sk_status sk_hat_pi_closed(double mu, double z_re, double z_im, double* re, double* im) {
    if (!re || !im) return SK_ERR_INVALID;
    return guard([&] {
        const Complex v = ksys::hat_pi_closed(mu, Complex{z_re, z_im});
        *re = v.real();
        *im = v.imag();
    });
}

sk_status sk_krein_integrate(const sk_ladder* ladder, double z_re, double z_im, double x_max,
                             int hat, double step, sk_trajectory** out) {
    if (!ladder || !out) return SK_ERR_INVALID;
    return guard([&] {
        const auto table = ksys::table_from_ladder(ladder->ladder);
        *out = new sk_trajectory{ksys::integrate_krein(
            table, Complex{z_re, z_im}, x_max,
            hat ? ksys::InitKind::hat : ksys::InitKind::standard, step)};
    });
}

int sk_trajectory_count(const sk_trajectory* traj) {
    return traj ? static_cast<int>(traj->traj.xs.size()) : 0;
}

sk_status sk_trajectory_copy(const sk_trajectory* traj, double* x, double* p_re, double* p_im,
                             double* ps_re, double* ps_im) {
    if (!traj) return SK_ERR_INVALID;
    return guard([&] {
        const auto& t = traj->traj;
        for (size_t i = 0; i < t.xs.size(); ++i) {
            if (x) x[i] = t.xs[i];
            if (p_re) p_re[i] = t.p[i].real();
            if (p_im) p_im[i] = t.p[i].imag();
            if (ps_re) ps_re[i] = t.p_star[i].real();
            if (ps_im) ps_im[i] = t.p_star[i].imag();
        }
    });
}

void sk_trajectory_destroy(sk_trajectory* traj) { delete traj; }

sk_status sk_spectral_estimates(const sk_ladder* ladder, double z_re, double z_im,
                                double x_max, double* pi_re, double* pi_im, double* v_re,
                                double* v_im, double* hat_pi_re, double* hat_pi_im,
                                double* hat_p_end_abs) {
    if (!ladder) return SK_ERR_INVALID;
    return guard([&] {
        const auto table = ksys::table_from_ladder(ladder->ladder);
        const auto est = ksys::spectral_estimates(table, Complex{z_re, z_im}, x_max);
        if (pi_re) *pi_re = est.pi_ode.real();
        if (pi_im) *pi_im = est.pi_ode.imag();
        if (v_re) *v_re = est.v_ode.real();
        if (v_im) *v_im = est.v_ode.imag();
        if (hat_pi_re) *hat_pi_re = est.hat_pi_ode.real();
        if (hat_pi_im) *hat_pi_im = est.hat_pi_ode.imag();
        if (hat_p_end_abs) *hat_p_end_abs = est.hat_p_end_abs;
    });
}

namespace {

sk_report* make_report(json j, int pass = -1) {
    auto* r = new sk_report;
    r->j = std::move(j);
    r->serialized = r->j.dump(2);
    r->pass = pass;
    return r;
}

}  // anonymous namespace

sk_status sk_quad_report(double xi, int panels_per_unit, int order, sk_report** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] {
        sk::quadrature::Grid grid(xi, panels_per_unit, order);
        json rows = json::array();
        for (int i = 0; i < grid.size(); ++i)
            rows.push_back({{"index", i},
                            {"node", grid.nodes()[i]},
                            {"weight", grid.weights()[i]},
                            {"panel", grid.panel_of(i)}});
        *out = make_report(json{{"schema", "sinekrein-quad/1"},
                                {"xi", xi},
                                {"panels_per_unit", panels_per_unit},
                                {"order", order},
                                {"rows", rows}});
    });
}

sk_status sk_resolvent_report(double mu, double xi, int panels_per_unit, int order,
                              const double* probe_x, const double* probe_t, int n_probes,
                              sk_report** out) {
    if (!out || (n_probes > 0 && (!probe_x || !probe_t))) return SK_ERR_INVALID;
    return guard([&] {
        require_user_mu(mu);
        fsec::Section sec(mu, xi, {panels_per_unit, order});
        json rows = json::array();
        const double diag = sec.resolvent_point(xi, xi);
        const double corner = sec.resolvent_point(xi, 0.0);
        rows.push_back({{"xi", xi}, {"x", xi}, {"t", xi}, {"value", diag}});
        rows.push_back({{"xi", xi}, {"x", xi}, {"t", 0.0}, {"value", corner}});
        for (int i = 0; i < n_probes; ++i) {
            if (probe_x[i] < 0.0 || probe_x[i] > xi || probe_t[i] < 0.0 || probe_t[i] > xi)
                throw sk::ConfigError("resolvent probe outside [0, xi]^2");
            rows.push_back({{"xi", xi},
                            {"x", probe_x[i]},
                            {"t", probe_t[i]},
                            {"value", sec.resolvent_point(probe_x[i], probe_t[i])}});
        }
        *out = make_report(json{{"schema", "sinekrein-resolvent/1"},
                                {"mu", mu},
                                {"xi", xi},
                                {"corner", {{"diag", diag}, {"anti", corner}}},
                                {"rows", rows}});
    });
}

sk_status sk_factor_report(double mu, double xi, int panels_per_unit, int order,
                           sk_report** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] {
        require_user_mu(mu);
        fsec::Section sec(mu, xi, {panels_per_unit, order});
        const auto factor = sk::krein_factor::reverse_cholesky(sec.dense_matrix());
        const double residual = sk::krein_factor::reconstruction_defect(factor, sec.dense_matrix());
        const auto tri = sk::krein_factor::is_lower_triangular(factor.v.dense(), 0.0);
        const auto cmp = sk::krein_factor::factor_vs_resolvent(sec, factor);

        // q and criterion tables on a 0.25-spaced ladder for the central differences.
        const double xi_ladder = std::floor(xi * 4.0 + 1e-9) / 4.0;
        fsec::IncrementalLadder ladder(mu, xi_ladder, 4, order);
        const auto table = sk::krein_factor::factorization_scalars(ladder, 0.5, xi_ladder, 0.25);

        json q_rows = json::array();
        for (const auto& rec : ladder.records()) {
            if (rec.x <= 0.0) continue;
            q_rows.push_back({{"x", rec.x},
                              {"q1", rec.q1},
                              {"q2", rec.q2},
                              {"product_defect", rec.q1 * rec.q2 - 0.5}});
        }
        json t_rows = json::array();
        for (const auto& row : table.rows) {
            json r{{"xi", row.xi}, {"m", row.m}, {"m_consistency", row.m_consistency}};
            if (std::isfinite(row.m_prime)) {
                r["m_prime"] = row.m_prime;
                r["r"] = row.r;
            }
            t_rows.push_back(r);
        }
        *out = make_report(json{{"schema", "sinekrein-factor/1"},
                                {"mu", mu},
                                {"xi", xi},
                                {"factor_residual", residual},
                                {"triangular",
                                 {{"lower", tri.lower},
                                  {"worst_violation", tri.worst_violation},
                                  {"first_cut", tri.first_cut}}},
                                {"kernel_comparison",
                                 {{"max_rel_error", cmp.max_rel_error},
                                  {"pairs_checked", cmp.pairs_checked}}},
                                {"m_prime_positive", table.m_prime_positive},
                                {"q_table", q_rows},
                                {"criterion_table", t_rows}});
    });
}

sk_status sk_asymptotics_report(double mu, double t_min, double t_max, double dt, int order,
                                sk_report** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] {
        require_user_mu(mu);
        const double ppu_real = 1.0 / (2.0 * dt);
        const int ppu = static_cast<int>(std::lround(ppu_real));
        if (std::abs(ppu_real - ppu) > 1e-9)
            throw sk::ConfigError("asymptotics: 2*dt must divide 1");
        fsec::IncrementalLadder ladder(mu, 2.0 * (t_max + dt), ppu, order);
        const auto rep = sk::asymptotics::run_from_ladder(ladder, t_min, t_max, dt);

        json rows = json::array();
        for (size_t i = 0; i < rep.t.size(); ++i) {
            json r{{"t", rep.t[i]},
                   {"diag", rep.diag[i]},
                   {"corner", rep.corner[i]},
                   {"envelope", rep.envelope[i]},
                   {"sigma", rep.sigma[i]}};
            if (std::isfinite(rep.ode_residual[i])) r["ode_residual"] = rep.ode_residual[i];
            rows.push_back(r);
        }
        json j{{"schema", "sinekrein-asymptotics/1"},
               {"mu", mu},
               {"dt", dt},
               {"a", rep.a},
               {"b", rep.b},
               {"rows", rows}};
        // Corner-oscillation window over the available ladder range.
        const double env_lo = std::max(2.0, t_min);
        const double env_hi = 2.0 * t_max;
        if (env_hi - env_lo > 2.0) {
            const auto peaks = sk::asymptotics::corner_envelope(ladder, env_lo, env_hi);
            j["envelope_peaks"] = {{"t", peaks.peak_t},
                                   {"height", peaks.peak_height},
                                   {"zero_t", peaks.zero_t},
                                   {"zero_spacings", peaks.zero_spacings},
                                   {"first_extremum_sign", peaks.first_extremum_sign}};
        }
        *out = make_report(std::move(j));
    });
}

sk_status sk_krein_ode_report(double mu, double z_re, double z_im, double x_max, int hat,
                              double ladder_step, int order, sk_report** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] {
        require_user_mu(mu);
        const Complex z{z_re, z_im};
        const auto table = ksys::sample_b(mu, x_max, ladder_step, order);
        const auto traj = ksys::integrate_krein(
            table, z, x_max, hat ? ksys::InitKind::hat : ksys::InitKind::standard);

        json rows = json::array();
        const size_t stride = std::max<size_t>(1, traj.xs.size() / 400);
        for (size_t i = 0; i < traj.xs.size(); i += stride)
            rows.push_back({{"x", traj.xs[i]},
                            {"p_re", traj.p[i].real()},
                            {"p_im", traj.p[i].imag()},
                            {"pstar_re", traj.p_star[i].real()},
                            {"pstar_im", traj.p_star[i].imag()}});

        json comparison{{"pstar_end", complex_json(traj.p_star_end())}};
        // |P|^2 - |P*|^2 is a conserved quantity for real z only
        if (z_im == 0.0) comparison["conservation_defect"] = traj.conservation_defect();
        if (z_im > 0.0) {
            const auto est = ksys::spectral_estimates(table, z, x_max);
            comparison["pi_closed"] = complex_json(ksys::pi_closed(mu, z));
            comparison["pi_ode"] = complex_json(est.pi_ode);
            comparison["v_closed"] = complex_json(ksys::weyl_v(mu, z));
            comparison["v_ode"] = complex_json(est.v_ode);
            comparison["hat_pi_closed"] = complex_json(ksys::hat_pi_closed(mu, z));
            comparison["hat_pi_ode"] = complex_json(est.hat_pi_ode);
            comparison["hat_p_end_abs"] = est.hat_p_end_abs;
        }
        *out = make_report(json{{"schema", "sinekrein-krein-ode/1"},
                                {"mu", mu},
                                {"z", complex_json(z)},
                                {"x_max", x_max},
                                {"hat", hat != 0},
                                {"rows", rows},
                                {"comparison", comparison}});
    });
}

sk_status sk_obstruction_report(double mu, const double* t_list, int n_t, const double* z_re,
                                const double* z_im, int n_z, sk_report** out) {
    if (!out || !t_list || n_t <= 0 || (n_z > 0 && (!z_re || !z_im))) return SK_ERR_INVALID;
    return guard([&] {
        require_user_mu(mu);
        std::vector<double> ts(t_list, t_list + n_t);
        std::vector<Complex> zs;
        for (int i = 0; i < n_z; ++i) zs.emplace_back(z_re[i], z_im[i]);
        const auto rep = sk::experiments::obstruction_report(mu, ts, zs);
        json j = rep.to_json();
        j["schema"] = "sinekrein-obstruction/1";
        *out = make_report(std::move(j));
    });
}

sk_status sk_volterra_report(double mu, double xi, int panels_per_unit, int order,
                             sk_report** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] {
        require_user_mu(mu);
        const auto rep = sk::experiments::volterra_demo(mu, xi, {panels_per_unit, order});
        json j = rep.to_json();
        j["schema"] = "sinekrein-volterra/1";
        *out = make_report(std::move(j));
    });
}

sk_status sk_suite_run(const char* config_json, sk_report** out) {
    if (!out) return SK_ERR_INVALID;
    return guard([&] {
        json cfg_json = json::object();
        if (config_json && std::strlen(config_json) > 0) cfg_json = json::parse(config_json);
        const auto cfg = sk::experiments::SuiteConfig::from_json(cfg_json);
        const auto rep = sk::experiments::run_suite(cfg);
        *out = make_report(rep.to_json(), rep.pass ? 1 : 0);
    });
}

const char* sk_report_json(const sk_report* report) {
    return report ? report->serialized.c_str() : "";
}

int sk_report_pass(const sk_report* report) { return report ? report->pass : -1; }

void sk_report_destroy(sk_report* report) { delete report; }

}  // extern "C"

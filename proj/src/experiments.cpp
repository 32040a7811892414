#include "experiments.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <numbers>

#include "asymptotics.hpp"
#include "errors.hpp"
#include "krein_factor.hpp"

namespace sk::experiments {

using json = nlohmann::json;
namespace fsec = finite_section;
namespace ksys = krein_system;

namespace {

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

json ObstructionReport::to_json() const {
    json j;
    j["mu"] = mu;
    j["t_list"] = t_list;
    j["xi_ladder"] = xi_ladder;
    j["norm_r_xi"] = norm_r_xi;
    json cauchy = json::array();
    for (size_t i = 0; i < cauchy_t.size(); ++i)
        cauchy.push_back({{"T", cauchy_t[i]},
                          {"delta", cauchy_delta[i]},
                          {"delta_sqrt_T", cauchy_delta_sqrt_t[i]}});
    j["cauchy_delta"] = cauchy;
    j["g_at_zero"] = g_at_zero;
    j["h0_candidates"] = {{"from_hat_pi_closed", h0_from_hat_pi_closed},
                          {"from_pi_closed", h0_from_pi_closed},
                          {"from_hat_pi_ode", h0_from_hat_pi_ode},
                          {"from_pi_ode", h0_from_pi_ode}};
    j["mismatch_ratio"] = mismatch_ratio;
    j["norm_k"] = norm_k;
    json probes_json = json::array();
    for (const auto& p : probes) {
        json pj;
        pj["z"] = complex_json(p.z);
        pj["xi"] = p.xi;
        json vals = json::array();
        for (auto w : p.w21) vals.push_back(complex_json(w));
        pj["w21"] = vals;
        pj["krein_side"] = complex_json(p.krein_side);
        pj["vchain_side"] = complex_json(p.vchain_side);
        pj["stabilizes_to_krein"] = p.stabilizes_to_krein;
        pj["stabilizes_to_vchain"] = p.stabilizes_to_vchain;
        probes_json.push_back(pj);
    }
    j["w21_probes"] = probes_json;
    return j;
}

ObstructionReport obstruction_report(double mu, const std::vector<double>& t_list,
                                     const std::vector<Complex>& z_probes,
                                     ObstructionParams params) {
    if (t_list.empty()) throw ConfigError("obstruction_report: empty T list");
    for (size_t i = 1; i < t_list.size(); ++i)
        if (t_list[i] <= t_list[i - 1])
            throw ConfigError("obstruction_report: T list must be ascending");

    ObstructionReport rep;
    rep.mu = mu;
    rep.t_list = t_list;

    const double x_max = 2.0 * t_list.back();
    fsec::IncrementalLadder ladder(mu, x_max, params.ladder_ppu, params.ladder_order);
    const auto table = ksys::table_from_ladder(ladder);

    // xi ladder = T values plus their doubles.
    std::vector<double> xis = t_list;
    for (double t : t_list) xis.push_back(2.0 * t);
    std::sort(xis.begin(), xis.end());
    xis.erase(std::unique(xis.begin(), xis.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              xis.end());
    rep.xi_ladder = xis;

    std::map<double, std::vector<double>> r_of_q;
    for (double xi : xis) {
        const int k = ladder.index_of(xi);
        r_of_q[xi] = ladder.solve_resolvent_of_q(k);
        rep.norm_r_xi.push_back(ladder.prefix_norm(k, r_of_q[xi]));
    }
    for (double t : t_list) {
        const int kt = ladder.index_of(t);
        const auto& r2t = r_of_q[2.0 * t];
        const auto& rt = r_of_q[t];
        std::vector<double> diff(ladder.nodes_at(kt));
        for (int j = 0; j < ladder.nodes_at(kt); ++j) diff[j] = r2t[j] - rt[j];
        const double delta = ladder.prefix_norm(kt, diff);
        rep.cauchy_t.push_back(t);
        rep.cauchy_delta.push_back(delta);
        rep.cauchy_delta_sqrt_t.push_back(delta * std::sqrt(t));
    }

    // Constant mismatch. G(xi, 0) carries the explicit iz factor, so it is
    // exactly 1/(1-mu) for every xi; evaluate through the code path anyway.
    const int k_mid = ladder.index_of(xis[xis.size() / 2]);
    rep.g_at_zero = ksys::w21_both_ladder(ladder, k_mid, Complex{0.0, 0.0}).g.real();
    const double c_const = 1.0 / std::sqrt(1.0 - mu);
    rep.h0_from_hat_pi_closed = 2.0 * c_const * std::abs(ksys::hat_pi_closed(mu, 0.0));
    rep.h0_from_pi_closed = -2.0 * c_const * ksys::pi_closed(mu, 0.0).real();
    const auto est0 = ksys::spectral_estimates(table, params.limit_probe, x_max);
    rep.h0_from_hat_pi_ode = 2.0 * c_const * std::abs(est0.hat_pi_ode);
    rep.h0_from_pi_ode = -2.0 * c_const * est0.pi_ode.real();
    rep.mismatch_ratio = rep.g_at_zero / (1.0 - mu);

    {
        fsec::Section sec(mu, std::min(10.0, x_max), {});
        const auto eigs = sec.eigenvalues();
        double worst = 0.0;
        for (double l : eigs) worst = std::max(worst, std::abs(1.0 - l));
        rep.norm_k = worst;
    }

    for (Complex z : z_probes) {
        if (!(z.imag() > 0.0))
            throw ConfigError("obstruction_report: probes must have Im z > 0");
        W21Probe probe;
        probe.z = z;
        for (double xi : xis) {
            probe.xi.push_back(xi);
            probe.w21.push_back(
                ksys::w21_both_ladder(ladder, ladder.index_of(xi), z).boundary_form);
        }
        probe.krein_side = 2.0 * c_const * ksys::hat_pi_closed(mu, z);
        // Transformed-chain prediction: hat solution at doubled spectral
        // parameter, direct coupling orientation.
        const auto vchain =
            ksys::integrate_krein(table, 2.0 * z, x_max, ksys::InitKind::hat, 0.0, +1);
        probe.vchain_side = 2.0 * c_const * vchain.p_star_end();

        auto stabil = [&](Complex side) {
            const double d_first = std::abs(probe.w21.front() - side);
            const double d_last = std::abs(probe.w21.back() - side);
            return d_last <= d_first && d_last <= 0.1 * std::max(1.0, std::abs(side));
        };
        probe.stabilizes_to_krein = stabil(probe.krein_side);
        probe.stabilizes_to_vchain = stabil(probe.vchain_side);
        rep.probes.push_back(std::move(probe));
    }
    return rep;
}

json VolterraReport::to_json() const {
    return json{{"mu", mu},
                {"xi", xi},
                {"n", n},
                {"spectral_radius", spectral_radius},
                {"spectral_radius_refined", spectral_radius_refined},
                {"w_norm", w_norm},
                {"max_eigenvalue_diff", max_eigenvalue_diff},
                {"max_eigen_residual", max_eigen_residual},
                {"similarity_defect", similarity_defect},
                {"eigen_checked", eigen_checked}};
}

namespace {

linalg::Matrix volterra_matrix(const fsec::Section& sec) {
    const int n = sec.size();
    const auto& s = sec.grid().nodes();
    const auto& w = sec.grid().weights();
    linalg::Matrix v(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j)
            v.at(i, j) = std::sqrt(w[i]) * std::exp(-(s[i] + s[j])) * std::sqrt(w[j]);
        // trapezoid-at-the-corner convention: half weight on the diagonal
        v.at(i, i) = 0.5 * w[i] * std::exp(-2.0 * s[i]);
    }
    return v;
}

double sqrt_fn(double x) { return std::sqrt(x); }
double inv_sqrt(double x) { return 1.0 / std::sqrt(x); }

}  // namespace

VolterraReport volterra_demo(double mu, double xi, fsec::GridParams params) {
    fsec::Section sec(mu, xi, params);
    const int n = sec.size();
    const linalg::Matrix v = volterra_matrix(sec);
    const auto eig = linalg::jacobi_eigen(sec.dense_matrix());
    const linalg::Matrix s_half = linalg::symmetric_apply(eig, sqrt_fn);
    const linalg::Matrix s_half_inv = linalg::symmetric_apply(eig, inv_sqrt);
    const linalg::Matrix w_mat = linalg::multiply(s_half, linalg::multiply(v, s_half_inv));

    VolterraReport rep;
    rep.mu = mu;
    rep.xi = xi;
    rep.n = n;
    for (int i = 0; i < n; ++i) rep.spectral_radius = std::max(rep.spectral_radius, v.at(i, i));

    {
        fsec::Section fine(mu, xi, {2 * params.panels_per_unit, params.order});
        const linalg::Matrix vf = volterra_matrix(fine);
        for (int i = 0; i < fine.size(); ++i)
            rep.spectral_radius_refined = std::max(rep.spectral_radius_refined, vf.at(i, i));
    }

    rep.similarity_defect = linalg::max_abs_diff(
        linalg::multiply(s_half_inv, linalg::multiply(w_mat, s_half)), v);

    // ||W||_2 by power iteration on W^T W with a fixed start vector.
    {
        const linalg::Matrix wt = linalg::transpose(w_mat);
        std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n), tmp(n);
        double lam = 0.0;
        for (int it = 0; it < 200; ++it) {
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += w_mat.at(i, j) * x[j];
                tmp[i] = acc;
            }
            double norm2 = 0.0;
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < n; ++j) acc += wt.at(i, j) * tmp[j];
                y[i] = acc;
                norm2 += acc * acc;
            }
            const double nrm = std::sqrt(norm2);
            if (nrm == 0.0) break;
            lam = nrm;
            for (int i = 0; i < n; ++i) x[i] = y[i] / nrm;
        }
        rep.w_norm = std::sqrt(lam);
    }

    // Eigenvalues of the triangular V are its diagonal; map each eigenvector
    // through S^{1/2} and read the eigenvalue of W off the Rayleigh quotient.
    std::vector<double> vec(n), u(n), wu(n);
    for (int k = 0; k < n; ++k) {
        const double lam = v.at(k, k);
        bool degenerate = false;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lam - v.at(i, i)) < 1e-6 * lam) degenerate = true;
        if (degenerate) continue;

        std::fill(vec.begin(), vec.end(), 0.0);
        vec[k] = 1.0;
        for (int i = k + 1; i < n; ++i) {
            double acc = 0.0;
            for (int j = k; j < i; ++j) acc += v.at(i, j) * vec[j];
            vec[i] = acc / (lam - v.at(i, i));
        }
        double u_norm = 0.0;
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = k; j < n; ++j) acc += s_half.at(i, j) * vec[j];
            u[i] = acc;
            u_norm = std::max(u_norm, std::abs(acc));
        }
        double num = 0.0, den = 0.0, resid = 0.0;
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += w_mat.at(i, j) * u[j];
            wu[i] = acc;
            num += u[i] * acc;
            den += u[i] * u[i];
            resid = std::max(resid, std::abs(acc - lam * u[i]));
        }
        rep.max_eigenvalue_diff = std::max(rep.max_eigenvalue_diff, std::abs(num / den - lam));
        rep.max_eigen_residual = std::max(rep.max_eigen_residual, resid / u_norm);
        ++rep.eigen_checked;
    }
    return rep;
}

SuiteConfig SuiteConfig::from_json(const json& j) {
    SuiteConfig c;
    if (j.contains("mu")) c.mu = j["mu"].get<double>();
    if (j.contains("q_mu_list")) c.q_mu_list = j["q_mu_list"].get<std::vector<double>>();
    if (j.contains("t_min")) c.t_min = j["t_min"].get<double>();
    if (j.contains("t_max")) c.t_max = j["t_max"].get<double>();
    if (j.contains("dt")) c.dt = j["dt"].get<double>();
    if (j.contains("ladder_step")) c.ladder_step = j["ladder_step"].get<double>();
    if (j.contains("ladder_order")) c.ladder_order = j["ladder_order"].get<int>();
    if (j.contains("x_max")) c.x_max = j["x_max"].get<double>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
    if (j.contains("tolerances"))
        for (auto& [key, val] : j["tolerances"].items())
            c.tolerance_overrides[key] = val.get<double>();
    if (!(c.mu > 0.0) || !(c.mu < 1.0)) throw ConfigError("suite: mu must be in (0,1)");
    for (double m : c.q_mu_list)
        if (!(m > 0.0) || !(m < 1.0)) throw ConfigError("suite: q_mu_list entries in (0,1)");
    if (c.x_max < 30.0) throw ConfigError("suite: x_max must be >= 30 (q-limit ladder)");
    if (!(c.t_min >= 1.0) || !(c.t_max > c.t_min + 1.0))
        throw ConfigError("suite: need 1 <= t_min < t_max - 1");
    if (c.jobs < 1) throw ConfigError("suite: jobs must be >= 1");
    return c;
}

json SuiteReport::to_json() const {
    json arr = json::array();
    for (const auto& c : checks)
        arr.push_back({{"criterion", c.criterion},
                       {"check_id", c.id},
                       {"paper_ref", c.ref},
                       {"value", c.value},
                       {"target", c.target},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass},
                       {"seconds", c.seconds}});
    return json{{"schema", "sinekrein-suite-report/1"},
                {"pass", pass},
                {"total_seconds", total_seconds},
                {"checks", arr}};
}

namespace {

class CheckRecorder {
public:
    CheckRecorder(SuiteReport& report, const std::map<std::string, double>& overrides)
        : report_(report), overrides_(overrides) {}

    void add(int criterion, const std::string& id, const std::string& ref, double value,
             double target, double tolerance, double seconds) {
        auto it = overrides_.find(id);
        if (it != overrides_.end()) tolerance = it->second;
        CheckResult c;
        c.criterion = criterion;
        c.id = id;
        c.ref = ref;
        c.value = value;
        c.target = target;
        c.tolerance = tolerance;
        c.pass = std::abs(value - target) <= tolerance;
        c.seconds = seconds;
        report_.checks.push_back(c);
    }

private:
    SuiteReport& report_;
    const std::map<std::string, double>& overrides_;
};

struct Timer {
    double t0 = now_seconds();
    double lap() {
        const double t = now_seconds();
        const double d = t - t0;
        t0 = t;
        return d;
    }
};

}  // namespace

SuiteReport run_suite(const SuiteConfig& cfg) {
    const double suite_start = now_seconds();
    SuiteReport report;
    CheckRecorder rec(report, cfg.tolerance_overrides);
    const double mu = cfg.mu;
    const auto pc = asymptotics::painleve_constants(mu);

    const int bppu = static_cast<int>(std::lround(1.0 / cfg.ladder_step));

    // Stage A: the shared incremental builds (independent; optionally parallel).
    std::unique_ptr<fsec::IncrementalLadder> main_ladder, tw_half;
    std::map<double, std::unique_ptr<fsec::IncrementalLadder>> q_ladders;
    std::unique_ptr<asymptotics::AsymptoticsReport> tw_report, tw_report_half;
    std::unique_ptr<fsec::IncrementalLadder> tw_ladder;

    std::vector<std::function<void()>> tasks;
    tasks.push_back([&] {
        main_ladder = std::make_unique<fsec::IncrementalLadder>(mu, cfg.x_max, bppu,
                                                                cfg.ladder_order);
    });
    for (double qmu : cfg.q_mu_list) {
        if (std::abs(qmu - mu) < 1e-12) continue;  // served by the main ladder
        tasks.push_back([&, qmu] {
            auto lad = std::make_unique<fsec::IncrementalLadder>(qmu, 30.0, bppu,
                                                                 cfg.ladder_order);
            static std::mutex m;
            std::lock_guard<std::mutex> lock(m);
            q_ladders[qmu] = std::move(lad);
        });
    }
    tasks.push_back([&] {
        const int ppu = static_cast<int>(std::lround(1.0 / (2.0 * cfg.dt)));
        tw_ladder = std::make_unique<fsec::IncrementalLadder>(
            mu, 2.0 * (cfg.t_max + cfg.dt), ppu, 4);
    });
    tasks.push_back([&] {
        const double dt2 = cfg.dt / 2.0;
        const int ppu = static_cast<int>(std::lround(1.0 / (2.0 * dt2)));
        tw_half = std::make_unique<fsec::IncrementalLadder>(
            mu, 2.0 * (cfg.t_max + dt2), ppu, 4);
    });

    if (cfg.jobs > 1) {
        std::vector<std::future<void>> futs;
        for (auto& t : tasks) futs.push_back(std::async(std::launch::async, t));
        for (auto& f : futs) f.get();
    } else {
        for (auto& t : tasks) t();
    }

    const auto table = ksys::table_from_ladder(*main_ladder);

    Timer timer;

    // --- 1. diagonal resolvent limit ---
    {
        timer.lap();
        auto rep = asymptotics::run_from_ladder(*tw_ladder, cfg.t_min, cfg.t_max, cfg.dt);
        tw_report = std::make_unique<asymptotics::AsymptoticsReport>(std::move(rep));
        const double sec = timer.lap();
        rec.add(1, "diag_limit_raw", "diagonal resolvent value at t=10 vs -log(1-mu)",
                tw_report->diag.back(), -std::log(1.0 - mu), 1e-2, sec);
        rec.add(1, "diag_limit_corrected",
                "diagonal deviation after subtracting -b/(2t) at t=10",
                tw_report->corrected_dev_at(cfg.t_max), 0.0, 3e-3, 0.0);
    }

    // --- 2/3. q1 limit and product identity ---
    for (double qmu : cfg.q_mu_list) {
        timer.lap();
        const fsec::IncrementalLadder& lad =
            (std::abs(qmu - mu) < 1e-12) ? *main_ladder : *q_ladders.at(qmu);
        const auto& recs = lad.records();
        double q1_30 = 0.0, worst_prod = 0.0;
        for (const auto& r : recs) {
            if (std::abs(r.x - 30.0) < 1e-9) q1_30 = r.q1;
            if (r.x >= 0.5 - 1e-12 && r.x <= 30.0 + 1e-12)
                worst_prod = std::max(worst_prod, std::abs(r.q1 * r.q2 - 0.5));
        }
        const double sec = timer.lap();
        char id[64], ref[96];
        std::snprintf(id, sizeof id, "q1_limit_mu%03d", static_cast<int>(qmu * 100));
        std::snprintf(ref, sizeof ref, "q1(30) vs 1/sqrt(1-mu) at mu=%.2f", qmu);
        rec.add(2, id, ref, q1_30, 1.0 / std::sqrt(1.0 - qmu), 1e-2, sec);
        std::snprintf(id, sizeof id, "q_product_mu%03d", static_cast<int>(qmu * 100));
        std::snprintf(ref, sizeof ref, "max |q1 q2 - 1/2| on [0.5,30] at mu=%.2f", qmu);
        rec.add(3, id, ref, worst_prod, 0.0, 5e-4, 0.0);
    }

    // --- 4. Tracy-Widom diagonal ODE ---
    {
        timer.lap();
        const double res1 = tw_report->max_ode_residual(cfg.t_min, cfg.t_max);
        auto rep_half =
            asymptotics::run_from_ladder(*tw_half, cfg.t_min, cfg.t_max, cfg.dt / 2.0);
        const double res2 = rep_half.max_ode_residual(cfg.t_min, cfg.t_max);
        const double sec = timer.lap();
        rec.add(4, "tw_ode_residual", "max |d/dt diag - 2 corner^2| on [2,10]", res1, 0.0,
                1e-3, sec);
        rec.add(4, "tw_ode_residual_halving", "residual ratio when dt is halved",
                res2 / std::max(res1, 1e-300), 0.0, 0.5, 0.0);
    }

    // --- 5. corner oscillation envelope ---
    {
        timer.lap();
        const auto peaks = asymptotics::corner_envelope(*tw_ladder, cfg.t_max,
                                                        2.0 * cfg.t_max, {});
        double worst_peak = 0.0;
        for (double h : peaks.peak_height)
            worst_peak = std::max(worst_peak, std::abs(h / std::abs(pc.a) - 1.0));
        double worst_spacing = 0.0;
        for (double s : peaks.zero_spacings)
            worst_spacing = std::max(worst_spacing, std::abs(s - 1.0));
        const double sec = timer.lap();
        rec.add(5, "corner_peak_band", "peaks of t|B(t)| on [10,20] vs |a(mu)|",
                worst_peak, 0.0, 0.2, sec);
        rec.add(5, "corner_zero_spacing", "zero spacings of B on [10,20] vs 1", worst_spacing,
                0.0, 0.05, 0.0);
    }

    // --- 6. Krein ODE vs closed form ---
    const Complex z2i{0.0, 2.0};
    {
        timer.lap();
        const auto est = ksys::spectral_estimates(table, z2i, cfg.x_max);
        const Complex closed = ksys::pi_closed(mu, z2i);
        const Complex quad = ksys::pi_by_quadrature(mu, z2i);
        const double sec = timer.lap();
        rec.add(6, "krein_ode_vs_closed", "Szego function at 2i: ODE limit vs closed form",
                std::abs(est.pi_ode - closed), 0.0, 1e-2, sec);
        rec.add(6, "pi_quadrature_confirm", "closed form vs contour quadrature at 2i",
                std::abs(closed - quad), 0.0, 1e-6, 0.0);
    }

    // --- 7. spectral identities ---
    {
        timer.lap();
        const Complex z_small{0.0, 0.05};
        const auto est_small = ksys::spectral_estimates(table, z_small, cfg.x_max);
        const auto est_2i = ksys::spectral_estimates(table, z2i, cfg.x_max);
        const Complex v0 = ksys::weyl_v(mu, 0.0);
        const Complex chain = ksys::hat_pi_closed(mu, z2i);
        const double sec = timer.lap();
        rec.add(7, "pi_small_z", "Szego function ODE limit at 0.05i vs sqrt(1-mu)",
                std::abs(est_small.pi_ode - std::sqrt(1.0 - mu)), 0.0, 1e-2, sec);
        rec.add(7, "weyl_v_origin", "Weyl function value at the origin vs i(1-mu)/2",
                std::abs(v0 - Complex{0.0, 0.5 * (1.0 - mu)}), 0.0, 1e-15, 0.0);
        rec.add(7, "hat_pi_chain", "second-kind limit at 2i: ODE vs i v Pi",
                std::abs(est_2i.hat_pi_ode - chain), 0.0, 1e-2, 0.0);
    }

    // --- 8. w21 double representation ---
    {
        timer.lap();
        fsec::Section sec10(mu, 10.0, {});
        const auto w21 = ksys::w21_both(sec10, Complex{1.0, 0.0});
        const double sec = timer.lap();
        rec.add(8, "w21_two_forms", "w21 at (xi,z)=(10,1): both representations",
                std::abs(w21.boundary_form - w21.direct_form), 0.0, 1e-8, sec);
    }

    // --- 9. obstruction constants ---
    {
        timer.lap();
        const double c_const = 1.0 / std::sqrt(1.0 - mu);
        fsec::Section sec10(mu, 10.0, {});
        const double g0 = ksys::w21_both(sec10, Complex{0.0, 0.0}).g.real();
        const double h0_closed = 2.0 * c_const * std::abs(ksys::hat_pi_closed(mu, 0.0));
        const auto est0 = ksys::spectral_estimates(table, Complex{0.0, 0.05}, cfg.x_max);
        const double h0_ode = 2.0 * c_const * std::abs(est0.hat_pi_ode);
        const double sec = timer.lap();
        rec.add(9, "g_zero_exact", "G(0) vs 1/(1-mu)", g0, 1.0 / (1.0 - mu), 1e-12, sec);
        rec.add(9, "krein_h0_closed", "2C|hatPi(0)| closed form vs 1-mu", h0_closed,
                1.0 - mu, 1e-12, 0.0);
        rec.add(9, "krein_h0_ode", "2C|hatPi(0)| from ODE limits vs 1-mu", h0_ode, 1.0 - mu,
                2e-2, 0.0);
        rec.add(9, "mismatch_ratio", "G(0)/(1-mu) vs (1-mu)^-2", g0 / (1.0 - mu),
                1.0 / ((1.0 - mu) * (1.0 - mu)), 0.1, 0.0);
    }

    // --- 10. finite-section spectrum ---
    {
        timer.lap();
        fsec::Section sec10(mu, 10.0, {});
        const auto eigs = sec10.eigenvalues();
        const double violation =
            std::max(eigs.back() - 1.0, (1.0 - mu) - eigs.front());
        const double sec = timer.lap();
        rec.add(10, "spectrum_containment",
                "eigenvalues of the xi=10 section inside (1-mu, 1)",
                std::max(violation, 0.0), 0.0, 1e-8, sec);
    }

    // --- 11. factorization vs resolvent ---
    // First order in the panel width: the 1e-3 target needs ppu = 4 (still far
    // inside the time budget); the coarse default grid supplies the
    // improving-under-refinement ratio.
    {
        timer.lap();
        fsec::Section coarse(mu, 10.0, {2, 10});
        const auto factor_coarse = krein_factor::reverse_cholesky(coarse.dense_matrix());
        const auto cmp_coarse = krein_factor::factor_vs_resolvent(coarse, factor_coarse);
        fsec::Section fine(mu, 10.0, {4, 10});
        const auto factor_fine = krein_factor::reverse_cholesky(fine.dense_matrix());
        const auto cmp_fine = krein_factor::factor_vs_resolvent(fine, factor_fine);
        const double sec = timer.lap();
        rec.add(11, "factor_kernel_match",
                "lower factor kernel vs independent resolvent (sep >= 0.5)",
                cmp_fine.max_rel_error, 0.0, 1e-3, sec);
        rec.add(11, "factor_kernel_refine", "kernel error ratio under grid refinement",
                cmp_fine.max_rel_error / std::max(cmp_coarse.max_rel_error, 1e-300), 0.0,
                0.999, 0.0);
    }

    // --- 12. property suite ---
    {
        timer.lap();
        const auto traj = ksys::integrate_krein(table, Complex{1.0, 0.0}, cfg.x_max);
        rec.add(12, "conservation_real_z",
                "max | |P|^2 - |P*|^2 | / x along the real-z trajectory",
                traj.conservation_defect(), 0.0, 1e-8, timer.lap());

        double det_h = 0.0;
        for (const auto& r : main_ladder->records())
            det_h = std::max(det_h, std::abs(r.q1 * r.q1 * r.q2 * r.q2 - 0.25));
        rec.add(12, "det_h_degenerate", "max |q1^2 q2^2 - 1/4| along the ladder", det_h, 0.0,
                5e-4, timer.lap());

        fsec::Section sec5(mu, 5.0, {});
        const auto factor = krein_factor::reverse_cholesky(sec5.dense_matrix());
        rec.add(12, "reverse_cholesky_reconstruction",
                "relative max-norm defect of V^T V vs A^{-1}",
                krein_factor::reconstruction_defect(factor, sec5.dense_matrix()), 0.0, 1e-10,
                timer.lap());

        // Determinism: one representative pipeline, rebuilt from scratch.
        auto run_once = [&] {
            fsec::IncrementalLadder lad(mu, 5.0, 8, 4);
            const auto tab = ksys::table_from_ladder(lad);
            const auto est = ksys::spectral_estimates(tab, z2i, 5.0);
            return std::array<double, 4>{lad.records().back().b, lad.records().back().q1,
                                         est.pi_ode.real(), est.hat_pi_ode.real()};
        };
        const auto r1 = run_once();
        const auto r2 = run_once();
        double dmax = 0.0;
        for (int i = 0; i < 4; ++i) dmax = std::max(dmax, std::abs(r1[i] - r2[i]));
        rec.add(12, "determinism", "bit-identical rerun of a representative pipeline", dmax,
                0.0, 0.0, timer.lap());
    }

    // Structural self-check of the bundle being emitted: every record carries
    // finite numeric fields and a non-empty identity.
    {
        int defects = 0;
        for (const auto& c : report.checks) {
            if (c.id.empty() || c.ref.empty()) ++defects;
            if (!std::isfinite(c.value) || !std::isfinite(c.target) ||
                !std::isfinite(c.tolerance))
                ++defects;
        }
        rec.add(12, "bundle_fields", "all check records structurally complete",
                static_cast<double>(defects), 0.0, 0.0, 0.0);
    }

    report.total_seconds = now_seconds() - suite_start;
    rec.add(12, "runtime_budget", "full suite wall time (seconds)", report.total_seconds,
            0.0, 600.0, 0.0);

    report.pass = true;
    for (const auto& c : report.checks) report.pass = report.pass && c.pass;
    return report;
}

}  // namespace sk::experiments

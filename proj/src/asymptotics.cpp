#include "asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "errors.hpp"

namespace sk::asymptotics {

PainleveConstants painleve_constants(double mu) {
    if (!(mu > 0.0) || !(mu < 1.0))
        throw ConfigError("painleve_constants: mu must be in (0,1)");
    const double a = std::log(1.0 - mu) / std::numbers::pi;
    return {a, 0.5 * a * a};
}

double AsymptoticsReport::max_ode_residual(double t_lo, double t_hi) const {
    double worst = 0.0;
    for (size_t i = 0; i < t.size(); ++i)
        if (t[i] >= t_lo - 1e-12 && t[i] <= t_hi + 1e-12 && std::isfinite(ode_residual[i]))
            worst = std::max(worst, ode_residual[i]);
    return worst;
}

namespace {

double value_at(const std::vector<double>& ts, const std::vector<double>& vals, double tq) {
    for (size_t i = 0; i < ts.size(); ++i)
        if (std::abs(ts[i] - tq) < 1e-9) return vals[i];
    throw ConfigError("asymptotics: query t is not on the sample grid");
}

}  // namespace

double AsymptoticsReport::raw_dev_at(double tq) const { return value_at(t, raw_dev, tq); }
double AsymptoticsReport::corrected_dev_at(double tq) const {
    return value_at(t, corrected_dev, tq);
}

AsymptoticsReport run(double mu, double t_min, double t_max, double dt, int order) {
    if (!(dt > 0.0) || dt > 0.1 + 1e-12)
        throw ConfigError("asymptotics: dt must be in (0, 0.1]");
    if (!(t_min >= 1.0) || !(t_max > t_min))
        throw ConfigError("asymptotics: need 1 <= t_min < t_max");
    const double ppu_real = 1.0 / (2.0 * dt);
    const int ppu = static_cast<int>(std::lround(ppu_real));
    if (std::abs(ppu_real - ppu) > 1e-9)
        throw ConfigError("asymptotics: 2*dt must divide 1 (ladder alignment)");

    const double x_max = 2.0 * (t_max + dt);
    finite_section::IncrementalLadder ladder(mu, x_max, ppu, order);
    return run_from_ladder(ladder, t_min, t_max, dt);
}

AsymptoticsReport run_from_ladder(const finite_section::IncrementalLadder& ladder,
                                  double t_min, double t_max, double dt) {
    if (std::abs(ladder.step() - 2.0 * dt) > 1e-9)
        throw ConfigError("asymptotics: ladder spacing must equal 2*dt");
    const double mu = ladder.mu();
    const auto& recs = ladder.records();

    // mu = 0 is the degenerate test mode: a = b = 0.
    const PainleveConstants pc = (mu == 0.0) ? PainleveConstants{0.0, 0.0}
                                             : painleve_constants(mu);
    AsymptoticsReport rep;
    rep.mu = mu;
    rep.dt = dt;
    rep.a = pc.a;
    rep.b = pc.b;

    const double log1m = std::log(1.0 - mu);
    for (size_t k = 1; k < recs.size(); ++k) {
        const double tk = recs[k].x / 2.0;
        if (tk < t_min - 1e-12 || tk > t_max + 1e-12) continue;
        rep.t.push_back(tk);
        rep.diag.push_back(recs[k].diag);
        rep.corner.push_back(recs[k].b);
        rep.sigma.push_back(-2.0 * tk * recs[k].diag);
        rep.envelope.push_back(tk * std::abs(recs[k].b));
        rep.raw_dev.push_back(std::abs(recs[k].diag + log1m));
        rep.corrected_dev.push_back(std::abs(recs[k].diag + log1m + pc.b / (2.0 * tk)));
        // central difference across the neighboring sections
        if (k >= 2 && k + 1 < recs.size()) {
            const double ddiag = (recs[k + 1].diag - recs[k - 1].diag) / (2.0 * dt);
            rep.ode_residual.push_back(std::abs(ddiag - 2.0 * recs[k].b * recs[k].b));
        } else {
            rep.ode_residual.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    return rep;
}

PeakTable corner_envelope(const finite_section::IncrementalLadder& ladder, double t_lo,
                          double t_hi, finite_section::GridParams refine_params) {
    const auto& recs = ladder.records();
    PeakTable table;

    std::vector<double> xs, bs;
    for (size_t k = 1; k < recs.size(); ++k) {
        if (recs[k].x < t_lo - 1e-12 || recs[k].x > t_hi + 1e-12) continue;
        xs.push_back(recs[k].x);
        bs.push_back(recs[k].b);
    }
    if (xs.size() < 3) throw ConfigError("corner_envelope: window too narrow for the ladder");

    // Peaks of f = t|B(t)| by 3-point scan + parabolic refinement.
    std::vector<double> f(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) f[i] = xs[i] * std::abs(bs[i]);
    for (size_t i = 1; i + 1 < xs.size(); ++i) {
        if (!(f[i] >= f[i - 1] && f[i] > f[i + 1])) continue;
        if (table.peak_t.empty())
            table.first_extremum_sign = bs[i] > 0.0 ? 1 : (bs[i] < 0.0 ? -1 : 0);
        const double denom = f[i - 1] - 2.0 * f[i] + f[i + 1];
        double tp = xs[i], fp = f[i];
        if (denom < 0.0) {
            const double delta = 0.5 * (f[i - 1] - f[i + 1]) / denom;
            const double h = xs[i + 1] - xs[i];
            tp = xs[i] + delta * h;
            fp = f[i] - 0.25 * (f[i - 1] - f[i + 1]) * delta;
        }
        table.peak_t.push_back(tp);
        table.peak_height.push_back(fp);
    }

    // Zeros of B by bisection on fresh-section corner evaluations.
    const auto b_eval = [&](double x) {
        finite_section::Section sec(ladder.mu(), x, refine_params);
        return sec.resolvent_point(x, 0.0);
    };
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(bs[i] == 0.0) && !(bs[i] * bs[i + 1] < 0.0)) continue;
        double lo = xs[i], hi = xs[i + 1];
        double flo = bs[i];
        for (int it = 0; it < 10 && hi - lo > 1e-4; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = b_eval(mid);
            if (flo * fm <= 0.0) {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        table.zero_t.push_back(0.5 * (lo + hi));
    }
    for (size_t i = 0; i + 1 < table.zero_t.size(); ++i)
        table.zero_spacings.push_back(table.zero_t[i + 1] - table.zero_t[i]);
    return table;
}

}  // namespace sk::asymptotics

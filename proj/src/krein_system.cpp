#include "krein_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "errors.hpp"

namespace sk::krein_system {

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};
}  // namespace

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), y_(std::move(ys)) {
    const int n = static_cast<int>(xs_.size()) - 1;
    if (n < 1 || y_.size() != xs_.size())
        throw DimensionMismatch("CubicSpline: need >= 2 knots and matching values");
    std::vector<double> h(n), alpha(n + 1, 0.0), l(n + 1, 1.0), mu(n + 1, 0.0), z(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        h[i] = xs_[i + 1] - xs_[i];
        if (!(h[i] > 0.0)) throw ConfigError("CubicSpline: knots must be ascending");
    }
    for (int i = 1; i < n; ++i)
        alpha[i] = 3.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    for (int i = 1; i < n; ++i) {
        l[i] = 2.0 * (xs_[i + 1] - xs_[i - 1]) - h[i - 1] * mu[i - 1];
        mu[i] = h[i] / l[i];
        z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
    }
    b_.assign(n, 0.0);
    c_.assign(n + 1, 0.0);
    d_.assign(n, 0.0);
    for (int j = n - 1; j >= 0; --j) {
        c_[j] = z[j] - mu[j] * c_[j + 1];
        b_[j] = (y_[j + 1] - y_[j]) / h[j] - h[j] * (c_[j + 1] + 2.0 * c_[j]) / 3.0;
        d_[j] = (c_[j + 1] - c_[j]) / (3.0 * h[j]);
    }
    cum_.assign(n + 1, 0.0);
    for (int j = 0; j < n; ++j) {
        const double hj = h[j];
        cum_[j + 1] = cum_[j] + hj * (y_[j] + hj * (b_[j] / 2.0 +
                                                    hj * (c_[j] / 3.0 + hj * d_[j] / 4.0)));
    }
}

int CubicSpline::interval(double x) const {
    const int n = static_cast<int>(xs_.size()) - 1;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    int j = static_cast<int>(it - xs_.begin()) - 1;
    return std::clamp(j, 0, n - 1);
}

double CubicSpline::eval(double x) const {
    const int j = interval(x);
    const double dx = x - xs_[j];
    return y_[j] + dx * (b_[j] + dx * (c_[j] + dx * d_[j]));
}

double CubicSpline::integral(double x) const {
    const int j = interval(x);
    const double dx = x - xs_[j];
    return cum_[j] + dx * (y_[j] + dx * (b_[j] / 2.0 + dx * (c_[j] / 3.0 + dx * d_[j] / 4.0)));
}

double CoefficientTable::square_integral(double lo, double hi) const {
    const int steps = std::max(8, static_cast<int>(std::ceil((hi - lo) / (spacing / 8.0))));
    const double h = (hi - lo) / steps;
    double s = 0.0;
    for (int k = 0; k <= steps; ++k) {
        const double v = eval(lo + k * h);
        s += (k == 0 || k == steps ? 0.5 : 1.0) * v * v;
    }
    return s * h;
}

CoefficientTable table_from_ladder(const finite_section::IncrementalLadder& ladder) {
    CoefficientTable t;
    t.mu = ladder.mu();
    t.spacing = ladder.step();
    for (const auto& rec : ladder.records()) {
        t.xs.push_back(rec.x);
        t.b.push_back(rec.b);
    }
    t.spline = CubicSpline(t.xs, t.b);
    return t;
}

CoefficientTable sample_b(double mu, double x_max, double ladder_step, int order) {
    if (!(ladder_step > 0.0) || ladder_step > 0.25 + 1e-12)
        throw ConfigError("sample_b: ladder_step must be in (0, 0.25]");
    const double ppu_real = 1.0 / ladder_step;
    const int ppu = static_cast<int>(std::lround(ppu_real));
    if (std::abs(ppu_real - ppu) > 1e-9)
        throw ConfigError("sample_b: ladder_step must divide 1");
    finite_section::IncrementalLadder ladder(mu, x_max, ppu, order);
    return table_from_ladder(ladder);
}

QTables q_tables_from_ladder(const finite_section::IncrementalLadder& ladder) {
    std::vector<double> xs, q1, q2;
    for (const auto& rec : ladder.records()) {
        xs.push_back(rec.x);
        q1.push_back(rec.q1);
        q2.push_back(rec.q2);
    }
    return {CubicSpline(xs, q1), CubicSpline(xs, q2)};
}

double Trajectory::conservation_defect() const {
    double worst = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < 1.0) continue;
        const double dev = std::abs(std::norm(p[i]) - std::norm(p_star[i]));
        worst = std::max(worst, dev / xs[i]);
    }
    return worst;
}

Trajectory integrate_krein(const CoefficientTable& table, Complex z, double x_max,
                           InitKind init, double step, int coupling_sign) {
    if (x_max > table.x_max() + 1e-9)
        throw ConfigError("integrate_krein: x_max exceeds the coefficient table");
    const double max_step = std::min(0.02, table.spacing / 4.0);
    if (step == 0.0) step = max_step;
    if (step > max_step + 1e-12)
        throw StepSizeError("integrate_krein: step too large for the coefficient table");

    const int n = std::max(1, static_cast<int>(std::ceil(x_max / step - 1e-9)));
    const double h = x_max / n;
    const Complex half_iz = 0.5 * kI * z;
    const double sign = static_cast<double>(coupling_sign);

    Trajectory traj;
    traj.z = z;
    traj.init = init;
    traj.coupling_sign = coupling_sign;
    Complex p = (init == InitKind::standard) ? Complex{1.0, 0.0} : Complex{0.5, 0.0};
    Complex ps = (init == InitKind::standard) ? Complex{1.0, 0.0} : Complex{-0.5, 0.0};

    traj.xs.reserve(n + 1);
    traj.p.reserve(n + 1);
    traj.p_star.reserve(n + 1);
    traj.xs.push_back(0.0);
    traj.p.push_back(p);
    traj.p_star.push_back(ps);

    auto rhs = [&](double x, Complex pv, Complex psv, Complex& dp, Complex& dps) {
        const double bv = sign * table.eval(x);
        dp = half_iz * pv - bv * psv;
        dps = -bv * pv;
    };

    double x = 0.0;
    Complex k1p, k1s, k2p, k2s, k3p, k3s, k4p, k4s;
    for (int i = 0; i < n; ++i) {
        rhs(x, p, ps, k1p, k1s);
        rhs(x + 0.5 * h, p + 0.5 * h * k1p, ps + 0.5 * h * k1s, k2p, k2s);
        rhs(x + 0.5 * h, p + 0.5 * h * k2p, ps + 0.5 * h * k2s, k3p, k3s);
        rhs(x + h, p + h * k3p, ps + h * k3s, k4p, k4s);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        ps += h / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        x += h;
        traj.xs.push_back(x);
        traj.p.push_back(p);
        traj.p_star.push_back(ps);
    }
    return traj;
}

Complex pi_closed(double mu, Complex z) {
    if (!(mu > 0.0) || !(mu < 1.0)) throw ConfigError("pi_closed: mu must be in (0,1)");
    const double log1m = std::log(1.0 - mu);
    if (z.imag() > 0.0) {
        const Complex lam = 0.5 * z;
        const Complex integral = std::log(kPi - lam) - std::log(-kPi - lam);
        return std::exp(log1m / (2.0 * kI * kPi) * integral);
    }
    if (z.imag() < 0.0) throw ConfigError("pi_closed: Im z must be >= 0");
    const double x = z.real();
    if (std::abs(std::abs(x) - 2.0 * kPi) < 1e-12)
        throw BranchError("pi_closed: branch endpoint |x| = 2 pi");
    const double chi = (std::abs(x) < 2.0 * kPi) ? 1.0 : 0.0;
    const Complex integral{std::log(std::abs((2.0 * kPi - x) / (2.0 * kPi + x))), kPi * chi};
    return std::exp(log1m / (2.0 * kI * kPi) * integral);
}

Complex pi_by_quadrature(double mu, Complex z, int panels, int order) {
    if (!(z.imag() > 0.0)) throw ConfigError("pi_by_quadrature: Im z must be > 0");
    const auto rule = quadrature::gauss_legendre(order);
    const Complex lam = 0.5 * z;
    const double width = 2.0 * kPi / panels;
    Complex integral{0.0, 0.0};
    for (int p = 0; p < panels; ++p) {
        const double mid = -kPi + (p + 0.5) * width;
        for (int g = 0; g < order; ++g) {
            const double t = mid + 0.5 * width * rule.nodes[g];
            integral += 0.5 * width * rule.weights[g] * std::log(1.0 - mu) / (t - lam);
        }
    }
    return std::exp(integral / (2.0 * kI * kPi));
}

Complex weyl_v(double mu, Complex z) {
    if (!(mu > 0.0) || !(mu < 1.0)) throw ConfigError("weyl_v: mu must be in (0,1)");
    const double two_pi = 2.0 * kPi;
    if (z.imag() > 0.0) {
        const Complex lam = 0.5 * z;
        const Complex integral = std::log(kPi - lam) - std::log(-kPi - lam);
        return 0.5 * kI - mu / two_pi * integral + 2.0 * z * mu / (4.0 * kPi * kPi - z * z);
    }
    if (z.imag() < 0.0) throw ConfigError("weyl_v: Im z must be >= 0");
    const double x = z.real();
    if (std::abs(std::abs(x) - two_pi) < 1e-12) throw PoleError("weyl_v: pole at |x| = 2 pi");
    if (std::abs(x) > two_pi)
        throw ConfigError("weyl_v: real-axis limit formula requires |x| < 2 pi");
    return Complex{-mu / two_pi * std::log(std::abs((two_pi - x) / (two_pi + x))) +
                       2.0 * x * mu / (4.0 * kPi * kPi - x * x),
                   0.5 * (1.0 - mu)};
}

Complex hat_pi_closed(double mu, Complex z) { return kI * weyl_v(mu, z) * pi_closed(mu, z); }

SpectralEstimates spectral_estimates(const CoefficientTable& table, Complex z, double x_max,
                                     double step) {
    if (!(z.imag() > 0.0)) throw ConfigError("spectral_estimates: Im z must be > 0");
    const auto std_traj = integrate_krein(table, z, x_max, InitKind::standard, step, -1);
    const auto hat_traj = integrate_krein(table, z, x_max, InitKind::hat, step, -1);
    SpectralEstimates est;
    const Complex ps = std_traj.p_star_end();
    est.pi_ode = 1.0 / ps;
    est.m_ode = -kI * hat_traj.p_star_end() / ps;
    est.v_ode = est.m_ode + 2.0 * z * table.mu / (4.0 * kPi * kPi - z * z);
    est.hat_pi_ode = kI * est.v_ode * est.pi_ode;
    est.hat_p_end_abs = std::abs(hat_traj.p_end());
    return est;
}

namespace {

Mat2 mat_mul(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

Mat2 mat_scale(Complex s, const Mat2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }

Mat2 mat_add(const Mat2& x, const Mat2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

double mat_max_abs(const Mat2& x) {
    return std::max(std::max(std::abs(x.a), std::abs(x.b)),
                    std::max(std::abs(x.c), std::abs(x.d)));
}

}  // namespace

CanonicalResult canonical_system(const finite_section::IncrementalLadder& ladder, Complex z,
                                 double x_max, double step, double sample_dx) {
    if (x_max > ladder.x_max() + 1e-9)
        throw ConfigError("canonical_system: x_max exceeds the ladder");
    const auto qt = q_tables_from_ladder(ladder);
    const auto bt = table_from_ladder(ladder);
    const double max_step = std::min(0.02, ladder.step() / 4.0);
    if (step == 0.0) step = max_step;
    if (step > max_step + 1e-12) throw StepSizeError("canonical_system: step too large");

    const int n = std::max(1, static_cast<int>(std::ceil(x_max / step - 1e-9)));
    const double h = x_max / n;

    // dW/dx = i z J H(x) W with J = [[0,1],[1,0]], H = [[q1^2, 1/2],[1/2, q2^2]].
    auto deriv = [&](double x, const Mat2& w) -> Mat2 {
        const double q1 = qt.q1.eval(x), q2 = qt.q2.eval(x);
        // JH = [[1/2, q2^2],[q1^2, 1/2]]
        const Complex iz = kI * z;
        return {iz * (0.5 * w.a + q2 * q2 * w.c), iz * (0.5 * w.b + q2 * q2 * w.d),
                iz * (q1 * q1 * w.a + 0.5 * w.c), iz * (q1 * q1 * w.b + 0.5 * w.d)};
    };

    const double q10 = qt.q1.eval(0.0), q20 = qt.q2.eval(0.0);
    const Mat2 t0{q20, -q20, q10, q10};

    CanonicalResult res;
    res.z = z;
    res.max_system_residual = 0.0;
    res.max_det_h = 0.0;
    res.max_rank1_defect = 0.0;

    auto probe = [&](double x, const Mat2& w) {
        const double q1 = qt.q1.eval(x), q2 = qt.q2.eval(x);
        const double bv = bt.eval(x);
        const double g = 2.0 * q1 * q2;

        res.max_det_h = std::max(res.max_det_h, std::abs(q1 * q1 * q2 * q2 - 0.25));

        // rank-1 identity JH = T diag(1,0) T^{-1}
        const Mat2 jh{0.5, q2 * q2, q1 * q1, 0.5};
        const Mat2 tp{q2 * q1 / g, q2 * q2 / g, q1 * q1 / g, q1 * q2 / g};
        res.max_rank1_defect = std::max(
            res.max_rank1_defect,
            mat_max_abs(mat_add(jh, mat_scale(-1.0, tp))));

        // transformed system residual: dV/dx = (iz/2) j V - Q V with
        // V = e^{-ixz/2} T^{-1} W T0, q1' = B q1, q2' = -B q2.
        const Mat2 tinv{q1 / g, q2 / g, -q1 / g, q2 / g};
        const Mat2 dtinv{bv * q1 / g, -bv * q2 / g, -bv * q1 / g, -bv * q2 / g};
        const Complex phase = std::exp(-0.5 * kI * z * x);
        const Mat2 v = mat_scale(phase, mat_mul(tinv, mat_mul(w, t0)));
        const Mat2 dw = deriv(x, w);
        const Mat2 dv = mat_add(
            mat_scale(-0.5 * kI * z, v),
            mat_scale(phase, mat_mul(mat_add(mat_mul(dtinv, w), mat_mul(tinv, dw)), t0)));
        // rhs
        const Mat2 jv{0.5 * kI * z * v.a, 0.5 * kI * z * v.b,
                      -0.5 * kI * z * v.c, -0.5 * kI * z * v.d};
        const Mat2 qv{-bv * v.c, -bv * v.d, -bv * v.a, -bv * v.b};
        const Mat2 rhs = mat_add(jv, qv);
        res.max_system_residual =
            std::max(res.max_system_residual, mat_max_abs(mat_add(dv, mat_scale(-1.0, rhs))));
    };

    Mat2 w{1.0, 0.0, 0.0, 1.0};
    double x = 0.0;
    double next_sample = 0.0;
    for (int i = 0; i <= n; ++i) {
        if (x >= next_sample - 1e-12) {
            res.xs.push_back(x);
            res.w.push_back(w);
            probe(x, w);
            next_sample += sample_dx;
        }
        if (i == n) break;
        const Mat2 k1 = deriv(x, w);
        const Mat2 k2 = deriv(x + 0.5 * h, mat_add(w, mat_scale(0.5 * h, k1)));
        const Mat2 k3 = deriv(x + 0.5 * h, mat_add(w, mat_scale(0.5 * h, k2)));
        const Mat2 k4 = deriv(x + h, mat_add(w, mat_scale(h, k3)));
        Mat2 incr = mat_add(mat_add(k1, mat_scale(2.0, k2)),
                            mat_add(mat_scale(2.0, k3), k4));
        w = mat_add(w, mat_scale(h / 6.0, incr));
        x += h;
    }
    return res;
}

namespace {

W21Result w21_from_samples(double mu, double xi, Complex z,
                           const std::vector<double>& nodes,
                           const std::vector<double>& weights, int m,
                           const std::vector<double>& u, const std::vector<double>& rq) {
    const Complex iz = kI * z;
    Complex int_right{0.0, 0.0};  // \int e^{iz(xi-x)} R(x) dx
    Complex int_left{0.0, 0.0};   // \int e^{izx} R(x) dx
    Complex int_direct{0.0, 0.0};
    for (int j = 0; j < m; ++j) {
        const Complex er = std::exp(iz * (xi - nodes[j]));
        const Complex el = std::exp(iz * nodes[j]);
        int_right += weights[j] * er * rq[j];
        int_left += weights[j] * el * rq[j];
        int_direct += weights[j] * er * u[j];
    }
    const double c = 1.0 / (1.0 - mu);
    W21Result res;
    const Complex e_g = c * (std::exp(iz * xi) - iz * int_right);
    const Complex g_bar = c * (1.0 + iz * int_left);
    res.boundary_form = e_g - g_bar;
    res.direct_form = iz * int_direct;
    // Raw G only when e^{-izx} stays representable.
    if (z.imag() * xi < 500.0) {
        Complex int_g{0.0, 0.0};
        for (int j = 0; j < m; ++j) int_g += weights[j] * std::exp(-iz * nodes[j]) * rq[j];
        res.g = c * (1.0 - iz * int_g);
    } else {
        res.g = Complex{std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()};
    }
    return res;
}

}  // namespace

W21Result w21_both(const finite_section::Section& section, Complex z) {
    std::vector<double> ones(section.size(), 1.0);
    const auto u = section.apply_inverse(ones);
    const auto rq = section.resolvent_of_q();
    return w21_from_samples(section.mu(), section.xi(), z, section.grid().nodes(),
                            section.grid().weights(), section.size(), u, rq);
}

W21Result w21_both_ladder(const finite_section::IncrementalLadder& ladder, int k, Complex z) {
    const auto u = ladder.solve_inverse_one(k);
    const auto rq = ladder.solve_resolvent_of_q(k);
    return w21_from_samples(ladder.mu(), ladder.records()[k].x, z, ladder.grid().nodes(),
                            ladder.grid().weights(), ladder.nodes_at(k), u, rq);
}

}  // namespace sk::krein_system

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "sinekrein.h"

using json = nlohmann::json;

TEST_CASE("grid handle lifecycle and data") {
    sk_grid* grid = nullptr;
    REQUIRE(sk_grid_create(1.0, 1, 2, &grid) == SK_OK);
    REQUIRE(sk_grid_size(grid) == 2);
    double nodes[2], weights[2];
    int panel[2];
    REQUIRE(sk_grid_copy(grid, nodes, weights, panel) == SK_OK);
    CHECK(nodes[0] == doctest::Approx(0.21132486540518713));
    CHECK(weights[0] == doctest::Approx(0.5));
    CHECK(panel[1] == 0);
    sk_grid_destroy(grid);

    sk_grid* bad = nullptr;
    CHECK(sk_grid_create(-1.0, 1, 2, &bad) == SK_ERR_CONFIG);
    CHECK(std::strlen(sk_last_error()) > 0);
}

TEST_CASE("section handle: mu domain is the open interval") {
    sk_section* sec = nullptr;
    CHECK(sk_section_create(1.5, 5.0, 2, 10, &sec) == SK_ERR_CONFIG);
    CHECK(sk_section_create(0.0, 5.0, 2, 10, &sec) == SK_ERR_CONFIG);
    REQUIRE(sk_section_create(0.5, 5.0, 2, 10, &sec) == SK_OK);
    const int n = sk_section_size(sec);
    CHECK(n == 100);
    std::vector<double> f(n, 1.0), out(n);
    REQUIRE(sk_section_apply_inverse(sec, f.data(), n, out.data()) == SK_OK);
    CHECK(out[0] > 1.0);  // S^{-1} 1 > 1 pointwise for mu > 0
    double diag = 0.0, anti = 0.0;
    REQUIRE(sk_section_corners(sec, &diag, &anti) == SK_OK);
    CHECK(diag > 0.0);
    double probe = 0.0;
    REQUIRE(sk_section_resolvent(sec, 5.0, 5.0, &probe) == SK_OK);
    CHECK(probe == diag);
    sk_section_destroy(sec);
}

TEST_CASE("ladder handle and krein trajectory") {
    sk_ladder* lad = nullptr;
    REQUIRE(sk_ladder_create(0.5, 10.0, 8, 4, &lad) == SK_OK);
    const int count = sk_ladder_count(lad);
    CHECK(count == 81);
    std::vector<double> x(count), b(count), diag(count), q1(count), q2(count);
    REQUIRE(sk_ladder_copy(lad, x.data(), b.data(), diag.data(), q1.data(), q2.data()) ==
            SK_OK);
    CHECK(x[0] == 0.0);
    CHECK(b[0] == doctest::Approx(0.5));
    CHECK(q1[0] == 1.0);
    for (int i = 1; i < count; ++i) CHECK(std::abs(q1[i] * q2[i] - 0.5) < 5e-4);

    sk_trajectory* traj = nullptr;
    REQUIRE(sk_krein_integrate(lad, 1.0, 0.0, 10.0, 0, 0.0, &traj) == SK_OK);
    const int m = sk_trajectory_count(traj);
    CHECK(m > 100);
    std::vector<double> tx(m), pre(m), pim(m), sre(m), sim(m);
    REQUIRE(sk_trajectory_copy(traj, tx.data(), pre.data(), pim.data(), sre.data(),
                               sim.data()) == SK_OK);
    // conservation for real z: |P|^2 - |P*|^2 = 0
    for (int i = 0; i < m; i += 50) {
        const double dev = std::abs(pre[i] * pre[i] + pim[i] * pim[i] - sre[i] * sre[i] -
                                    sim[i] * sim[i]);
        CHECK(dev < 1e-7);
    }
    sk_trajectory_destroy(traj);

    // step too large for the table
    CHECK(sk_krein_integrate(lad, 1.0, 0.0, 10.0, 0, 0.5, &traj) == SK_ERR_STEP_SIZE);
    sk_ladder_destroy(lad);
}

TEST_CASE("closed forms through the C surface") {
    double re = 0.0, im = 0.0;
    REQUIRE(sk_pi_closed(0.5, 0.0, 2.0, &re, &im) == SK_OK);
    CHECK(re == doctest::Approx(0.7568573213843416).epsilon(1e-12));
    double qre = 0.0, qim = 0.0;
    REQUIRE(sk_pi_quadrature(0.5, 0.0, 2.0, 64, 12, &qre, &qim) == SK_OK);
    CHECK(std::abs(re - qre) < 1e-6);
    REQUIRE(sk_weyl_v(0.5, 0.0, 0.0, &re, &im) == SK_OK);
    CHECK(re == 0.0);
    CHECK(im == 0.25);
    CHECK(sk_weyl_v(0.5, 7.0, 0.0, &re, &im) == SK_ERR_CONFIG);
    const double two_pi = 6.283185307179586;
    CHECK(sk_pi_closed(0.5, two_pi, 0.0, &re, &im) == SK_ERR_BRANCH);
    REQUIRE(sk_hat_pi_closed(0.5, 0.0, 0.0, &re, &im) == SK_OK);
    CHECK(re == doctest::Approx(-0.1767766952966369).epsilon(1e-12));
}

TEST_CASE("spectral estimates through the C surface") {
    sk_ladder* lad = nullptr;
    REQUIRE(sk_ladder_create(0.5, 40.0, 8, 4, &lad) == SK_OK);
    double pi_re, pi_im, v_re, v_im, hp_re, hp_im, hp_abs;
    REQUIRE(sk_spectral_estimates(lad, 0.0, 2.0, 40.0, &pi_re, &pi_im, &v_re, &v_im, &hp_re,
                                  &hp_im, &hp_abs) == SK_OK);
    CHECK(std::abs(pi_re - 0.7568573213843416) < 1e-2);
    CHECK(std::abs(v_im - 0.3450464651513344) < 1e-2);
    CHECK(std::abs(hp_re - (-0.26115094336757455)) < 1e-2);
    CHECK(hp_abs < 0.05);
    sk_ladder_destroy(lad);
}

TEST_CASE("reports carry schema-tagged JSON") {
    sk_report* rep = nullptr;
    REQUIRE(sk_quad_report(2.0, 2, 4, &rep) == SK_OK);
    const json j = json::parse(sk_report_json(rep));
    CHECK(j["schema"] == "sinekrein-quad/1");
    CHECK(j["rows"].size() == 16);
    CHECK(sk_report_pass(rep) == -1);
    sk_report_destroy(rep);

    REQUIRE(sk_volterra_report(0.5, 6.0, 2, 8, &rep) == SK_OK);
    const json vj = json::parse(sk_report_json(rep));
    CHECK(vj["schema"] == "sinekrein-volterra/1");
    CHECK(vj["spectral_radius"].get<double>() < 0.06);
    sk_report_destroy(rep);

    const double ts[2] = {3.0, 5.0};
    const double zr[1] = {0.0}, zi[1] = {2.0};
    REQUIRE(sk_obstruction_report(0.5, ts, 2, zr, zi, 1, &rep) == SK_OK);
    const json oj = json::parse(sk_report_json(rep));
    CHECK(oj["schema"] == "sinekrein-obstruction/1");
    CHECK(oj["g_at_zero"].get<double>() == doctest::Approx(2.0));
    CHECK(oj["mismatch_ratio"].get<double>() == doctest::Approx(4.0));
    sk_report_destroy(rep);
}

TEST_CASE("suite config errors surface as config status") {
    sk_report* rep = nullptr;
    CHECK(sk_suite_run("{\"mu\": 2.0}", &rep) == SK_ERR_CONFIG);
    CHECK(sk_suite_run("not json", &rep) == SK_ERR_CONFIG);
}

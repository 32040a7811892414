#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "finite_section.hpp"
#include "krein_factor.hpp"
#include "krein_system.hpp"

using namespace sk;
namespace kf = sk::krein_factor;
namespace fsec = sk::finite_section;

TEST_CASE("reverse cholesky: identity and scalar cases") {
    CHECK(kf::reverse_cholesky(linalg::identity(4)).v.at(2, 2) == 1.0);
    linalg::Matrix a1(1);
    a1.at(0, 0) = 4.0;
    CHECK(kf::reverse_cholesky(a1).v.at(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("reverse cholesky: hand-solved 2x2 oracle") {
    linalg::Matrix a(2);
    a.at(0, 0) = 2.0;
    a.at(0, 1) = a.at(1, 0) = 1.0;
    a.at(1, 1) = 2.0;
    const auto f = kf::reverse_cholesky(a);
    // V lower, positive diagonal, V^T V = A^{-1} = (1/3)[[2,-1],[-1,2]]
    CHECK(f.v.at(0, 0) == doctest::Approx(0.7071067811865476).epsilon(1e-12));
    CHECK(f.v.at(1, 0) == doctest::Approx(-0.4082482904638630).epsilon(1e-12));
    CHECK(f.v.at(1, 1) == doctest::Approx(0.8164965809277260).epsilon(1e-12));
    CHECK(kf::reconstruction_defect(f, a) < 1e-14);
}

TEST_CASE("reverse cholesky: two build orders agree (uniqueness)") {
    fsec::Section sec(0.5, 3.0, {2, 6});
    const auto a = sec.dense_matrix();
    const auto direct = kf::reverse_cholesky(a);
    const auto flipped = kf::reverse_cholesky_via_flip(a);
    double worst = 0.0;
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j <= i; ++j)
            worst = std::max(worst, std::abs(direct.v.at(i, j) - flipped.v.at(i, j)));
    CHECK(worst < 1e-12);
    CHECK(kf::reconstruction_defect(direct, a) < 1e-10);
    CHECK_THROWS_AS(kf::reverse_cholesky([] {
                        linalg::Matrix bad(2);
                        bad.at(0, 0) = 1.0;
                        bad.at(0, 1) = bad.at(1, 0) = 3.0;
                        bad.at(1, 1) = 1.0;
                        return bad;
                    }()),
                    NumericalError);
}

TEST_CASE("triangularity cut test") {
    const auto id = linalg::identity(5);
    const auto rep = kf::is_lower_triangular(id, 0.0);
    CHECK(rep.lower);
    CHECK(rep.worst_violation == 0.0);
    CHECK(rep.first_cut == -1);

    linalg::Matrix shift(5);
    for (int i = 0; i + 1 < 5; ++i) shift.at(i, i + 1) = 1.0;
    const auto rep2 = kf::is_lower_triangular(shift, 0.0);
    CHECK_FALSE(rep2.lower);
    CHECK(rep2.first_cut == 1);
    CHECK(rep2.worst_violation == 1.0);

    fsec::Section sec(0.5, 2.0, {2, 5});
    const auto f = kf::reverse_cholesky(sec.dense_matrix());
    CHECK(kf::is_lower_triangular(f.v.dense(), 0.0).lower);
    // A^{-1} itself is a full matrix for mu > 0
    const auto vd = f.v.dense();
    const auto ainv = linalg::multiply(linalg::transpose(vd), vd);
    CHECK_FALSE(kf::is_lower_triangular(ainv, 1e-6).lower);
}

TEST_CASE("factor kernel matches the independent resolvent ladder") {
    // At the default grid the identification error is first order in the
    // panel width; the convergence study pins 1.3e-3 at {2,10} and a clean
    // halving at {4,10}.
    fsec::Section sec(0.5, 10.0, {2, 10});
    const auto f = kf::reverse_cholesky(sec.dense_matrix());
    const auto cmp = kf::factor_vs_resolvent(sec, f);
    CHECK(cmp.pairs_checked > 10000);
    CHECK(cmp.max_rel_error < 1.5e-3);
    // error decreases under grid refinement and meets 1e-3 at ppu = 4
    fsec::Section fine(0.5, 10.0, {4, 10});
    const auto ff = kf::reverse_cholesky(fine.dense_matrix());
    const auto cmp_fine = kf::factor_vs_resolvent(fine, ff);
    CHECK(cmp_fine.max_rel_error < cmp.max_rel_error);
    CHECK(cmp_fine.max_rel_error < 1e-3);
}

TEST_CASE("factor kernel at mu = 0 vanishes") {
    fsec::Section sec(0.0, 4.0, {2, 6});
    const auto f = kf::reverse_cholesky(sec.dense_matrix());
    for (int i = 0; i < sec.size(); ++i) {
        CHECK(f.v.at(i, i) == doctest::Approx(1.0).epsilon(1e-14));
        for (int j = 0; j < i; ++j) CHECK(std::abs(f.v.at(i, j)) < 1e-14);
    }
}

TEST_CASE("q functions: trivial and limit values") {
    // mu = 0: q1 = 1, q2 = 1/2
    const auto trivial = kf::q_functions(0.0, {1.0, 3.0}, {2, 8});
    for (size_t i = 0; i < trivial.xs.size(); ++i) {
        CHECK(trivial.q1[i] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(trivial.q2[i] == doctest::Approx(0.5).epsilon(1e-12));
    }
    // q1(30) -> 1/sqrt(1-mu)
    const auto pair50 = kf::q_functions(0.5, {30.0}, {2, 10});
    CHECK(std::abs(pair50.q1[0] - std::sqrt(2.0)) < 0.01);
    const auto pair75 = kf::q_functions(0.75, {30.0}, {2, 10});
    CHECK(std::abs(pair75.q1[0] - 2.0) < 0.02);
    CHECK(pair50.max_product_defect() < 5e-4);
    CHECK_THROWS_AS(kf::q_functions(0.5, {-1.0}), ConfigError);
}

TEST_CASE("ladder q pair agrees with per-section q functions") {
    fsec::IncrementalLadder ladder(0.5, 8.0, 4, 8);
    const auto from_ladder = kf::q_pair_from_ladder(ladder);
    const auto direct = kf::q_functions(0.5, {2.0, 5.0, 8.0}, {4, 8});
    for (size_t d = 0; d < direct.xs.size(); ++d) {
        for (size_t k = 0; k < from_ladder.xs.size(); ++k) {
            if (std::abs(from_ladder.xs[k] - direct.xs[d]) < 1e-12) {
                CHECK(from_ladder.q1[k] == doctest::Approx(direct.q1[d]).epsilon(1e-10));
                CHECK(from_ladder.q2[k] == doctest::Approx(direct.q2[d]).epsilon(1e-10));
            }
        }
    }
    CHECK(from_ladder.max_product_defect() < 5e-4);
}

TEST_CASE("q1 equals the exponential of the cumulative coefficient integral") {
    fsec::IncrementalLadder ladder(0.5, 25.0, 8, 5);
    const auto check = kf::krein_exponential_check(ladder, 25.0);
    CHECK(check.max_deviation < 1e-3);
    CHECK(check.tail_variation < 1e-2);
    // mu = 0: both sides identically 1
    fsec::IncrementalLadder trivial(0.0, 4.0, 8, 4);
    CHECK(kf::krein_exponential_check(trivial, 4.0).max_deviation == 0.0);
}

TEST_CASE("factorization scalar table: M, M-prime, R") {
    fsec::IncrementalLadder ladder(0.5, 12.0, 4, 8);
    const auto table = kf::factorization_scalars(ladder, 1.0, 12.0, 0.25);
    CHECK(table.m_prime_positive);
    for (const auto& row : table.rows) {
        CHECK(row.m > 0.0);
        CHECK(row.m_consistency < 1e-8);
        if (std::isfinite(row.m_prime)) {
            CHECK(row.m_prime > 0.0);
            CHECK(row.r == doctest::Approx(std::sqrt(row.m_prime)).epsilon(1e-14));
        }
    }
    // M grows roughly linearly with slope near (S^{-1}1)(mid) in (1, 1/(1-mu))
    const auto& rows = table.rows;
    CHECK(rows.back().m > rows.front().m);

    // Richardson option refines the central difference without changing the
    // structure; both stencils agree to the FD error scale.
    const auto rich = kf::factorization_scalars(ladder, 1.0, 12.0, 0.25, true);
    CHECK(rich.m_prime_positive);
    for (size_t i = 0; i < rows.size(); ++i) {
        if (!std::isfinite(rich.rows[i].m_prime) || !std::isfinite(rows[i].m_prime))
            continue;
        CHECK(std::abs(rich.rows[i].m_prime - rows[i].m_prime) < 2e-2);
    }
}

TEST_CASE("factorization scalars at mu -> 0: M(xi) ~ xi, M' ~ 1, R ~ 1") {
    fsec::IncrementalLadder ladder(1e-9, 4.0, 4, 6);
    const auto table = kf::factorization_scalars(ladder, 1.0, 4.0, 0.25);
    for (const auto& row : table.rows) {
        CHECK(row.m == doctest::Approx(row.xi).epsilon(1e-6));
        if (std::isfinite(row.m_prime)) {
            CHECK(row.m_prime == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(row.r == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
}

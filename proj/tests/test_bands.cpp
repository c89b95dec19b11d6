#include <doctest.h>

#include <cmath>
#include <random>

#include "graphnls/bands.hpp"
#include "graphnls/special.hpp"

using namespace graphnls;

namespace {

GraphGrid one_cell(double L1, double L2, int pts = 30) {
    MetricGraphSpec s;
    s.topology = Topology::necklace;
    s.L1 = L1;
    s.L2 = L2;
    s.n_cells = 1;
    s.pts_per_edge = pts;
    return build_necklace(s);
}

} // namespace

TEST_CASE("flat band frequencies") {
    CHECK(flat_band_frequency(1, M_PI) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(flat_band_frequency(2, 0.5 * M_PI) == doctest::Approx(16.0).epsilon(1e-14));
    CHECK(flat_band_frequency(3, M_PI) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK_THROWS_AS(flat_band_frequency(1, 0.0), error);
}

TEST_CASE("monodromy trace identities") {
    // degenerate product at L2 = 0
    for (double w : {0.3, 1.7, 9.2})
        CHECK(trace_monodromy(w, 2.0 * M_PI, 0.0) ==
              doctest::Approx(2.0 * std::cos(2.0 * M_PI * std::sqrt(w))).epsilon(1e-13));
    CHECK(trace_monodromy(0.0, 1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(trace_monodromy(1.0, M_PI, M_PI) == doctest::Approx(2.0).epsilon(1e-12));

    std::mt19937 rng(777);
    std::uniform_real_distribution<double> dist(-5.0, 50.0);
    for (int i = 0; i < 100; ++i) {
        double w = dist(rng);
        MonodromyMatrix m = build_monodromy(w, M_PI, M_PI);
        // for w < 0 the entries grow like cosh(2 pi sqrt(-w)), so the unit
        // determinant only holds to roundoff relative to that scale
        double scale = std::max(1.0, m.M.squaredNorm());
        CHECK(std::abs(m.M.determinant() - 1.0) <= 1e-12 * scale);
        CHECK(std::abs(m.M.trace() - trace_monodromy(w, M_PI, M_PI)) <= 2e-12 * scale);
        if (w >= 0.0) CHECK(std::abs(m.M.determinant() - 1.0) <= 1e-12);
    }
}

TEST_CASE("characteristic equation roots") {
    // homogeneous: omega = (k + ell)^2
    CHECK(band_frequency(0.25, 1, 2.0 * M_PI, 0.0) == doctest::Approx(0.0625).epsilon(1e-10));
    CHECK(band_frequency(0.25, 2, 2.0 * M_PI, 0.0) ==
          doctest::Approx(0.5625).epsilon(1e-10)); // (-1 + 1/4)^2
    // symmetric necklace, lowest band at the zone center and edge
    CHECK(band_frequency(0.0, 1, M_PI, M_PI) == doctest::Approx(0.0).epsilon(1e-12));
    double w_edge = band_frequency(-0.5, 1, M_PI, M_PI);
    double w_oracle = std::pow(std::acos(-7.0 / 9.0) / (2.0 * M_PI), 2);
    CHECK(w_edge == doctest::Approx(w_oracle).epsilon(1e-10));
    // residual certificate
    CHECK(std::abs(char_F(-0.5, w_edge, M_PI)) <= 1e-10);
    // normalization guard
    CHECK_THROWS_AS(band_frequency(0.1, 1, 7.0, 1.0), error);
}

TEST_CASE("closed gaps at the zone center enumerate as double roots") {
    // L1 = L2 = pi: cos(2 pi sqrt(w)) = 1 at w = k^2 touches the trace bound
    double w2 = band_frequency(0.0, 2, M_PI, M_PI);
    double w3 = band_frequency(0.0, 3, M_PI, M_PI);
    CHECK(w2 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(w3 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("band derivatives") {
    // homogeneous lowest band: omega = ell^2
    for (double ell : {0.1, 0.25, 0.4}) {
        double w = band_frequency(ell, 1, 2.0 * M_PI, 0.0);
        auto [d1, d2] = band_derivatives(ell, w, 2.0 * M_PI, 0.0);
        CHECK(d1 == doctest::Approx(2.0 * ell).epsilon(1e-9));
        CHECK(d2 == doctest::Approx(2.0).epsilon(1e-9));
    }
    // reference digits for the symmetric necklace
    double ell0 = 0.3437067837;
    double w0 = band_frequency(ell0, 1, M_PI, M_PI);
    auto [d1, d2] = band_derivatives(ell0, w0, M_PI, M_PI);
    CHECK(std::abs(d1 - 0.5) <= 1e-6);
    CHECK(std::abs(d2 - 0.2229344892) <= 1e-6);

    // finite-difference cross-check
    for (double ell : {0.2, 0.3437067837, 0.45}) {
        double h = 1e-4;
        double wp = band_frequency(ell + h, 1, M_PI, M_PI);
        double wm = band_frequency(ell - h, 1, M_PI, M_PI);
        double wc = band_frequency(ell, 1, M_PI, M_PI);
        auto [a1, a2] = band_derivatives(ell, wc, M_PI, M_PI);
        CHECK(a1 == doctest::Approx((wp - wm) / (2 * h)).epsilon(1e-5));
        CHECK(a2 == doctest::Approx((wp - 2 * wc + wm) / (h * h)).epsilon(1e-4));
    }

    // odd symmetry of omega'
    for (double ell : {0.11, 0.29, 0.41}) {
        double wp = band_frequency(ell, 1, M_PI, M_PI);
        double wm = band_frequency(-ell, 1, M_PI, M_PI);
        auto dp = band_derivatives(ell, wp, M_PI, M_PI).first;
        auto dm = band_derivatives(-ell, wm, M_PI, M_PI).first;
        CHECK(std::abs(dp + dm) <= 1e-8);
    }
}

TEST_CASE("band evenness and periodicity") {
    for (int b : {1, 2}) {
        for (double ell : {0.05, 0.17, 0.33, 0.42}) {
            double wp = band_frequency(ell, b, 1.5 * M_PI, 0.5 * M_PI);
            double wm = band_frequency(-ell, b, 1.5 * M_PI, 0.5 * M_PI);
            double wper = band_frequency(ell + 1.0, b, 1.5 * M_PI, 0.5 * M_PI);
            CHECK(std::abs(wp - wm) <= 1e-10);
            CHECK(std::abs(wp - wper) <= 1e-10);
        }
    }
}

TEST_CASE("speed equation") {
    CHECK(solve_ell_for_speed(0.5, 1, 2.0 * M_PI, 0.0) == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(std::abs(solve_ell_for_speed(0.5, 1, M_PI, M_PI) - 0.3437067837) <= 1e-6);
    CHECK(solve_ell_for_speed(0.0, 1, M_PI, M_PI) == 0.0);
    CHECK_THROWS_AS(solve_ell_for_speed(50.0, 1, M_PI, M_PI), error);
}

TEST_CASE("bloch eigenfunction: homogeneous plane wave") {
    GraphGrid cell = one_cell(2.0 * M_PI, 0.0);
    double ell = 0.25;
    double w = band_frequency(ell, 1, 2.0 * M_PI, 0.0);
    BlochMode mode = bloch_eigenfunction(ell, w, cell);
    for (int i = 0; i < cell.size(); ++i)
        CHECK(std::abs(std::abs(mode.f(i)) - 1.0) <= 1e-9);
    CHECK(gamma_coefficient(mode, cell) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bloch eigenfunction: vertex conditions and quasi-periodicity") {
    GraphGrid cell = one_cell(M_PI, M_PI);
    double ell = 0.3437067837;
    double w = band_frequency(ell, 1, M_PI, M_PI);
    BlochMode mode = bloch_eigenfunction(ell, w, cell);

    // analytic derivatives of the trigonometric representation
    auto wseg = [&](double x) {
        return mode.a * cos_sqrt(w, x) + mode.b * sinc_sqrt(w, x);
    };
    auto dseg = [&](double x) {
        return -mode.a * w * sinc_sqrt(w, x) + mode.b * cos_sqrt(w, x);
    };
    auto wsemi = [&](double u) {
        return mode.c * cos_sqrt(w, u) + mode.d * sinc_sqrt(w, u);
    };
    auto dsemi = [&](double u) {
        return -mode.c * w * sinc_sqrt(w, u) + mode.d * cos_sqrt(w, u);
    };

    double L1 = M_PI, L2 = M_PI;
    // continuity and flux balance at the joint
    CHECK(std::abs(wseg(L1) - wsemi(0.0)) <= 1e-8);
    CHECK(std::abs(dseg(L1) - 2.0 * dsemi(0.0)) <= 1e-8);
    // quasi-periodicity across the cell: w(2 pi) = mu * w(0), flux matches
    cplx mu = std::exp(cplx(0.0, 2.0 * M_PI * ell));
    CHECK(std::abs(wsemi(L2) - mu * wseg(0.0)) <= 1e-8);
    CHECK(std::abs(2.0 * dsemi(L2) - mu * dseg(0.0)) <= 1e-8);

    // normalization: sup |f| = 1, real-positive at the symmetry node
    CHECK(mode.f.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mode.f(cell.x0_node).imag() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mode.f(cell.x0_node).real() > 0.0);

    // off-band point is rejected
    CHECK_THROWS_AS(bloch_eigenfunction(0.1, w, cell), error);
}

TEST_CASE("gamma invariance of the pulse amplitude") {
    GraphGrid cell = one_cell(M_PI, M_PI);
    double ell = 0.3437067837;
    double w = band_frequency(ell, 1, M_PI, M_PI);
    BlochMode mode = bloch_eigenfunction(ell, w, cell);
    double gamma = gamma_coefficient(mode, cell);

    // rescale f by alpha: gamma scales by alpha^2, f/sqrt(gamma) is unchanged
    BlochMode scaled = mode;
    double alpha = 2.3;
    scaled.f *= alpha;
    double gamma2 = gamma_coefficient(scaled, cell);
    CHECK(gamma2 == doctest::Approx(alpha * alpha * gamma).epsilon(1e-12));
    Eigen::VectorXcd u1 = mode.f / std::sqrt(gamma);
    Eigen::VectorXcd u2 = scaled.f / std::sqrt(gamma2);
    CHECK((u1 - u2).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("ladder band formulas") {
    CHECK(ladder_band(0.0, 0, LadderFamily::symmetric, true) == doctest::Approx(0.0));
    CHECK(ladder_band(M_PI, 0, LadderFamily::antisymmetric) ==
          doctest::Approx(M_PI * M_PI).epsilon(1e-12));
    double t = std::acosh(3.0);
    CHECK(ladder_band(0.0, 0, LadderFamily::lowest) == doctest::Approx(-t * t).epsilon(1e-12));
    CHECK(ladder_band(0.0, 1, LadderFamily::flat) ==
          doctest::Approx(9.0 * M_PI * M_PI).epsilon(1e-12));
    CHECK_THROWS_AS(ladder_band(2.0, 0, LadderFamily::symmetric), error);
    CHECK_THROWS_AS(ladder_band(0.3, 0, LadderFamily::antisymmetric), error);
}

TEST_CASE("fd oracle: homogeneous plane-wave eigenvalue") {
    auto coarse = fd_bloch_eigs_necklace(2.0 * M_PI, 0.0, 0.25, 1, 40);
    auto fine = fd_bloch_eigs_necklace(2.0 * M_PI, 0.0, 0.25, 1, 80);
    REQUIRE(!coarse.empty());
    REQUIRE(!fine.empty());
    double e1 = std::abs(coarse[0] - 0.0625), e2 = std::abs(fine[0] - 0.0625);
    CHECK(e1 <= 1e-3);
    CHECK(e1 / e2 > 2.8);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("fd oracle vs trace equation on the necklace") {
    double ell = 0.3;
    double w_exact = band_frequency(ell, 1, M_PI, M_PI);
    auto coarse = fd_bloch_eigs_necklace(M_PI, M_PI, ell, 1, 30);
    auto fine = fd_bloch_eigs_necklace(M_PI, M_PI, ell, 1, 60);
    REQUIRE(!coarse.empty());
    double e1 = std::abs(coarse[0] - w_exact), e2 = std::abs(fine[0] - w_exact);
    CHECK(e1 / e2 > 2.8);
    CHECK(e1 / e2 < 5.5);
}

TEST_CASE("fd oracle sees the flat bands") {
    // flat modes are ell-independent; at L2 = pi the first sits at omega = 1
    auto eigs = fd_bloch_eigs_necklace(M_PI, M_PI, 0.3, 4, 40);
    double best = 1e9;
    for (double w : eigs) best = std::min(best, std::abs(w - 1.0));
    CHECK(best <= 5e-3);
}

TEST_CASE("fd oracle: ladder lowest band is negative") {
    double w_exact = ladder_band(0.0, 0, LadderFamily::lowest);
    auto coarse = fd_bloch_eigs_ladder(1.0, 1.0, 0.0, 1, 30);
    auto fine = fd_bloch_eigs_ladder(1.0, 1.0, 0.0, 1, 60);
    REQUIRE(!coarse.empty());
    REQUIRE(!fine.empty());
    CHECK(std::abs(coarse[0] - w_exact) <= 5e-3);
    double e1 = std::abs(coarse[0] - w_exact), e2 = std::abs(fine[0] - w_exact);
    CHECK(e1 / e2 > 2.8);
    CHECK(e1 / e2 < 5.5);
}

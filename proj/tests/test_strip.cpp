#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "hopfloq/strip.hpp"

using namespace hopfloq;

namespace {

const DriveProtocol kPiecewiseTrivial = PiecewiseDrive{-10.0, -5.0, 0.1, 1.0};
const DriveProtocol kPiecewiseNontrivial = PiecewiseDrive{-10.0, -2.0, 0.1, 1.0};
const DriveProtocol kHarmonicNontrivial = HarmonicDrive{-2.0, 4.0};

Eigen::VectorXd eigenvalues(const StripHamiltonian& h) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h.matrix).eigenvalues();
}

double min_abs_eigenvalue(const StripHamiltonian& h) {
    const Eigen::VectorXd ev = eigenvalues(h);
    double m = std::abs(ev(0));
    for (int i = 1; i < ev.size(); ++i) m = std::min(m, std::abs(ev(i)));
    return m;
}

}  // namespace

TEST_CASE("single-site strip keeps only the on-site block") {
    const StripHamiltonian h = build_strip_static(-10.0, 0.0, 1, 0.0);
    REQUIRE(h.matrix.rows() == 2);
    // (mu + cos k2) sigma_z at k2 = 0: the cos k1 couplings need a hop partner
    CHECK(std::abs(h.matrix(0, 0) - Complex(-9.0, 0.0)) < 1e-14);
    CHECK(std::abs(h.matrix(1, 1) - Complex(9.0, 0.0)) < 1e-14);
    CHECK(std::abs(h.matrix(0, 1)) < 1e-14);
}

TEST_CASE("strip builders return Hermitian matrices") {
    for (const double k2 : {0.3, 2.0, 5.1}) {
        const StripHamiltonian a = build_strip_static(-2.0, 0.7, 20, k2);
        CHECK((a.matrix - a.matrix.adjoint()).norm() < 1e-12);
        const StripHamiltonian b = flat_strip_hamiltonian(-5.0, kPi, 20, k2);
        CHECK((b.matrix - b.matrix.adjoint()).norm() < 1e-12);
    }
}

TEST_CASE("open-strip spectrum of the gapped static model stays in the bulk bands") {
    const double mu = -10.0, k2 = 1.3;
    double bulk_min = 1e300, bulk_max = 0.0;
    for (int i = 0; i < 4096; ++i) {
        const double a = h_vector(Momentum2(kTwoPi * i / 4096, k2), mu).norm();
        bulk_min = std::min(bulk_min, a);
        bulk_max = std::max(bulk_max, a);
    }
    const Eigen::VectorXd ev = eigenvalues(build_strip_static(mu, 0.0, 40, k2));
    for (int i = 0; i < ev.size(); ++i) {
        CHECK(std::abs(ev(i)) <= bulk_max + 1e-9);
        CHECK(std::abs(ev(i)) >= 0.9 * bulk_min);
    }
}

TEST_CASE("flatten_strip: spectrum, idempotence, commutation, -I exponential") {
    const double eps0 = kPi / 0.9;
    const StripHamiltonian h = build_strip_static(-5.0, 0.0, 24, 0.7);
    const StripHamiltonian f = flatten_strip(h, eps0);

    const Eigen::VectorXd ev = eigenvalues(f);
    for (int i = 0; i < ev.size(); ++i)
        CHECK(std::abs(std::abs(ev(i)) - eps0) < 1e-9);

    const StripHamiltonian ff = flatten_strip(f, eps0);
    CHECK((ff.matrix - f.matrix).norm() < 1e-9);
    CHECK((f.matrix * h.matrix - h.matrix * f.matrix).norm() < 1e-9);

    // over the flat window the exponential collapses to a global sign
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(f.matrix);
    const Eigen::VectorXcd ph =
        (Complex(0.0, -0.9) * es.eigenvalues().array()).exp().matrix();
    const Eigen::MatrixXcd u =
        es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    CHECK((u + Eigen::MatrixXcd::Identity(48, 48)).norm() < 1e-9);

    // gap guard: the mu = -2 strip carries a machine-exact zero eigenvalue
    // pinned at k2 = 0 once Nx is large enough (5.4e-15 at Nx = 60)
    const StripHamiltonian g = build_strip_static(-2.0, 0.0, 60, 0.0);
    CHECK_THROWS_AS(flatten_strip(g, eps0), GapClosingError);
}

TEST_CASE("truncated flat model: trivial stays flat, nontrivial grows an edge branch") {
    const double eps0 = kPi / 0.9;
    // Chern-0 flat band: truncation corrections are exponentially small
    double trivial_min = 1e300;
    double nontrivial_min = 1e300;
    for (const double k2 : {0.3, 1.1, 1.9, 2.7, 3.5, 4.3, 5.1, 5.9}) {
        trivial_min = std::min(trivial_min,
                               min_abs_eigenvalue(flat_strip_hamiltonian(-5.0, eps0, 40, k2)));
        nontrivial_min = std::min(nontrivial_min,
                                  min_abs_eigenvalue(flat_strip_hamiltonian(-2.0, eps0, 40, k2)));
    }
    CHECK(trivial_min > 0.8 * eps0);
    // the chiral edge branch of the Chern -1 band sweeps (-eps0, eps0)
    CHECK(nontrivial_min < 0.3 * eps0);
}

TEST_CASE("strip propagators are unitary") {
    for (const double k2 : {0.4, 3.9}) {
        const Eigen::MatrixXcd up = strip_period_unitary(kPiecewiseNontrivial, 60, k2);
        CHECK((up * up.adjoint() - Eigen::MatrixXcd::Identity(120, 120)).norm() < 1e-9);
        const Eigen::MatrixXcd uh = strip_period_unitary(kHarmonicNontrivial, 20, k2);
        CHECK((uh * uh.adjoint() - Eigen::MatrixXcd::Identity(40, 40)).norm() < 1e-8);
    }
}

TEST_CASE("t0 -> 0 limit of the trivial piecewise strip unitary is -identity") {
    const DriveProtocol d = PiecewiseDrive{-10.0, -5.0, 1e-3, 1.0};
    const int Nx = 30;
    const Eigen::MatrixXcd u = strip_period_unitary(d, Nx, 2.2);
    CHECK((u + Eigen::MatrixXcd::Identity(2 * Nx, 2 * Nx)).norm() /
              std::sqrt(2.0 * Nx) <
          0.05);
}

TEST_CASE("spectrum table: shape, zone bounds, ascending columns") {
    const SpectrumTable t = quasienergy_spectrum(kPiecewiseTrivial, 20, 9);
    REQUIRE(static_cast<int>(t.rows.size()) == 9 * 40);
    const double zone = kPi / t.period;
    for (int c = 0; c < 9; ++c)
        for (int b = 0; b < 40; ++b) {
            const SpectrumRow& r = t.rows[static_cast<std::size_t>(c) * 40 + b];
            CHECK(r.quasienergy > -zone - 1e-12);
            CHECK(r.quasienergy <= zone + 1e-12);
            CHECK(r.band == b);
            if (b > 0)
                CHECK(r.quasienergy >=
                      t.rows[static_cast<std::size_t>(c) * 40 + b - 1].quasienergy);
            CHECK(r.w_left >= 0.0);
            CHECK(r.w_right >= 0.0);
            CHECK(r.w_left + r.w_right <= 1.0 + 1e-9);
        }
}

TEST_CASE("spectrum is symmetric under k2 -> -k2") {
    // the half-offset grid pairs column c with column N-1-c
    const int n = 12, Nx = 24;
    const SpectrumTable t = quasienergy_spectrum(kPiecewiseNontrivial, Nx, n);
    const int m = 2 * Nx;
    for (int c = 0; c < n / 2; ++c) {
        const int cr = n - 1 - c;
        for (int b = 0; b < m; ++b)
            CHECK(std::abs(t.rows[static_cast<std::size_t>(c) * m + b].quasienergy -
                           t.rows[static_cast<std::size_t>(cr) * m + b].quasienergy) < 1e-8);
    }
}

TEST_CASE("edge modes: nontrivial drive crosses both gaps with one chirality") {
    const SpectrumTable t = quasienergy_spectrum(kPiecewiseNontrivial, 60, 81);
    const double zone = kPi / t.period;
    const double window = 0.15 * zone;

    for (const double center : {0.0, zone}) {
        const std::vector<EdgeMode> modes = edge_modes(t, center, window);
        CHECK(!modes.empty());
        double left = 0.0, right = 0.0;
        int nleft = 0, nright = 0;
        for (const EdgeMode& e : modes) {
            if (!e.has_velocity) continue;
            if (e.side < 0) { left += e.velocity; ++nleft; }
            else { right += e.velocity; ++nright; }
        }
        REQUIRE(nleft > 0);
        REQUIRE(nright > 0);
        // opposite edges counter-propagate within each gap
        CHECK(left * right < 0.0);
    }

    // equal chirality across the two gaps: the left-edge branch runs the same
    // way near 0 and near pi/T (the anomalous signature)
    auto left_mean = [&](double center) {
        double s = 0.0;
        int n = 0;
        for (const EdgeMode& e : edge_modes(t, center, window))
            if (e.has_velocity && e.side < 0) { s += e.velocity; ++n; }
        return s / n;
    };
    CHECK(left_mean(0.0) * left_mean(zone) > 0.0);
}

TEST_CASE("trivial drive has no in-gap edge modes") {
    const SpectrumTable t = quasienergy_spectrum(kPiecewiseTrivial, 60, 41);
    const double zone = kPi / t.period;
    CHECK(edge_modes(t, 0.0, 0.15 * zone).empty());
    CHECK(edge_modes(t, zone, 0.15 * zone).empty());
}

TEST_CASE("edge profile of the nontrivial gap-0 mode decays into the bulk") {
    const EdgeProfile p = edge_profile(kPiecewiseNontrivial, 60, 41, 0.0, 0.15 * kPi);
    REQUIRE(static_cast<int>(p.probability.size()) == 60);
    CHECK(p.localization_length > 0.0);
    CHECK(p.localization_length < 15.0);
    // probability normalized, concentrated on the claimed side
    double total = 0.0;
    for (double q : p.probability) total += q;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    const int w = default_edge_window(60);
    double edge = 0.0;
    for (int x = 0; x < w; ++x)
        edge += p.probability[p.side < 0 ? x : 59 - x];
    CHECK(edge > 0.8);
}

TEST_CASE("no edge mode to profile in the trivial drive") {
    CHECK_THROWS_AS(edge_profile(kPiecewiseTrivial, 60, 21, 0.0, 0.15 * kPi), NoEdgeModeError);
}

TEST_CASE("localization study: finite lengths, delocalization toward t0 -> T") {
    const PiecewiseDrive base{-10.0, -2.0, 0.1, 1.0};
    const auto pts = localization_study(base, {0.1, 0.7, 0.85}, 60, 121);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].t0 == doctest::Approx(0.1));
    for (const LocalizationPoint& p : pts) {
        CHECK(p.xi > 0.0);
        CHECK(p.xi < 30.0);
    }
    // the gap-0 edge state spreads out as t0 approaches the period...
    CHECK(pts[2].xi > 2.0 * pts[1].xi);
    // ...and past t0 ~ 0.9 nothing in the window clears the edge-weight bar
    CHECK_THROWS_AS(
        localization_study(base, {0.9}, 60, 121),
        NoEdgeModeError);
}

TEST_CASE("strip quasienergies are alpha-independent") {
    const std::vector<double> alphas{0.0, 1.3, 2.9, 4.4};
    CHECK(alpha_flatness_check(kPiecewiseNontrivial, 24, 0.9, alphas) < 1e-7);
}

TEST_CASE("spectrum rejects undersized inputs") {
    CHECK_THROWS_AS(quasienergy_spectrum(kPiecewiseTrivial, 4, 8), ConfigError);
    CHECK_THROWS_AS(quasienergy_spectrum(kPiecewiseTrivial, 20, 1), ConfigError);
}

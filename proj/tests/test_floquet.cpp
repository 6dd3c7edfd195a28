#include <random>

#include "doctest.h"
#include "hopfloq/floquet.hpp"

using namespace hopfloq;

namespace {

const DriveProtocol kPiecewiseTrivial = PiecewiseDrive{-10.0, -5.0, 0.1, 1.0};
const DriveProtocol kPiecewiseNontrivial = PiecewiseDrive{-10.0, -2.0, 0.1, 1.0};
const DriveProtocol kHarmonic = HarmonicDrive{-10.0, 12.0};

Momentum2 random_k(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    const double a = u(rng);
    const double b = u(rng);
    return Momentum2(a, b);
}

/// Generic midpoint stepping, independent of the exact-segment shortcut.
Unitary2 midpoint_reference(const DriveProtocol& d, const Momentum2& k, double t0,
                            double t1, int n) {
    Unitary2 u = Unitary2::Identity();
    const double dt = (t1 - t0) / n;
    for (int i = 0; i < n; ++i)
        u = step_exponential(hamiltonian_at(d, k, t0 + (i + 0.5) * dt), dt) * u;
    return u;
}

}  // namespace

TEST_CASE("step_exponential on closed-form cases") {
    const Unitary2 a = step_exponential({0.0, 0.0, 1.0}, kPi / 2.0);
    CHECK(std::abs(a(0, 0) - Complex(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(a(1, 1) - Complex(0.0, 1.0)) < 1e-14);
    CHECK(std::abs(a(0, 1)) < 1e-14);

    const Unitary2 b = step_exponential({0.0, 0.0, 0.0}, 17.0);
    CHECK((b - Unitary2::Identity()).norm() < 1e-15);

    // flat segment: exp(-i pi n.sigma) = -I for any unit axis
    const double t0 = 0.1, T = 1.0, eps0 = kPi / (T - t0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int it = 0; it < 20; ++it) {
        Vec3 n{u(rng), u(rng), u(rng)};
        if (n.norm() < 1e-2) continue;
        n = n / n.norm();
        const Unitary2 c = step_exponential(n * eps0, T - t0);
        CHECK((c + Unitary2::Identity()).norm() < 1e-12);
    }
}

TEST_CASE("propagate: piecewise one-period product is (-1) exp(-i t0 H1)") {
    std::mt19937 rng(11);
    for (int it = 0; it < 10; ++it) {
        const Momentum2 k = random_k(rng);
        const Unitary2 u = propagate(kPiecewiseTrivial, k, 0.0, 1.0, 1);
        const Unitary2 ref = -step_exponential(h_vector(k, -10.0), 0.1);
        CHECK((u - ref).norm() < 1e-12);
    }
}

TEST_CASE("propagate: vanishing interval gives identity") {
    const Momentum2 k(1.0, 2.0);
    CHECK((propagate(kPiecewiseTrivial, k, 0.3, 0.3, 4) - Unitary2::Identity()).norm() < 1e-10);
    CHECK((propagate(kHarmonic, k, 0.1, 0.1 + 1e-13, 4) - Unitary2::Identity()).norm() < 1e-10);
}

TEST_CASE("propagate: harmonic self-convergence between 2^12 and 2^13 steps") {
    const Momentum2 k(0.0, 0.0);
    const double T = drive_period(kHarmonic);
    const Unitary2 a = propagate(kHarmonic, k, 0.0, T, 1 << 12);
    const Unitary2 b = propagate(kHarmonic, k, 0.0, T, 1 << 13);
    auto ea = unitary_eigensystem(a), eb = unitary_eigensystem(b);
    std::array<double, 2> pa = ea.phase, pb = eb.phase;
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    for (int i = 0; i < 2; ++i)
        CHECK(std::abs(wrap_pm_pi(pa[i] - pb[i])) < 1e-9);
}

TEST_CASE("propagate_adaptive throws NonConvergence at a tiny cap") {
    PropagateOptions opts;
    opts.initial_steps = 1;
    opts.max_steps = 2;
    opts.phase_tol = 1e-15;
    CHECK_THROWS_AS(
        propagate_adaptive(kHarmonic, Momentum2(1.0, 1.0), 0.0, drive_period(kHarmonic), opts),
        NonConvergenceError);
}

TEST_CASE("micromotion unitary basics") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    const Momentum2 k = random_k(rng);
    const double a = ua(rng);
    CHECK((micromotion_unitary(kPiecewiseNontrivial, k, a, a) - Unitary2::Identity()).norm() <
          1e-12);

    const Unitary2 full = micromotion_unitary(kPiecewiseNontrivial, k, 0.0, kTwoPi);
    const Unitary2 one = propagate(kPiecewiseNontrivial, k, 0.0, 1.0, 1);
    CHECK((full - one).norm() < 1e-12);

    // reversed arguments give the adjoint
    const Unitary2 fwd = micromotion_unitary(kPiecewiseNontrivial, k, 0.3, 2.1);
    const Unitary2 bwd = micromotion_unitary(kPiecewiseNontrivial, k, 2.1, 0.3);
    CHECK((fwd.adjoint() - bwd).norm() < 1e-12);
}

TEST_CASE("conjugation identity: e^{-iH_F(a1)T} = U^dag e^{-iH_F(a2)T} U") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    PropagateOptions tight;
    tight.phase_tol = 1e-11;
    for (const DriveProtocol& d : {kPiecewiseNontrivial, kHarmonic}) {
        const double T = drive_period(d);
        const double omega = kTwoPi / T;
        for (int it = 0; it < 5; ++it) {
            const Momentum2 k = random_k(rng);
            const double a1 = ua(rng), a2 = ua(rng);
            const Unitary2 u1 = propagate_adaptive(d, k, a1 / omega, a1 / omega + T, tight);
            const Unitary2 u2 = propagate_adaptive(d, k, a2 / omega, a2 / omega + T, tight);
            const Unitary2 w = micromotion_unitary(d, k, a1, a2, tight);
            CHECK((u1 - w.adjoint() * u2 * w).norm() < 1e-8);
        }
    }
}

TEST_CASE("alpha-spectrum invariance of the effective Hamiltonian") {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    for (const DriveProtocol& d : {kPiecewiseNontrivial, kHarmonic}) {
        for (int it = 0; it < 5; ++it) {
            const Momentum2 k = random_k(rng);
            const EffectiveHamiltonian h1 = effective_hamiltonian(d, k, ua(rng));
            const EffectiveHamiltonian h2 = effective_hamiltonian(d, k, ua(rng));
            CHECK(std::abs(h1.eigenphase[0] - h2.eigenphase[0]) < 1e-8);
            CHECK(std::abs(h1.eigenphase[1] - h2.eigenphase[1]) < 1e-8);
        }
    }
}

TEST_CASE("conjugation identity on H_F itself (same branch both sides)") {
    std::mt19937 rng(43);
    std::uniform_real_distribution<double> ua(0.0, kTwoPi);
    for (int it = 0; it < 5; ++it) {
        const Momentum2 k = random_k(rng);
        const double a1 = ua(rng), a2 = ua(rng);
        const EffectiveHamiltonian h1 = effective_hamiltonian(kPiecewiseNontrivial, k, a1);
        const EffectiveHamiltonian h2 = effective_hamiltonian(kPiecewiseNontrivial, k, a2);
        const Unitary2 w = micromotion_unitary(kPiecewiseNontrivial, k, a1, a2);
        CHECK((h1.matrix - w.adjoint() * h2.matrix * w).norm() < 1e-7);
    }
}

TEST_CASE("effective Hamiltonian is periodic in alpha") {
    std::mt19937 rng(51);
    for (const DriveProtocol& d : {kPiecewiseNontrivial, kHarmonic}) {
        const Momentum2 k = random_k(rng);
        const EffectiveHamiltonian h0 = effective_hamiltonian(d, k, 0.0);
        const EffectiveHamiltonian h1 = effective_hamiltonian(d, k, kTwoPi);
        CHECK((h0.matrix - h1.matrix).norm() < 1e-9);
    }
}

TEST_CASE("piecewise H_F(0) eigenvectors match H1 eigenvectors") {
    std::mt19937 rng(61);
    for (int it = 0; it < 10; ++it) {
        const Momentum2 k = random_k(rng);
        const EffectiveHamiltonian h = effective_hamiltonian(kPiecewiseTrivial, k, 0.0);
        const BlochVector hv = h_vector(k, -10.0);
        const Vec3 dir = hv / hv.norm();
        // both H_F eigenstates are h.sigma eigenstates: pseudospin parallel to h
        for (int b = 0; b < 2; ++b) {
            BandState s;
            s.eigenvector = h.eigenvector[b];
            const Vec3 n = s.pseudospin();
            CHECK(std::abs(std::abs(n.dot(dir)) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("composition: U(t2,t0) = U(t2,t1) U(t1,t0)") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    for (int it = 0; it < 10; ++it) {
        const Momentum2 k = random_k(rng);
        double a = ut(rng), b = ut(rng), c = ut(rng);
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        const Unitary2 full = propagate(kPiecewiseNontrivial, k, a, c, 1);
        const Unitary2 split = propagate(kPiecewiseNontrivial, k, b, c, 1) *
                               propagate(kPiecewiseNontrivial, k, a, b, 1);
        CHECK((full - split).norm() < 1e-9);
    }
}

TEST_CASE("exact-segment shortcut agrees with aligned midpoint stepping") {
    // t0 = 0.5 keeps segment boundaries on step edges at n = 2^14
    const DriveProtocol d = PiecewiseDrive{-10.0, -2.0, 0.5, 1.0};
    std::mt19937 rng(81);
    for (int it = 0; it < 5; ++it) {
        const Momentum2 k = random_k(rng);
        const Unitary2 exact = propagate(d, k, 0.0, 1.0, 1);
        const Unitary2 stepped = midpoint_reference(d, k, 0.0, 1.0, 1 << 14);
        CHECK((exact - stepped).norm() < 1e-7);
    }
}

TEST_CASE("unitarity of returned propagators") {
    std::mt19937 rng(91);
    std::uniform_real_distribution<double> ut(0.0, 1.0);
    for (int it = 0; it < 200; ++it) {
        const Momentum2 k = random_k(rng);
        const Unitary2 u = propagate(kPiecewiseNontrivial, k, ut(rng), 1.0 + ut(rng), 1);
        CHECK(unitarity_residual(u) < 1e-10);
    }
    for (int it = 0; it < 20; ++it) {
        const Momentum2 k = random_k(rng);
        const Unitary2 u = propagate(kHarmonic, k, 0.0, drive_period(kHarmonic), 512);
        CHECK(unitarity_residual(u) < 1e-10);
    }
}

TEST_CASE("band_state on a diagonal effective Hamiltonian") {
    EffectiveHamiltonian h;
    h.period = 1.0;
    h.matrix << 1.0, 0.0, 0.0, -1.0;
    h.eigenphase = {-1.0, 1.0};
    h.eigenvector[0] = Eigen::Vector2cd(0.0, 1.0);
    h.eigenvector[1] = Eigen::Vector2cd(1.0, 0.0);

    const BandState lower = band_state(h, Branch::Lower);
    CHECK(lower.eigenphase == doctest::Approx(-1.0));
    CHECK(std::abs(lower.eigenvector(1)) == doctest::Approx(1.0));
    const BandState upper = band_state(h, Branch::Upper);
    CHECK(upper.eigenphase == doctest::Approx(1.0));

    // gap check trips near 0 and near pi
    h.eigenphase = {-1e-8, 1.0};
    CHECK_THROWS_AS(band_state(h, Branch::Lower), GapClosingError);
    h.eigenphase = {-1.0, kPi - 1e-8};
    CHECK_THROWS_AS(band_state(h, Branch::Lower), GapClosingError);
}

TEST_CASE("eigenphase sum matches the determinant phase") {
    std::mt19937 rng(101);
    for (const DriveProtocol& d : {kPiecewiseNontrivial, kHarmonic}) {
        const double T = drive_period(d);
        const Momentum2 k = random_k(rng);
        const Unitary2 u = propagate_adaptive(d, k, 0.0, T);
        const EffectiveHamiltonian h = effective_hamiltonian(d, k, 0.0);
        const double sum = h.eigenphase[0] + h.eigenphase[1];
        const double det_phase = std::arg(u.determinant());
        CHECK(std::abs(wrap_pm_pi(sum + det_phase)) < 1e-9);
    }
}

TEST_CASE("band_state varies smoothly over a 48^3 grid (piecewise nontrivial)") {
    // the deficit scales as 1/N^2: measured 0.153 at 32^3, 0.071 at 48^3
    const int n = 48;
    std::vector<Eigen::Vector2cd> vecs(static_cast<std::size_t>(n) * n * n);
    auto idx = [n](int i, int j, int l) {
        return (static_cast<std::size_t>(l) * n + j) * n + i;
    };
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const EffectiveHamiltonian h = effective_hamiltonian(
                    kPiecewiseNontrivial, Momentum2(kTwoPi * i / n, kTwoPi * j / n),
                    kTwoPi * l / n);
                vecs[idx(i, j, l)] = band_state(h, Branch::Lower).eigenvector;
            }
    double worst = 0.0;
    auto wrap = [n](int v) { return (v % n + n) % n; };
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Eigen::Vector2cd& v = vecs[idx(i, j, l)];
                for (const auto& w : {vecs[idx(wrap(i + 1), j, l)], vecs[idx(i, wrap(j + 1), l)],
                                      vecs[idx(i, j, wrap(l + 1))]}) {
                    const double overlap = std::norm(v.dot(w));
                    worst = std::max(worst, 1.0 - overlap);
                }
            }
    CHECK(worst < 0.1);
}

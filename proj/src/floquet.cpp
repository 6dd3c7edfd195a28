#include "hopfloq/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hopfloq {

namespace {

const Complex kI(0.0, 1.0);

/// Eigenvector of n.sigma with eigenvalue +1 (first) and -1 (second).
std::array<Eigen::Vector2cd, 2> pauli_axis_eigenvectors(const Vec3& n) {
    const double theta = std::acos(std::clamp(n.z, -1.0, 1.0));
    const double phi = std::atan2(n.y, n.x);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    const Complex eip = std::exp(kI * phi);
    Eigen::Vector2cd plus, minus;
    plus << c, s * eip;
    minus << -s * std::conj(eip), c;
    return {plus, minus};
}

}  // namespace

double unitarity_residual(const Unitary2& u) {
    return (u.adjoint() * u - Unitary2::Identity()).norm();
}

UnitaryEigen unitary_eigensystem(const Unitary2& u) {
    const Complex det = u.determinant();
    const double delta = 0.5 * std::arg(det);
    const Unitary2 v = std::exp(-kI * delta) * u;
    // v = a I - i sin(theta) n.sigma with real a and real unit n.
    const double a = 0.5 * std::real(v(0, 0) + v(1, 1));
    const Vec3 w{-0.5 * std::imag(v(0, 1) + v(1, 0)),
                 0.5 * std::real(v(1, 0) - v(0, 1)),
                 -0.5 * std::imag(v(0, 0) - v(1, 1))};
    const double s = w.norm();
    const double theta = std::atan2(s, a);

    UnitaryEigen out;
    if (s < 1e-14) {
        // Proportional to the identity; both eigenphases coincide.
        out.phase = {wrap_pm_pi(delta + theta), wrap_pm_pi(delta + theta)};
        out.vec[0] = Eigen::Vector2cd(1.0, 0.0);
        out.vec[1] = Eigen::Vector2cd(0.0, 1.0);
        return out;
    }
    const Vec3 axis = w / s;
    auto vecs = pauli_axis_eigenvectors(axis);
    out.phase = {wrap_pm_pi(delta - theta), wrap_pm_pi(delta + theta)};
    out.vec = {vecs[0], vecs[1]};
    return out;
}

Unitary2 step_exponential(const BlochVector& h, double dt) {
    const double n = h.norm();
    if (n == 0.0) return Unitary2::Identity();
    const double phase = n * dt;
    const double c = std::cos(phase);
    const Complex ms = -kI * std::sin(phase) / n;
    Unitary2 u;
    u << c + ms * h.z, ms * (h.x - kI * h.y),
         ms * (h.x + kI * h.y), c - ms * h.z;
    return u;
}

namespace {

Unitary2 propagate_piecewise(const PiecewiseDrive& d, const Momentum2& k,
                             double t_start, double t_end) {
    // Breakpoints at nT and nT + t0 split the window into constant segments.
    std::vector<double> cuts;
    const long n_lo = static_cast<long>(std::floor(t_start / d.period)) - 1;
    const long n_hi = static_cast<long>(std::ceil(t_end / d.period)) + 1;
    for (long n = n_lo; n <= n_hi; ++n) {
        for (double b : {n * d.period, n * d.period + d.t0})
            if (b > t_start && b < t_end) cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), t_start);
    cuts.push_back(t_end);

    DriveProtocol drive = d;
    Unitary2 u = Unitary2::Identity();
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b <= a) continue;
        const BlochVector h = hamiltonian_at(drive, k, 0.5 * (a + b));
        u = step_exponential(h, b - a) * u;
    }
    return u;
}

Unitary2 propagate_harmonic(const HarmonicDrive& d, const Momentum2& k,
                            double t_start, double t_end, int n_steps) {
    DriveProtocol drive = d;
    const double dt = (t_end - t_start) / n_steps;
    Unitary2 u = Unitary2::Identity();
    for (int i = 0; i < n_steps; ++i) {
        const double tm = t_start + (i + 0.5) * dt;
        u = step_exponential(hamiltonian_at(drive, k, tm), dt) * u;
    }
    return u;
}

// Fourth-order commutator-free Magnus step: two Pauli exponentials built from
// the Gauss-node Hamiltonians. Each linear combination of h-vectors is again a
// Pauli vector, so the factors stay exact 2x2 exponentials.
Unitary2 propagate_harmonic_cf4(const HarmonicDrive& d, const Momentum2& k,
                                double t_start, double t_end, int n_steps) {
    DriveProtocol drive = d;
    const double dt = (t_end - t_start) / n_steps;
    const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
    const double a1 = 0.25 + std::sqrt(3.0) / 6.0, a2 = 0.25 - std::sqrt(3.0) / 6.0;
    Unitary2 u = Unitary2::Identity();
    for (int i = 0; i < n_steps; ++i) {
        const double t = t_start + i * dt;
        const BlochVector h1 = hamiltonian_at(drive, k, t + c1 * dt);
        const BlochVector h2 = hamiltonian_at(drive, k, t + c2 * dt);
        const BlochVector wr{a1 * h1.x + a2 * h2.x, a1 * h1.y + a2 * h2.y,
                             a1 * h1.z + a2 * h2.z};
        const BlochVector wl{a2 * h1.x + a1 * h2.x, a2 * h1.y + a1 * h2.y,
                             a2 * h1.z + a1 * h2.z};
        u = step_exponential(wl, dt) * step_exponential(wr, dt) * u;
    }
    return u;
}

double eigenphase_distance(const Unitary2& a, const Unitary2& b) {
    auto ea = unitary_eigensystem(a), eb = unitary_eigensystem(b);
    std::array<double, 2> pa = ea.phase, pb = eb.phase;
    std::sort(pa.begin(), pa.end());
    std::sort(pb.begin(), pb.end());
    double m = 0.0;
    for (int i = 0; i < 2; ++i)
        m = std::max(m, std::abs(wrap_pm_pi(pa[i] - pb[i])));
    return m;
}

}  // namespace

Unitary2 propagate(const DriveProtocol& drive, const Momentum2& k,
                   double t_start, double t_end, int n_steps) {
    if (t_end < t_start)
        return propagate(drive, k, t_end, t_start, n_steps).adjoint();
    if (t_end == t_start) return Unitary2::Identity();
    if (const auto* p = std::get_if<PiecewiseDrive>(&drive))
        return propagate_piecewise(*p, k, t_start, t_end);
    return propagate_harmonic(std::get<HarmonicDrive>(drive), k, t_start, t_end,
                              std::max(1, n_steps));
}

Unitary2 propagate_adaptive(const DriveProtocol& drive, const Momentum2& k,
                            double t_start, double t_end, const PropagateOptions& opts) {
    if (std::holds_alternative<PiecewiseDrive>(drive) || t_end == t_start)
        return propagate(drive, k, t_start, t_end, 1);
    if (t_end < t_start)
        return propagate_adaptive(drive, k, t_end, t_start, opts).adjoint();

    // Doubling ladder on the fourth-order step; stability of the sorted
    // eigenphases between n and 2n is the acceptance test for n.
    const auto& hd = std::get<HarmonicDrive>(drive);
    int n = opts.initial_steps;
    Unitary2 u = propagate_harmonic_cf4(hd, k, t_start, t_end, n);
    while (2 * n <= opts.max_steps) {
        Unitary2 u2 = propagate_harmonic_cf4(hd, k, t_start, t_end, 2 * n);
        if (eigenphase_distance(u, u2) < opts.phase_tol) return u2;
        u = u2;
        n *= 2;
    }
    throw NonConvergenceError("propagate_adaptive: eigenphases not stable at max_steps");
}

Unitary2 micromotion_unitary(const DriveProtocol& drive, const Momentum2& k,
                             double alpha1, double alpha2, const PropagateOptions& opts) {
    const double omega = kTwoPi / drive_period(drive);
    return propagate_adaptive(drive, k, alpha1 / omega, alpha2 / omega, opts);
}

Eigen::Vector2cd gauge_fix(const Eigen::Vector2cd& v) {
    int idx = std::abs(v(0)) + 1e-12 >= std::abs(v(1)) ? 0 : 1;
    const double mag = std::abs(v(idx));
    if (mag == 0.0) return v;
    return v * (std::conj(v(idx)) / mag);
}

EffectiveHamiltonian effective_hamiltonian(const DriveProtocol& drive, const Momentum2& k,
                                           double alpha, const BranchOptions& opts) {
    const double T = drive_period(drive);
    const double omega = kTwoPi / T;
    const Unitary2 u = propagate_adaptive(drive, k, alpha / omega, alpha / omega + T,
                                          opts.propagate);
    const UnitaryEigen eig = unitary_eigensystem(u);
    for (double phi : eig.phase) {
        if (kPi - std::abs(phi) < opts.branch_tol && std::abs(phi) <= kPi)
            throw BranchAmbiguityError("effective_hamiltonian: eigenphase at log branch cut");
    }

    EffectiveHamiltonian h;
    h.alpha = alpha;
    h.period = T;
    // e^{-i eps T} = e^{i phi}  =>  eps T = -phi, principal branch.
    std::array<double, 2> eps = {wrap_pm_pi(-eig.phase[0]), wrap_pm_pi(-eig.phase[1])};
    std::array<int, 2> order = {0, 1};
    if (eps[1] < eps[0]) order = {1, 0};
    for (int i = 0; i < 2; ++i) {
        h.eigenphase[i] = eps[order[i]];
        h.eigenvector[i] = gauge_fix(eig.vec[order[i]]);
    }
    h.matrix.setZero();
    for (int i = 0; i < 2; ++i)
        h.matrix += (h.eigenphase[i] / T) * (h.eigenvector[i] * h.eigenvector[i].adjoint());
    h.matrix = 0.5 * (h.matrix + h.matrix.adjoint()).eval();
    return h;
}

Vec3 BandState::pseudospin() const {
    const Complex c = std::conj(eigenvector(0)) * eigenvector(1);
    return {2.0 * c.real(), 2.0 * c.imag(),
            std::norm(eigenvector(0)) - std::norm(eigenvector(1))};
}

BandState band_state(const EffectiveHamiltonian& h, Branch branch, double gap_tol) {
    for (double p : h.eigenphase) {
        if (std::abs(p) < gap_tol || kPi - std::abs(p) < gap_tol)
            throw GapClosingError("band_state: quasienergy gap below tolerance");
    }
    if (!(h.eigenphase[0] < 0.0 && h.eigenphase[1] > 0.0))
        throw GapClosingError("band_state: branch selection ambiguous (both eigenphases same sign)");
    const int i = branch == Branch::Lower ? 0 : 1;
    BandState s;
    s.eigenphase = h.eigenphase[i];
    s.eigenvector = h.eigenvector[i];
    s.epsilon_k = h.eigenphase[i] / h.period;
    return s;
}

}  // namespace hopfloq

#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

#include "hopfloq/bloch.hpp"

namespace hopfloq {

using Unitary2 = Eigen::Matrix2cd;
using Complex = std::complex<double>;

/// Wrap an angle to (-pi, pi].
inline double wrap_pm_pi(double a) {
    double r = std::fmod(a + kPi, kTwoPi);
    if (r <= 0.0) r += kTwoPi;
    return r - kPi;
}

/// Frobenius deviation from unitarity.
double unitarity_residual(const Unitary2& u);

/// Eigenphases (args of eigenvalues, in (-pi, pi]) and eigenvectors of a 2x2
/// unitary, computed from its Pauli decomposition.
struct UnitaryEigen {
    std::array<double, 2> phase;
    std::array<Eigen::Vector2cd, 2> vec;
};
UnitaryEigen unitary_eigensystem(const Unitary2& u);

/// exp(-i dt h.sigma) = cos(|h|dt) I - i sin(|h|dt) (h/|h|).sigma.
Unitary2 step_exponential(const BlochVector& h, double dt);

struct PropagateOptions {
    int initial_steps = 256;
    int max_steps = 1 << 20;
    double phase_tol = 1e-9;
};

/// Time-ordered evolution from t_start to t_end (later factors on the left).
/// Piecewise drives use the exact segment product; harmonic drives use
/// midpoint stepping with n_steps substeps.
Unitary2 propagate(const DriveProtocol& drive, const Momentum2& k,
                   double t_start, double t_end, int n_steps);

/// As propagate, but for harmonic drives uses a fourth-order commutator-free
/// Magnus step and doubles n_steps until the sorted eigenphases move by less
/// than opts.phase_tol. Throws NonConvergenceError past opts.max_steps.
Unitary2 propagate_adaptive(const DriveProtocol& drive, const Momentum2& k,
                            double t_start, double t_end,
                            const PropagateOptions& opts = {});

/// U(alpha2, alpha1): evolution from alpha1/omega to alpha2/omega; the adjoint
/// of the forward evolution when alpha2 < alpha1.
Unitary2 micromotion_unitary(const DriveProtocol& drive, const Momentum2& k,
                             double alpha1, double alpha2,
                             const PropagateOptions& opts = {});

/// Multiply a vector by the phase that makes its largest-magnitude component
/// real positive (ties within 1e-12 broken toward the first component).
Eigen::Vector2cd gauge_fix(const Eigen::Vector2cd& v);

enum class Branch { Lower, Upper };

struct EffectiveHamiltonian {
    Eigen::Matrix2cd matrix;       // Hermitian, H_F
    double alpha = 0.0;
    double period = 1.0;
    std::array<double, 2> eigenphase;           // eps*T, ascending, in (-pi, pi]
    std::array<Eigen::Vector2cd, 2> eigenvector;  // gauge-fixed, same order

    std::array<double, 2> quasienergies() const {
        return {eigenphase[0] / period, eigenphase[1] / period};
    }
};

struct BranchOptions {
    double branch_tol = 1e-6;  // min eigenphase distance to the log branch cut
    PropagateOptions propagate;
};

/// H_F(alpha) = (i/T) log U over one period starting at alpha/omega, with
/// principal eigenphases. Throws BranchAmbiguityError near the cut at pi.
EffectiveHamiltonian effective_hamiltonian(const DriveProtocol& drive, const Momentum2& k,
                                           double alpha, const BranchOptions& opts = {});

struct BandState {
    double eigenphase = 0.0;  // eps*T in (-pi, pi]
    Eigen::Vector2cd eigenvector;
    double epsilon_k = 0.0;   // quasienergy

    /// Pauli expectation <v|sigma|v>; unit vector for a normalized state.
    Vec3 pseudospin() const;
};

/// Eigenpair with eigenphase in (-pi,0) for Lower, (0,pi] for Upper.
/// Throws GapClosingError when either gap (at 0 or pi) is below gap_tol.
BandState band_state(const EffectiveHamiltonian& h, Branch branch, double gap_tol = 1e-6);

}  // namespace hopfloq

#pragma once

#include <cmath>
#include <variant>

#include "hopfloq/errors.hpp"
#include "hopfloq/vec3.hpp"

namespace hopfloq {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.1415926535897932384626433832795;

/// Gap tolerance below which flat-band normalization refuses to divide.
inline constexpr double kGapTolerance = 1e-9;

/// Reduce an angle to [0, 2pi).
inline double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

/// Momentum in the 2D Brillouin zone, components in [0, 2pi).
struct Momentum2 {
    double k1 = 0.0, k2 = 0.0;
    Momentum2() = default;
    Momentum2(double a, double b) : k1(wrap_angle(a)), k2(wrap_angle(b)) {}
};

using BlochVector = Vec3;

/// Two-segment drive: h(mu1).sigma on (nT, nT+t0], flat eps0*h(mu2)/|h| on the rest.
struct PiecewiseDrive {
    double mu1 = -10.0;
    double mu2 = -5.0;
    double t0 = 0.1;
    double period = 1.0;

    double eps0() const { return kPi / (period - t0); }
};

/// Static h(mu).sigma plus sigma_z cos(omega t).
struct HarmonicDrive {
    double mu = -10.0;
    double omega = 12.0;

    double period() const { return kTwoPi / omega; }
};

using DriveProtocol = std::variant<PiecewiseDrive, HarmonicDrive>;

double drive_period(const DriveProtocol& drive);

/// Validate the drive parameter constraints (0 < t0 < T, omega > 0).
void validate_drive(const DriveProtocol& drive);

/// h_x = sin k1, h_y = sin k2, h_z = mu + cos k1 + cos k2 + cos k1 cos k2.
BlochVector h_vector(const Momentum2& k, double mu);

/// eps0 * h/|h|. Throws GapClosingError when |h| <= gap_tol.
BlochVector flatten(const BlochVector& h, double eps0, double gap_tol = kGapTolerance);

/// Instantaneous Bloch vector of the drive at time t (reduced mod period).
BlochVector hamiltonian_at(const DriveProtocol& drive, const Momentum2& k, double t);

}  // namespace hopfloq

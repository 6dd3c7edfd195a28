#pragma once

// Shared synthetic fields used as oracles across the test suite.

#include <cmath>
#include <random>

#include "hopfloq/hopf.hpp"
#include "hopfloq/pseudospin.hpp"

namespace hopfloq::testing {

// Degree-1 Hopf texture on the 3-torus: inside a ball of radius R around the
// cell center the map factors as (ball -> S^3, boundary to a point) composed
// with the Hopf fibration; outside it is the constant north pole. The profile
// uses a quintic smoothstep so the field matches the constant exterior to C^2
// and the discretized invariant converges fast. Exact value: +1 with the
// current convention (verified against the Gauss linking of two fibers).
inline PseudoSpinGrid hopf_texture(int n, double radius_frac = 0.9,
                                   const std::array<double, 3>& origin = {0.0, 0.0, 0.0}) {
    PseudoSpinGrid g(n, n, n);
    g.origin = origin;
    const double R = radius_frac * kPi;
    const double h = kTwoPi / n;
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const double x = (i + origin[0]) * h - kPi;
                const double y = (j + origin[1]) * h - kPi;
                const double z = (l + origin[2]) * h - kPi;
                const double r = std::sqrt(x * x + y * y + z * z);
                if (r >= R || r < 1e-300) {  // exterior, or the exact center (th = 0)
                    g.at(i, j, l) = Vec3{0.0, 0.0, 1.0};
                    continue;
                }
                const double u = r / R;
                const double w = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
                const double th = kPi * w;
                // q = (cos th, -sin th * r_hat) on S^3, then the Hopf map;
                // the mirrored vector part makes the invariant +1 in the
                // -sum j.A convention used by hopf_invariant
                const double a = std::cos(th), s = -std::sin(th) / r;
                const double b = s * x, c = s * y, d = s * z;
                g.at(i, j, l) = Vec3{2.0 * (a * c + b * d),
                                     2.0 * (b * c - a * d),
                                     a * a + b * b - c * c - d * d};
            }
    return g;
}

// Smooth band-limited periodic vector field; its discrete curl is exactly
// divergence-free for the central-difference stencil.
inline VectorFieldGrid smooth_random_field(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0), ph(0.0, kTwoPi);
    struct Mode { double m1, m2, m3, a[3], p[3]; };
    std::vector<Mode> modes;
    for (int m1 = -2; m1 <= 2; ++m1)
        for (int m2 = -2; m2 <= 2; ++m2)
            for (int m3 = -2; m3 <= 2; ++m3) {
                if (m1 == 0 && m2 == 0 && m3 == 0) continue;
                Mode m{double(m1), double(m2), double(m3), {}, {}};
                for (int c = 0; c < 3; ++c) { m.a[c] = amp(rng); m.p[c] = ph(rng); }
                modes.push_back(m);
            }
    VectorFieldGrid f(n, n, n);
    const double h = kTwoPi / n;
    for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                Vec3 v{0.0, 0.0, 0.0};
                for (const Mode& m : modes) {
                    const double arg = m.m1 * i * h + m.m2 * j * h + m.m3 * l * h;
                    v.x += m.a[0] * std::cos(arg + m.p[0]);
                    v.y += m.a[1] * std::cos(arg + m.p[1]);
                    v.z += m.a[2] * std::cos(arg + m.p[2]);
                }
                f.at(i, j, l) = v;
            }
    return f;
}

inline double max_component(const VectorFieldGrid& f) {
    double m = 0.0;
    for (const Vec3& v : f.data)
        m = std::max({m, std::abs(v.x), std::abs(v.y), std::abs(v.z)});
    return m;
}

}  // namespace hopfloq::testing

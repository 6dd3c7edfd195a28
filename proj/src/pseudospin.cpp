#include "hopfloq/pseudospin.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace hopfloq {

namespace {

Vec3 node_pseudospin(const DriveProtocol& drive, int i, int j, int l,
                     int N1, int N2, int N3, Branch branch, const BranchOptions& opts,
                     const std::array<double, 3>& origin) {
    const Momentum2 k(kTwoPi * (i + origin[0]) / N1, kTwoPi * (j + origin[1]) / N2);
    const double alpha = kTwoPi * (l + origin[2]) / N3;
    const EffectiveHamiltonian h = effective_hamiltonian(drive, k, alpha, opts);
    return band_state(h, branch).pseudospin();
}

std::string node_tag(int i, int j, int l) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), " at node (%d,%d,%d)", i, j, l);
    return buf;
}

}  // namespace

PseudoSpinGrid pseudospin_grid(const DriveProtocol& drive, int N1, int N2, int N3,
                               Branch branch, const BranchOptions& opts,
                               const std::array<double, 3>& origin) {
    if (N1 < 8 || N2 < 8 || N3 < 8)
        throw ConfigError("pseudospin_grid: grid counts must be >= 8");
    PseudoSpinGrid g(N1, N2, N3);
    g.origin = origin;
    bool failed = false;
    std::string err;
    const long total = static_cast<long>(g.size());
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < total; ++idx) {
        if (failed) continue;
        const int i = static_cast<int>(idx % N1);
        const int j = static_cast<int>((idx / N1) % N2);
        const int l = static_cast<int>(idx / (static_cast<long>(N1) * N2));
        try {
            g.data[idx] = node_pseudospin(drive, i, j, l, N1, N2, N3, branch, opts, origin);
        } catch (const std::exception& e) {
#pragma omp critical
            {
                if (!failed) {
                    failed = true;
                    err = std::string(e.what()) + node_tag(i, j, l);
                }
            }
        }
    }
    if (failed) throw GapClosingError(err);
    return g;
}

PseudoSpinGrid pseudospin_grid_serial(const DriveProtocol& drive, int N1, int N2, int N3,
                                      Branch branch, const BranchOptions& opts,
                                      const std::array<double, 3>& origin) {
    if (N1 < 8 || N2 < 8 || N3 < 8)
        throw ConfigError("pseudospin_grid: grid counts must be >= 8");
    PseudoSpinGrid g(N1, N2, N3);
    g.origin = origin;
    for (int l = 0; l < N3; ++l)
        for (int j = 0; j < N2; ++j)
            for (int i = 0; i < N1; ++i) {
                try {
                    g.at(i, j, l) = node_pseudospin(drive, i, j, l, N1, N2, N3, branch, opts, origin);
                } catch (const std::exception& e) {
                    throw GapClosingError(std::string(e.what()) + node_tag(i, j, l));
                }
            }
    return g;
}

double max_norm_deviation(const PseudoSpinGrid& g) {
    double m = 0.0;
    for (const auto& v : g.data) m = std::max(m, std::abs(v.norm() - 1.0));
    return m;
}

double max_neighbor_angle(const PseudoSpinGrid& g) {
    double m = 0.0;
    for (int l = 0; l < g.n3; ++l)
        for (int j = 0; j < g.n2; ++j)
            for (int i = 0; i < g.n1; ++i) {
                const Vec3& a = g.at(i, j, l);
                for (const Vec3& b : {g.atp(i + 1, j, l), g.atp(i, j + 1, l), g.atp(i, j, l + 1)}) {
                    const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
                    m = std::max(m, std::acos(c));
                }
            }
    return m;
}

PseudoSpinGrid rotate_field(const PseudoSpinGrid& g, const std::array<Vec3, 3>& rows) {
    PseudoSpinGrid out = g;
    for (auto& v : out.data)
        v = {rows[0].dot(v), rows[1].dot(v), rows[2].dot(v)};
    return out;
}

}  // namespace hopfloq

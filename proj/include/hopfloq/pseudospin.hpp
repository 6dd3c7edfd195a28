#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hopfloq/floquet.hpp"

namespace hopfloq {

/// Periodic 3D grid over (k1, k2, alpha), index i along k1 fastest.
template <typename T>
struct Grid3 {
    int n1 = 0, n2 = 0, n3 = 0;
    /// Sampling offset in index units: node (i,j,l) sits at ((i,j,l)+origin)*h.
    std::array<double, 3> origin{0.0, 0.0, 0.0};
    std::vector<T> data;

    Grid3() = default;
    Grid3(int a, int b, int c)
        : n1(a), n2(b), n3(c),
          data(static_cast<std::size_t>(a) * b * c) {}

    std::size_t size() const { return data.size(); }
    std::size_t index(int i, int j, int l) const {
        return (static_cast<std::size_t>(l) * n2 + j) * n1 + i;
    }
    T& at(int i, int j, int l) { return data[index(i, j, l)]; }
    const T& at(int i, int j, int l) const { return data[index(i, j, l)]; }
    /// Periodic access.
    const T& atp(int i, int j, int l) const {
        auto m = [](int v, int n) { v %= n; return v < 0 ? v + n : v; };
        return data[index(m(i, n1), m(j, n2), m(l, n3))];
    }
    std::array<double, 3> spacing() const {
        return {kTwoPi / n1, kTwoPi / n2, kTwoPi / n3};
    }
};

using PseudoSpinGrid = Grid3<Vec3>;
using VectorFieldGrid = Grid3<Vec3>;

/// n(i,j,l) = <v|sigma|v> for the chosen band of H_F evaluated at
/// ((i,j,l)+origin)*2pi/N. OpenMP-parallel over nodes; errors carry the
/// offending node. A nonzero origin regularizes preimage extraction when the
/// curves lie in lattice symmetry planes (k2 = 0 or pi for both models).
PseudoSpinGrid pseudospin_grid(const DriveProtocol& drive, int N1, int N2, int N3,
                               Branch branch, const BranchOptions& opts = {},
                               const std::array<double, 3>& origin = {0.0, 0.0, 0.0});

/// Serial reference implementation; results must match pseudospin_grid bitwise.
PseudoSpinGrid pseudospin_grid_serial(const DriveProtocol& drive, int N1, int N2, int N3,
                                      Branch branch, const BranchOptions& opts = {},
                                      const std::array<double, 3>& origin = {0.0, 0.0, 0.0});

/// Generic sampling offset used for curve extraction; avoids every lattice
/// symmetry plane of the builtin models.
inline constexpr std::array<double, 3> kCurveGridOffset{0.31, 0.37, 0.43};

/// Max deviation of |n| from 1 over the grid.
double max_norm_deviation(const PseudoSpinGrid& g);

/// Max angle between neighboring vectors (all three axes, periodic).
double max_neighbor_angle(const PseudoSpinGrid& g);

/// Apply a fixed 3x3 rotation (rows r0,r1,r2) to every vector.
PseudoSpinGrid rotate_field(const PseudoSpinGrid& g, const std::array<Vec3, 3>& rows);

}  // namespace hopfloq

#pragma once

#include "hopfloq/pseudospin.hpp"

namespace hopfloq {

enum class Pole { North, South };

/// Closed oriented polyline in [0, 2pi)^3 with its net torus windings.
struct PreimageCurve {
    std::vector<Vec3> points;
    bool closed = false;
    std::array<int, 3> winding{0, 0, 0};

    bool contractible() const {
        return winding[0] == 0 && winding[1] == 0 && winding[2] == 0;
    }
};

/// Traces the preimage of the north (n_z > 0) or south (n_z < 0) pole of the
/// pseudo-spin map: zero crossings of (n_x, n_y) on cell faces via bilinear
/// interpolation, linked through shared cells into closed polylines.
/// Orientation follows the target-sphere orientation (see linking_number).
std::vector<PreimageCurve> preimage_curves(const PseudoSpinGrid& g, Pole pole);

struct LinkingResult {
    int value = 0;
    double raw = 0.0;       // Gauss sum before rounding
    double residual = 0.0;  // |raw - value|
};

/// Gauss double sum over segment pairs, including the nearest periodic images
/// of the second curve. Both curves must be closed, null-homologous and
/// separated by more than min_separation.
LinkingResult linking_number(const PreimageCurve& c1, const PreimageCurve& c2,
                             double min_separation);
LinkingResult linking_number_serial(const PreimageCurve& c1, const PreimageCurve& c2,
                                    double min_separation);

/// Gauss sum for plain closed polylines in R^3 (no torus images); test oracle
/// for canonical links.
double gauss_linking_sum(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

/// Linking of two preimage families. All-contractible families are summed
/// pairwise. Families with winding components are accepted when the windings
/// cancel within each family: the family is then chain-merged into a single
/// null-homologous cycle via back-and-forth connector segments (which cancel
/// exactly as currents) before the Gauss sum. A family with nonzero net
/// winding has no well-defined linking number and raises
/// NonContractibleCurveError.
LinkingResult family_linking_number(const std::vector<PreimageCurve>& north,
                                    const std::vector<PreimageCurve>& south,
                                    double min_separation);

}  // namespace hopfloq

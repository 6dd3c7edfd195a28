#include "hopfloq/bloch.hpp"

#include <cmath>

namespace hopfloq {

double drive_period(const DriveProtocol& drive) {
    return std::visit([](const auto& d) {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PiecewiseDrive>)
            return d.period;
        else
            return d.period();
    }, drive);
}

void validate_drive(const DriveProtocol& drive) {
    if (const auto* p = std::get_if<PiecewiseDrive>(&drive)) {
        if (!(p->period > 0.0) || !(p->t0 > 0.0) || !(p->t0 < p->period))
            throw ConfigError("piecewise drive requires 0 < t0 < T");
        if (!std::isfinite(p->mu1) || !std::isfinite(p->mu2))
            throw ConfigError("piecewise drive parameters must be finite");
    } else {
        const auto& h = std::get<HarmonicDrive>(drive);
        if (!(h.omega > 0.0)) throw ConfigError("harmonic drive requires omega > 0");
        if (!std::isfinite(h.mu)) throw ConfigError("harmonic drive mu must be finite");
    }
}

BlochVector h_vector(const Momentum2& k, double mu) {
    const double c1 = std::cos(k.k1), c2 = std::cos(k.k2);
    return {std::sin(k.k1), std::sin(k.k2), mu + c1 + c2 + c1 * c2};
}

BlochVector flatten(const BlochVector& h, double eps0, double gap_tol) {
    const double n = h.norm();
    if (n <= gap_tol)
        throw GapClosingError("flatten: |h| below gap tolerance");
    return h * (eps0 / n);
}

BlochVector hamiltonian_at(const DriveProtocol& drive, const Momentum2& k, double t) {
    if (const auto* p = std::get_if<PiecewiseDrive>(&drive)) {
        double tr = std::fmod(t, p->period);
        if (tr < 0.0) tr += p->period;
        // (nT, nT+t0] is segment one; t=0 maps to the end of the flat segment.
        if (tr > 0.0 && tr <= p->t0) return h_vector(k, p->mu1);
        return flatten(h_vector(k, p->mu2), p->eps0());
    }
    const auto& h = std::get<HarmonicDrive>(drive);
    BlochVector v = h_vector(k, h.mu);
    v.z += std::cos(h.omega * t);
    return v;
}

}  // namespace hopfloq

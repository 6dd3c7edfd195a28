#include "hopfloq/hopf.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numeric>

namespace hopfloq {

namespace {

struct Derivs {
    Vec3 dx, dy, dz;
};

Derivs central_derivs(const PseudoSpinGrid& g, int i, int j, int l) {
    const auto h = g.spacing();
    Derivs d;
    d.dx = (g.atp(i + 1, j, l) - g.atp(i - 1, j, l)) / (2.0 * h[0]);
    d.dy = (g.atp(i, j + 1, l) - g.atp(i, j - 1, l)) / (2.0 * h[1]);
    d.dz = (g.atp(i, j, l + 1) - g.atp(i, j, l - 1)) / (2.0 * h[2]);
    return d;
}

}  // namespace

VectorFieldGrid current_field(const PseudoSpinGrid& n) {
    VectorFieldGrid j(n.n1, n.n2, n.n3);
    const double pref = 1.0 / (4.0 * kPi);
    const long total = static_cast<long>(n.size());
#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < total; ++idx) {
        const int i = static_cast<int>(idx % n.n1);
        const int jj = static_cast<int>((idx / n.n1) % n.n2);
        const int l = static_cast<int>(idx / (static_cast<long>(n.n1) * n.n2));
        const Derivs d = central_derivs(n, i, jj, l);
        const Vec3& v = n.data[idx];
        j.data[idx] = {pref * v.dot(d.dy.cross(d.dz)),
                       pref * v.dot(d.dz.cross(d.dx)),
                       pref * v.dot(d.dx.cross(d.dy))};
    }
    return j;
}

VectorFieldGrid discrete_curl(const VectorFieldGrid& f) {
    VectorFieldGrid c(f.n1, f.n2, f.n3);
    const auto h = f.spacing();
    for (int l = 0; l < f.n3; ++l)
        for (int j = 0; j < f.n2; ++j)
            for (int i = 0; i < f.n1; ++i) {
                auto dx = [&](int a, int b, int cc) { return f.atp(a, b, cc); };
                const Vec3 fyp = dx(i, j + 1, l), fym = dx(i, j - 1, l);
                const Vec3 fzp = dx(i, j, l + 1), fzm = dx(i, j, l - 1);
                const Vec3 fxp = dx(i + 1, j, l), fxm = dx(i - 1, j, l);
                const double dyz = (fyp.z - fym.z) / (2.0 * h[1]);
                const double dzy = (fzp.y - fzm.y) / (2.0 * h[2]);
                const double dzx = (fzp.x - fzm.x) / (2.0 * h[2]);
                const double dxz = (fxp.z - fxm.z) / (2.0 * h[0]);
                const double dxy = (fxp.y - fxm.y) / (2.0 * h[0]);
                const double dyx = (fyp.x - fym.x) / (2.0 * h[1]);
                c.at(i, j, l) = {dyz - dzy, dzx - dxz, dxy - dyx};
            }
    return c;
}

Grid3<double> discrete_divergence(const VectorFieldGrid& f) {
    Grid3<double> d(f.n1, f.n2, f.n3);
    const auto h = f.spacing();
    for (int l = 0; l < f.n3; ++l)
        for (int j = 0; j < f.n2; ++j)
            for (int i = 0; i < f.n1; ++i) {
                d.at(i, j, l) =
                    (f.atp(i + 1, j, l).x - f.atp(i - 1, j, l).x) / (2.0 * h[0]) +
                    (f.atp(i, j + 1, l).y - f.atp(i, j - 1, l).y) / (2.0 * h[1]) +
                    (f.atp(i, j, l + 1).z - f.atp(i, j, l - 1).z) / (2.0 * h[2]);
            }
    return d;
}

VectorFieldGrid gauge_field(const VectorFieldGrid& j, double flux_tol) {
    const int n1 = j.n1, n2 = j.n2, n3 = j.n3;
    const std::size_t total = j.size();

    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (const auto& v : j.data)
            mean += (c == 0 ? v.x : c == 1 ? v.y : v.z);
        mean /= static_cast<double>(total);
        if (std::abs(mean) > flux_tol)
            throw NonzeroFluxError("gauge_field: nonzero net flux, Hopf invariant undefined");
    }

    using Cx = std::complex<double>;
    std::vector<Cx> comp[3], spec[3];
    for (int c = 0; c < 3; ++c) {
        comp[c].resize(total);
        spec[c].resize(total);
        for (std::size_t s = 0; s < total; ++s)
            comp[c][s] = Cx(c == 0 ? j.data[s].x : c == 1 ? j.data[s].y : j.data[s].z, 0.0);
        // Row-major for FFTW: dims (n3, n2, n1), i fastest.
        fftw_plan p = fftw_plan_dft_3d(n3, n2, n1,
                                       reinterpret_cast<fftw_complex*>(comp[c].data()),
                                       reinterpret_cast<fftw_complex*>(spec[c].data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_execute(p);
        fftw_destroy_plan(p);
    }

    const auto h = j.spacing();
    // Effective wavenumber of the central-difference stencil: sin(2 pi m/N)/h.
    auto qeff = [](int m, int n, double hh) { return std::sin(kTwoPi * m / n) / hh; };

    std::vector<Cx> aspec[3];
    for (int c = 0; c < 3; ++c) aspec[c].assign(total, Cx(0.0, 0.0));
    const Cx I(0.0, 1.0);
    for (int l = 0; l < n3; ++l)
        for (int jj = 0; jj < n2; ++jj)
            for (int i = 0; i < n1; ++i) {
                const std::size_t s = (static_cast<std::size_t>(l) * n2 + jj) * n1 + i;
                const double qx = qeff(i, n1, h[0]);
                const double qy = qeff(jj, n2, h[1]);
                const double qz = qeff(l, n3, h[2]);
                const double q2 = qx * qx + qy * qy + qz * qz;
                if (q2 < 1e-24) continue;  // zero and stencil-null modes
                const Cx jx = spec[0][s], jy = spec[1][s], jz = spec[2][s];
                aspec[0][s] = I * (qy * jz - qz * jy) / q2;
                aspec[1][s] = I * (qz * jx - qx * jz) / q2;
                aspec[2][s] = I * (qx * jy - qy * jx) / q2;
            }

    VectorFieldGrid a(n1, n2, n3);
    std::vector<Cx> back(total);
    for (int c = 0; c < 3; ++c) {
        fftw_plan p = fftw_plan_dft_3d(n3, n2, n1,
                                       reinterpret_cast<fftw_complex*>(aspec[c].data()),
                                       reinterpret_cast<fftw_complex*>(back.data()),
                                       FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_execute(p);
        fftw_destroy_plan(p);
        const double norm = 1.0 / static_cast<double>(total);
        for (std::size_t s = 0; s < total; ++s) {
            const double v = back[s].real() * norm;
            if (c == 0) a.data[s].x = v;
            else if (c == 1) a.data[s].y = v;
            else a.data[s].z = v;
        }
    }
    return a;
}

double hopf_invariant(const VectorFieldGrid& j, const VectorFieldGrid& a) {
    const auto h = j.spacing();
    const double dv = h[0] * h[1] * h[2];
    const long slab = static_cast<long>(j.n1) * j.n2;
    std::vector<double> partial(j.n3, 0.0);
#pragma omp parallel for schedule(static)
    for (int l = 0; l < j.n3; ++l) {
        double s = 0.0;
        for (long idx = l * slab; idx < (l + 1) * slab; ++idx)
            s += j.data[idx].dot(a.data[idx]);
        partial[l] = s;
    }
    return -dv * std::accumulate(partial.begin(), partial.end(), 0.0);
}

double hopf_invariant_serial(const VectorFieldGrid& j, const VectorFieldGrid& a) {
    const auto h = j.spacing();
    const double dv = h[0] * h[1] * h[2];
    const long slab = static_cast<long>(j.n1) * j.n2;
    std::vector<double> partial(j.n3, 0.0);
    for (int l = 0; l < j.n3; ++l) {
        double s = 0.0;
        for (long idx = l * slab; idx < (l + 1) * slab; ++idx)
            s += j.data[idx].dot(a.data[idx]);
        partial[l] = s;
    }
    return -dv * std::accumulate(partial.begin(), partial.end(), 0.0);
}

std::array<double, 3> chern_slice_fluxes(const VectorFieldGrid& j) {
    const auto h = j.spacing();
    std::array<double, 3> flux{0.0, 0.0, 0.0};
    for (const auto& v : j.data) {
        flux[0] += v.x * h[1] * h[2];
        flux[1] += v.y * h[2] * h[0];
        flux[2] += v.z * h[0] * h[1];
    }
    // Average over the transverse slices; each slice integral is a Chern number.
    flux[0] /= j.n1;
    flux[1] /= j.n2;
    flux[2] /= j.n3;
    return flux;
}

int chern_number(double mu, int N, double gap_tol) {
    // Lower-band eigenvector of h.sigma at each node, then plaquette Berry
    // phases from link overlaps (exact integer for a gapped band).
    Eigen::MatrixXcd v0(N, N), v1(N, N);
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            const Momentum2 k(kTwoPi * i / N, kTwoPi * j / N);
            const BlochVector hv = h_vector(k, mu);
            const double n = hv.norm();
            if (n <= gap_tol) throw GapClosingError("chern_number: |h| vanishes on grid");
            const double theta = std::acos(std::clamp(hv.z / n, -1.0, 1.0));
            const double phi = std::atan2(hv.y, hv.x);
            // -1 eigenvector of (h/|h|).sigma
            v0(i, j) = -std::sin(theta / 2.0) * std::exp(Complex(0.0, -phi));
            v1(i, j) = std::cos(theta / 2.0);
        }
    auto link = [&](int i, int j, int i2, int j2) {
        const Complex ov = std::conj(v0(i, j)) * v0(i2, j2) + std::conj(v1(i, j)) * v1(i2, j2);
        return ov / std::abs(ov);
    };
    double total = 0.0;
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < N; ++i) {
            const int ip = (i + 1) % N, jp = (j + 1) % N;
            const Complex w = link(i, j, ip, j) * link(ip, j, ip, jp) *
                              std::conj(link(i, jp, ip, jp)) * std::conj(link(i, j, i, jp));
            total += std::arg(w);
        }
    return static_cast<int>(std::lround(total / kTwoPi));
}

HopfSummary hopf_summary(const PseudoSpinGrid& n) {
    HopfSummary s;
    const VectorFieldGrid j = current_field(n);
    s.chern_slices = chern_slice_fluxes(j);
    for (int c = 0; c < 3; ++c)
        s.chern_slices_rounded[c] = static_cast<int>(std::lround(s.chern_slices[c]));
    const VectorFieldGrid a = gauge_field(j);
    s.hopf_value = hopf_invariant(j, a);
    s.hopf_rounded = static_cast<int>(std::lround(s.hopf_value));
    return s;
}

}  // namespace hopfloq

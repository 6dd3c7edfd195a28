#include "hopfloq/strip.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace hopfloq {

namespace {

const Complex kI(0.0, 1.0);

struct EigH {
    Eigen::MatrixXcd v;
    Eigen::VectorXd ev;
};

EigH eigh(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    return {es.eigenvectors(), es.eigenvalues()};
}

Eigen::MatrixXcd expfac(const EigH& e, double t) {
    Eigen::VectorXcd d(e.ev.size());
    for (Eigen::Index i = 0; i < e.ev.size(); ++i)
        d(i) = std::exp(-kI * e.ev(i) * t);
    return e.v * d.asDiagonal() * e.v.adjoint();
}

Eigen::MatrixXcd strip_unitary_piecewise(const PiecewiseDrive& d, int Nx, double k2,
                                         double start) {
    const StripHamiltonian h1 = build_strip_static(d.mu1, 0.0, Nx, k2);
    // Open-boundary restriction of the flattened bulk model; the chiral edge
    // branch of a nontrivial mu2 is what generates the in-gap quasienergies.
    const StripHamiltonian h2f = flat_strip_hamiltonian(d.mu2, d.eps0(), Nx, k2);
    const EigH e1 = eigh(h1.matrix), e2 = eigh(h2f.matrix);

    const double t_end = start + d.period;
    std::vector<double> cuts;
    const long n_lo = static_cast<long>(std::floor(start / d.period)) - 1;
    const long n_hi = static_cast<long>(std::ceil(t_end / d.period)) + 1;
    for (long n = n_lo; n <= n_hi; ++n)
        for (double b : {n * d.period, n * d.period + d.t0})
            if (b > start && b < t_end) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.insert(cuts.begin(), start);
    cuts.push_back(t_end);

    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(2 * Nx, 2 * Nx);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b <= a) continue;
        double tm = std::fmod(0.5 * (a + b), d.period);
        if (tm < 0.0) tm += d.period;
        const bool seg1 = tm > 0.0 && tm <= d.t0;
        u = (expfac(seg1 ? e1 : e2, b - a) * u).eval();
    }
    return u;
}

Eigen::MatrixXcd strip_unitary_harmonic_steps(const HarmonicDrive& d, int Nx, double k2,
                                              double start, int n_steps) {
    const StripHamiltonian h0 = build_strip_static(d.mu, 0.0, Nx, k2);
    const EigH e0 = eigh(h0.matrix);
    const int m = 2 * Nx;

    // Fourth-order (triple-jump) composition of the split step
    //   B(t, tau/2) A(tau) B(t+tau, tau/2),
    // with A the static flow and B the diagonal sigma_z cos(omega t) factor.
    const double w1 = 1.0 / (2.0 - std::cbrt(2.0));
    const double w0 = 1.0 - 2.0 * w1;
    const double dt = d.period() / n_steps;
    const Eigen::MatrixXcd u1 = expfac(e0, w1 * dt);
    const Eigen::MatrixXcd u0 = expfac(e0, w0 * dt);

    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(m, m);
    double t = start;

    auto flow_b = [&](double tau_half) {
        const double c = std::cos(d.omega * t);
        const Complex up = std::exp(-kI * c * tau_half);
        const Complex dn = std::exp(kI * c * tau_half);
        for (int x = 0; x < Nx; ++x) {
            u.row(2 * x) *= up;
            u.row(2 * x + 1) *= dn;
        }
    };
    auto strang = [&](double tau, const Eigen::MatrixXcd& ua) {
        flow_b(0.5 * tau);
        u = (ua * u).eval();
        t += tau;
        flow_b(0.5 * tau);
    };

    for (int s = 0; s < n_steps; ++s) {
        strang(w1 * dt, u1);
        strang(w0 * dt, u0);
        strang(w1 * dt, u1);
    }
    return u;
}

Eigen::MatrixXcd strip_unitary_harmonic(const HarmonicDrive& d, int Nx, double k2,
                                        double start, const StripStepOptions& opts) {
    int n = opts.initial_steps;
    Eigen::MatrixXcd u = strip_unitary_harmonic_steps(d, Nx, k2, start, n);
    const double scale = std::sqrt(static_cast<double>(2 * Nx));
    while (2 * n <= opts.max_steps) {
        Eigen::MatrixXcd u2 = strip_unitary_harmonic_steps(d, Nx, k2, start, 2 * n);
        if ((u - u2).norm() / scale < opts.tol) return u2;
        u = std::move(u2);
        n *= 2;
    }
    throw NonConvergenceError("strip_period_unitary: step doubling did not converge");
}

struct StripEigen {
    std::vector<double> quasienergy;        // ascending
    Eigen::MatrixXcd vectors;               // columns in same order
};

StripEigen strip_eigen(const Eigen::MatrixXcd& u, double period) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
    const int m = static_cast<int>(u.rows());
    std::vector<int> order(m);
    std::vector<double> eps(m);
    for (int i = 0; i < m; ++i) {
        order[i] = i;
        eps[i] = wrap_pm_pi(-std::arg(es.eigenvalues()(i))) / period;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return eps[a] < eps[b]; });
    StripEigen out;
    out.quasienergy.resize(m);
    out.vectors.resize(m, m);
    for (int i = 0; i < m; ++i) {
        out.quasienergy[i] = eps[order[i]];
        out.vectors.col(i) = es.eigenvectors().col(order[i]).normalized();
    }
    return out;
}

std::pair<double, double> edge_weights(const Eigen::VectorXcd& psi, int Nx, int w) {
    double left = 0.0, right = 0.0;
    for (int x = 0; x < w; ++x)
        left += std::norm(psi(2 * x)) + std::norm(psi(2 * x + 1));
    for (int x = Nx - w; x < Nx; ++x)
        right += std::norm(psi(2 * x)) + std::norm(psi(2 * x + 1));
    return {left, right};
}

double circular_diff(double a, double b, double period) {
    double d = std::fmod(a - b, period);
    if (d > 0.5 * period) d -= period;
    if (d < -0.5 * period) d += period;
    return d;
}

struct ProfileCandidate {
    bool found = false;
    double dist = 1e300;
    EdgeProfile profile;
};

/// One pass over the k2 columns. When `centers` is nonempty, the per-column
/// propagator is also mined for the best (most gap-centered) edge-localized
/// state near each center, so profile extraction costs no extra scan.
SpectrumTable spectrum_impl(const DriveProtocol& drive, int Nx, int k2_points,
                            const StripStepOptions& opts, bool parallel,
                            const std::vector<double>& centers = {}, double window = 0.0,
                            double weight_threshold = 0.8,
                            std::vector<ProfileCandidate>* candidates = nullptr) {
    if (Nx < 8) throw ConfigError("quasienergy_spectrum: Nx must be >= 8");
    if (k2_points < 2) throw ConfigError("quasienergy_spectrum: need at least 2 k2 points");
    SpectrumTable table;
    table.nx = Nx;
    table.k2_points = k2_points;
    table.edge_window = default_edge_window(Nx);
    table.period = drive_period(drive);
    const int m = 2 * Nx;
    const double zone = kTwoPi / table.period;
    table.rows.resize(static_cast<std::size_t>(k2_points) * m);
    if (candidates) candidates->assign(static_cast<std::size_t>(k2_points) * centers.size(), {});

    bool failed = false;
    std::string err;
    auto column = [&](int c) {
        // Half-offset uniform grid: still closed under k2 -> -k2, but avoids
        // k2 = 0 where the flattened nontrivial strip has an exact zero-energy
        // edge crossing (sgn(H) undefined there).
        const double k2 = kTwoPi * (c + 0.5) / k2_points;
        try {
            const Eigen::MatrixXcd u = strip_period_unitary(drive, Nx, k2, 0.0, opts);
            const StripEigen se = strip_eigen(u, table.period);
            for (int b = 0; b < m; ++b) {
                SpectrumRow& row = table.rows[static_cast<std::size_t>(c) * m + b];
                row.k2 = k2;
                row.band = b;
                row.quasienergy = se.quasienergy[b];
                auto [l, r] = edge_weights(se.vectors.col(b), Nx, table.edge_window);
                row.w_left = l;
                row.w_right = r;
                if (!candidates) continue;
                for (std::size_t g = 0; g < centers.size(); ++g) {
                    const double dist =
                        std::abs(circular_diff(row.quasienergy, centers[g], zone));
                    if (dist > window) continue;
                    if (std::max(l, r) <= weight_threshold) continue;
                    ProfileCandidate& cand =
                        (*candidates)[static_cast<std::size_t>(c) * centers.size() + g];
                    if (cand.found && dist >= cand.dist) continue;
                    cand.found = true;
                    cand.dist = dist;
                    cand.profile.k2 = k2;
                    cand.profile.quasienergy = row.quasienergy;
                    cand.profile.side = l >= r ? -1 : 1;
                    cand.profile.probability.assign(Nx, 0.0);
                    for (int x = 0; x < Nx; ++x)
                        cand.profile.probability[x] =
                            std::norm(se.vectors(2 * x, b)) + std::norm(se.vectors(2 * x + 1, b));
                }
            }
        } catch (const std::exception& e) {
#pragma omp critical
            {
                if (!failed) { failed = true; err = e.what(); }
            }
        }
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < k2_points; ++c) {
            if (!failed) column(c);
        }
    } else {
        for (int c = 0; c < k2_points; ++c) column(c);
    }
    if (failed) throw NonConvergenceError(err);
    return table;
}

/// Ascending-column reduction (deterministic under any thread count).
std::optional<EdgeProfile> best_candidate(const std::vector<ProfileCandidate>& candidates,
                                          std::size_t n_centers, std::size_t g) {
    const ProfileCandidate* best = nullptr;
    for (std::size_t c = 0; c * n_centers + g < candidates.size(); ++c) {
        const ProfileCandidate& cand = candidates[c * n_centers + g];
        if (!cand.found) continue;
        if (!best || cand.dist < best->dist) best = &cand;
    }
    if (!best) return std::nullopt;
    return best->profile;
}

/// Least-squares slope of log p over the decaying region; |psi|^2 ~ exp(-2x/xi).
void fit_localization_length(EdgeProfile& p) {
    const int Nx = static_cast<int>(p.probability.size());
    const int lo = 2, hi = std::max(lo + 2, Nx / 3);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int s = lo; s < hi; ++s) {
        const int site = p.side < 0 ? s : Nx - 1 - s;
        const double q = std::max(p.probability[site], 1e-300);
        sx += s;
        sy += std::log(q);
        sxx += static_cast<double>(s) * s;
        sxy += s * std::log(q);
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    p.localization_length = slope < 0.0 ? -2.0 / slope : 1e300;
}

}  // namespace

StripHamiltonian build_strip_static(double mu, double lambda_z, int Nx, double k2) {
    if (Nx < 1) throw ConfigError("build_strip_static: Nx must be >= 1");
    StripHamiltonian h;
    h.nx = Nx;
    h.k2 = k2;
    h.matrix = Eigen::MatrixXcd::Zero(2 * Nx, 2 * Nx);

    Eigen::Matrix2cd onsite, hop;
    const double hz0 = mu + std::cos(k2) + lambda_z;
    onsite << hz0, -kI * std::sin(k2),
              kI * std::sin(k2), -hz0;
    const double hopz = 0.5 * (1.0 + std::cos(k2));
    hop << hopz, -0.5 * kI,
           -0.5 * kI, -hopz;

    for (int x = 0; x < Nx; ++x) {
        h.matrix.block<2, 2>(2 * x, 2 * x) = onsite;
        if (x + 1 < Nx) {
            h.matrix.block<2, 2>(2 * (x + 1), 2 * x) = hop;
            h.matrix.block<2, 2>(2 * x, 2 * (x + 1)) = hop.adjoint();
        }
    }
    return h;
}

StripHamiltonian flatten_strip(const StripHamiltonian& h, double eps0, double gap_tol) {
    const EigH e = eigh(h.matrix);
    if (e.ev.cwiseAbs().minCoeff() <= gap_tol)
        throw GapClosingError("flatten_strip: eigenvalue within gap tolerance of zero");
    Eigen::VectorXd flat(e.ev.size());
    for (Eigen::Index i = 0; i < e.ev.size(); ++i)
        flat(i) = e.ev(i) > 0.0 ? eps0 : -eps0;
    StripHamiltonian out;
    out.nx = h.nx;
    out.k2 = h.k2;
    out.matrix = e.v * flat.asDiagonal() * e.v.adjoint();
    out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();
    return out;
}

StripHamiltonian flat_strip_hamiltonian(double mu, double eps0, int Nx, double k2,
                                        int nk1) {
    if (Nx < 1) throw ConfigError("flat_strip_hamiltonian: Nx must be >= 1");
    if (nk1 < 8) throw ConfigError("flat_strip_hamiltonian: nk1 must be >= 8");

    // Hopping block t_d = (eps0/nk1) sum_k1 e^{i k1 d} h_hat(k1,k2).sigma;
    // exponential decay in |d| for a gapped bulk, so keeping all |d| < Nx is
    // the full open-boundary restriction, not an extra cutoff.
    std::vector<Eigen::Matrix2cd> t(2 * Nx - 1, Eigen::Matrix2cd::Zero());
    for (int m = 0; m < nk1; ++m) {
        const double k1 = kTwoPi * m / nk1;
        const BlochVector h = h_vector(Momentum2(k1, k2), mu);
        const double n = h.norm();
        if (n <= kGapTolerance)
            throw GapClosingError("flat_strip_hamiltonian: |h| vanishes on the k1 grid");
        Eigen::Matrix2cd hs;
        hs << h.z / n, (h.x - kI * h.y) / n,
              (h.x + kI * h.y) / n, -h.z / n;
        for (int d = -(Nx - 1); d <= Nx - 1; ++d)
            t[d + Nx - 1] += std::exp(kI * (k1 * d)) * hs;
    }
    for (auto& b : t) b *= eps0 / nk1;

    StripHamiltonian out;
    out.nx = Nx;
    out.k2 = k2;
    out.matrix = Eigen::MatrixXcd::Zero(2 * Nx, 2 * Nx);
    for (int x = 0; x < Nx; ++x)
        for (int y = 0; y < Nx; ++y)
            out.matrix.block<2, 2>(2 * x, 2 * y) = t[(x - y) + Nx - 1];
    out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();
    return out;
}

Eigen::MatrixXcd strip_period_unitary(const DriveProtocol& drive, int Nx, double k2,
                                      double start_time, const StripStepOptions& opts) {
    if (const auto* p = std::get_if<PiecewiseDrive>(&drive))
        return strip_unitary_piecewise(*p, Nx, k2, start_time);
    return strip_unitary_harmonic(std::get<HarmonicDrive>(drive), Nx, k2, start_time, opts);
}

SpectrumTable quasienergy_spectrum(const DriveProtocol& drive, int Nx, int k2_points,
                                   const StripStepOptions& opts) {
    return spectrum_impl(drive, Nx, k2_points, opts, true);
}

SpectrumTable quasienergy_spectrum_serial(const DriveProtocol& drive, int Nx, int k2_points,
                                          const StripStepOptions& opts) {
    return spectrum_impl(drive, Nx, k2_points, opts, false);
}

std::vector<EdgeMode> edge_modes(const SpectrumTable& spec, double gap_center,
                                 double window, double weight_threshold) {
    const int m = 2 * spec.nx;
    const double zone = kTwoPi / spec.period;
    const double dk = kTwoPi / spec.k2_points;

    auto candidates_at = [&](int c) {
        std::vector<const SpectrumRow*> out;
        for (int b = 0; b < m; ++b) {
            const SpectrumRow& r = spec.rows[static_cast<std::size_t>(c) * m + b];
            if (std::abs(circular_diff(r.quasienergy, gap_center, zone)) > window) continue;
            if (std::max(r.w_left, r.w_right) <= weight_threshold) continue;
            out.push_back(&r);
        }
        return out;
    };

    std::vector<EdgeMode> modes;
    for (int c = 0; c < spec.k2_points; ++c) {
        for (const SpectrumRow* r : candidates_at(c)) {
            EdgeMode mode;
            mode.k2 = r->k2;
            mode.quasienergy = r->quasienergy;
            mode.side = r->w_left >= r->w_right ? -1 : 1;

            // branch continuation: nearest same-side candidate at k2 +- dk
            const int cm = (c - 1 + spec.k2_points) % spec.k2_points;
            const int cp = (c + 1) % spec.k2_points;
            const SpectrumRow* prev = nullptr;
            const SpectrumRow* next = nullptr;
            for (const SpectrumRow* q : candidates_at(cm)) {
                const int qside = q->w_left >= q->w_right ? -1 : 1;
                if (qside != mode.side) continue;
                if (!prev || std::abs(circular_diff(q->quasienergy, r->quasienergy, zone)) <
                                 std::abs(circular_diff(prev->quasienergy, r->quasienergy, zone)))
                    prev = q;
            }
            for (const SpectrumRow* q : candidates_at(cp)) {
                const int qside = q->w_left >= q->w_right ? -1 : 1;
                if (qside != mode.side) continue;
                if (!next || std::abs(circular_diff(q->quasienergy, r->quasienergy, zone)) <
                                 std::abs(circular_diff(next->quasienergy, r->quasienergy, zone)))
                    next = q;
            }
            if (prev && next) {
                mode.velocity =
                    circular_diff(next->quasienergy, prev->quasienergy, zone) / (2.0 * dk);
                mode.has_velocity = true;
            }
            modes.push_back(mode);
        }
    }
    return modes;
}

StripScanResult strip_scan(const DriveProtocol& drive, int Nx, int k2_points, double window,
                           double weight_threshold, const StripStepOptions& opts) {
    StripScanResult out;
    std::vector<ProfileCandidate> candidates;
    const double zone_half = kPi / drive_period(drive);
    const std::vector<double> centers{0.0, zone_half};
    out.spectrum = spectrum_impl(drive, Nx, k2_points, opts, true, centers, window,
                                 weight_threshold, &candidates);
    out.gap0 = best_candidate(candidates, centers.size(), 0);
    out.gap_pi = best_candidate(candidates, centers.size(), 1);
    if (out.gap0) fit_localization_length(*out.gap0);
    if (out.gap_pi) fit_localization_length(*out.gap_pi);
    return out;
}

EdgeProfile edge_profile(const DriveProtocol& drive, int Nx, int k2_points,
                         double gap_center, double window, double weight_threshold,
                         const StripStepOptions& opts) {
    std::vector<ProfileCandidate> candidates;
    const std::vector<double> centers{gap_center};
    spectrum_impl(drive, Nx, k2_points, opts, true, centers, window, weight_threshold,
                  &candidates);
    std::optional<EdgeProfile> best = best_candidate(candidates, 1, 0);
    if (!best)
        throw NoEdgeModeError("edge_profile: no edge-localized state in the window");
    fit_localization_length(*best);
    return *best;
}

std::vector<LocalizationPoint> localization_study(const PiecewiseDrive& base,
                                                  const std::vector<double>& t0_list,
                                                  int Nx, int k2_points,
                                                  double weight_threshold,
                                                  const StripStepOptions& opts) {
    std::vector<LocalizationPoint> out;
    for (double t0 : t0_list) {
        PiecewiseDrive d = base;
        d.t0 = t0;
        DriveProtocol drive = d;
        validate_drive(drive);
        const double window = 0.1 * kPi / d.period;
        const EdgeProfile p =
            edge_profile(drive, Nx, k2_points, 0.0, window, weight_threshold, opts);
        out.push_back({t0, p.localization_length, p.k2});
    }
    return out;
}

double alpha_flatness_check(const DriveProtocol& drive, int Nx, double k2,
                            const std::vector<double>& alpha_list,
                            const StripStepOptions& opts) {
    const double T = drive_period(drive);
    const double omega = kTwoPi / T;
    const int m = 2 * Nx;

    std::vector<std::vector<double>> phases;
    for (double a : alpha_list) {
        const Eigen::MatrixXcd u = strip_period_unitary(drive, Nx, k2, a / omega, opts);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(u);
        std::vector<double> p(m);
        for (int i = 0; i < m; ++i) p[i] = wrap_pm_pi(std::arg(es.eigenvalues()(i)));
        std::sort(p.begin(), p.end());
        phases.push_back(std::move(p));
    }

    // circularly aligned sorted-spectrum distance
    auto dist = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double best = 1e300;
        for (int shift = 0; shift < m; ++shift) {
            double worst = 0.0;
            for (int i = 0; i < m; ++i)
                worst = std::max(worst, std::abs(wrap_pm_pi(a[i] - b[(i + shift) % m])));
            best = std::min(best, worst);
        }
        return best;
    };

    double worst = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i)
        for (std::size_t j = i + 1; j < phases.size(); ++j)
            worst = std::max(worst, dist(phases[i], phases[j]));
    return worst;
}

}  // namespace hopfloq

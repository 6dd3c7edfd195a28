#include "hopfloq/curves.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hopfloq {

namespace {

struct Crossing {
    Vec3 pos;  // continuous grid-index coordinates
    double nz = 0.0;  // bilinear n_z at the crossing
    long cell[2];
    int link[2] = {-1, -1};

    void add_link(int other) {
        if (link[0] < 0) link[0] = other;
        else if (link[1] < 0) link[1] = other;
    }
};

int wrap_idx(int v, int n) {
    v %= n;
    return v < 0 ? v + n : v;
}

/// Roots of the bilinear system (n_x, n_y) = 0 on a face; corner order
/// f00, f10, f01, f11 in local (s, t) coordinates.
std::vector<std::pair<double, double>> bilinear_zeros(const double fx[4], const double fy[4]) {
    const double a1 = fx[0], b1 = fx[1] - fx[0], c1 = fx[2] - fx[0],
                 d1 = fx[0] - fx[1] - fx[2] + fx[3];
    const double a2 = fy[0], b2 = fy[1] - fy[0], c2 = fy[2] - fy[0],
                 d2 = fy[0] - fy[1] - fy[2] + fy[3];
    const double A = b2 * d1 - d2 * b1;
    const double B = a2 * d1 + b2 * c1 - c2 * b1 - d2 * a1;
    const double C = a2 * c1 - c2 * a1;

    std::vector<double> roots;
    const double tol = 1e-12;
    if (std::abs(A) < tol * (std::abs(B) + std::abs(C) + tol)) {
        if (std::abs(B) > tol) roots.push_back(-C / B);
    } else {
        const double disc = B * B - 4.0 * A * C;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            // numerically stable pair
            const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
            roots.push_back(q / A);
            if (std::abs(q) > tol) roots.push_back(C / q);
            else roots.push_back(0.0);
        }
    }
    std::vector<std::pair<double, double>> out;
    const double edge = 1e-9;
    // The resultant roots are necessary but not sufficient: degenerate conics
    // (e.g. a component vanishing on a whole edge) produce noise roots, so
    // every candidate is checked against both bilinear forms.
    const double scale_x = std::max({std::abs(fx[0]), std::abs(fx[1]),
                                     std::abs(fx[2]), std::abs(fx[3])});
    const double scale_y = std::max({std::abs(fy[0]), std::abs(fy[1]),
                                     std::abs(fy[2]), std::abs(fy[3])});
    for (double s : roots) {
        if (!(s >= -edge && s <= 1.0 + edge)) continue;
        double t;
        const double den1 = c1 + d1 * s, den2 = c2 + d2 * s;
        if (std::abs(den1) >= std::abs(den2)) {
            if (std::abs(den1) < tol) continue;
            t = -(a1 + b1 * s) / den1;
        } else {
            t = -(a2 + b2 * s) / den2;
        }
        if (!(t >= -edge && t <= 1.0 + edge)) continue;
        const double rx = a1 + b1 * s + c1 * t + d1 * s * t;
        const double ry = a2 + b2 * s + c2 * t + d2 * s * t;
        if (std::abs(rx) > 1e-6 * (scale_x + tol) || std::abs(ry) > 1e-6 * (scale_y + tol))
            continue;
        out.emplace_back(std::clamp(s, 0.0, 1.0), std::clamp(t, 0.0, 1.0));
    }
    // drop duplicate roots (tangential contact)
    if (out.size() == 2 &&
        std::abs(out[0].first - out[1].first) < 1e-9 &&
        std::abs(out[0].second - out[1].second) < 1e-9)
        out.pop_back();
    return out;
}

double minimal_image(double d, double period) {
    d = std::fmod(d, period);
    if (d > 0.5 * period) d -= period;
    if (d < -0.5 * period) d += period;
    return d;
}

Vec3 minimal_image3(const Vec3& d, double period) {
    return {minimal_image(d.x, period), minimal_image(d.y, period),
            minimal_image(d.z, period)};
}

}  // namespace

std::vector<PreimageCurve> preimage_curves(const PseudoSpinGrid& g, Pole pole) {
    const int N[3] = {g.n1, g.n2, g.n3};
    const auto h = g.spacing();

    const double want_nz = pole == Pole::North ? 1.0 : -1.0;

    double max_perp = 0.0, mean_nz = 0.0;
    for (const auto& v : g.data) {
        max_perp = std::max(max_perp, std::hypot(v.x, v.y));
        mean_nz += v.z;
    }
    if (max_perp < 1e-9) {
        if (mean_nz * want_nz > 0.0)
            throw DegeneratePreimageError("preimage_curves: field constant at the requested "
                                          "pole; preimage is the whole torus");
        return {};  // the opposite pole is never reached
    }

    std::vector<Crossing> crossings;
    std::map<long, std::vector<int>> by_cell;

    auto cell_id = [&](int i, int j, int l) {
        return (static_cast<long>(wrap_idx(l, N[2])) * N[1] + wrap_idx(j, N[1])) * N[0] +
               wrap_idx(i, N[0]);
    };

    for (int axis = 0; axis < 3; ++axis) {
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;
        int e[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        e[0][0] = e[1][1] = e[2][2] = 1;
        for (int l = 0; l < N[2]; ++l)
            for (int j = 0; j < N[1]; ++j)
                for (int i = 0; i < N[0]; ++i) {
                    const int base[3] = {i, j, l};
                    auto corner = [&](int du, int dv) {
                        return g.atp(base[0] + du * e[u][0] + dv * e[v][0],
                                     base[1] + du * e[u][1] + dv * e[v][1],
                                     base[2] + du * e[u][2] + dv * e[v][2]);
                    };
                    const Vec3 c00 = corner(0, 0), c10 = corner(1, 0),
                               c01 = corner(0, 1), c11 = corner(1, 1);
                    const double fx[4] = {c00.x, c10.x, c01.x, c11.x};
                    const double fy[4] = {c00.y, c10.y, c01.y, c11.y};
                    // All crossings of the (n_x, n_y) zero set are collected;
                    // dropping one pole's crossings here would break the
                    // even-count parity per cell wherever the interpolated n_z
                    // changes sign along an under-resolved arc. Curves are
                    // classified by pole only after they close.
                    for (auto [s, t] : bilinear_zeros(fx, fy)) {
                        Crossing c;
                        c.nz = (1 - s) * (1 - t) * c00.z + s * (1 - t) * c10.z +
                               (1 - s) * t * c01.z + s * t * c11.z;
                        double p[3] = {static_cast<double>(i), static_cast<double>(j),
                                       static_cast<double>(l)};
                        for (int d = 0; d < 3; ++d) p[d] += s * e[u][d] + t * e[v][d];
                        c.pos = {p[0], p[1], p[2]};
                        int lo[3] = {base[0], base[1], base[2]};
                        lo[axis] -= 1;
                        c.cell[0] = cell_id(base[0], base[1], base[2]);
                        c.cell[1] = cell_id(lo[0], lo[1], lo[2]);
                        const int id = static_cast<int>(crossings.size());
                        crossings.push_back(c);
                        by_cell[c.cell[0]].push_back(id);
                        by_cell[c.cell[1]].push_back(id);
                    }
                }
    }

    // physical minimal-image distance between crossings, for pair matching
    auto xdist = [&](int a, int b) {
        Vec3 d = crossings[a].pos - crossings[b].pos;
        d = {minimal_image(d.x, N[0]) * h[0], minimal_image(d.y, N[1]) * h[1],
             minimal_image(d.z, N[2]) * h[2]};
        // arcs from opposite poles sharing a cell must not be joined
        const double penalty = crossings[a].nz * crossings[b].nz < 0.0 ? 1e6 : 0.0;
        return d.norm() + penalty;
    };

    for (auto& [cell, ids] : by_cell) {
        if (ids.size() == 2) {
            crossings[ids[0]].add_link(ids[1]);
            crossings[ids[1]].add_link(ids[0]);
        } else if (ids.size() == 4) {
            // non-generic cell: match nearest crossing pairs
            const int p[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
            int best = 0;
            double bestd = 1e300;
            for (int m = 0; m < 3; ++m) {
                const double d = xdist(ids[p[m][0]], ids[p[m][1]]) +
                                 xdist(ids[p[m][2]], ids[p[m][3]]);
                if (d < bestd) { bestd = d; best = m; }
            }
            for (int pair = 0; pair < 2; ++pair) {
                const int a = ids[p[best][2 * pair]], b = ids[p[best][2 * pair + 1]];
                crossings[a].add_link(b);
                crossings[b].add_link(a);
            }
        } else if (!ids.empty()) {
            throw OpenCurveError("preimage_curves: cell with unpaired crossing count " +
                                 std::to_string(ids.size()) + " at cell id " +
                                 std::to_string(cell) + "; raise the grid resolution");
        }
    }

    // gradient frame for orientation
    auto grad_frame = [&](const Vec3& pos_idx) {
        const int i = wrap_idx(static_cast<int>(std::lround(pos_idx.x)), N[0]);
        const int j = wrap_idx(static_cast<int>(std::lround(pos_idx.y)), N[1]);
        const int l = wrap_idx(static_cast<int>(std::lround(pos_idx.z)), N[2]);
        const Vec3 gx = (g.atp(i + 1, j, l) - g.atp(i - 1, j, l)) / (2.0 * h[0]);
        const Vec3 gy = (g.atp(i, j + 1, l) - g.atp(i, j - 1, l)) / (2.0 * h[1]);
        const Vec3 gz = (g.atp(i, j, l + 1) - g.atp(i, j, l - 1)) / (2.0 * h[2]);
        // gradients of the target components n_x, n_y as spatial vectors
        const Vec3 grad_nx{gx.x, gy.x, gz.x};
        const Vec3 grad_ny{gx.y, gy.y, gz.y};
        return grad_nx.cross(grad_ny);
    };

    std::vector<PreimageCurve> curves;
    std::vector<char> visited(crossings.size(), 0);
    for (int start = 0; start < static_cast<int>(crossings.size()); ++start) {
        if (visited[start]) continue;
        if (crossings[start].link[0] < 0 || crossings[start].link[1] < 0)
            throw OpenCurveError("preimage_curves: dangling crossing; raise the grid resolution");
        std::vector<int> chain;
        int prev = -1, cur = start;
        while (true) {
            visited[cur] = 1;
            chain.push_back(cur);
            const Crossing& c = crossings[cur];
            const int nxt = c.link[0] == prev ? c.link[1] : c.link[0];
            if (nxt < 0)
                throw OpenCurveError("preimage_curves: curve failed to close");
            prev = cur;
            cur = nxt;
            if (cur == start) break;
        }

        double mean_nz = 0.0;
        for (int id : chain) mean_nz += crossings[id].nz;
        mean_nz /= static_cast<double>(chain.size());
        if (mean_nz * want_nz <= 0.0) continue;  // the other pole's curve

        PreimageCurve curve;
        curve.closed = true;
        curve.points.reserve(chain.size());
        for (int id : chain) {
            const Vec3& p = crossings[id].pos;
            curve.points.push_back({wrap_angle((p.x + g.origin[0]) * h[0]),
                                    wrap_angle((p.y + g.origin[1]) * h[1]),
                                    wrap_angle((p.z + g.origin[2]) * h[2])});
        }
        // windings and orientation from minimal-image steps
        Vec3 total{0, 0, 0};
        double orient = 0.0;
        const std::size_t m = curve.points.size();
        for (std::size_t s = 0; s < m; ++s) {
            const Vec3 d = minimal_image3(curve.points[(s + 1) % m] - curve.points[s], kTwoPi);
            total += d;
            const Vec3 frame = grad_frame(crossings[chain[s]].pos);
            orient += d.dot(frame);
        }
        for (int d = 0; d < 3; ++d) {
            const double w = (d == 0 ? total.x : d == 1 ? total.y : total.z) / kTwoPi;
            curve.winding[d] = static_cast<int>(std::lround(w));
        }
        // Both poles oriented along +grad(n_x) x grad(n_y); relative to the
        // pullback orientation this reverses the south curve, which fixes the
        // global sign so the degree-1 synthetic texture links to +1, matching
        // the -sum j.A integral convention.
        const double want = 1.0;
        if (orient * want < 0.0) {
            std::reverse(curve.points.begin(), curve.points.end());
            for (int d = 0; d < 3; ++d) curve.winding[d] = -curve.winding[d];
        }
        curves.push_back(std::move(curve));
    }
    return curves;
}

namespace {

/// Unwrap a closed torus curve into R^3 via minimal-image steps; returns
/// points with a final segment back to the (appended) start.
std::vector<Vec3> unwrap_closed(const PreimageCurve& c) {
    std::vector<Vec3> out;
    out.reserve(c.points.size() + 1);
    Vec3 cur = c.points.front();
    out.push_back(cur);
    for (std::size_t i = 1; i < c.points.size(); ++i) {
        cur += minimal_image3(c.points[i] - c.points[i - 1], kTwoPi);
        out.push_back(cur);
    }
    cur += minimal_image3(c.points.front() - c.points.back(), kTwoPi);
    out.push_back(cur);  // equals out.front() for a contractible curve
    return out;
}

double torus_min_distance(const PreimageCurve& a, const PreimageCurve& b) {
    double best = 1e300;
    for (const auto& p : a.points)
        for (const auto& q : b.points)
            best = std::min(best, minimal_image3(p - q, kTwoPi).norm());
    return best;
}

double gauss_sum_images(const std::vector<Vec3>& a, const std::vector<Vec3>& b,
                        bool parallel, int image_range = 1) {
    const long na = static_cast<long>(a.size()) - 1;
    const long nb = static_cast<long>(b.size()) - 1;
    const int ir = image_range;
    std::vector<double> partial(na, 0.0);

    auto body = [&](long i) {
        const Vec3 di = a[i + 1] - a[i];
        const Vec3 mi = 0.5 * (a[i + 1] + a[i]);
        double s = 0.0;
        for (int ox = -ir; ox <= ir; ++ox)
            for (int oy = -ir; oy <= ir; ++oy)
                for (int oz = -ir; oz <= ir; ++oz) {
                    const Vec3 off{kTwoPi * ox, kTwoPi * oy, kTwoPi * oz};
                    for (long j = 0; j < nb; ++j) {
                        const Vec3 dj = b[j + 1] - b[j];
                        const Vec3 mj = 0.5 * (b[j + 1] + b[j]) + off;
                        const Vec3 r = mi - mj;
                        const double rn = r.norm();
                        s += r.dot(di.cross(dj)) / (rn * rn * rn);
                    }
                }
        partial[i] = s;
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < na; ++i) body(i);
    } else {
        for (long i = 0; i < na; ++i) body(i);
    }
    return std::accumulate(partial.begin(), partial.end(), 0.0) / (4.0 * kPi);
}

LinkingResult linking_impl(const PreimageCurve& c1, const PreimageCurve& c2,
                           double min_separation, bool parallel) {
    if (!c1.closed || !c2.closed)
        throw OpenCurveError("linking_number: curves must be closed");
    if (!c1.contractible() || !c2.contractible())
        throw NonContractibleCurveError(
            "linking_number: Gauss formula requires null-homologous curves");
    if (torus_min_distance(c1, c2) <= min_separation)
        throw CurvesTooCloseError("linking_number: curves closer than the separation floor");

    const double raw = gauss_sum_images(unwrap_closed(c1), unwrap_closed(c2), parallel);
    LinkingResult r;
    r.raw = raw;
    r.value = static_cast<int>(std::lround(raw));
    r.residual = std::abs(raw - r.value);
    return r;
}

}  // namespace

LinkingResult linking_number(const PreimageCurve& c1, const PreimageCurve& c2,
                             double min_separation) {
    return linking_impl(c1, c2, min_separation, true);
}

LinkingResult linking_number_serial(const PreimageCurve& c1, const PreimageCurve& c2,
                                    double min_separation) {
    return linking_impl(c1, c2, min_separation, false);
}

double gauss_linking_sum(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    double s = 0.0;
    const std::size_t na = a.size(), nb = b.size();
    for (std::size_t i = 0; i < na; ++i) {
        const Vec3 di = a[(i + 1) % na] - a[i];
        const Vec3 mi = 0.5 * (a[(i + 1) % na] + a[i]);
        for (std::size_t j = 0; j < nb; ++j) {
            const Vec3 dj = b[(j + 1) % nb] - b[j];
            const Vec3 mj = 0.5 * (b[(j + 1) % nb] + b[j]);
            const Vec3 r = mi - mj;
            const double rn = r.norm();
            s += r.dot(di.cross(dj)) / (rn * rn * rn);
        }
    }
    return s / (4.0 * kPi);
}

namespace {

std::array<int, 3> family_winding(const std::vector<PreimageCurve>& family) {
    std::array<int, 3> w{0, 0, 0};
    for (const auto& c : family)
        for (int d = 0; d < 3; ++d) w[d] += c.winding[d];
    return w;
}

/// Chain-merges a family into one closed polyline: traverse each component
/// in order, stepping to the next via the shortest vertex-to-vertex connector,
/// then unwind the connectors in reverse to close. Every connector appears
/// once in each direction, so as a 1-current the merged cycle equals the sum
/// of the components exactly and the Gauss sum is unaffected by the joins.
PreimageCurve merge_family(const std::vector<PreimageCurve>& family) {
    PreimageCurve merged;
    merged.closed = true;
    merged.winding = family_winding(family);

    std::vector<Vec3> anchors;  // entry vertex on each component
    for (std::size_t c = 0; c < family.size(); ++c) {
        const auto& pts = family[c].points;
        std::size_t start = 0;
        if (c > 0) {
            double best = 1e300;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const double d = minimal_image3(pts[i] - anchors.back(), kTwoPi).norm();
                if (d < best) {
                    best = d;
                    start = i;
                }
            }
        }
        anchors.push_back(pts[start]);
        for (std::size_t i = 0; i <= pts.size(); ++i)
            merged.points.push_back(pts[(start + i) % pts.size()]);
        // the loop above re-appends the entry vertex, which doubles as the
        // connector endpoint toward the next component
    }
    for (std::size_t c = anchors.size(); c-- > 1;) merged.points.push_back(anchors[c - 1]);
    merged.points.pop_back();  // closure back to the first anchor is implicit
    return merged;
}

}  // namespace

LinkingResult family_linking_number(const std::vector<PreimageCurve>& north,
                                    const std::vector<PreimageCurve>& south,
                                    double min_separation) {
    bool all_contractible = true;
    for (const auto* f : {&north, &south})
        for (const auto& c : *f)
            if (!c.contractible()) all_contractible = false;

    if (all_contractible || north.empty() || south.empty()) {
        LinkingResult total;
        for (const auto& n : north)
            for (const auto& s : south) {
                const LinkingResult r = linking_number(n, s, min_separation);
                total.raw += r.raw;
            }
        total.value = static_cast<int>(std::lround(total.raw));
        total.residual = std::abs(total.raw - total.value);
        return total;
    }

    for (const auto* f : {&north, &south}) {
        const std::array<int, 3> w = family_winding(*f);
        if (w[0] != 0 || w[1] != 0 || w[2] != 0)
            throw NonContractibleCurveError(
                "family_linking_number: family with nonzero net winding has no "
                "well-defined linking number");
    }
    // the separation guard applies to the physical curves only; the merge
    // connectors may pass close to the other family, but their two opposite
    // copies cancel there exactly
    for (const auto& n : north)
        for (const auto& s : south)
            if (torus_min_distance(n, s) <= min_separation)
                throw CurvesTooCloseError(
                    "family_linking_number: curves closer than the separation floor");

    // the merged cycles span more than one cell along their winding axes, so
    // take a wider image shell than the single-component path needs
    const double raw = gauss_sum_images(unwrap_closed(merge_family(north)),
                                        unwrap_closed(merge_family(south)), true, 2);
    LinkingResult r;
    r.raw = raw;
    r.value = static_cast<int>(std::lround(raw));
    r.residual = std::abs(raw - r.value);
    return r;
}

}  // namespace hopfloq

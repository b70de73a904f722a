#include "mcsf/geom.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <unordered_map>

namespace mcsf {

double point_segment_dist(Vec2 p, Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double L2 = norm2(ab);
    if (L2 == 0.0) return dist(p, a);
    double t = std::clamp(dot(p - a, ab) / L2, 0.0, 1.0);
    return dist(p, a + ab * t);
}

namespace {

int orient(Vec2 a, Vec2 b, Vec2 c) {
    double v = cross(b - a, c - a);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool on_segment_collinear(Vec2 a, Vec2 b, Vec2 p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

} // namespace

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    int o1 = orient(a, b, c);
    int o2 = orient(a, b, d);
    int o3 = orient(c, d, a);
    int o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment_collinear(a, b, c)) return true;
    if (o2 == 0 && on_segment_collinear(a, b, d)) return true;
    if (o3 == 0 && on_segment_collinear(c, d, a)) return true;
    if (o4 == 0 && on_segment_collinear(c, d, b)) return true;
    return false;
}

double polyline_length(std::span<const Vec2> pts) {
    double L = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) L += dist(pts[i], pts[i + 1]);
    return L;
}

double point_polyline_dist(Vec2 p, std::span<const Vec2> pts) {
    if (pts.empty()) return std::numeric_limits<double>::infinity();
    if (pts.size() == 1) return dist(p, pts[0]);
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        d = std::min(d, point_segment_dist(p, pts[i], pts[i + 1]));
    return d;
}

namespace {

// Uniform-grid broad phase over segment bounding boxes. Cell size is the
// longest segment, so each segment covers a bounded number of cells.
struct SegGrid {
    double cell;
    Vec2 origin;
    std::unordered_map<int64_t, std::vector<int>> cells;

    static int64_t key(int ix, int iy) {
        return (static_cast<int64_t>(ix) << 32) ^ (static_cast<uint32_t>(iy));
    }

    void insert(int id, Vec2 a, Vec2 b) {
        int x0 = static_cast<int>(std::floor((std::min(a.x, b.x) - origin.x) / cell));
        int x1 = static_cast<int>(std::floor((std::max(a.x, b.x) - origin.x) / cell));
        int y0 = static_cast<int>(std::floor((std::min(a.y, b.y) - origin.y) / cell));
        int y1 = static_cast<int>(std::floor((std::max(a.y, b.y) - origin.y) / cell));
        for (int ix = x0; ix <= x1; ++ix)
            for (int iy = y0; iy <= y1; ++iy) cells[key(ix, iy)].push_back(id);
    }
};

} // namespace

bool polyline_is_simple(std::span<const Vec2> pts, bool closed, bool allow_vertex_touch) {
    size_t n = pts.size();
    if (n < 3) return true;
    size_t nseg = closed ? n : n - 1;

    auto seg = [&](size_t i) -> std::pair<Vec2, Vec2> {
        return {pts[i], pts[(i + 1) % n]};
    };

    double maxlen = 0.0;
    for (size_t i = 0; i < nseg; ++i) {
        auto [a, b] = seg(i);
        maxlen = std::max(maxlen, dist(a, b));
    }
    if (maxlen == 0.0) return false;

    SegGrid grid{maxlen, pts[0], {}};
    for (size_t i = 0; i < nseg; ++i) {
        auto [a, b] = seg(i);
        grid.insert(static_cast<int>(i), a, b);
    }

    for (auto& [k, ids] : grid.cells) {
        for (size_t u = 0; u < ids.size(); ++u) {
            for (size_t v = u + 1; v < ids.size(); ++v) {
                size_t i = static_cast<size_t>(ids[u]);
                size_t j = static_cast<size_t>(ids[v]);
                if (i > j) std::swap(i, j);
                bool adjacent = (j == i + 1) || (closed && i == 0 && j == nseg - 1);
                auto [a, b] = seg(i);
                auto [c, d] = seg(j);
                if (adjacent) {
                    // Shared node aside, adjacent segments must not overlap.
                    Vec2 shared = (j == i + 1) ? b : a;
                    Vec2 pi = (j == i + 1) ? a : b;
                    Vec2 pj = (j == i + 1) ? d : c;
                    if (orient(pi, shared, pj) == 0 &&
                        dot(pi - shared, pj - shared) > 0.0)
                        return false;
                    continue;
                }
                if (!segments_intersect(a, b, c, d)) continue;
                if (allow_vertex_touch) {
                    // A pinch point: endpoints of both segments coincide and
                    // the segments do not fold back over each other.
                    Vec2 shared;
                    bool found = false;
                    for (Vec2 va : {a, b}) {
                        for (Vec2 vb : {c, d}) {
                            if (va == vb) {
                                shared = va;
                                found = true;
                            }
                        }
                    }
                    if (found) {
                        Vec2 pi = (shared == a) ? b : a;
                        Vec2 pj = (shared == c) ? d : c;
                        bool overlap = orient(pi, shared, pj) == 0 &&
                                       dot(pi - shared, pj - shared) > 0.0;
                        if (!overlap) continue;
                    }
                }
                return false;
            }
        }
    }
    return true;
}

bool polylines_intersect(std::span<const Vec2> a, std::span<const Vec2> b,
                         double endpoint_slack) {
    auto near_shared_end = [&](Vec2 p) {
        if (endpoint_slack <= 0.0) return false;
        return dist(p, a.front()) < endpoint_slack || dist(p, a.back()) < endpoint_slack ||
               dist(p, b.front()) < endpoint_slack || dist(p, b.back()) < endpoint_slack;
    };
    for (size_t i = 0; i + 1 < a.size(); ++i) {
        for (size_t j = 0; j + 1 < b.size(); ++j) {
            if (!segments_intersect(a[i], a[i + 1], b[j], b[j + 1])) continue;
            if (near_shared_end(a[i]) && near_shared_end(a[i + 1])) continue;
            if (near_shared_end(b[j]) && near_shared_end(b[j + 1])) continue;
            return true;
        }
    }
    return false;
}

double hausdorff(std::span<const Vec2> a, std::span<const Vec2> b) {
    double d = 0.0;
    for (Vec2 p : a) d = std::max(d, point_polyline_dist(p, b));
    for (Vec2 p : b) d = std::max(d, point_polyline_dist(p, a));
    return d;
}

double polygon_signed_area(std::span<const Vec2> poly) {
    double s = 0.0;
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        Vec2 p = poly[i], q = poly[(i + 1) % n];
        s += cross(p, q);
    }
    return 0.5 * s;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> poly) {
    bool inside = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Vec2 a = poly[j], b = poly[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            double xint = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double point_polygon_boundary_dist(Vec2 p, std::span<const Vec2> poly) {
    double d = std::numeric_limits<double>::infinity();
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i)
        d = std::min(d, point_segment_dist(p, poly[i], poly[(i + 1) % n]));
    return d;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    size_t n = pts.size();
    if (n < 3) return pts;

    std::vector<Vec2> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) { // lower
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (size_t i = n - 1, t = k + 1; i-- > 0;) { // upper
        while (k >= t && cross(hull[k - 1] - hull[k - 2], pts[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

namespace {

// Abscissae/weights for 16-point Gauss-Legendre on [0,1].
constexpr std::array<double, 16> kG16X = {
    0.005299532504175031, 0.027712488463383700, 0.067184398806084128, 0.122297795822498446,
    0.191061877798678115, 0.270991611171386371, 0.359198224610370542, 0.452493745081181231,
    0.547506254918818769, 0.640801775389629458, 0.729008388828613629, 0.808938122201321885,
    0.877702204177501554, 0.932815601193915872, 0.972287511536616300, 0.994700467495824969};

constexpr std::array<double, 16> kG16W = {
    0.013576229705877047, 0.031126761969323946, 0.047579255841246392, 0.062314485627766936,
    0.074797994408288368, 0.084578259697501269, 0.091301707522461794, 0.094725305227534248,
    0.094725305227534248, 0.091301707522461794, 0.084578259697501269, 0.074797994408288368,
    0.062314485627766936, 0.047579255841246392, 0.031126761969323946, 0.013576229705877047};

} // namespace

std::span<const double> gauss16_nodes() { return kG16X; }
std::span<const double> gauss16_weights() { return kG16W; }

} // namespace mcsf

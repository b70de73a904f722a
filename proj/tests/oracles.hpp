// Test-only reference integrators, independent of the boundary-integral path
// used by the library.
#ifndef MCSF_TESTS_ORACLES_HPP
#define MCSF_TESTS_ORACLES_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "mcsf/geom.hpp"
#include "mcsf/potential.hpp"

namespace mcsf::testing {

// Adaptive quadtree integration of phi over a polygon. Cells well inside the
// region use tensor Gauss; cells near the boundary or near a singularity are
// subdivided, down to a floor where an area-fraction estimate is used.
inline double quadtree_cell(const PotentialField& field, std::span<const Vec2> poly, Vec2 lo,
                            double size, int depth) {
    Vec2 center = lo + Vec2{0.5 * size, 0.5 * size};
    double bdist = point_polygon_boundary_dist(center, poly);
    double half_diag = size * 0.7071067811865476;

    double sdist = field.nearest_distance(center);
    bool needs_split = (bdist <= half_diag) || (sdist <= 2.0 * size);

    if (!needs_split) {
        if (!point_in_polygon(center, poly)) return 0.0;
        // 4x4 tensor Gauss on the cell.
        static const double gx[4] = {0.069431844202973714, 0.330009478207571868,
                                     0.669990521792428132, 0.930568155797026286};
        static const double gw[4] = {0.173927422568726929, 0.326072577431273071,
                                     0.326072577431273071, 0.173927422568726929};
        double acc = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                acc += gw[a] * gw[b] * field.eval(lo + Vec2{gx[a] * size, gx[b] * size});
        return acc * size * size;
    }

    // Boundary cells stop at a fixed floor with an area-fraction estimate;
    // cells around a singularity keep splitting (the integrand blowup is
    // integrable but needs depth).
    if (depth >= 22 || (sdist > 2.0 * size && depth >= 14)) {
        // Area-fraction estimate with a 4x4 sample; the integrand is sampled
        // at the cell midpoints (bounded cells only reach here when tiny).
        double acc = 0.0;
        int hits = 0;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                Vec2 x = lo + Vec2{(a + 0.5) * size / 4.0, (b + 0.5) * size / 4.0};
                if (!point_in_polygon(x, poly)) continue;
                ++hits;
                if (field.nearest_distance(x) > 1e-12) acc += field.eval(x);
            }
        }
        (void)hits;
        return acc / 16.0 * size * size;
    }

    double h = 0.5 * size;
    return quadtree_cell(field, poly, lo, h, depth + 1) +
           quadtree_cell(field, poly, lo + Vec2{h, 0.0}, h, depth + 1) +
           quadtree_cell(field, poly, lo + Vec2{0.0, h}, h, depth + 1) +
           quadtree_cell(field, poly, lo + Vec2{h, h}, h, depth + 1);
}

inline double quadrature_weighted_area(const PotentialField& field, std::span<const Vec2> poly) {
    Vec2 lo = poly[0], hi = poly[0];
    for (Vec2 v : poly) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    double size = std::max(hi.x - lo.x, hi.y - lo.y) * 1.0000001;
    return quadtree_cell(field, poly, lo, size, 0);
}

// Plain Monte Carlo estimate of the same integral.
inline double monte_carlo_weighted_area(const PotentialField& field, std::span<const Vec2> poly,
                                        size_t samples, uint64_t seed) {
    Vec2 lo = poly[0], hi = poly[0];
    for (Vec2 v : poly) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
    double acc = 0.0;
    for (size_t i = 0; i < samples; ++i) {
        Vec2 x{ux(rng), uy(rng)};
        if (!point_in_polygon(x, poly)) continue;
        if (field.nearest_distance(x) <= 1e-12) continue;
        acc += field.eval(x);
    }
    return acc / static_cast<double>(samples) * (hi.x - lo.x) * (hi.y - lo.y);
}

} // namespace mcsf::testing

#endif

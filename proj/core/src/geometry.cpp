#include "idris/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace idris {

Vec3 normalized(Vec3 v) {
    const double n = norm(v);
    return n > 0.0 ? (1.0 / n) * v : v;
}

double angle_between_deg(Vec3 u, Vec3 v) {
    const double c = std::clamp(dot(u, v), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

double wrap_deg_180(double deg) {
    double w = std::fmod(deg + 180.0, 360.0);
    if (w < 0.0) w += 360.0;
    return w - 180.0;
}

double wrap_deg_360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    return w;
}

bool Box::contains(Vec3 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
           p.z <= max.z;
}

// Slab clipping of the parametric segment a + t (b - a), t in [0, 1].
bool segment_intersects(Vec3 a, Vec3 b, const Box& box) {
    const double origin[3] = {a.x, a.y, a.z};
    const double delta[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
    const double lo[3] = {box.min.x, box.min.y, box.min.z};
    const double hi[3] = {box.max.x, box.max.y, box.max.z};
    double t0 = 0.0;
    double t1 = 1.0;
    for (int k = 0; k < 3; ++k) {
        if (delta[k] == 0.0) {
            if (origin[k] < lo[k] || origin[k] > hi[k]) return false;
            continue;
        }
        double ta = (lo[k] - origin[k]) / delta[k];
        double tb = (hi[k] - origin[k]) / delta[k];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

bool segment_blocked(Vec3 a, Vec3 b, std::span<const Box> blockers) {
    return std::any_of(blockers.begin(), blockers.end(),
                       [&](const Box& box) { return segment_intersects(a, b, box); });
}

}  // namespace idris

#pragma once

#include <cmath>
#include <span>

namespace idris {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
Vec3 normalized(Vec3 v);

// Angle between two unit vectors, degrees in [0, 180].
double angle_between_deg(Vec3 u, Vec3 v);

double wrap_deg_180(double deg);
double wrap_deg_360(double deg);

// Closed axis-aligned box.
struct Box {
    Vec3 min;
    Vec3 max;

    bool contains(Vec3 p) const;
    friend bool operator==(const Box&, const Box&) = default;
};

bool segment_intersects(Vec3 a, Vec3 b, const Box& box);
bool segment_blocked(Vec3 a, Vec3 b, std::span<const Box> blockers);

}  // namespace idris

#pragma once

#include <cmath>
#include <ostream>

namespace leapfrog {

/// Point or vector in the meridian half-plane. `x` is the radial (r) component
/// and `y` the axial (z) component; the same type carries the stretched
/// variable y = (x - P) / eps and the scaled ring offsets q_j.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return a -= b; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;

    friend std::ostream& operator<<(std::ostream& os, Vec2 v) {
        return os << '(' << v.x << ", " << v.y << ')';
    }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// v^perp = (-v2, v1), the rotation matching grad^perp = (-d_z, d_r).
constexpr Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

}  // namespace leapfrog

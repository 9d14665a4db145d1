#ifndef NAVLEARN_VEC2_HPP_
#define NAVLEARN_VEC2_HPP_

#include <cmath>
#include <stdexcept>

namespace navlearn {

// 2D vector used for positions (m) and velocities (m/s).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  // Throws std::invalid_argument unless both components are finite.
  static Vec2 checked(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw std::invalid_argument("non-finite vector component");
    }
    return {x, y};
  }

  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr Vec2 &operator+=(const Vec2 &o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2 &operator-=(const Vec2 &o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2 &operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2 &b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2 &b) { return a -= b; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2 &, const Vec2 &) = default;
};

constexpr double dot(const Vec2 &a, const Vec2 &b) { return a.x * b.x + a.y * b.y; }

// z-component of the 3D cross product; positive when b is counterclockwise of a.
constexpr double det(const Vec2 &a, const Vec2 &b) { return a.x * b.y - a.y * b.x; }

constexpr double norm_sq(const Vec2 &a) { return dot(a, a); }
inline double norm(const Vec2 &a) { return std::sqrt(norm_sq(a)); }

// Zero vector maps to zero.
inline Vec2 normalized(const Vec2 &a) {
  const double n = norm(a);
  return n > 0.0 ? a / n : Vec2{};
}

// Rotated +90 degrees (counterclockwise).
constexpr Vec2 perp(const Vec2 &a) { return {-a.y, a.x}; }

inline Vec2 rotated(const Vec2 &a, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline bool is_finite(const Vec2 &a) { return std::isfinite(a.x) && std::isfinite(a.y); }

}  // namespace navlearn

#endif  // NAVLEARN_VEC2_HPP_

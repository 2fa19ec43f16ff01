#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fsl {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;
using Ten3 = std::array<std::array<std::array<double, 2>, 2>, 2>;           // T[i][j][k]
using Ten4 = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;

struct ChartPoint {
    double u1 = 0.0, u2 = 0.0;
    Vec2 v() const { return {u1, u2}; }
};

struct FiberVector {
    double y1 = 0.0, y2 = 0.0;
    Vec2 v() const { return {y1, y2}; }
    double norm() const { return std::hypot(y1, y2); }
};

inline ChartPoint chart(double u1, double u2) { return {u1, u2}; }
inline FiberVector fiber(double y1, double y2) { return {y1, y2}; }

// ---------------------------------------------------------------------------
// errors
// ---------------------------------------------------------------------------

struct SingularMetric : std::runtime_error {
    explicit SingularMetric(const std::string& what) : std::runtime_error(what) {}
};

struct NonSmoothEvaluation : std::runtime_error {
    explicit NonSmoothEvaluation(const std::string& what) : std::runtime_error(what) {}
};

struct NoClosure : std::runtime_error {
    explicit NoClosure(const std::string& what) : std::runtime_error(what) {}
};

struct RootBracketFailure : std::runtime_error {
    explicit RootBracketFailure(const std::string& what) : std::runtime_error(what) {}
};

struct NotDivergenceFree : std::runtime_error {
    explicit NotDivergenceFree(const std::string& what) : std::runtime_error(what) {}
};

struct FiberDependence : std::runtime_error {
    explicit FiberDependence(const std::string& what) : std::runtime_error(what) {}
};

struct NotMetrical : std::runtime_error {
    explicit NotMetrical(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// small 2x2 linear algebra
// ---------------------------------------------------------------------------

inline double det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

inline Mat2 inverse(const Mat2& m) {
    const double d = det(m);
    if (d == 0.0) throw SingularMetric("inverse: singular 2x2 matrix");
    return {{{m[1][1] / d, -m[0][1] / d}, {-m[1][0] / d, m[0][0] / d}}};
}

inline Vec2 mul(const Mat2& m, const Vec2& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

inline double quad_form(const Mat2& m, const Vec2& a, const Vec2& b) {
    return a[0] * (m[0][0] * b[0] + m[0][1] * b[1]) + a[1] * (m[1][0] * b[0] + m[1][1] * b[1]);
}

inline Vec2 add(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 scale(const Vec2& a, double s) { return {a[0] * s, a[1] * s}; }
inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }
inline double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// eigenvalues of a symmetric 2x2, smallest first
inline std::array<double, 2> sym_eigenvalues(const Mat2& m) {
    const double tr = m[0][0] + m[1][1];
    const double dt = det(m);
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - dt));
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

inline Mat2 rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {{{c, -s}, {s, c}}};
}

inline double max_abs(const Ten3& t) {
    double m = 0.0;
    for (const auto& a : t)
        for (const auto& b : a)
            for (double x : b) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs(const Ten4& t) {
    double m = 0.0;
    for (const auto& a : t) m = std::max(m, max_abs(a));
    return m;
}

}  // namespace fsl

#pragma once

// Truncated Taylor series in two fiber variables, total degree <= deg.
// Coefficient c(a,b) multiplies dy1^a dy2^b. Used to assemble geodesic
// spray jets from raw partial-derivative tables by exact algebra instead
// of hand-expanded Leibniz chains.

#include <algorithm>
#include <array>
#include <cassert>

namespace fsl {

class Series2 {
  public:
    static constexpr int kMaxDeg = 5;

    Series2() = default;
    explicit Series2(int deg) : deg_(deg) { assert(deg >= 0 && deg <= kMaxDeg); }

    int degree() const { return deg_; }

    double& at(int a, int b) { return c_[idx(a, b)]; }
    double at(int a, int b) const { return (a + b <= deg_) ? c_[idx(a, b)] : 0.0; }

    static Series2 constant(double v, int deg) {
        Series2 s(deg);
        s.at(0, 0) = v;
        return s;
    }

    // the affine series of the coordinate y_i around base value v
    static Series2 coordinate(int i, double v, int deg) {
        Series2 s(deg);
        s.at(0, 0) = v;
        if (deg >= 1) {
            if (i == 0) s.at(1, 0) = 1.0;
            else s.at(0, 1) = 1.0;
        }
        return s;
    }

    friend Series2 operator+(const Series2& x, const Series2& y) {
        Series2 r(std::min(x.deg_, y.deg_));
        r.for_each([&](int a, int b, double& v) { v = x.at(a, b) + y.at(a, b); });
        return r;
    }
    friend Series2 operator-(const Series2& x, const Series2& y) {
        Series2 r(std::min(x.deg_, y.deg_));
        r.for_each([&](int a, int b, double& v) { v = x.at(a, b) - y.at(a, b); });
        return r;
    }
    friend Series2 operator*(const Series2& x, double s) {
        Series2 r = x;
        for (double& v : r.c_) v *= s;
        return r;
    }
    friend Series2 operator*(double s, const Series2& x) { return x * s; }

    friend Series2 operator*(const Series2& x, const Series2& y) {
        const int deg = std::min(x.deg_, y.deg_);
        Series2 r(deg);
        for (int a1 = 0; a1 <= x.deg_; ++a1)
            for (int b1 = 0; a1 + b1 <= x.deg_; ++b1) {
                const double xv = x.at(a1, b1);
                if (xv == 0.0) continue;
                for (int a2 = 0; a1 + a2 <= deg; ++a2)
                    for (int b2 = 0; a1 + b1 + a2 + b2 <= deg; ++b2)
                        r.at(a1 + a2, b1 + b2) += xv * y.at(a2, b2);
            }
        return r;
    }

    // multiplicative inverse, requires nonzero constant term
    Series2 reciprocal() const {
        assert(c_[0] != 0.0);
        Series2 r = constant(1.0 / c_[0], deg_);
        const Series2 two = constant(2.0, deg_);
        // Newton iteration doubles the correct order each round
        for (int it = 0; it < 4; ++it) r = r * (two - (*this) * r);
        return r;
    }

    // partial derivative with respect to dy_i; degree drops by one
    Series2 diff(int i) const {
        Series2 r(std::max(0, deg_ - 1));
        r.for_each([&](int a, int b, double& v) {
            v = (i == 0) ? (a + 1) * at(a + 1, b) : (b + 1) * at(a, b + 1);
        });
        return r;
    }

    // mixed partial at the expansion point: coefficient times a! b!
    double partial(int a, int b) const {
        static constexpr std::array<double, 6> fact = {1, 1, 2, 6, 24, 120};
        return at(a, b) * fact[a] * fact[b];
    }

    template <class Fn>
    void for_each(Fn&& fn) {
        for (int a = 0; a <= deg_; ++a)
            for (int b = 0; a + b <= deg_; ++b) fn(a, b, c_[idx(a, b)]);
    }

  private:
    static constexpr int idx(int a, int b) {
        const int t = a + b;                 // total degree block
        return t * (t + 1) / 2 + b;
    }

    int deg_ = 0;
    std::array<double, (kMaxDeg + 1) * (kMaxDeg + 2) / 2> c_{};
};

}  // namespace fsl

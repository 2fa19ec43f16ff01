#pragma once

// Forward-mode dual numbers, nestable to arbitrary depth for higher-order
// mixed partial derivatives: Jet<Jet<double>> carries second derivatives,
// and so on. Each nesting level differentiates along one seeded direction.

#include <cmath>
#include <type_traits>

namespace fsl {

template <class T>
constexpr double primal_value(const T& x);

template <class T>
struct Jet {
    T f{};   // value
    T df{};  // derivative along this level's seed direction

    constexpr Jet() = default;
    constexpr Jet(const T& value) : f(value), df() {}
    constexpr Jet(const T& value, const T& deriv) : f(value), df(deriv) {}

    // broadcast from plain arithmetic through all nesting levels
    template <class S, class = std::enable_if_t<std::is_arithmetic_v<S> && !std::is_same_v<S, T>>>
    constexpr Jet(S s) : f(s), df() {}

    friend constexpr Jet operator+(const Jet& a, const Jet& b) { return {a.f + b.f, a.df + b.df}; }
    friend constexpr Jet operator-(const Jet& a, const Jet& b) { return {a.f - b.f, a.df - b.df}; }
    friend constexpr Jet operator-(const Jet& a) { return {-a.f, -a.df}; }
    friend constexpr Jet operator*(const Jet& a, const Jet& b) {
        return {a.f * b.f, a.f * b.df + a.df * b.f};
    }
    friend constexpr Jet operator/(const Jet& a, const Jet& b) {
        const T q = a.f / b.f;
        return {q, (a.df - q * b.df) / b.f};
    }

    friend constexpr Jet operator+(const Jet& a, double s) { return {a.f + s, a.df}; }
    friend constexpr Jet operator+(double s, const Jet& a) { return {a.f + s, a.df}; }
    friend constexpr Jet operator-(const Jet& a, double s) { return {a.f - s, a.df}; }
    friend constexpr Jet operator-(double s, const Jet& a) { return {s - a.f, -a.df}; }
    friend constexpr Jet operator*(const Jet& a, double s) { return {a.f * s, a.df * s}; }
    friend constexpr Jet operator*(double s, const Jet& a) { return {a.f * s, a.df * s}; }
    friend constexpr Jet operator/(const Jet& a, double s) { return {a.f / s, a.df / s}; }
    friend constexpr Jet operator/(double s, const Jet& a) {
        const T q = s / a.f;
        return {q, -q * a.df / a.f};
    }

    Jet& operator+=(const Jet& b) { return *this = *this + b; }
    Jet& operator-=(const Jet& b) { return *this = *this - b; }
    Jet& operator*=(const Jet& b) { return *this = *this * b; }
    Jet& operator/=(const Jet& b) { return *this = *this / b; }

    // comparisons look at the primal value only
    friend bool operator<(const Jet& a, const Jet& b) { return primal_value(a) < primal_value(b); }
    friend bool operator>(const Jet& a, const Jet& b) { return primal_value(a) > primal_value(b); }

    friend Jet sqrt(const Jet& a) {
        using std::sqrt;
        const T r = sqrt(a.f);
        return {r, a.df / (2.0 * r)};
    }
    friend Jet sin(const Jet& a) {
        using std::cos;
        using std::sin;
        return {sin(a.f), cos(a.f) * a.df};
    }
    friend Jet cos(const Jet& a) {
        using std::cos;
        using std::sin;
        return {cos(a.f), -sin(a.f) * a.df};
    }
    friend Jet exp(const Jet& a) {
        using std::exp;
        const T e = exp(a.f);
        return {e, e * a.df};
    }
    friend Jet log(const Jet& a) {
        using std::log;
        return {log(a.f), a.df / a.f};
    }
    friend Jet pow(const Jet& a, double e) {
        using std::pow;
        const T pm1 = pow(a.f, e - 1.0);
        return {pm1 * a.f, e * pm1 * a.df};
    }
};

constexpr double primal(double x) { return x; }
constexpr double derivative(double) { return 0.0; }

template <class T>
constexpr T primal(const Jet<T>& x) { return x.f; }
template <class T>
constexpr T derivative(const Jet<T>& x) { return x.df; }

constexpr double primal_value(double x) { return x; }
template <class T>
constexpr double primal_value(const Jet<T>& x) { return primal_value(x.f); }

// JetTower<N>::type = Jet<...Jet<double>...> nested N deep
template <int N>
struct JetTower {
    using type = Jet<typename JetTower<N - 1>::type>;
};
template <>
struct JetTower<0> {
    using type = double;
};
template <int N>
using JetN = typename JetTower<N>::type;

// constant (all derivative parts zero) at depth N
template <int N>
JetN<N> jet_const(double v) {
    if constexpr (N == 0) return v;
    else return JetN<N>{jet_const<N - 1>(v), jet_const<N - 1>(0.0)};
}

// seed with unit derivative at every level whose bit is set in `mask`
template <int N>
JetN<N> jet_seed(double v, unsigned mask) {
    if constexpr (N == 0) {
        return v;
    } else {
        const bool hot = (mask >> (N - 1)) & 1u;
        return JetN<N>{jet_seed<N - 1>(v, mask), hot ? jet_const<N - 1>(1.0) : jet_const<N - 1>(0.0)};
    }
}

// peel all N derivative layers: the fully mixed partial
template <int N>
double jet_extract(const JetN<N>& x) {
    if constexpr (N == 0) return x;
    else return jet_extract<N - 1>(derivative(x));
}

}  // namespace fsl

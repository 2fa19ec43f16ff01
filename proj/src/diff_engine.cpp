#include "fsl/diff_engine.hpp"

#include <cmath>
#include <vector>

namespace fsl {

DiffEngine DiffEngine::dual_engine() { return DiffEngine(Kind::dual); }
DiffEngine DiffEngine::fd_engine() { return DiffEngine(Kind::fd); }

DiffEngine DiffEngine::for_metric(const MetricField& m) {
    return m.has_closed_form() ? dual_engine() : fd_engine();
}

namespace {

// direction list for a multi-index: 0,1 = u1,u2; 2,3 = y1,y2
std::vector<int> directions(const PartialIndex& idx) {
    std::vector<int> d;
    d.reserve(idx.total());
    for (int k = 0; k < idx.x1; ++k) d.push_back(0);
    for (int k = 0; k < idx.x2; ++k) d.push_back(1);
    for (int k = 0; k < idx.y1; ++k) d.push_back(2);
    for (int k = 0; k < idx.y2; ++k) d.push_back(3);
    return d;
}

// want: 0 -> F, 1 -> E
template <int N>
double dual_partial_impl(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                         const std::vector<int>& dirs, int want) {
    unsigned mask[4] = {0, 0, 0, 0};
    for (int level = 0; level < N; ++level) mask[dirs[level]] |= 1u << level;
    const std::array<JetN<N>, 2> x = {jet_seed<N>(p.u1, mask[0]), jet_seed<N>(p.u2, mask[1])};
    const std::array<JetN<N>, 2> y = {jet_seed<N>(v.y1, mask[2]), jet_seed<N>(v.y2, mask[3])};
    JetN<N> r = m.eval<N>(x, y);
    if (want == 1) r = r * r * 0.5;
    return jet_extract<N>(r);
}

double dual_partial(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                    const PartialIndex& idx, int want) {
    if (!m.has_closed_form())
        throw NonSmoothEvaluation("dual engine requires a closed-form metric: " + m.name());
    const auto dirs = directions(idx);
    switch (idx.total()) {
        case 0: return dual_partial_impl<0>(m, p, v, dirs, want);
        case 1: return dual_partial_impl<1>(m, p, v, dirs, want);
        case 2: return dual_partial_impl<2>(m, p, v, dirs, want);
        case 3: return dual_partial_impl<3>(m, p, v, dirs, want);
        case 4: return dual_partial_impl<4>(m, p, v, dirs, want);
        case 5: return dual_partial_impl<5>(m, p, v, dirs, want);
        case 6: return dual_partial_impl<6>(m, p, v, dirs, want);
        default: throw std::invalid_argument("dual engine: derivative order > 6");
    }
}

double fd_partial(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                  const PartialIndex& idx, int want, double base_step) {
    const auto dirs = directions(idx);
    const int n = static_cast<int>(dirs.size());

    // nested central differences, all levels sharing the scale factor
    struct Rec {
        const MetricField& m;
        const std::vector<int>& dirs;
        int n, want;
        double h;
        double run(int level, std::array<double, 4> z) const {
            if (level == n) {
                const double f = m.value(Vec2{z[0], z[1]}, Vec2{z[2], z[3]});
                return want == 1 ? 0.5 * f * f : f;
            }
            auto zp = z, zm = z;
            zp[dirs[level]] += h;
            zm[dirs[level]] -= h;
            return (run(level + 1, zp) - run(level + 1, zm)) / (2.0 * h);
        }
    };
    const std::array<double, 4> z0 = {p.u1, p.u2, v.y1, v.y2};
    if (n == 0) return Rec{m, dirs, n, want, 0.0}.run(0, z0);
    const double d1 = Rec{m, dirs, n, want, base_step}.run(0, z0);
    const double d2 = Rec{m, dirs, n, want, base_step / 2}.run(0, z0);
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double DiffEngine::f_partial(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                             const PartialIndex& idx) const {
    if (FiberVector{v}.norm() < 1e-12) throw SingularMetric("fiber vector too close to zero");
    if (kind_ == Kind::dual) return dual_partial(m, p, v, idx, 0);
    return fd_partial(m, p, v, idx, 0, step(idx.total()));
}

double DiffEngine::e_partial(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                             const PartialIndex& idx) const {
    if (FiberVector{v}.norm() < 1e-12) throw SingularMetric("fiber vector too close to zero");
    if (kind_ == Kind::dual) return dual_partial(m, p, v, idx, 1);
    return fd_partial(m, p, v, idx, 1, step(idx.total()));
}

Series2 DiffEngine::e_series_y(const MetricField& m, const ChartPoint& p, const FiberVector& v,
                               int deg, int xm) const {
    Series2 s(deg);
    static constexpr std::array<double, 6> fact = {1, 1, 2, 6, 24, 120};
    s.for_each([&](int a, int b, double& c) {
        PartialIndex idx{xm == 0 ? 1 : 0, xm == 1 ? 1 : 0, a, b};
        c = e_partial(m, p, v, idx) / (fact[a] * fact[b]);
    });
    return s;
}

}  // namespace fsl

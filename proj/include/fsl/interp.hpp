#pragma once

// Piecewise-cubic Hermite interpolation on a uniform periodic grid.

#include <cmath>
#include <vector>

namespace fsl {

class PeriodicCubic {
  public:
    PeriodicCubic() = default;
    PeriodicCubic(std::vector<double> values, std::vector<double> slopes, double period)
        : v_(std::move(values)), s_(std::move(slopes)), period_(period) {}

    // slopes estimated from the samples by 4th-order periodic central differences
    static PeriodicCubic from_samples(std::vector<double> values, double period) {
        const int n = static_cast<int>(values.size());
        const double h = period / n;
        std::vector<double> sl(n);
        for (int k = 0; k < n; ++k) {
            const double fp1 = values[(k + 1) % n], fm1 = values[(k - 1 + n) % n];
            const double fp2 = values[(k + 2) % n], fm2 = values[(k - 2 + n) % n];
            sl[k] = (8.0 * (fp1 - fm1) - (fp2 - fm2)) / (12.0 * h);
        }
        return PeriodicCubic(std::move(values), std::move(sl), period);
    }

    double period() const { return period_; }
    int size() const { return static_cast<int>(v_.size()); }

    double operator()(double t) const {
        const int n = size();
        const double h = period_ / n;
        double u = std::fmod(t, period_);
        if (u < 0) u += period_;
        int k = static_cast<int>(u / h);
        if (k >= n) k = n - 1;
        const double s = (u - k * h) / h;
        const int k1 = (k + 1) % n;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * v_[k] + h10 * h * s_[k] + h01 * v_[k1] + h11 * h * s_[k1];
    }

    double derivative(double t) const {
        const int n = size();
        const double h = period_ / n;
        double u = std::fmod(t, period_);
        if (u < 0) u += period_;
        int k = static_cast<int>(u / h);
        if (k >= n) k = n - 1;
        const double s = (u - k * h) / h;
        const int k1 = (k + 1) % n;
        const double d00 = 6 * s * (s - 1);
        const double d10 = (1 - s) * (1 - 3 * s);
        const double d01 = -6 * s * (s - 1);
        const double d11 = s * (3 * s - 2);
        return (d00 * v_[k] + d01 * v_[k1]) / h + d10 * s_[k] + d11 * s_[k1];
    }

  private:
    std::vector<double> v_, s_;
    double period_ = 1.0;
};

// Catmull-Rom style cubic interpolation of a scalar on a uniform 2-D grid,
// C^1 across cells; used to assemble connection coefficient fields.
class GridInterp2 {
  public:
    GridInterp2() = default;
    GridInterp2(double x0, double y0, double dx, double dy, int nx, int ny,
                std::vector<double> values)
        : x0_(x0), y0_(y0), dx_(dx), dy_(dy), nx_(nx), ny_(ny), v_(std::move(values)) {}

    double operator()(double x, double y) const {
        const double sx = (x - x0_) / dx_, sy = (y - y0_) / dy_;
        int ix = static_cast<int>(std::floor(sx)), iy = static_cast<int>(std::floor(sy));
        ix = std::max(1, std::min(nx_ - 3, ix));
        iy = std::max(1, std::min(ny_ - 3, iy));
        const double tx = sx - ix, ty = sy - iy;
        double col[4];
        for (int j = -1; j <= 2; ++j) {
            const double p0 = at(ix - 1, iy + j), p1 = at(ix, iy + j), p2 = at(ix + 1, iy + j),
                         p3 = at(ix + 2, iy + j);
            col[j + 1] = catmull(p0, p1, p2, p3, tx);
        }
        return catmull(col[0], col[1], col[2], col[3], ty);
    }

  private:
    static double catmull(double p0, double p1, double p2, double p3, double t) {
        return p1 + 0.5 * t * (p2 - p0 +
                               t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
    }
    double at(int i, int j) const { return v_[static_cast<size_t>(j) * nx_ + i]; }

    double x0_ = 0, y0_ = 0, dx_ = 1, dy_ = 1;
    int nx_ = 0, ny_ = 0;
    std::vector<double> v_;
};

}  // namespace fsl

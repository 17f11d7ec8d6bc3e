#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "extrema.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "quadrature.hpp"

namespace blowup {

struct DuhamelOptions {
    bool with_layer = false;  // add the one-layer nonlinear integral
    int max_samples = 400;
    double r_limit = -1.0;  // largest radius sampled; default half the grid extent
};

struct DuhamelReport {
    double max_violation = 0.0;  // max(rhs - u, 0)
    double max_relative = 0.0;   // max_violation relative to the local rhs
    int samples = 0;
    double worst_t = 0.0;
    double worst_r = 0.0;
};

/// Checks the comparison lower bounds on a transformed-u grid:
///   u >= (1/(8 r^m)) int_{r-t}^{r+t} lambda^m psi dlambda
///        [+ (1/(8 r^m)) int_0^t dtau int_{r-t+tau}^{r+t-tau} lambda^m H dlambda]
/// at stored (t, r) points of the blow-up region.
inline DuhamelReport duhamel_check(const SolutionGrid& grid, const ProblemSpec& spec, const BlowupRegion& region,
                                   const DuhamelOptions& opt = {}) {
    if (grid.quantity != "u")
        throw DomainError("duhamel_check: expects a transformed-u grid");
    const auto& f = spec.field;
    const int m = spec.m();
    const double r_limit = opt.r_limit > 0.0 ? opt.r_limit : 0.5 * grid.r_max;
    auto psi = [&](double l) { return spec.eps * std::exp(f.eval_U(l)) * f.v1(l); };

    struct Point {
        std::size_t k;
        double r;
    };
    std::vector<Point> pts;
    for (std::size_t k = 1; k < grid.times.size(); ++k) {
        const double t = grid.times[k];
        for (std::size_t i = 1; i < grid.nr(); ++i) {
            const double r = grid.radius(i);
            if (r > r_limit)
                break;
            if (region.contains(t, r))
                pts.push_back({k, r});
        }
    }
    if (pts.empty())
        throw DomainError("duhamel_check: blow-up region empty for the grid extents");
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / static_cast<std::size_t>(opt.max_samples));

    auto H_at = [&](std::size_t k, double l) {
        const double t = grid.times[k];
        const double u = grid.value_at(k, l);
        double arg = u;
        if (spec.j == 1) {
            const std::size_t a = k == 0 ? 0 : k - 1, b = std::min(k + 1, grid.times.size() - 1);
            arg = (grid.value_at(b, l) - grid.value_at(a, l)) / (grid.times[b] - grid.times[a]);
        }
        const double w = eval_G(f, t) + f.eval_U(l);
        return f.eval_h(t, l) * u + std::exp(w) * spec.F(std::exp(-w) * arg);
    };
    auto layer = [&](std::size_t k_end, double r) {
        const double t = grid.times[k_end];
        std::vector<double> inner(k_end + 1, 0.0);
        for (std::size_t k = 0; k <= k_end; ++k) {
            const double half = t - grid.times[k];
            if (half <= 0.0)
                continue;
            const double a = r - half, b = r + half;
            const int N = std::max(8, static_cast<int>(std::ceil((b - a) / grid.dr)));
            const double h = (b - a) / N;
            double s = 0.0;
            for (int q = 0; q <= N; ++q) {
                const double l = a + q * h;
                const double w = (q == 0 || q == N) ? 0.5 : 1.0;
                s += w * std::pow(l, m) * H_at(k, l);
            }
            inner[k] = s * h;
        }
        double acc = 0.0;
        for (std::size_t k = 1; k <= k_end; ++k)
            acc += 0.5 * (inner[k] + inner[k - 1]) * (grid.times[k] - grid.times[k - 1]);
        return acc;
    };

    DuhamelReport rep;
    for (std::size_t s = 0; s < pts.size(); s += stride) {
        const auto [k, r] = pts[s];
        const double t = grid.times[k];
        double rhs = adaptive_simpson([&](double l) { return std::pow(l, m) * psi(l); }, r - t, r + t, 1e-12).value;
        if (opt.with_layer)
            rhs += layer(k, r);
        rhs /= 8.0 * std::pow(r, m);
        const double u = grid.value_at(k, r);
        const double viol = std::max(rhs - u, 0.0);
        ++rep.samples;
        if (viol > rep.max_violation) {
            rep.max_violation = viol;
            rep.max_relative = rhs != 0.0 ? viol / std::abs(rhs) : viol;
            rep.worst_t = t;
            rep.worst_r = r;
        }
    }
    return rep;
}

}  // namespace blowup

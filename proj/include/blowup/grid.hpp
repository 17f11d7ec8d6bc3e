#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"

namespace blowup {

enum class SolverMode { transformed_u, direct_v };

inline const char* mode_name(SolverMode m) { return m == SolverMode::transformed_u ? "transformed_u" : "direct_v"; }

/// Space-time samples of u(t, r) (or v(t, r)) on the uniform radial mesh
/// r_i = r0 + i dr, with one stored slice per entry of `times`.
struct SolutionGrid {
    double dt = 0.0;  // time step of the run (or slice spacing for sampled grids)
    double dr = 0.0;
    double r0 = 0.0;
    double t0 = 0.0;
    double r_max = 0.0;
    double cfl = 0.0;
    std::string boundary = "outgoing";
    std::string quantity = "u";
    int n = 3;
    double p = 2.0;
    int j = 0;

    std::vector<double> times;
    std::vector<std::vector<double>> slices;

    std::size_t nr() const { return slices.empty() ? 0 : slices.front().size(); }
    double radius(std::size_t i) const { return r0 + static_cast<double>(i) * dr; }

    /// Cubic (Catmull-Rom) interpolation in r on slice k.
    double value_at(std::size_t k, double r) const {
        const auto& s = slices.at(k);
        const double x = (r - r0) / dr;
        if (x < 0.0 || x > static_cast<double>(s.size() - 1) + 1e-9)
            throw DomainError("SolutionGrid: radius " + std::to_string(r) + " outside the mesh");
        const std::size_t i = std::min(static_cast<std::size_t>(x), s.size() - 2);
        const double w = x - static_cast<double>(i);
        if (i == 0 || i + 2 >= s.size())
            return (1.0 - w) * s[i] + w * s[i + 1];
        const double y0 = s[i - 1], y1 = s[i], y2 = s[i + 1], y3 = s[i + 2];
        return y1 + 0.5 * w * (y2 - y0 + w * (2.0 * y0 - 5.0 * y1 + 4.0 * y2 - y3 + w * (3.0 * (y1 - y2) + y3 - y0)));
    }

    /// Index of the stored slice nearest to time t.
    std::size_t nearest_slice(double t) const {
        auto it = std::lower_bound(times.begin(), times.end(), t);
        if (it == times.end())
            return times.size() - 1;
        std::size_t k = static_cast<std::size_t>(it - times.begin());
        if (k > 0 && std::abs(times[k - 1] - t) < std::abs(times[k] - t))
            --k;
        return k;
    }

    /// Linear interpolation in t between stored slices, cubic in r.
    double value(double t, double r) const {
        if (times.empty())
            throw DomainError("SolutionGrid: empty grid");
        if (t <= times.front())
            return value_at(0, r);
        if (t >= times.back())
            return value_at(times.size() - 1, r);
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - times.begin());
        const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return (1.0 - w) * value_at(k - 1, r) + w * value_at(k, r);
    }

    /// Whether the stored slices are uniformly spaced in time at `dt`.
    bool uniform_in_time(double rel_tol = 1e-9) const {
        for (std::size_t k = 1; k < times.size(); ++k)
            if (std::abs(times[k] - times[k - 1] - dt) > rel_tol * std::max(1.0, std::abs(times[k])))
                return false;
        return true;
    }
};

/// Grid of samples of f(t, r) on t_k = t0 + k dt (k < nt), r_i = r0 + i dr (i < nr).
template <class Fn>
SolutionGrid sample_grid(const Fn& f, double t0, double dt, std::size_t nt, double r0, double dr, std::size_t nr,
                         int n = 3, double p = 2.0, int j = 0) {
    SolutionGrid g;
    g.dt = dt;
    g.dr = dr;
    g.t0 = t0;
    g.r0 = r0;
    g.r_max = r0 + dr * static_cast<double>(nr - 1);
    g.n = n;
    g.p = p;
    g.j = j;
    g.boundary = "sampled";
    for (std::size_t k = 0; k < nt; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        g.times.push_back(t);
        std::vector<double> row(nr);
        for (std::size_t i = 0; i < nr; ++i)
            row[i] = f(t, r0 + dr * static_cast<double>(i));
        g.slices.push_back(std::move(row));
    }
    return g;
}

/// CSV matrix: a one-line `#` header with (n, p, j, dt, dr, t0, r0), then one
/// row per slice holding t followed by the radial samples.
inline void write_grid_csv(const SolutionGrid& g, std::ostream& os) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "# n=" << g.n << ",p=" << num(g.p) << ",j=" << g.j << ",dt=" << num(g.dt) << ",dr=" << num(g.dr)
       << ",t0=" << num(g.t0) << ",r0=" << num(g.r0) << ",quantity=" << g.quantity << "\n";
    for (std::size_t k = 0; k < g.times.size(); ++k) {
        os << num(g.times[k]);
        for (double v : g.slices[k])
            os << ',' << num(v);
        os << '\n';
    }
}

inline SolutionGrid read_grid_csv(std::istream& is) {
    SolutionGrid g;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
        throw DomainError("grid CSV: missing header line");
    std::stringstream hs(line.substr(2));
    std::string item;
    while (std::getline(hs, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw DomainError("grid CSV: malformed header item '" + item + "'");
        const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
        if (key == "n") g.n = std::stoi(val);
        else if (key == "p") g.p = std::stod(val);
        else if (key == "j") g.j = std::stoi(val);
        else if (key == "dt") g.dt = std::stod(val);
        else if (key == "dr") g.dr = std::stod(val);
        else if (key == "t0") g.t0 = std::stod(val);
        else if (key == "r0") g.r0 = std::stod(val);
        else if (key == "quantity") g.quantity = val;
        else throw DomainError("grid CSV: unknown header key '" + key + "'");
    }
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        g.times.push_back(std::stod(cell));
        std::vector<double> row;
        while (std::getline(ls, cell, ','))
            row.push_back(std::stod(cell));
        if (!g.slices.empty() && row.size() != g.slices.front().size())
            throw DomainError("grid CSV: ragged rows");
        g.slices.push_back(std::move(row));
    }
    if (!g.slices.empty())
        g.r_max = g.radius(g.nr() - 1);
    return g;
}

}  // namespace blowup

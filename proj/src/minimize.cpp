#include "ipdyn/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ipdyn/errors.hpp"

namespace ipdyn {

Minimum1D golden_section(const std::function<double(double)>& f, double a, double b, double width_tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    std::size_t evals = 2;

    while (b - a > width_tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    return fc <= fd ? Minimum1D{c, fc, evals} : Minimum1D{d, fd, evals};
}

Minimum1D scan_and_refine(const std::function<double(double)>& f, Interval range, std::size_t grid_points) {
    if (!(std::isfinite(range.lo) && std::isfinite(range.hi)) || range.hi < range.lo) {
        throw InvalidInput("b_range", "must be a finite interval with lo <= hi");
    }
    if (grid_points < 3) throw InvalidInput("grid_points", "must be >= 3");
    const double width = range.width();
    if (width == 0.0) return {range.lo, f(range.lo), 1};

    const auto last = static_cast<double>(grid_points - 1);
    auto grid_x = [&](std::size_t i) {
        return i + 1 == grid_points ? range.hi : range.lo + width * static_cast<double>(i) / last;
    };

    std::size_t best = 0;
    double best_value = f(grid_x(0));
    for (std::size_t i = 1; i < grid_points; ++i) {
        const double v = f(grid_x(i));
        if (v < best_value) {
            best = i;
            best_value = v;
        }
    }

    const double a = grid_x(best == 0 ? 0 : best - 1);
    const double b = grid_x(std::min(best + 1, grid_points - 1));
    Minimum1D refined = golden_section(f, a, b, 1e-6 * width);
    refined.evaluations += grid_points;
    if (refined.value < best_value) return refined;
    return {grid_x(best), best_value, refined.evaluations};
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> start,
                          const SimplexOptions& opts) {
    const std::size_t dim = start.size();
    if (dim == 0) throw InvalidInput("start", "must be nonempty");

    std::vector<std::vector<double>> pts(dim + 1, start);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += opts.initial_step;
    std::vector<double> vals(dim + 1);
    std::size_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return f(x);
    };
    for (std::size_t i = 0; i <= dim; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(dim + 1);
    bool converged = false;
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto l, auto r) { return vals[l] < vals[r]; });
        const std::size_t lo = order.front();
        const std::size_t hi = order.back();
        const std::size_t second = order[dim - 1];

        const double spread = vals[hi] - vals[lo];
        if (spread <= opts.rel_spread_tol * std::abs(vals[lo]) || spread <= opts.abs_spread_tol) {
            converged = true;
            break;
        }
        if (evals >= opts.max_evaluations) break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == hi) continue;
            for (std::size_t k = 0; k < dim; ++k) centroid[k] += pts[i][k] / static_cast<double>(dim);
        }
        auto along = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t k = 0; k < dim; ++k) x[k] = centroid[k] + coef * (pts[hi][k] - centroid[k]);
            return x;
        };

        auto reflected = along(-1.0);
        const double f_reflected = eval(reflected);
        if (f_reflected < vals[lo]) {
            auto expanded = along(-2.0);
            const double f_expanded = eval(expanded);
            if (f_expanded < f_reflected) {
                pts[hi] = std::move(expanded);
                vals[hi] = f_expanded;
            } else {
                pts[hi] = std::move(reflected);
                vals[hi] = f_reflected;
            }
            continue;
        }
        if (f_reflected < vals[second]) {
            pts[hi] = std::move(reflected);
            vals[hi] = f_reflected;
            continue;
        }

        const bool outside = f_reflected < vals[hi];
        auto contracted = along(outside ? -0.5 : 0.5);
        const double f_contracted = eval(contracted);
        if (f_contracted < (outside ? f_reflected : vals[hi])) {
            pts[hi] = std::move(contracted);
            vals[hi] = f_contracted;
            continue;
        }

        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == lo) continue;
            for (std::size_t k = 0; k < dim; ++k) pts[i][k] = pts[lo][k] + 0.5 * (pts[i][k] - pts[lo][k]);
            vals[i] = eval(pts[i]);
        }
    }

    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    return {pts[best], vals[best], evals, converged};
}

}  // namespace ipdyn

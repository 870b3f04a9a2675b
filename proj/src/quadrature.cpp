#include "mmcomp/quadrature.hpp"

#include "mmcomp/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace mmcomp {

namespace detail {

const double gl12_nodes[6] = {
    0.1252334085114689154724414, 0.3678314989981801937526915, 0.5873179542866174472967024,
    0.7699026741943046870368938, 0.9041172563704748566784659, 0.9815606342467192506905491};
const double gl12_weights[6] = {
    0.2491470458134027850005624, 0.2334925365383548087608499, 0.2031674267230659217490645,
    0.1600783285433462263346525, 0.1069393259953184309602547, 0.0471753363865118271946160};

void solve_natural_spline(double step, const std::vector<double>& y, std::vector<double>& m)
{
    const std::size_t n = y.size();
    m.assign(n, 0.0);
    if (n < 3) return;
    // Thomas algorithm for m[i-1] + 4 m[i] + m[i+1] = 6 (y[i+1] - 2y[i] + y[i-1]) / h^2.
    std::vector<double> c(n, 0.0), d(n, 0.0);
    const double scale = 6.0 / (step * step);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rhs = scale * (y[i + 1] - 2.0 * y[i] + y[i - 1]);
        const double denom = 4.0 - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs - d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m[i] = d[i] - c[i] * m[i + 1];
        if (i == 1) break;
    }
}

} // namespace detail

void QuadratureConfig::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || !(outer_tail_cut > 0.0) || !(inversion_tail_tol > 0.0))
        throw ValidationError("quadrature: tolerances must be positive");
    if (max_subdivisions < 1 || qmc_points < 1)
        throw ValidationError("quadrature: subdivision and point counts must be positive");
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth, double abs_tol)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    if (a == b) return 0.0;
    struct Piece {
        double a, b, value, error;
        int depth;
        bool operator<(const Piece& o) const { return error < o.error; }
    };
    auto rule = [&](double lo, double hi, int depth) {
        double err = 0.0;
        const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
        return Piece{lo, hi, v, err, depth};
    };
    // Global bisection of the piece with the largest error estimate.
    std::priority_queue<Piece> open;
    std::vector<Piece> done; // at maximum depth
    open.push(rule(a, b, 0));
    constexpr std::size_t kMaxPieces = 400;
    double value = open.top().value, error = open.top().error;
    while (!open.empty() && open.size() + done.size() < kMaxPieces
           && error > std::max(abs_tol, rel_tol * std::abs(value))) {
        const Piece p = open.top();
        open.pop();
        if (p.depth >= max_depth) {
            error -= p.error;
            done.push_back(p);
            continue;
        }
        const double mid = 0.5 * (p.a + p.b);
        const Piece l = rule(p.a, mid, p.depth + 1), r = rule(mid, p.b, p.depth + 1);
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        open.push(l);
        open.push(r);
    }
    // Re-sum to shed the drift of the running totals.
    double sum = 0.0;
    for (const auto& p : done) sum += p.value;
    while (!open.empty()) {
        sum += open.top().value;
        open.pop();
    }
    return sum;
}

double EpsilonExtrapolator::push(double partial_sum)
{
    sums_.push_back(partial_sum);
    // Rebuild the epsilon table over the most recent sums; the even columns
    // hold the accelerated estimates.
    const std::size_t window = std::min<std::size_t>(sums_.size(), 21);
    std::vector<double> prev(window, 0.0);
    std::vector<double> cur(sums_.end() - static_cast<long>(window), sums_.end());
    double best = cur.back();
    for (std::size_t col = 1; col < window; ++col) {
        std::vector<double> next(cur.size() - 1);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double diff = cur[i + 1] - cur[i];
            if (diff == 0.0 || !std::isfinite(diff)) {
                ok = false;
                break;
            }
            next[i] = prev[i + 1] + 1.0 / diff;
        }
        if (!ok) break;
        prev = std::move(cur);
        cur = std::move(next);
        if (col % 2 == 0 && !cur.empty() && std::isfinite(cur.back()))
            best = cur.back();
    }
    return best;
}

OscillatoryIntegral integrate_oscillatory(const std::function<double(double)>& f,
                                          const std::function<double(double)>& envelope,
                                          double panel, double tail_tol, int max_panels)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    OscillatoryIntegral out;
    EpsilonExtrapolator eps;
    double sum = 0.0;
    double last_ext = std::numeric_limits<double>::quiet_NaN();
    int agreeing = 0;
    for (int k = 0; k < max_panels; ++k) {
        const double a = k * panel;
        const double b = a + panel;
        sum += GK::integrate(f, a, b, 12, 1e-10);
        out.panels = k + 1;
        if (envelope(b) < tail_tol) {
            out.value = sum;
            out.converged = true;
            return out;
        }
        const double ext = eps.push(sum);
        if (k >= 3 && std::abs(ext - last_ext) < tail_tol) {
            if (++agreeing >= 2) {
                out.value = ext;
                out.converged = true;
                return out;
            }
        } else {
            agreeing = 0;
        }
        last_ext = ext;
    }
    out.value = std::isfinite(last_ext) ? last_ext : sum;
    return out;
}

} // namespace mmcomp

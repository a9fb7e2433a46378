#include "micromorph/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace micromorph {

namespace {

GaussRule1D make_rule(int n)
{
    // Newton iteration on the Legendre polynomial P_n.
    GaussRule1D rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    constexpr double pi = 3.14159265358979323846;
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 0 ? 1.0 : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

}  // namespace

const GaussRule1D& gauss_rule(int points)
{
    static const std::array<GaussRule1D, 6> rules = [] {
        std::array<GaussRule1D, 6> r;
        for (int n = 1; n <= 6; ++n) {
            r[static_cast<std::size_t>(n - 1)] = make_rule(n);
        }
        return r;
    }();
    MICROMORPH_REQUIRE(points >= 1 && points <= 6, PreconditionError, "gauss_rule: 1..6 points supported");
    return rules[static_cast<std::size_t>(points - 1)];
}

double Box::volume() const noexcept
{
    return std::max(0.0, upper[0] - lower[0]) * std::max(0.0, upper[1] - lower[1]) *
           std::max(0.0, upper[2] - lower[2]);
}

bool Box::empty() const noexcept
{
    return !(upper[0] > lower[0] && upper[1] > lower[1] && upper[2] > lower[2]);
}

Box intersect(const Box& a, const Box& b) noexcept
{
    Box c;
    for (std::size_t k = 0; k < 3; ++k) {
        c.lower[k] = std::max(a.lower[k], b.lower[k]);
        c.upper[k] = std::min(a.upper[k], b.upper[k]);
    }
    return c;
}

std::vector<QuadraturePoint> box_rule(const Box& box, int points)
{
    const GaussRule1D& g = gauss_rule(points);
    std::vector<QuadraturePoint> qp;
    qp.reserve(static_cast<std::size_t>(points * points * points));
    const Point3 mid = 0.5 * (box.lower + box.upper);
    const Point3 half = 0.5 * (box.upper - box.lower);
    const double jac = half[0] * half[1] * half[2];
    for (int k = 0; k < points; ++k) {
        for (int j = 0; j < points; ++j) {
            for (int i = 0; i < points; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                const auto uj = static_cast<std::size_t>(j);
                const auto uk = static_cast<std::size_t>(k);
                qp.push_back(QuadraturePoint{
                    {mid[0] + half[0] * g.nodes[ui], mid[1] + half[1] * g.nodes[uj], mid[2] + half[2] * g.nodes[uk]},
                    jac * g.weights[ui] * g.weights[uj] * g.weights[uk]});
            }
        }
    }
    return qp;
}

double integrate_box(const Box& box, int cells, int points, const std::function<double(const Point3&)>& integrand)
{
    MICROMORPH_REQUIRE(cells >= 1, PreconditionError, "integrate_box: need at least one cell per axis");
    if (box.empty()) {
        return 0.0;
    }
    const Point3 width = (1.0 / cells) * (box.upper - box.lower);
    double total = 0.0;
    for (int k = 0; k < cells; ++k) {
        for (int j = 0; j < cells; ++j) {
            for (int i = 0; i < cells; ++i) {
                Box sub;
                sub.lower = {box.lower[0] + i * width[0], box.lower[1] + j * width[1], box.lower[2] + k * width[2]};
                sub.upper = sub.lower + width;
                for (const auto& q : box_rule(sub, points)) {
                    total += q.weight * integrand(q.x);
                }
            }
        }
    }
    return total;
}

}  // namespace micromorph

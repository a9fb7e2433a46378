#pragma once

#include <functional>
#include <span>
#include <vector>

#include "micromorph/tensor.hpp"

namespace micromorph {

struct QuadraturePoint {
    Point3 x{};
    double weight = 0.0;
};

/// Gauss-Legendre nodes and weights on [-1, 1] for 1..6 points.
struct GaussRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] const GaussRule1D& gauss_rule(int points);

/// Axis-aligned box [lower, upper].
struct Box {
    Point3 lower{};
    Point3 upper{};

    [[nodiscard]] double volume() const noexcept;
    [[nodiscard]] bool empty() const noexcept;
};

[[nodiscard]] Box intersect(const Box& a, const Box& b) noexcept;

/// Tensor Gauss rule on a box with `points` nodes per axis.
[[nodiscard]] std::vector<QuadraturePoint> box_rule(const Box& box, int points);

/// Composite tensor Gauss rule: the box is split into cells^3 sub-boxes.
[[nodiscard]] double integrate_box(const Box& box, int cells, int points,
                                   const std::function<double(const Point3&)>& integrand);

}  // namespace micromorph

#pragma once

#include <array>
#include <random>
#include <vector>

#include "micromorph/tensor.hpp"

namespace micromorph {

/// Dense multivariate polynomial in (x1, x2, x3), sum of c * x1^a x2^b x3^c.
class Polynomial3 {
public:
    struct Term {
        std::array<int, 3> exponents{};
        double coefficient = 0.0;
    };

    Polynomial3() = default;
    explicit Polynomial3(std::vector<Term> terms);

    [[nodiscard]] static Polynomial3 constant(double c);
    /// The coordinate function x_k (k in 0..2).
    [[nodiscard]] static Polynomial3 coordinate(int k);
    /// All monomials of total degree <= degree with coefficients uniform in [-1, 1].
    [[nodiscard]] static Polynomial3 random(int degree, std::mt19937_64& rng);

    [[nodiscard]] double operator()(const Point3& x) const;
    [[nodiscard]] Polynomial3 derivative(int k) const;
    [[nodiscard]] Vec3 gradient(const Point3& x) const;
    [[nodiscard]] Matrix hessian(const Point3& x) const;
    [[nodiscard]] int degree() const;
    [[nodiscard]] const std::vector<Term>& terms() const noexcept { return terms_; }

    friend Polynomial3 operator+(const Polynomial3& a, const Polynomial3& b);
    friend Polynomial3 operator*(const Polynomial3& a, const Polynomial3& b);
    friend Polynomial3 operator*(double s, const Polynomial3& a);

private:
    void normalize();

    std::vector<Term> terms_;
};

}  // namespace micromorph

#include "micromorph/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace micromorph {

Polynomial3::Polynomial3(std::vector<Term> terms)
    : terms_(std::move(terms))
{
    for (const auto& t : terms_) {
        MICROMORPH_REQUIRE(t.exponents[0] >= 0 && t.exponents[1] >= 0 && t.exponents[2] >= 0,
                           PreconditionError, "Polynomial3: negative exponent");
    }
    normalize();
}

Polynomial3 Polynomial3::constant(double c)
{
    return Polynomial3({Term{{0, 0, 0}, c}});
}

Polynomial3 Polynomial3::coordinate(int k)
{
    Term t;
    t.exponents[static_cast<std::size_t>(k)] = 1;
    t.coefficient = 1.0;
    return Polynomial3({t});
}

Polynomial3 Polynomial3::random(int degree, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::vector<Term> terms;
    for (int total = 0; total <= degree; ++total) {
        for (int a = total; a >= 0; --a) {
            for (int b = total - a; b >= 0; --b) {
                terms.push_back(Term{{a, b, total - a - b}, coeff(rng)});
            }
        }
    }
    return Polynomial3(std::move(terms));
}

double Polynomial3::operator()(const Point3& x) const
{
    double s = 0.0;
    for (const auto& t : terms_) {
        double m = t.coefficient;
        for (std::size_t k = 0; k < 3; ++k) {
            for (int e = 0; e < t.exponents[k]; ++e) {
                m *= x[k];
            }
        }
        s += m;
    }
    return s;
}

Polynomial3 Polynomial3::derivative(int k) const
{
    std::vector<Term> out;
    const auto kk = static_cast<std::size_t>(k);
    for (const auto& t : terms_) {
        if (t.exponents[kk] == 0) {
            continue;
        }
        Term d = t;
        d.coefficient *= t.exponents[kk];
        d.exponents[kk] -= 1;
        out.push_back(d);
    }
    return Polynomial3(std::move(out));
}

Vec3 Polynomial3::gradient(const Point3& x) const
{
    return {derivative(0)(x), derivative(1)(x), derivative(2)(x)};
}

Matrix Polynomial3::hessian(const Point3& x) const
{
    Matrix h(3, 3);
    for (int i = 0; i < 3; ++i) {
        const Polynomial3 di = derivative(i);
        for (int j = 0; j < 3; ++j) {
            h(i, j) = di.derivative(j)(x);
        }
    }
    return h;
}

int Polynomial3::degree() const
{
    int d = 0;
    for (const auto& t : terms_) {
        d = std::max(d, t.exponents[0] + t.exponents[1] + t.exponents[2]);
    }
    return d;
}

void Polynomial3::normalize()
{
    std::map<std::array<int, 3>, double> merged;
    for (const auto& t : terms_) {
        merged[t.exponents] += t.coefficient;
    }
    terms_.clear();
    for (const auto& [e, c] : merged) {
        if (c != 0.0) {
            terms_.push_back(Term{e, c});
        }
    }
}

Polynomial3 operator+(const Polynomial3& a, const Polynomial3& b)
{
    std::vector<Polynomial3::Term> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return Polynomial3(std::move(terms));
}

Polynomial3 operator*(const Polynomial3& a, const Polynomial3& b)
{
    std::vector<Polynomial3::Term> terms;
    terms.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_) {
        for (const auto& t : b.terms_) {
            terms.push_back(Polynomial3::Term{
                {s.exponents[0] + t.exponents[0], s.exponents[1] + t.exponents[1], s.exponents[2] + t.exponents[2]},
                s.coefficient * t.coefficient});
        }
    }
    return Polynomial3(std::move(terms));
}

Polynomial3 operator*(double s, const Polynomial3& a)
{
    std::vector<Polynomial3::Term> terms = a.terms_;
    for (auto& t : terms) {
        t.coefficient *= s;
    }
    return Polynomial3(std::move(terms));
}

}  // namespace micromorph

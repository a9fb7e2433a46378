#include "micromorph/solver.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <random>

#include "micromorph/error.hpp"

namespace micromorph {

namespace {

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y)
{
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

constexpr std::size_t kBlock = 6;

// Dense k x k helper for the Rayleigh-Ritz step.
struct Small {
    std::size_t n;
    std::vector<double> v;
    Small(std::size_t rows, std::size_t) : n(rows), v(rows * rows, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return v[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v[i * n + j]; }
};

// Cyclic Jacobi: eigenvalues ascending and the matching eigenvector columns.
std::pair<std::vector<double>, Small> jacobi_eigen(Small s)
{
    const std::size_t n = s.n;
    Small q(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        q(i, i) = 1.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += s(i, j) * s(i, j);
            }
        }
        if (off < 1e-30) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                if (s(p, r) == 0.0) {
                    continue;
                }
                const double theta = (s(r, r) - s(p, p)) / (2.0 * s(p, r));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t m = 0; m < n; ++m) {
                    const double smp = s(m, p);
                    const double smr = s(m, r);
                    s(m, p) = c * smp - sn * smr;
                    s(m, r) = sn * smp + c * smr;
                }
                for (std::size_t m = 0; m < n; ++m) {
                    const double spm = s(p, m);
                    const double srm = s(r, m);
                    s(p, m) = c * spm - sn * srm;
                    s(r, m) = sn * spm + c * srm;
                }
                for (std::size_t m = 0; m < n; ++m) {
                    const double qmp = q(m, p);
                    const double qmr = q(m, r);
                    q(m, p) = c * qmp - sn * qmr;
                    q(m, r) = sn * qmp + c * qmr;
                }
            }
        }
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s(a, a) < s(b, b); });
    std::vector<double> values(n);
    Small vectors(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        values[j] = s(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) {
            vectors(i, j) = q(i, order[j]);
        }
    }
    return {values, vectors};
}

// Solves ka c = lambda kb c with kb SPD; columns of the result are kb-orthonormal.
std::pair<std::vector<double>, Small> ritz(const Small& ka, const Small& kb)
{
    const std::size_t n = ka.n;
    Small l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = kb(j, j);
        for (std::size_t m = 0; m < j; ++m) {
            d -= l(j, m) * l(j, m);
        }
        MICROMORPH_REQUIRE(d > 0.0, ConvergenceError, "Rayleigh-Ritz: block lost linear independence");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = kb(i, j);
            for (std::size_t m = 0; m < j; ++m) {
                v -= l(i, m) * l(j, m);
            }
            l(i, j) = v / l(j, j);
        }
    }
    // linv = L^{-1}
    Small linv(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = i == c ? 1.0 : 0.0;
            for (std::size_t m = 0; m < i; ++m) {
                v -= l(i, m) * linv(m, c);
            }
            linv(i, c) = v / l(i, i);
        }
    }
    Small c(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                for (std::size_t q = 0; q < n; ++q) {
                    v += linv(i, p) * ka(p, q) * linv(j, q);
                }
            }
            c(i, j) = v;
        }
    }
    auto [values, w] = jacobi_eigen(c);
    Small coeffs(n, n);  // L^{-T} w
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = 0.0;
            for (std::size_t p = 0; p < n; ++p) {
                v += linv(p, i) * w(p, j);
            }
            coeffs(i, j) = v;
        }
    }
    return {values, coeffs};
}

}  // namespace

CgResult solve_cg(const CsrMatrix& op, const std::vector<double>& load, double tol, int max_iter)
{
    const auto n = static_cast<std::size_t>(op.size());
    MICROMORPH_REQUIRE(load.size() == n, ShapeError, "solve_cg: load size differs from operator size");
    MICROMORPH_REQUIRE(tol > 0.0 && max_iter > 0, PreconditionError, "solve_cg: tol and max_iter must be positive");

    CgResult result;
    result.x.assign(n, 0.0);
    const double bnorm = norm2(load);
    if (bnorm == 0.0) {
        return result;
    }

    std::vector<double> inv_diag = op.diagonal();
    for (double& d : inv_diag) {
        MICROMORPH_REQUIRE(d > 0.0, PreconditionError, "solve_cg: operator has a nonpositive diagonal entry");
        d = 1.0 / d;
    }

    std::vector<double> r = load;
    std::vector<double> z(n);
    std::vector<double> p(n);
    std::vector<double> ap(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
    }
    p = z;
    double rz = dot(r, z);

    for (int it = 1; it <= max_iter; ++it) {
        op.multiply(p, ap);
        const double pap = dot(p, ap);
        MICROMORPH_REQUIRE(pap > 0.0, ConvergenceError, "solve_cg: operator is not positive definite");
        const double alpha = rz / pap;
        axpy(alpha, p, result.x);
        axpy(-alpha, ap, r);
        if (norm2(r) <= tol * bnorm) {
            // Confirm against the true residual; recurrence drift can hide a few digits.
            std::vector<double> ax(n);
            op.multiply(result.x, ax);
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = load[i] - ax[i];
            }
            const double true_res = norm2(r) / bnorm;
            if (true_res <= tol) {
                result.iterations = it;
                result.rel_residual = true_res;
                return result;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
        }
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }
    throw ConvergenceError("solve_cg: no convergence within " + std::to_string(max_iter) + " iterations");
}

EigenEstimate smallest_generalized_eigenvalue(const CsrMatrix& a, const CsrMatrix& b, std::uint64_t seed, double tol,
                                              int max_iter)
{
    MICROMORPH_REQUIRE(a.size() == b.size(), ShapeError, "smallest_generalized_eigenvalue: size mismatch");
    const auto n = static_cast<std::size_t>(a.size());
    const std::size_t k = std::min<std::size_t>(kBlock, n);
    MICROMORPH_REQUIRE(k >= 1, PreconditionError, "smallest_generalized_eigenvalue: empty operator");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::vector<double>> x(k, std::vector<double>(n));
    for (auto& v : x) {
        for (double& e : v) {
            e = dist(rng);
        }
    }
    std::vector<std::vector<double>> ay(k, std::vector<double>(n));
    std::vector<std::vector<double>> by(k, std::vector<double>(n));
    std::vector<double> bx(n);

    EigenEstimate est;
    double lambda = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        // Block inverse iteration followed by Rayleigh-Ritz on the new block.
        std::vector<std::vector<double>> y(k);
        for (std::size_t j = 0; j < k; ++j) {
            b.multiply(x[j], bx);
            y[j] = solve_cg(a, bx, 1e-8, 100000).x;
            a.multiply(y[j], ay[j]);
            b.multiply(y[j], by[j]);
        }
        Small ka(k, k);
        Small kb(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                ka(i, j) = ka(j, i) = 0.5 * (dot(y[i], ay[j]) + dot(y[j], ay[i]));
                kb(i, j) = kb(j, i) = 0.5 * (dot(y[i], by[j]) + dot(y[j], by[i]));
            }
        }
        const auto [values, coeffs] = ritz(ka, kb);
        for (std::size_t j = 0; j < k; ++j) {
            std::fill(x[j].begin(), x[j].end(), 0.0);
            for (std::size_t i = 0; i < k; ++i) {
                axpy(coeffs(i, j), y[i], x[j]);
            }
        }
        est.change = std::abs(values[0] - lambda) / std::abs(values[0]);
        lambda = values[0];
        est.iterations = it;
        if (est.change <= tol) {
            break;
        }
    }
    est.value = lambda;
    est.vector = x[0];
    return est;
}

}  // namespace micromorph

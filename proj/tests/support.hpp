#pragma once

// Hand-rolled generators shared by the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "defectgeo/exterior.hpp"
#include "defectgeo/expr.hpp"
#include "defectgeo/field.hpp"

namespace testing_support {

using defectgeo::Expr;
using defectgeo::ExprMat3;
using defectgeo::KForm;
using defectgeo::Point;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }

    Point point(double half_width = 0.5, bool with_time = false)
    {
        return {uniform(-half_width, half_width), uniform(-half_width, half_width), uniform(-half_width, half_width),
                with_time ? uniform(-half_width, half_width) : 0.0};
    }

    std::vector<Point> points(std::size_t n, double half_width = 0.5, bool with_time = false)
    {
        std::vector<Point> out;
        for (std::size_t i = 0; i < n; ++i) out.push_back(point(half_width, with_time));
        return out;
    }

    /// Random polynomial of total degree <= `degree` in x, y, z (and t if asked).
    Expr polynomial(int degree = 2, double scale = 1.0, bool with_time = false)
    {
        const Expr vars[4] = {Expr::x(), Expr::y(), Expr::z(), Expr::t()};
        const int nvars = with_time ? 4 : 3;
        Expr out = uniform(-scale, scale);
        for (int i = 0; i < nvars; ++i) {
            if (degree >= 1) out = out + uniform(-scale, scale) * vars[i];
            for (int j = i; j < nvars && degree >= 2; ++j) out = out + uniform(-scale, scale) * vars[i] * vars[j];
        }
        return out;
    }

    KForm form(int degree)
    {
        KForm f(degree);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = uniform(-1.0, 1.0);
        return f;
    }

    defectgeo::SymbolicForm symbolic_form(int degree, int poly_degree = 2, double scale = 1.0)
    {
        defectgeo::SymbolicForm f(degree);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = polynomial(poly_degree, scale);
        return f;
    }

    /// I + amplitude * random quadratic polynomials; invertible on [-0.5, 0.5]^3
    /// for small amplitudes.
    ExprMat3 triad(double amplitude = 0.3)
    {
        ExprMat3 h;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) h[i][j] = Expr(i == j ? 1.0 : 0.0) + polynomial(2, amplitude);
        return h;
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

inline double max_abs_diff(const KForm& a, const KForm& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Random expression tree mixing arithmetic and every elementary function;
/// arguments are guarded so values stay finite on [-1, 1]^4.
inline Expr random_expr(Rng& rng, int depth)
{
    const Expr vars[4] = {Expr::x(), Expr::y(), Expr::z(), Expr::t()};
    if (depth == 0 || rng.integer(0, 5) == 0) {
        if (rng.integer(0, 3) == 0) return Expr(rng.uniform(-2, 2));
        return vars[rng.integer(0, 3)];
    }
    const Expr a = random_expr(rng, depth - 1);
    switch (rng.integer(0, 10)) {
    case 0: return a + random_expr(rng, depth - 1);
    case 1: return a - random_expr(rng, depth - 1);
    case 2: return a * random_expr(rng, depth - 1);
    case 3: return a / (Expr(2.5) + defectgeo::sym::sin(random_expr(rng, depth - 1)));
    case 4: return -a;
    case 5: return defectgeo::sym::pow(defectgeo::sym::sin(a), rng.integer(2, 3));
    case 6: return defectgeo::sym::sin(a);
    case 7: return defectgeo::sym::cos(a);
    case 8: return defectgeo::sym::exp(defectgeo::sym::sin(a));
    case 9: return defectgeo::sym::sqrt(Expr(1.0) + a * a);
    default: return defectgeo::sym::ln(Expr(1.0) + a * a);
    }
}

}  // namespace testing_support

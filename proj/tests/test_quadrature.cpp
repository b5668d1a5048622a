#include "fracttm/errors.hpp"
#include "fracttm/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracttm;

namespace {

double apply(const QuadRule& r, double (*f)(double)) {
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        s += r.weights[k] * f(r.nodes[k]);
    }
    return s;
}

}  // namespace

TEST_CASE("gauss_legendre integrates degree 2n-1 exactly") {
    for (int n = 1; n <= 12; ++n) {
        const QuadRule r = gauss_legendre(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (std::size_t k = 0; k < r.size(); ++k) {
                s += r.weights[k] * std::pow(r.nodes[k], p);
            }
            const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
            CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
}

TEST_CASE("gauss_jacobi reproduces the beta-function moment") {
    for (double a : {-0.6, 0.0, 0.4}) {
        for (double b : {-0.3, 0.0, 0.7}) {
            const QuadRule r = gauss_jacobi(8, a, b);
            double s = 0.0;
            for (double w : r.weights) {
                s += w;
            }
            const double exact = std::pow(2.0, a + b + 1) * std::tgamma(a + 1) * std::tgamma(b + 1) /
                                 std::tgamma(a + b + 2);
            CHECK(s == doctest::Approx(exact).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(gauss_jacobi(4, -1.0, 0.0), DomainError);
}

TEST_CASE("map_to_interval preserves length and exactness") {
    const QuadRule r = map_to_interval(gauss_legendre(3), 2.0, 5.0);
    CHECK(apply(r, [](double) { return 1.0; }) == doctest::Approx(3.0));
    CHECK(apply(r, [](double x) { return x * x; }) == doctest::Approx((125.0 - 8.0) / 3.0));
}

TEST_CASE("graded_cell_rule handles endpoint power singularities") {
    auto inv_sqrt = [](double x) { return 1.0 / std::sqrt(x); };
    const double e24 = std::abs(apply(graded_cell_rule(0.0, 1.0, 24), inv_sqrt) - 2.0);
    const double e32 = std::abs(apply(graded_cell_rule(0.0, 1.0, 32), inv_sqrt) - 2.0);
    CHECK(e32 <= 1e-5);
    CHECK(e24 / e32 >= 10.0);
    const QuadRule r = graded_cell_rule(0.0, 1.0, 32);
    CHECK(apply(r, [](double x) { return std::pow(1.0 - x, 0.3); }) ==
          doctest::Approx(1.0 / 1.3).epsilon(1e-11));
    CHECK_THROWS_AS(graded_cell_rule(0.0, 1.0, 0), DomainError);
}

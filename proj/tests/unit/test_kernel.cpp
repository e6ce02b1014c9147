#include <cmath>
#include <numbers>

#include "doctest.h"
#include "volterra/error.hpp"
#include "volterra/kernel_transform.hpp"
#include "volterra/parse.hpp"

using namespace volterra;

namespace {

double gaussian(double y, double t) {
    if (t <= 0.0) return 0.0;
    return std::exp(-y * y / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

HomogeneousSymbol theta_power(int k, int degree) {
    static auto ctx = make_euclidean_context(1, 2);
    return HomogeneousSymbol(SymExpr::theta_power(ctx, k), degree);
}

}  // namespace

TEST_CASE("heat resolvent kernel is the Gaussian") {
    auto q = theta_power(-2, -2);
    std::vector<double> y{0.0, 0.7, -1.5};
    auto k = inverse_fourier_kernel(q, 0.0, y, default_time_grid());
    for (std::size_t iy = 0; iy < y.size(); ++iy) {
        for (std::size_t it = 0; it < k.t.size(); ++it) {
            CHECK(std::abs(k.at(iy, it) - gaussian(y[iy], k.t[it])) < 1e-8);
            CHECK(k.error_at(iy, it) < 1e-6);
        }
    }
    CHECK(std::abs(k.at(0, 9) - 0.2820948) < 1e-4);
    auto rep = volterra_check(k, -2.0, -0.1);
    CHECK(rep.pass);
    CHECK(rep.negative_max < 1e-10);
}

TEST_CASE("contour shift does not change analytic kernels") {
    auto q = theta_power(-2, -2);
    std::vector<double> t{-1.0, 0.5, 1.0, 2.0};
    KernelOptions o1, o2, o4;
    o1.sigma = 1.0;
    o2.sigma = 2.0;
    o4.sigma = 4.0;
    auto k1 = inverse_fourier_kernel(q, 0.0, {0.0, 1.0}, t, o1);
    auto k2 = inverse_fourier_kernel(q, 0.0, {0.0, 1.0}, t, o2);
    auto k4 = inverse_fourier_kernel(q, 0.0, {0.0, 1.0}, t, o4);
    for (std::size_t i = 0; i < k1.values.size(); ++i) {
        CHECK(std::abs(k1.values[i] - k2.values[i]) < 1e-5);
        CHECK(std::abs(k1.values[i] - k4.values[i]) < 1e-5);
    }
}

TEST_CASE("kernel linearity and resolution stability") {
    auto ctx = make_euclidean_context(1, 2);
    HomogeneousSymbol a(parse_expr("x1*THETA^(-2)", ctx), -4);
    HomogeneousSymbol b(parse_expr("xi1^2*THETA^(-3)", ctx), -4);
    HomogeneousSymbol ab(a.expr() + b.expr(), -4);
    std::vector<double> y{0.0, 0.5}, t{-0.5, 0.5, 1.0};
    auto ka = inverse_fourier_kernel(a, 0.3, y, t);
    auto kb = inverse_fourier_kernel(b, 0.3, y, t);
    auto kab = inverse_fourier_kernel(ab, 0.3, y, t);
    KernelOptions fine;
    fine.resolution = 2.0;
    auto kab2 = inverse_fourier_kernel(ab, 0.3, y, t, fine);
    for (std::size_t i = 0; i < kab.values.size(); ++i) {
        CHECK(std::abs(kab.values[i] - ka.values[i] - kb.values[i]) < 1e-8);
        CHECK(std::abs(kab.values[i] - kab2.values[i]) <= kab.errors[i] + kab2.errors[i]);
    }
}

TEST_CASE("homogeneous kernels") {
    // (xi^2 + i tau)^-2 = -d_s (s + xi^2 + i tau)^-1 at s = 0, whose kernel is t (4 pi t)^-1/2
    auto q = theta_power(-4, -4);
    auto v1 = homogeneous_kernel_at(q, 0.0, 1.0);
    CHECK(std::abs(v1.value - 1.0 / std::sqrt(4.0 * std::numbers::pi)) < 1e-8);
    auto v4 = homogeneous_kernel_at(q, 0.0, 4.0);
    double p = kernel_time_exponent(-4, 1, 2);
    CHECK(p == doctest::Approx(0.5));
    CHECK(std::abs(v4.value - std::pow(4.0, p) * v1.value) < 1e-4 * std::abs(v1.value));
    auto vh = homogeneous_kernel_at(q, 0.0, 0.5);
    CHECK(std::abs(vh.value - std::pow(0.5, p) * v1.value) < 1e-4 * std::abs(v1.value));

    HomogeneousSymbol scaled(Complex(3.0, -1.0) * q.expr(), -4);
    auto vs = homogeneous_kernel_at(scaled, 0.0, 1.0);
    CHECK(std::abs(vs.value - Complex(3.0, -1.0) * v1.value) < 1e-12);

    auto head = theta_power(-2, -2);
    CHECK_THROWS_AS(homogeneous_kernel_at(head, 0.0, 1.0), DomainError);
    auto reg = homogeneous_kernel_at(head, 0.0, 1.0, 1.0, true);
    CHECK(std::abs(reg.value - 1.0 / std::sqrt(4.0 * std::numbers::pi)) < 1e-8);
    // odd in xi: the y = 0 kernel vanishes
    auto ctx = make_euclidean_context(1, 2);
    auto odd = homogeneous_kernel_at(HomogeneousSymbol(parse_expr("xi1*THETA^(-2)", ctx), -3), 0.0, 1.0);
    CHECK(std::abs(odd.value) < 1e-10);
}

TEST_CASE("kernel argument errors") {
    auto q = theta_power(-2, -2);
    KernelOptions neg;
    neg.sigma = -1.0;
    CHECK_THROWS_AS(inverse_fourier_kernel(q, 0.0, {0.0}, {1.0}, neg), InvalidArgument);
    CHECK_THROWS_AS(inverse_fourier_kernel(q, 0.0, {0.0}, {0.0}), InvalidArgument);
    CHECK_THROWS_AS(inverse_fourier_kernel(theta_power(0, 0), 0.0, {0.0}, {1.0}), DomainError);
    auto ctx2 = make_euclidean_context(2, 2);
    CHECK_THROWS_AS(inverse_fourier_kernel(HomogeneousSymbol(SymExpr::theta_power(ctx2, -2), -2), 0.0, {0.0}, {1.0}),
                    InvalidArgument);
    KernelOptions strict;
    strict.tol = 1e-16;
    CHECK_THROWS_AS(inverse_fourier_kernel(q, 0.0, {0.0}, {1.0}, strict), QuadratureError);
    auto k = inverse_fourier_kernel(q, 0.0, {0.0}, {1.0});
    CHECK_THROWS_AS(volterra_check(k, -2.0, -0.1), InvalidArgument);
}

TEST_CASE("zero symbol and serialization") {
    auto ctx = make_euclidean_context(1, 2);
    HomogeneousSymbol zero(SymExpr(ctx), -2);
    auto k = inverse_fourier_kernel(zero, 0.0, {0.0}, {-1.0, 1.0});
    CHECK(k.values[0] == Complex(0.0));
    CHECK(k.values[1] == Complex(0.0));
    CHECK(volterra_check(k, -2.0, -0.1).pass);

    auto g = inverse_fourier_kernel(theta_power(-2, -2), 0.0, {0.0}, {-1.0, 1.0});
    auto csv = g.to_csv();
    CHECK(csv.rfind("y,t,re,im,sigma,error\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    auto j = g.to_json();
    CHECK(j["samples"].size() == 2);
    CHECK(j["sigma"] == 1.0);
    CHECK(j["samples"][1]["re"].get<double>() == doctest::Approx(0.2820948).epsilon(1e-6));
}

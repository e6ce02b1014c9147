#include <cmath>
#include <numbers>

#include "doctest.h"
#include "volterra/error.hpp"
#include "volterra/heat.hpp"

using namespace volterra;

namespace {

const double kC0 = 1.0 / std::sqrt(4.0 * std::numbers::pi);

OperatorSpec spec(const char* text) {
    return OperatorSpec::from_json(Json::parse(text));
}

}  // namespace

TEST_CASE("mehler oracle") {
    CHECK(mehler_oracle(0.1, 0.0) ==
          doctest::Approx(std::sqrt(0.2 / std::sinh(0.2)) / std::sqrt(0.4 * std::numbers::pi)).epsilon(1e-14));
    CHECK(mehler_oracle(0.3, 0.7) == mehler_oracle(0.3, -0.7));
    CHECK(mehler_oracle(1e-9, 0.5) * std::sqrt(4.0 * std::numbers::pi * 1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(mehler_oracle(0.0, 0.0), DomainError);

    // (2t / sinh 2t)^(1/2) = 1 - t^2/3 + ..., exp(-x^2 tanh t) = 1 - x^2 t + x^4 t^2 / 2 + ...
    for (double x : {0.0, 0.5, 1.0}) {
        auto a = mehler_taylor(x, 3);
        CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(a[1] + x * x) < 1e-12);
        CHECK(std::abs(a[2] - (-1.0 / 3.0 + std::pow(x, 4) / 2.0)) < 1e-12);
        // Richardson extrapolation of (g(t) - 1) / t from real samples
        auto slope = [&](double t) {
            return (mehler_oracle(t, x) * std::sqrt(4.0 * std::numbers::pi * t) - 1.0) / t;
        };
        double h = 1e-2;
        double r1 = 2.0 * slope(h / 2) - slope(h);
        double r2 = 2.0 * slope(h / 4) - slope(h / 2);
        double rich = (4.0 * r2 - r1) / 3.0;
        CHECK(std::abs(rich - a[1]) < 1e-6);
    }
}

TEST_CASE("heat coefficients of the Laplacian") {
    auto lap = spec(R"({"n":1,"w":2,"terms":[{"alpha":[2],"coeff":"1"}]})");
    auto h = heat_coefficients(lap, 2, {0.0, 1.0}, 1.0, "laplace1d");
    for (std::size_t ix = 0; ix < 2; ++ix) {
        CHECK(std::abs(h.at(ix, 0).c - kC0) < 1e-8);
        CHECK(h.at(ix, 0).power == -0.5);
        CHECK(h.at(ix, 1).c == Complex(0.0));
        CHECK(h.at(ix, 2).c == Complex(0.0));
        CHECK(h.at(ix, 2).power == 0.5);
    }
    auto j = h.to_json();
    CHECK(j["operator"] == "laplace1d");
    CHECK(j["table"].size() == 6);
    CHECK(j["table"][0]["c_j"]["re"].get<double>() == doctest::Approx(0.2820948).epsilon(1e-6));
    CHECK_THROWS_AS(heat_coefficients(lap, 1, {}), InvalidArgument);
}

TEST_CASE("harmonic oscillator heat coefficients match Mehler") {
    auto ho = spec(R"({"n":1,"w":2,"terms":[{"alpha":[2],"coeff":"1"},{"alpha":[0],"coeff":"x1^2"}]})");
    std::vector<double> xs{0.0, 0.5, 1.0};
    auto h = heat_coefficients(ho, 4, xs);
    CHECK(h.max_imag() < 1e-6);
    for (std::size_t ix = 0; ix < xs.size(); ++ix) {
        auto a = mehler_taylor(xs[ix], 2);
        CHECK(std::abs(h.at(ix, 0).c - kC0 * a[0]) < 1e-6);
        CHECK(std::abs(h.at(ix, 1).c) < 1e-6);
        CHECK(std::abs(h.at(ix, 2).c - kC0 * a[1]) < 1e-6);
        CHECK(std::abs(h.at(ix, 3).c) < 1e-6);
        CHECK(std::abs(h.at(ix, 4).c - kC0 * a[2]) < 1e-5);
    }

    // the remainder after j <= 3 decays like t^(3/2)
    std::size_t ix = 2;
    HeatCoefficients trunc = h;
    trunc.J = 3;
    trunc.table.clear();
    for (std::size_t k = 0; k < xs.size(); ++k) {
        for (int j = 0; j <= 3; ++j) trunc.table.push_back(h.at(k, j));
    }
    double t1 = 1e-3, t2 = 1e-1;
    double e1 = std::abs(mehler_oracle(t1, xs[ix]) - trunc.expansion(ix, t1).real());
    double e2 = std::abs(mehler_oracle(t2, xs[ix]) - trunc.expansion(ix, t2).real());
    double slope = std::log(e2 / e1) / std::log(t2 / t1);
    CHECK(std::abs(slope - 1.5) < 0.1);
}

TEST_CASE("heat coefficients are stable under resolution doubling") {
    auto ho = spec(R"({"n":1,"w":2,"terms":[{"alpha":[2],"coeff":"1"},{"alpha":[0],"coeff":"x1^2"}]})");
    auto h1 = heat_coefficients(ho, 2, {0.5});
    auto h2 = heat_coefficients(ho, 2, {0.5}, 2.0);
    for (int j = 0; j <= 2; ++j) {
        CHECK(std::abs(h1.at(0, j).c - h2.at(0, j).c) <= h1.at(0, j).error + h2.at(0, j).error + 1e-12);
    }
    auto two_d = spec(R"({"n":2,"w":2,"terms":[{"alpha":[2,0],"coeff":"1"},{"alpha":[0,2],"coeff":"1"}]})");
    CHECK_THROWS_AS(heat_coefficients(two_d, 1, {0.0}), InvalidArgument);
}

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "volterra/error.hpp"
#include "volterra/parse.hpp"
#include "volterra/symbol_core.hpp"

using namespace volterra;

namespace {

const std::vector<double> origin1{0.0};
const std::vector<double> one1{1.0};

// a_eps as a SymbolFunction with derivatives by central differences, good enough for D <= 1
class AepsFd final : public SymbolFunction {
public:
    explicit AepsFd(double eps) : eps_(eps) {}
    int dimension() const override { return 1; }
    int weight() const override { return 2; }
    Complex derivative(const Derivative& d, std::span<const double>, std::span<const double> xi,
                       Complex tau) const override {
        if (d.order() == 0) return a_epsilon(eps_, xi, tau, 2);
        if (d.order() > 1 || d.alpha[0] == 1) return 0.0;
        double h = 1e-6 * std::max(1.0, std::abs(xi[0]));
        if (d.beta[0] == 1) {
            std::vector<double> p{xi[0] + h}, m{xi[0] - h};
            return (a_epsilon(eps_, p, tau, 2) - a_epsilon(eps_, m, tau, 2)) / (2 * h);
        }
        double ht = 1e-6 * std::max(1.0, std::abs(tau));
        return (a_epsilon(eps_, xi, tau + ht, 2) - a_epsilon(eps_, xi, tau - ht, 2)) / (2 * ht);
    }

private:
    double eps_;
};

}  // namespace

TEST_CASE("pseudo_norm reference values") {
    CHECK(pseudo_norm(origin1, Complex(0, -1), 2) == doctest::Approx(1.0));
    std::vector<double> xi{3.0, 4.0};
    CHECK(pseudo_norm(xi, Complex(0, -25), 2) == doctest::Approx(std::sqrt(50.0)).epsilon(1e-12));
    CHECK(pseudo_norm(origin1, 0.0, 2) == 0.0);
    CHECK_THROWS_AS(pseudo_norm(origin1, Complex(0, 1), 2), DomainError);
}

TEST_CASE("pseudo_norm is homogeneous of degree one") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> xi{uniform(rng, -3, 3), uniform(rng, -3, 3)};
        Complex tau = std::polar(uniform(rng, 0, 5), uniform(rng, -std::numbers::pi, 0));
        double lambda = uniform(rng, 0.1, 10);
        std::vector<double> s{lambda * xi[0], lambda * xi[1]};
        for (int w : {2, 4}) {
            double lhs = pseudo_norm(s, tau * std::pow(lambda, w), w);
            CHECK(lhs == doctest::Approx(lambda * pseudo_norm(xi, tau, w)).epsilon(1e-12));
        }
    }
}

TEST_CASE("rho reference values and sector") {
    CHECK(std::abs(rho(origin1, Complex(0, -1), 2) - 1.0) < 1e-15);
    CHECK(std::abs(rho(one1, 0.0, 4) - 1.0) < 1e-15);
    Complex b = rho(origin1, Complex(1, 0), 2);
    CHECK(b.real() == doctest::Approx(std::sqrt(0.5)));
    CHECK(b.imag() == doctest::Approx(-std::sqrt(0.5)));
    CHECK_THROWS_AS(rho(origin1, 0.0, 2), PoleError);
    std::mt19937_64 rng(5);
    for (int w : {2, 4, 6}) {
        for (int i = 0; i < 1000; ++i) {
            std::vector<double> xi{uniform(rng, -2, 2)};
            Complex tau = std::polar(uniform(rng, 0.01, 4), uniform(rng, -std::numbers::pi, 0));
            if (tau.imag() > 0) tau = tau.real();
            CHECK(std::abs(std::arg(rho(xi, tau, w))) <= std::numbers::pi / (2 * w) * (1 + 1e-12));
        }
    }
}

TEST_CASE("rho constant matches the closed form") {
    for (int w : {2, 4}) CHECK(rho_constant(w) == doctest::Approx(std::pow(2.0, 1.0 / (2 * w))).epsilon(1e-10));
}

TEST_CASE("a_epsilon reference values") {
    CHECK(a_epsilon(3.0, origin1, 0.0, 2) == Complex(0.0));
    CHECK(std::abs(a_epsilon(1.0, origin1, Complex(0, -1), 2) - std::exp(-1.0)) < 1e-15);
    CHECK(std::abs(a_epsilon(2.0, one1, 0.0, 2) - std::exp(-2.0)) < 1e-15);
}

TEST_CASE("a_epsilon remainder agrees with direct subtraction where both are accurate") {
    std::vector<double> xi{0.7};
    Complex tau(0.3, -0.2);
    for (int J = 0; J <= 4; ++J) {
        Complex z = -1.5 * rho(xi, tau, 2);
        Complex direct = std::exp(z), term = 1.0;
        for (int j = 0; j < J; ++j) {
            direct -= term;
            term *= z / double(j + 1);
        }
        CHECK(std::abs(a_epsilon_remainder(1.5, J, xi, tau, 2) - direct) < 1e-13);
    }
    std::vector<double> far{1e3};
    Complex z = -rho(far, 0.0, 2);
    Complex series = z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
    CHECK(std::abs(a_epsilon_remainder(1.0, 2, far, 0.0, 2) - series) < 1e-10 * std::abs(z * z));
}

TEST_CASE("rho expression matches the numeric rho") {
    auto ctx = make_context(1, 2, parse_poly("(1 + x1^2)*xi1^2", 1));
    auto r = rho_expr(ctx);
    std::vector<double> x{0.4}, xi{-1.3};
    Complex tau(0.5, -0.7);
    CHECK(std::abs(r.evaluate(x, xi, tau) - rho(xi, tau, 2)) < 1e-14);
    auto plain = rho_expr(make_euclidean_context(1, 2));
    CHECK(plain == SymExpr::theta_power(make_euclidean_context(1, 2), -1));
}

TEST_CASE("derivative enumeration") {
    auto d = derivatives_up_to(1, 3);
    CHECK(d.size() == 20);
    CHECK(d.front().order() == 0);
    CHECK(derivatives_up_to(2, 2).size() == 21);
}

TEST_CASE("check_homogeneity") {
    auto ctx = make_euclidean_context(1, 2);
    auto r = check_homogeneity(HomogeneousSymbol(parse_expr("THETA^(-1)", ctx), -2), 200, 1);
    CHECK(r.pass);
    CHECK(r.table.front().C <= 1e-15);
    r = check_homogeneity(HomogeneousSymbol(parse_expr("xi1*THETA^(-1)", ctx), -1), 200, 1);
    CHECK(r.pass);
    CHECK(r.table.front().C <= 1e-12);
    CHECK_THROWS_AS(HomogeneousSymbol(parse_expr("1 + THETA^(-1)", ctx), 0), InvalidArgument);
    CHECK_THROWS_AS(HomogeneousSymbol(parse_expr("THETA^(-1)", ctx), -3), InvalidArgument);
}

TEST_CASE("check_analyticity separates analytic and anti-analytic symbols") {
    auto ctx = make_euclidean_context(1, 2);
    ExprFunction inv(parse_expr("THETA^(-1)", ctx));
    auto grid = AnalyticityGrid::standard(2);
    auto r = check_analyticity(inv, grid);
    CHECK(r.pass);
    CHECK(r.table.size() == grid.shells.size());

    class ConjTau final : public SymbolFunction {
    public:
        int dimension() const override { return 1; }
        int weight() const override { return 2; }
        Complex derivative(const Derivative&, std::span<const double>, std::span<const double> xi,
                           Complex tau) const override {
            Complex theta = xi[0] * xi[0] + Complex(0, 1) * tau;
            return std::conj(tau) / (theta * theta);
        }
    } anti;
    auto bad = check_analyticity(anti, grid);
    CHECK_FALSE(bad.pass);
    CHECK(bad.margin < 0);

    AepsFd a1(1.0);
    CHECK(check_analyticity(a1, grid).pass);
}

TEST_CASE("expansion estimates: exact sum, a_eps, wrong degree") {
    auto ctx = make_euclidean_context(1, 2);
    GridPolicy grid;
    auto q0 = parse_expr("THETA^(-1)", ctx);
    auto q1 = parse_expr("xi1*THETA^(-2)", ctx);
    ExprFunction full(q0 + q1);
    auto exp = SymbolExpansion::polyhomogeneous(ctx, -2, {q0, q1});
    for (std::size_t N : {0u, 1u, 2u}) {
        auto rep = check_expansion_estimates(full, exp, N, 2, EstimateMode::HalfPlane, grid);
        CHECK_MESSAGE(rep.pass, rep.note);
    }
    CHECK_THROWS_AS(check_expansion_estimates(full, exp, 3, 2, EstimateMode::HalfPlane, grid), InvalidArgument);

    // a_eps against sum (-eps rho)^j / j!
    auto r = rho_expr(ctx);
    std::vector<SymExpr> terms{SymExpr::constant(ctx, 1.0), -1.0 * r, 0.5 * r.pow(2)};
    auto aexp = SymbolExpansion::polyhomogeneous(ctx, 0, terms);
    AepsFd a1(1.0);
    auto rep = check_expansion_estimates(a1, aexp, 2, 1, EstimateMode::RealTau, grid);
    CHECK_MESSAGE(rep.pass, rep.note);

    // q minus its head, tested as if it had one degree more decay
    ExprFunction only_tail(q1);
    auto wrong = SymbolExpansion::polyhomogeneous(ctx, -2, {SymExpr(ctx), SymExpr(ctx)});
    auto bad = check_expansion_estimates(only_tail, wrong, 2, 0, EstimateMode::RealTau, grid);
    CHECK_FALSE(bad.pass);
    Json j = bad.to_json();
    auto back = EstimateReport::from_json(j);
    CHECK(back.to_json() == j);
}

TEST_CASE("expansion JSON round trip pads gaps") {
    Json j = Json::parse(R"J({"n":1,"w":2,"mode":"polyhomogeneous",
        "entries":[{"order":-2,"expr":"THETA^(-1)"},{"order":-4,"expr":"-x1^2*THETA^(-2)"}]})J");
    auto e = SymbolExpansion::from_json(j);
    REQUIRE(e.size() == 3);
    CHECK(e.entries()[1].symbol.is_zero());
    auto again = SymbolExpansion::from_json(e.to_json());
    CHECK(again.to_json() == e.to_json());
    Json bad = Json::parse(R"J({"n":1,"w":2,"entries":[{"order":-1,"expr":"THETA^(-1)"}]})J");
    CHECK_THROWS_AS(SymbolExpansion::from_json(bad), InvalidArgument);
}

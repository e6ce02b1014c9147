#include <cmath>
#include <random>

#include "doctest.h"
#include "volterra/error.hpp"
#include "volterra/parse.hpp"
#include "volterra/symexpr.hpp"

using namespace volterra;

namespace {

ContextPtr heat1d() { return make_euclidean_context(1, 2); }

double uniform(std::mt19937_64& rng, double a, double b) {
    return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

TEST_CASE("parse: Theta powers and exponent validation") {
    auto ctx = heat1d();
    auto e = parse_expr("THETA^(-1)", ctx);
    CHECK(e == SymExpr::theta_power(ctx, -2));
    auto f = parse_expr("x1^2 * THETA^(-2)", ctx);
    CHECK(f == SymExpr::x(ctx, 0).pow(2) * SymExpr::theta_power(ctx, -4));
    CHECK_THROWS_AS(parse_expr("THETA^(-1/3)", ctx), ParseError);
    CHECK_NOTHROW(parse_expr("THETA^(-1/2)", ctx));
    CHECK_THROWS_AS(parse_expr("x2", ctx), ParseError);
    CHECK_THROWS_AS(parse_expr("y1 + 1", ctx), ParseError);
    CHECK_THROWS_AS(parse_expr("x1 +", ctx), ParseError);
    CHECK_THROWS_AS(parse_expr("x1^(1/2)", ctx), ParseError);
    try {
        parse_expr("1 + * x1", ctx);
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.position() == 4);
    }
}

TEST_CASE("parse: tau is eliminated through THETA") {
    auto ctx = heat1d();
    auto lhs = parse_expr("(xi1^2 + i*tau) * THETA^(-1)", ctx);
    CHECK(lhs == SymExpr::constant(ctx, 1.0));
}

TEST_CASE("parse: complex literals") {
    auto ctx = heat1d();
    auto e = parse_expr("(1+2i)*x1 - 2.5i", ctx);
    Complex v = e.evaluate(std::vector<double>{2.0}, std::vector<double>{0.0}, 0.0);
    CHECK(v.real() == doctest::Approx(2.0));
    CHECK(v.imag() == doctest::Approx(1.5));
}

TEST_CASE("differentiate: reference derivatives") {
    auto ctx = heat1d();
    auto inv = SymExpr::theta_power(ctx, -2);
    CHECK(inv.differentiate(Var::tau()) == Complex(0.0, -1.0) * SymExpr::theta_power(ctx, -4));
    CHECK(SymExpr::xi(ctx, 0).pow(2).differentiate(Var::xi(0)) == 2.0 * SymExpr::xi(ctx, 0));
    auto e = parse_expr("x1^2*THETA^(-2)", ctx);
    CHECK(e.differentiate(Var::x(0)) == parse_expr("2*x1*THETA^(-2)", ctx));
}

TEST_CASE("evaluate: reference values and errors") {
    auto ctx = heat1d();
    auto inv = parse_expr("THETA^(-1)", ctx);
    CHECK(std::abs(inv.evaluate(EvalPoint({0.0}, {1.0}, 0.0)) - 1.0) < 1e-15);
    CHECK(std::abs(inv.evaluate(EvalPoint({0.0}, {0.0}, Complex(0, -1))) - 1.0) < 1e-15);
    CHECK_THROWS_AS(inv.evaluate(EvalPoint({0.0}, {0.0}, 0.0)), PoleError);
    CHECK_THROWS_AS(EvalPoint({0.0}, {0.0}, Complex(0, 1)), DomainError);
}

TEST_CASE("infer_degree") {
    auto ctx = heat1d();
    auto d = parse_expr("THETA^(-1)", ctx).infer_degree();
    REQUIRE(d.homogeneous());
    CHECK(d.degree == -2);
    d = parse_expr("xi1*THETA^(-1)", ctx).infer_degree();
    REQUIRE(d.homogeneous());
    CHECK(d.degree == -1);
    CHECK(parse_expr("1 + THETA^(-1)", ctx).infer_degree().kind == DegreeInfo::Kind::NotHomogeneous);
    CHECK(parse_expr("x1^3", ctx).infer_degree().degree == 0);
    CHECK(parse_expr("tau", ctx).infer_degree().degree == 2);
}

TEST_CASE("differentiate agrees with central differences") {
    std::mt19937_64 rng(7);
    const char* sources[] = {
        "x1^2*THETA^(-2)",
        "xi1*xi2*THETA^(-3/2) + x2*THETA^(-1)",
        "(THETA + x1^2)^(-1/2) * xi1",
        "(1+2i)*x1*xi2^3*THETA^(-5/2) - tau*THETA^(-2)",
        "(THETA + 1)^(-3/2)",
    };
    auto ctx = make_context(2, 2, parse_poly("(1 + x1^2)*xi1^2 + xi2^2 + xi1*xi2", 2));
    int checked = 0;
    for (int rep = 0; rep < 20; ++rep) {
        for (const char* src : sources) {
            auto e = parse_expr(src, ctx);
            std::vector<double> x{uniform(rng, -1, 1), uniform(rng, -1, 1)};
            std::vector<double> xi{uniform(rng, -2, 2), uniform(rng, -2, 2)};
            Complex tau(uniform(rng, -2, 2), uniform(rng, -2, -0.1));
            int which = static_cast<int>(rng() % 5);
            Var v = which < 2 ? Var::x(which) : which < 4 ? Var::xi(which - 2) : Var::tau();
            Complex exact = e.differentiate(v).evaluate(x, xi, tau);
            const double h = 1e-5;
            auto at = [&](double s) {
                auto xx = x;
                auto kk = xi;
                Complex tt = tau;
                if (v.kind == VarKind::X) xx[v.index] += s;
                if (v.kind == VarKind::Xi) kk[v.index] += s;
                if (v.kind == VarKind::Tau) tt += s;
                return e.evaluate(xx, kk, tt);
            };
            Complex fd = (at(h) - at(-h)) / (2 * h);
            CHECK(std::abs(exact - fd) <= 1e-6 * (1 + std::abs(exact)));
            ++checked;
        }
    }
    CHECK(checked == 100);
}

TEST_CASE("normalization preserves values") {
    std::mt19937_64 rng(11);
    auto ctx = make_euclidean_context(1, 2);
    const char* sources[] = {
        "(x1 + xi1)^3 * (THETA^(-1) - 2*THETA^(-3/2))",
        "(THETA + x1^2)^(-1/2) * (THETA + x1^2) * THETA",
        "tau^2 * THETA^(-2) + (i*tau - 3)*(THETA+2)^(-1/2)",
        "((1+2i)*xi1 - x1/4)^2 * (THETA^(-1))^2",
    };
    for (const char* src : sources) {
        auto tree = parse_tree(src, 1);
        auto canon = normalize(*tree, ctx);
        for (int k = 0; k < 50; ++k) {
            EvalPoint pt({uniform(rng, -2, 2)}, {uniform(rng, -2, 2)},
                         Complex(uniform(rng, -3, 3), uniform(rng, -3, -0.01)));
            Complex a = evaluate_tree(*tree, *ctx, pt);
            Complex b = canon.evaluate(pt);
            CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(a)) * 8);
        }
    }
}

TEST_CASE("parse-print-parse round trip") {
    auto ctx = make_euclidean_context(2, 4);
    const char* sources[] = {
        "x1^2*THETA^(-2)",
        "(0.1+3i)*xi1^3*xi2*THETA^(-5/4) - x2",
        "(THETA + x1^2 + 1)^(-1/4) * THETA^(-1) + 7",
        "tau*THETA^(-3)",
        "0",
    };
    for (const char* src : sources) {
        auto e = parse_expr(src, ctx);
        auto again = parse_expr(e.to_string(), ctx);
        CHECK_MESSAGE(again == e, e.to_string());
        CHECK(again.to_string() == e.to_string());
    }
}

TEST_CASE("shift composes additively") {
    auto ctx = heat1d();
    auto e = parse_expr("x1*THETA^(-1) + THETA^(-3/2)", ctx);
    CHECK(e.shift(1.0).shift(2.5) == e.shift(3.5));
    CHECK_THROWS_AS(e.shift(0.0), InvalidArgument);
    auto inv = parse_expr("THETA^(-1)", ctx).shift(1.0);
    CHECK(std::abs(inv.evaluate(EvalPoint({0.0}, {0.0}, 0.0)) - 1.0) < 1e-15);
    CHECK(std::abs(inv.evaluate(EvalPoint({0.0}, {1.0}, 0.0)) - 0.5) < 1e-15);
}

TEST_CASE("compiled evaluator matches direct evaluation") {
    auto ctx = heat1d();
    auto e = parse_expr("x1^2*xi1*THETA^(-5/2) + (THETA+x1^2)^(-1/2) - 3i", ctx);
    auto c = e.compile();
    std::vector<double> x{0.3}, xi{-1.2};
    Complex tau(0.7, -0.4);
    CHECK(std::abs(c(x, xi, tau) - e.evaluate(x, xi, tau)) < 1e-14);
}

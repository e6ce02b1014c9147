#include "volterra/parametrix.hpp"

#include <cmath>
#include <random>

#include "volterra/error.hpp"
#include "volterra/parse.hpp"

namespace volterra {

namespace {

int total(const std::vector<int>& a) {
    int s = 0;
    for (int v : a) s += v;
    return s;
}

double factorial_product(const std::vector<int>& a) {
    double f = 1.0;
    for (int v : a) {
        for (int i = 2; i <= v; ++i) f *= i;
    }
    return f;
}

// Multi-indices of length n and total order exactly k.
void multi_indices(int n, int k, std::vector<int>& cur, int pos, std::vector<std::vector<int>>& out) {
    if (pos == n - 1) {
        cur[pos] = k;
        out.push_back(cur);
        return;
    }
    for (int v = k; v >= 0; --v) {
        cur[pos] = v;
        multi_indices(n, k - v, cur, pos + 1, out);
    }
}

std::vector<std::vector<int>> multi_indices(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n, 0);
    multi_indices(n, k, cur, 0, out);
    return out;
}

Poly xi_derivative(Poly p, const std::vector<int>& alpha) {
    int n = p.dimension();
    for (int i = 0; i < n; ++i) {
        for (int r = 0; r < alpha[i]; ++r) p = p.derivative(n + i);
    }
    return p;
}

// D_x^alpha with D = -i d/dx.
SymExpr dx(SymExpr e, const std::vector<int>& alpha) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        for (int r = 0; r < alpha[i]; ++r) e = e.differentiate(Var::x(static_cast<int>(i)));
    }
    Complex f(1.0);
    for (int r = 0; r < total(alpha); ++r) f *= Complex(0.0, -1.0);
    return f * e;
}

bool xi_free(const Poly& p) {
    int n = p.dimension();
    for (const auto& [e, c] : p.terms()) {
        for (int i = 0; i < n; ++i) {
            if (e[n + i] != 0) return false;
        }
    }
    return true;
}

}  // namespace

OperatorSpec::OperatorSpec(int n, int w, std::vector<OperatorTerm> terms) : n_(n), w_(w) {
    if (n < 1) throw InvalidArgument("operator dimension must be >= 1");
    if (w < 2 || w % 2 != 0) throw InvalidArgument("operator order w must be an even integer >= 2");
    for (auto& t : terms) {
        if (static_cast<int>(t.alpha.size()) != n) throw InvalidArgument("multi-index length must equal n");
        for (int a : t.alpha) {
            if (a < 0) throw InvalidArgument("multi-index entries must be non-negative");
        }
        if (total(t.alpha) > w) throw InvalidArgument("term order exceeds w");
        if (t.coeff.dimension() != n) throw InvalidArgument("coefficient has wrong dimension");
        if (!xi_free(t.coeff)) throw InvalidArgument("coefficients must be polynomials in x only");
        bool merged = false;
        for (auto& u : terms_) {
            if (u.alpha == t.alpha) {
                u.coeff += t.coeff;
                merged = true;
                break;
            }
        }
        if (!merged) terms_.push_back(std::move(t));
    }
    if (principal().is_zero()) throw InvalidArgument("operator has no terms of order w");
}

Poly OperatorSpec::symbol_part(int k) const {
    Poly p(n_);
    for (const auto& t : terms_) {
        if (total(t.alpha) != w_ - k) continue;
        Poly mono = t.coeff;
        for (int i = 0; i < n_; ++i) {
            for (int r = 0; r < t.alpha[i]; ++r) mono = mono * Poly::xi(n_, i);
        }
        p += mono;
    }
    return p;
}

double OperatorSpec::check_positivity(const PositivityGrid& grid) const {
    if (grid.x_points < 1) throw InvalidArgument("positivity grid needs at least one x point per dimension");
    std::vector<std::vector<double>> dirs;
    for (int i = 0; i < n_; ++i) {
        for (double s : {1.0, -1.0}) {
            std::vector<double> d(n_, 0.0);
            d[i] = s;
            dirs.push_back(d);
        }
    }
    std::mt19937_64 rng(grid.seed);
    std::normal_distribution<double> gauss;
    for (std::size_t k = 0; k < grid.directions; ++k) {
        std::vector<double> d(n_);
        double norm = 0.0;
        while (norm < 1e-8) {
            norm = 0.0;
            for (auto& v : d) {
                v = gauss(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
        }
        for (auto& v : d) v /= norm;
        dirs.push_back(d);
    }

    Poly pw = principal();
    double min_value = INFINITY;
    std::vector<double> x(n_);
    std::size_t count = 1;
    for (int i = 0; i < n_; ++i) count *= static_cast<std::size_t>(grid.x_points);
    for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t r = idx;
        for (int i = 0; i < n_; ++i) {
            int k = static_cast<int>(r % grid.x_points);
            r /= grid.x_points;
            x[i] = grid.x_points == 1 ? 0.0 : -grid.x_box + 2.0 * grid.x_box * k / (grid.x_points - 1);
        }
        for (const auto& d : dirs) {
            Complex v = pw.evaluate(x, d);
            if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real()))) {
                throw PositivityError("principal symbol is not real at x = " + format_double(x[0]) +
                                      ", value " + format_complex(v));
            }
            if (v.real() <= 0.0) {
                throw PositivityError("principal symbol is not positive definite: p_w = " + format_double(v.real()) +
                                      " at x = " + format_double(x[0]));
            }
            min_value = std::min(min_value, v.real());
        }
    }
    return min_value;
}

ContextPtr OperatorSpec::context(const PositivityGrid& grid) const {
    check_positivity(grid);
    return make_context(n_, w_, principal());
}

Json OperatorSpec::to_json() const {
    Json terms = Json::array();
    for (const auto& t : terms_) {
        terms.push_back({{"alpha", t.alpha}, {"coeff", t.coeff.to_string()}});
    }
    return {{"n", n_}, {"w", w_}, {"terms", terms}};
}

OperatorSpec OperatorSpec::from_json(const Json& j) {
    if (!j.is_object()) throw InvalidArgument("operator spec must be a JSON object");
    for (const char* key : {"n", "w", "terms"}) {
        if (!j.contains(key)) throw InvalidArgument(std::string("operator spec is missing '") + key + "'");
    }
    if (!j["n"].is_number_integer() || !j["w"].is_number_integer()) {
        throw InvalidArgument("operator spec fields n and w must be integers");
    }
    int n = j["n"].get<int>();
    int w = j["w"].get<int>();
    if (n < 1) throw InvalidArgument("operator dimension must be >= 1");
    if (!j["terms"].is_array()) throw InvalidArgument("operator spec 'terms' must be an array");
    std::vector<OperatorTerm> terms;
    for (const auto& t : j["terms"]) {
        if (!t.is_object() || !t.contains("alpha") || !t.contains("coeff")) {
            throw InvalidArgument("each term needs 'alpha' and 'coeff'");
        }
        if (!t["alpha"].is_array()) throw InvalidArgument("term 'alpha' must be an array");
        std::vector<int> alpha;
        for (const auto& a : t["alpha"]) {
            if (!a.is_number_integer()) throw InvalidArgument("multi-index entries must be integers");
            alpha.push_back(a.get<int>());
        }
        Poly coeff(n);
        if (t["coeff"].is_string()) {
            coeff = parse_poly(t["coeff"].get<std::string>(), n);
        } else if (t["coeff"].is_number()) {
            coeff = Poly::constant(n, t["coeff"].get<double>());
        } else {
            throw InvalidArgument("term 'coeff' must be a string or a number");
        }
        terms.push_back({std::move(alpha), std::move(coeff)});
    }
    return OperatorSpec(n, w, std::move(terms));
}

SymbolExpansion ParametrixComponents::expansion() const {
    std::vector<SymExpr> exprs;
    for (const auto& c : q) exprs.push_back(c.expr());
    return SymbolExpansion::polyhomogeneous(ctx, -ctx->w, exprs);
}

Json ParametrixComponents::to_json() const {
    Json comps = Json::array();
    for (std::size_t j = 0; j < q.size(); ++j) {
        comps.push_back({{"j", j}, {"degree", q[j].degree()}, {"expr", q[j].expr().to_string()}});
    }
    return {{"context", context_to_json(*ctx)}, {"components", comps}};
}

HomogeneousSymbol principal_inverse(const OperatorSpec& spec, const PositivityGrid& grid) {
    auto ctx = spec.context(grid);
    return HomogeneousSymbol(SymExpr::theta_power(ctx, -ctx->w), -ctx->w);
}

ParametrixComponents parametrix_components(const OperatorSpec& spec, int J, const PositivityGrid& grid) {
    if (J < 0) throw InvalidArgument("J must be >= 0");
    auto head = principal_inverse(spec, grid);
    auto ctx = head.expr().context();
    int n = spec.n();
    int w = spec.w();

    std::vector<Poly> parts;
    for (int k = 0; k <= w; ++k) parts.push_back(spec.symbol_part(k));

    ParametrixComponents out{ctx, {head}};
    for (int j = 1; j <= J; ++j) {
        SymExpr sum(ctx);
        for (int l = 0; l < j; ++l) {
            for (int a = 0; a <= j - l; ++a) {
                int k = j - l - a;
                if (k > w) continue;
                for (const auto& alpha : multi_indices(n, a)) {
                    Poly dp = xi_derivative(parts[k], alpha);
                    if (dp.is_zero()) continue;
                    SymExpr term = SymExpr::from_poly(ctx, dp) * dx(out.q[l].expr(), alpha);
                    sum += Complex(1.0 / factorial_product(alpha)) * term;
                }
            }
        }
        SymExpr qj = -(head.expr() * sum);
        out.q.emplace_back(std::move(qj), -w - j);
    }
    return out;
}

Json ComposeReport::to_json() const {
    Json p = Json::array();
    for (std::size_t d = 0; d < parts.size(); ++d) {
        p.push_back({{"degree", -static_cast<int>(d)}, {"expr", parts[d].to_string()}});
    }
    return {{"exact", exact}, {"first_defect", first_defect}, {"parts", p}};
}

ComposeReport compose_check(const OperatorSpec& spec, const ParametrixComponents& comps, int N) {
    if (N < 0) throw InvalidArgument("N must be >= 0");
    if (N + 1 > static_cast<int>(comps.q.size())) {
        throw InvalidArgument("compose_check needs components through order -w-N");
    }
    const auto& ctx = comps.ctx;
    int n = spec.n();
    int w = spec.w();
    std::vector<Poly> parts;
    for (int k = 0; k <= w; ++k) parts.push_back(spec.symbol_part(k));
    SymExpr theta = SymExpr::theta_power(ctx, w);

    ComposeReport rep;
    for (int d = 0; d <= N; ++d) {
        SymExpr part(ctx);
        for (int l = 0; l <= d; ++l) {
            for (int a = 0; a <= d - l; ++a) {
                int k = d - l - a;
                if (k > w) continue;
                for (const auto& alpha : multi_indices(n, a)) {
                    // the symbol of d_t is i tau, which joins p_w as THETA when alpha = 0
                    SymExpr sym = (a == 0 && k == 0) ? theta : SymExpr::from_poly(ctx, xi_derivative(parts[k], alpha));
                    if (sym.is_zero()) continue;
                    part += Complex(1.0 / factorial_product(alpha)) * (sym * dx(comps.q[l].expr(), alpha));
                }
            }
        }
        bool ok = d == 0 ? part == SymExpr::constant(ctx, 1.0) : part.is_zero();
        if (!ok && rep.first_defect < 0) rep.first_defect = d;
        rep.parts.push_back(std::move(part));
    }
    rep.exact = rep.first_defect < 0;
    return rep;
}

}  // namespace volterra

#include "volterra/symbol_core.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numbers>

#include "volterra/error.hpp"
#include "volterra/parallel.hpp"
#include "volterra/parse.hpp"

namespace volterra {

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

void require_lower(Complex tau) {
    if (tau.imag() > 0.0) throw DomainError("tau must satisfy Im tau <= 0");
}

}  // namespace

double pseudo_norm(std::span<const double> xi, Complex tau, int w) {
    require_lower(tau);
    return std::pow(std::pow(norm2(xi), w) + std::abs(tau), 1.0 / w);
}

Complex rho(std::span<const double> xi, Complex tau, int w) {
    require_lower(tau);
    Complex base = std::pow(norm2(xi), w) + Complex(0.0, 1.0) * tau;
    if (base == Complex(0.0)) throw PoleError("rho is singular at the origin");
    return std::exp(-std::log(base) / static_cast<double>(w));
}

Complex a_epsilon(double eps, std::span<const double> xi, Complex tau, int w) {
    require_lower(tau);
    if (norm2(xi) == 0.0 && tau == Complex(0.0)) return 0.0;
    return std::exp(-eps * rho(xi, tau, w));
}

Complex a_epsilon_remainder(double eps, int J, std::span<const double> xi, Complex tau, int w) {
    if (J < 0) throw InvalidArgument("remainder order must be non-negative");
    Complex z = -eps * rho(xi, tau, w);
    if (std::abs(z) > 0.5) {
        Complex partial(0.0), term(1.0);
        for (int j = 0; j < J; ++j) {
            partial += term;
            term *= z / static_cast<double>(j + 1);
        }
        return std::exp(z) - partial;
    }
    // tail of the exponential series from z^J / J! on
    Complex term(1.0);
    for (int j = 1; j <= J; ++j) term *= z / static_cast<double>(j);
    Complex sum(0.0);
    for (int j = J; j < J + 60; ++j) {
        sum += term;
        term *= z / static_cast<double>(j + 1);
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

Poly euclidean_power(int n, int w) {
    Poly sq(n);
    for (int i = 0; i < n; ++i) sq += Poly::xi(n, i) * Poly::xi(n, i);
    return sq.pow(w / 2);
}

SymExpr rho_expr(const ContextPtr& ctx) {
    Poly shift = euclidean_power(ctx->n, ctx->w) - ctx->principal;
    if (shift.is_zero()) return SymExpr::theta_power(ctx, -1);
    return SymExpr::shifted_theta_power(ctx, shift, -1);
}

double rho_constant(int w) {
    if (w < 2 || w % 2 != 0) throw InvalidArgument("weight w must be even and >= 2");
    // on the unit pseudo-sphere rho depends only on a = |xi|^w and arg tau = theta
    auto modulus = [w](double a, double theta) {
        Complex base = a + Complex(0.0, 1.0) * std::polar(1.0 - a, theta);
        return std::pow(std::abs(base), -1.0 / w);
    };
    auto objective = [&](double a, double theta) {
        double r = modulus(a, theta);
        return std::max(r, 1.0 / r);
    };
    const int G = 257;
    double best = 0.0, best_a = 0.0, best_t = 0.0;
    for (int i = 0; i < G; ++i) {
        for (int k = 0; k < G; ++k) {
            double a = static_cast<double>(i) / (G - 1);
            double t = -kPi * static_cast<double>(k) / (G - 1);
            double v = objective(a, t);
            if (v > best) {
                best = v;
                best_a = a;
                best_t = t;
            }
        }
    }
    double da = 1.0 / (G - 1), dt = kPi / (G - 1);
    for (int round = 0; round < 6; ++round) {
        double ca = best_a, ct = best_t;
        for (int i = -16; i <= 16; ++i) {
            for (int k = -16; k <= 16; ++k) {
                double a = std::clamp(ca + da * i / 8.0, 0.0, 1.0);
                double t = std::clamp(ct + dt * k / 8.0, -kPi, 0.0);
                double v = objective(a, t);
                if (v > best) {
                    best = v;
                    best_a = a;
                    best_t = t;
                }
            }
        }
        da /= 8.0;
        dt /= 8.0;
    }
    return best;
}

int Derivative::order() const {
    int s = k;
    for (int a : alpha) s += a;
    for (int b : beta) s += b;
    return s;
}

int Derivative::beta_order() const {
    int s = 0;
    for (int b : beta) s += b;
    return s;
}

std::string Derivative::label() const {
    auto list = [](const std::vector<int>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s + "]";
    };
    return "alpha=" + list(alpha) + " beta=" + list(beta) + " k=" + std::to_string(k);
}

std::vector<Derivative> derivatives_up_to(int n, int D) {
    std::vector<Derivative> out;
    const int vars = 2 * n + 1;
    std::vector<int> e(vars, 0);
    // enumerate exponent vectors with total <= D in lexicographic order
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == vars) {
            Derivative d;
            d.alpha.assign(e.begin(), e.begin() + n);
            d.beta.assign(e.begin() + n, e.begin() + 2 * n);
            d.k = e[2 * n];
            out.push_back(d);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            e[pos] = v;
            rec(pos + 1, left - v);
        }
        e[pos] = 0;
    };
    rec(0, D);
    std::stable_sort(out.begin(), out.end(),
                     [](const Derivative& a, const Derivative& b) { return a.order() < b.order(); });
    return out;
}

SymExpr apply_derivative(const SymExpr& e, const Derivative& d) {
    SymExpr out = e;
    for (std::size_t i = 0; i < d.alpha.size(); ++i) {
        for (int r = 0; r < d.alpha[i]; ++r) out = out.differentiate(Var::x(static_cast<int>(i)));
    }
    for (std::size_t i = 0; i < d.beta.size(); ++i) {
        for (int r = 0; r < d.beta[i]; ++r) out = out.differentiate(Var::xi(static_cast<int>(i)));
    }
    for (int r = 0; r < d.k; ++r) out = out.differentiate(Var::tau());
    return out;
}

ExprFunction::ExprFunction(SymExpr e) : expr_(std::move(e)) {
    if (!expr_.context()) throw InvalidArgument("expression without context");
}

Complex ExprFunction::derivative(const Derivative& d, std::span<const double> x, std::span<const double> xi,
                                 Complex tau) const {
    std::shared_ptr<const CompiledExpr> f;
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(d);
        if (it == cache_.end()) {
            it = cache_.emplace(d, std::make_shared<CompiledExpr>(apply_derivative(expr_, d).compile())).first;
        }
        f = it->second;
    }
    return (*f)(x, xi, tau);
}

HomogeneousSymbol::HomogeneousSymbol(SymExpr expr, int degree) : expr_(std::move(expr)), degree_(degree) {
    auto info = expr_.infer_degree();
    if (info.is_zero()) return;
    if (!info.homogeneous()) throw InvalidArgument("symbol is not homogeneous: " + expr_.to_string());
    if (info.degree != degree) {
        throw InvalidArgument("symbol has degree " + std::to_string(info.degree) + ", expected " +
                              std::to_string(degree));
    }
}

SymbolExpansion::SymbolExpansion(ContextPtr ctx, ExpansionMode mode, std::vector<ExpansionEntry> entries)
    : ctx_(std::move(ctx)), mode_(mode), entries_(std::move(entries)) {
    if (!ctx_) throw InvalidArgument("expansion without context");
    for (std::size_t j = 0; j < entries_.size(); ++j) {
        const auto& e = entries_[j];
        if (!e.symbol.context()) entries_[j].symbol = SymExpr(ctx_);
        if (!same_context(entries_[j].symbol.ctx(), *ctx_)) throw InvalidArgument("entry context mismatch");
        if (j > 0 && !(e.order < entries_[j - 1].order)) {
            throw InvalidArgument("expansion orders must be strictly decreasing");
        }
        auto info = entries_[j].symbol.infer_degree();
        if (mode_ == ExpansionMode::Polyhomogeneous) {
            if (e.order != std::floor(e.order)) throw InvalidArgument("polyhomogeneous orders must be integers");
            if (j > 0 && e.order != entries_[j - 1].order - 1) {
                throw InvalidArgument("polyhomogeneous orders must decrease in unit steps");
            }
            if (!info.is_zero() && (!info.homogeneous() || info.degree != static_cast<int>(e.order))) {
                throw InvalidArgument("entry " + std::to_string(j) + " is not homogeneous of degree " +
                                      std::to_string(static_cast<int>(e.order)));
            }
        } else if (info.homogeneous() && info.degree > e.order) {
            throw InvalidArgument("entry " + std::to_string(j) + " has degree above its order");
        }
    }
}

SymbolExpansion SymbolExpansion::polyhomogeneous(ContextPtr ctx, int m, const std::vector<SymExpr>& components) {
    std::vector<ExpansionEntry> entries;
    for (std::size_t j = 0; j < components.size(); ++j) {
        entries.push_back({static_cast<double>(m - static_cast<int>(j)), components[j]});
    }
    return SymbolExpansion(std::move(ctx), ExpansionMode::Polyhomogeneous, std::move(entries));
}

double SymbolExpansion::order_after(std::size_t N) const {
    if (entries_.empty()) throw InvalidArgument("empty expansion");
    if (N < entries_.size()) return entries_[N].order;
    return entries_.back().order - static_cast<double>(N - entries_.size() + 1);
}

Json context_to_json(const Context& ctx) {
    return Json{{"n", ctx.n}, {"w", ctx.w}, {"principal", ctx.principal.to_string()}};
}

ContextPtr context_from_json(const Json& j) {
    try {
        int n = j.at("n").get<int>();
        int w = j.at("w").get<int>();
        if (n < 1) throw InvalidArgument("dimension n must be >= 1");
        if (j.contains("principal")) return make_context(n, w, parse_poly(j.at("principal").get<std::string>(), n));
        return make_euclidean_context(n, w);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad context: ") + e.what());
    }
}

Json SymbolExpansion::to_json() const {
    Json j = context_to_json(*ctx_);
    j["mode"] = mode_ == ExpansionMode::Polyhomogeneous ? "polyhomogeneous" : "graded";
    Json entries = Json::array();
    for (const auto& e : entries_) entries.push_back(Json{{"order", e.order}, {"expr", e.symbol.to_string()}});
    j["entries"] = std::move(entries);
    return j;
}

SymbolExpansion SymbolExpansion::from_json(const Json& j) {
    auto ctx = context_from_json(j);
    try {
        std::string mode_name = j.value("mode", std::string("polyhomogeneous"));
        ExpansionMode mode;
        if (mode_name == "polyhomogeneous") {
            mode = ExpansionMode::Polyhomogeneous;
        } else if (mode_name == "graded") {
            mode = ExpansionMode::Graded;
        } else {
            throw InvalidArgument("unknown expansion mode '" + mode_name + "'");
        }
        std::vector<ExpansionEntry> entries;
        for (const auto& e : j.at("entries")) {
            ExpansionEntry entry{e.at("order").get<double>(), parse_expr(e.at("expr").get<std::string>(), ctx)};
            if (mode == ExpansionMode::Polyhomogeneous && !entries.empty()) {
                double prev = entries.back().order;
                if (entry.order >= prev) throw InvalidArgument("expansion orders must be strictly decreasing");
                for (double o = prev - 1; o > entry.order; o -= 1) entries.push_back({o, SymExpr(ctx)});
            }
            entries.push_back(std::move(entry));
        }
        return SymbolExpansion(ctx, mode, std::move(entries));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad expansion: ") + e.what());
    }
}

namespace {

Json derivative_json(const Derivative& d) {
    return Json{{"alpha", d.alpha}, {"beta", d.beta}, {"k", d.k}};
}

}  // namespace

Json EstimateReport::to_json() const {
    Json rows = Json::array();
    for (const auto& r : table) {
        Json row = derivative_json(r.d);
        row["shell"] = r.shell;
        row["C"] = r.C;
        if (!r.resolved) row["resolved"] = false;
        rows.push_back(std::move(row));
    }
    Json j{{"estimate_id", estimate_id}, {"grid", grid}, {"table", std::move(rows)}, {"pass", pass},
           {"margin", margin}};
    if (!note.empty()) j["note"] = note;
    return j;
}

EstimateReport EstimateReport::from_json(const Json& j) {
    EstimateReport r;
    r.estimate_id = j.at("estimate_id").get<std::string>();
    r.grid = j.at("grid");
    for (const auto& row : j.at("table")) {
        EstimateRow e;
        e.d.alpha = row.at("alpha").get<std::vector<int>>();
        e.d.beta = row.at("beta").get<std::vector<int>>();
        e.d.k = row.at("k").get<int>();
        e.shell = row.at("shell").get<double>();
        e.C = row.at("C").get<double>();
        e.resolved = row.value("resolved", true);
        r.table.push_back(std::move(e));
    }
    r.pass = j.at("pass").get<bool>();
    r.margin = j.at("margin").get<double>();
    r.note = j.value("note", std::string());
    return r;
}

double uniform(std::mt19937_64& rng, double a, double b) {
    return a + (b - a) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

namespace {

std::vector<double> random_direction(int n, std::mt19937_64& rng) {
    std::vector<double> v(n);
    double len = 0.0;
    do {
        len = 0.0;
        for (int i = 0; i < n; ++i) {
            // Box-Muller keeps the sequence identical across standard libraries
            double u1 = uniform(rng, 0.0, 1.0), u2 = uniform(rng, 0.0, 1.0);
            v[i] = std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
            len += v[i] * v[i];
        }
    } while (len < 1e-12);
    len = std::sqrt(len);
    for (double& c : v) c /= len;
    return v;
}

std::vector<double> random_x(int n, double box, std::mt19937_64& rng) {
    std::vector<double> x(n);
    for (double& c : x) c = uniform(rng, -box, box);
    return x;
}

double finite_or_max(double v) {
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

}  // namespace

std::vector<SpherePoint> sample_pseudo_sphere(int n, int w, std::size_t count, EstimateMode mode,
                                              std::mt19937_64& rng) {
    std::vector<SpherePoint> pts;
    pts.reserve(count + 3);
    // corners of the sphere first: pure time and pure space directions
    pts.push_back({std::vector<double>(n, 0.0), Complex(mode == EstimateMode::RealTau ? 1.0 : 0.0, mode == EstimateMode::RealTau ? 0.0 : -1.0)});
    pts.push_back({std::vector<double>(n, 0.0), Complex(-1.0, 0.0)});
    {
        std::vector<double> e(n, 0.0);
        e[0] = 1.0;
        pts.push_back({e, 0.0});
    }
    while (pts.size() < count + 3) {
        double a = uniform(rng, 0.0, 1.0);  // |xi|^w
        auto dir = random_direction(n, rng);
        double r = std::pow(a, 1.0 / w);
        for (double& c : dir) c *= r;
        Complex tau;
        if (mode == EstimateMode::RealTau) {
            tau = (rng() & 1u) ? (1.0 - a) : -(1.0 - a);
        } else {
            tau = std::polar(1.0 - a, uniform(rng, -kPi, 0.0));
            if (tau.imag() > 0.0) tau = Complex(tau.real(), 0.0);
        }
        pts.push_back({std::move(dir), tau});
    }
    return pts;
}

SpherePoint dilate(const SpherePoint& p, double R, int w) {
    SpherePoint q = p;
    for (double& c : q.xi) c *= R;
    q.tau *= std::pow(R, w);
    return q;
}

Json GridPolicy::to_json() const {
    return Json{{"shells", shells}, {"sphere_samples", sphere_samples}, {"x_box", x_box}, {"seed", seed}};
}

EstimateReport check_homogeneity(const HomogeneousSymbol& q, std::size_t samples, std::uint64_t seed) {
    const Context& ctx = q.ctx();
    const int n = ctx.n, w = ctx.w, m = q.degree();
    EstimateReport report;
    report.estimate_id = "homogeneity";
    report.grid = Json{{"samples", samples}, {"seed", seed}, {"lambda", {0.5, 2.0}}, {"x_box", 1.0}};
    const double tol = 1e-10;

    std::mt19937_64 rng(seed);
    CompiledExpr f = q.expr().compile();
    double worst = 0.0;
    std::size_t done = 0, poles = 0;
    while (done < samples) {
        auto x = random_x(n, 1.0, rng);
        std::vector<double> xi(n), sxi(n);
        for (double& c : xi) c = uniform(rng, -2.0, 2.0);
        Complex tau = std::polar(uniform(rng, 0.0, 3.0), uniform(rng, -kPi, 0.0));
        if (tau.imag() > 0.0) tau = Complex(tau.real(), 0.0);
        double lambda = uniform(rng, 0.5, 2.0);
        for (int i = 0; i < n; ++i) sxi[i] = lambda * xi[i];
        Complex base, scaled;
        try {
            base = f(x, xi, tau);
            scaled = f(x, sxi, tau * std::pow(lambda, w));
        } catch (const PoleError&) {
            if (++poles > samples) throw PoleError("homogeneity sampling hit too many poles");
            continue;
        }
        Complex expect = std::pow(lambda, m) * base;
        double denom = std::abs(expect);
        double defect = std::abs(scaled - expect);
        double rel = denom > 0 ? defect / denom : (defect == 0 ? 0.0 : std::numeric_limits<double>::infinity());
        worst = std::max(worst, rel);
        ++done;
    }
    report.table.push_back({Derivative::none(n), 0.0, finite_or_max(worst), true});
    report.pass = worst <= tol;
    report.margin = finite_or_max((tol - worst) / tol);
    if (!report.pass) report.note = "relative defect " + format_double(worst) + " exceeds 1e-10";
    return report;
}

AnalyticityGrid AnalyticityGrid::standard(std::uint64_t seed) {
    AnalyticityGrid g;
    for (int k = -8; k <= 24; ++k) g.shells.push_back(std::pow(10.0, k / 8.0));
    g.seed = seed;
    return g;
}

Json AnalyticityGrid::to_json() const {
    return Json{{"shells", shells}, {"samples_per_shell", samples_per_shell}, {"x_box", x_box}, {"seed", seed},
                {"tolerance", tolerance}};
}

EstimateReport check_analyticity(const SymbolFunction& q, const AnalyticityGrid& grid) {
    if (grid.shells.empty()) throw InvalidArgument("analyticity grid has no shells");
    const int n = q.dimension(), w = q.weight();
    EstimateReport report;
    report.estimate_id = "analyticity";
    report.grid = grid.to_json();

    struct Probe {
        std::vector<double> x;
        SpherePoint p;
        double h;
    };
    std::mt19937_64 rng(grid.seed);
    std::vector<std::vector<Probe>> probes(grid.shells.size());
    for (std::size_t s = 0; s < grid.shells.size(); ++s) {
        double R = grid.shells[s];
        if (!(R > 0.0)) throw InvalidArgument("analyticity shells must be positive");
        for (std::size_t i = 0; i < grid.samples_per_shell; ++i) {
            // strictly interior: |xi|^w <= 0.9 and arg tau in [-pi + 0.05, -0.05] on the unit sphere
            double a = uniform(rng, 0.0, 0.9);
            double theta = uniform(rng, -kPi + 0.05, -0.05);
            auto xi = random_direction(n, rng);
            for (double& c : xi) c *= std::pow(a, 1.0 / w);
            auto x = random_x(n, grid.x_box, rng);
            SpherePoint p = dilate({xi, std::polar(1.0 - a, theta)}, R, w);
            double h = 1e-4 * std::pow(R, w);
            if (p.tau.imag() + h >= 0.0) throw DomainError("analyticity grid touches Im tau >= 0");
            probes[s].push_back({std::move(x), std::move(p), h});
        }
    }

    std::vector<double> worst(grid.shells.size(), 0.0);
    std::vector<std::string> where(grid.shells.size());
    parallel_for(grid.shells.size(), [&](std::size_t s) {
        for (const auto& pr : probes[s]) {
            auto f = [&](Complex dt) { return q.value(pr.x, pr.p.xi, pr.p.tau + dt); };
            Complex d_re = (f(pr.h) - f(-pr.h)) / (2.0 * pr.h);
            Complex d_im = (f(Complex(0, pr.h)) - f(Complex(0, -pr.h))) / (2.0 * pr.h);
            Complex d_tau = 0.5 * (d_re - Complex(0, 1) * d_im);
            double residual = std::abs(d_re + Complex(0, 1) * d_im) / (std::abs(d_tau) + 1.0);
            if (!std::isfinite(residual)) residual = std::numeric_limits<double>::infinity();
            if (residual > worst[s]) {
                worst[s] = residual;
                std::string xi_text;
                for (double c : pr.p.xi) xi_text += (xi_text.empty() ? "" : ",") + format_double(c);
                where[s] = "xi=[" + xi_text + "] tau=" + format_complex(pr.p.tau);
            }
        }
    });

    double overall = 0.0;
    std::size_t worst_shell = 0;
    for (std::size_t s = 0; s < grid.shells.size(); ++s) {
        report.table.push_back({Derivative::none(n), grid.shells[s], finite_or_max(worst[s]), true});
        if (worst[s] > overall) {
            overall = worst[s];
            worst_shell = s;
        }
    }
    report.pass = overall <= grid.tolerance;
    report.margin = finite_or_max((grid.tolerance - overall) / grid.tolerance);
    report.note = "max residual " + format_double(finite_or_max(overall)) + " at " + where[worst_shell];
    return report;
}

EstimateReport check_expansion_estimates(const SymbolFunction& q, const SymbolExpansion& exp, std::size_t N,
                                         int D, EstimateMode mode, const GridPolicy& grid,
                                         std::optional<double> order_override) {
    if (N > exp.size()) {
        throw InvalidArgument("truncation N=" + std::to_string(N) + " exceeds the " + std::to_string(exp.size()) +
                              " available components");
    }
    if (D < 0) throw InvalidArgument("derivative budget must be non-negative");
    if (grid.shells.empty()) throw InvalidArgument("estimate grid has no shells");
    const Context& ctx = *exp.context();
    const int n = ctx.n, w = ctx.w;
    if (q.dimension() != n || q.weight() != w) throw InvalidArgument("symbol and expansion contexts differ");

    EstimateReport report;
    report.estimate_id = mode == EstimateMode::RealTau ? "eq4" : "eq8";
    report.grid = grid.to_json();
    report.grid["N"] = N;
    report.grid["D"] = D;

    std::vector<std::unique_ptr<ExprFunction>> heads;
    for (std::size_t j = 0; j < N; ++j) heads.push_back(std::make_unique<ExprFunction>(exp.entries()[j].symbol));
    const double order_N = order_override ? *order_override : exp.order_after(N);

    std::mt19937_64 rng(grid.seed);
    auto sphere = sample_pseudo_sphere(n, w, grid.sphere_samples, mode, rng);
    std::vector<std::vector<double>> xs;
    for (std::size_t i = 0; i < sphere.size(); ++i) xs.push_back(random_x(n, grid.x_box, rng));

    auto ders = derivatives_up_to(n, D);
    const std::size_t S = grid.shells.size();
    std::vector<double> C(ders.size() * S, 0.0);
    std::vector<char> resolved(ders.size() * S, 1);
    parallel_for(ders.size() * S, [&](std::size_t idx) {
        const Derivative& d = ders[idx / S];
        double R = grid.shells[idx % S];
        double exponent = order_N - d.beta_order() - w * d.k;
        double best = 0.0;
        bool any_resolved = false;
        for (std::size_t i = 0; i < sphere.size(); ++i) {
            SpherePoint p = dilate(sphere[i], R, w);
            Complex total;
            double scale;
            try {
                total = q.derivative(d, xs[i], p.xi, p.tau);
                scale = std::abs(total);
                for (const auto& hd : heads) {
                    Complex v = hd->derivative(d, xs[i], p.xi, p.tau);
                    total -= v;
                    scale += std::abs(v);
                }
            } catch (const PoleError&) {
                continue;
            }
            double mag = std::abs(total);
            double floor = 64.0 * std::numeric_limits<double>::epsilon() * scale;
            if (mag <= floor) continue;
            any_resolved = true;
            best = std::max(best, mag * std::pow(R, -exponent));
        }
        C[idx] = best;
        resolved[idx] = any_resolved || best == 0.0;
    });

    double margin = std::numeric_limits<double>::max();
    bool pass = true;
    std::string blocker;
    // the first half of the shells may still be pre-asymptotic (large weights push the onset outwards)
    const std::size_t first_checked = std::max<std::size_t>(1, S / 2);
    for (std::size_t di = 0; di < ders.size(); ++di) {
        double running = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            double c = C[di * S + s];
            report.table.push_back({ders[di], grid.shells[s], finite_or_max(c), resolved[di * S + s] != 0});
            if (!std::isfinite(c)) {
                pass = false;
                margin = -std::numeric_limits<double>::max();
                blocker = ders[di].label() + " shell " + format_double(grid.shells[s]) + ": non-finite";
                continue;
            }
            if (s >= first_checked && running > 0.0) {
                double target = 2.0 * running;
                double m = (target - c) / target;
                if (m < margin) {
                    margin = m;
                    if (m < 0) {
                        pass = false;
                        blocker = ders[di].label() + " shell " + format_double(grid.shells[s]) + ": C=" +
                                  format_double(c) + " > 2 * " + format_double(running);
                    }
                }
            } else if (s >= first_checked && c > 0.0) {
                pass = false;
                margin = std::min(margin, -1.0);
                blocker = ders[di].label() + " shell " + format_double(grid.shells[s]) + ": grows from zero";
            }
            running = std::max(running, c);
        }
    }
    if (margin == std::numeric_limits<double>::max()) margin = 1.0;
    report.pass = pass;
    report.margin = margin;
    report.note = pass ? "order " + format_double(order_N) : "blocked at " + blocker;
    return report;
}

}  // namespace volterra

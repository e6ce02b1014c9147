#include "volterra/summation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>

#include "volterra/error.hpp"
#include "volterra/parallel.hpp"
#include "volterra/parse.hpp"

namespace volterra {

namespace {

constexpr double kOrderTol = 1e-9;

double factorial(int l) {
    double f = 1.0;
    for (int i = 2; i <= l; ++i) f *= i;
    return f;
}

double binomial(int n, int k) {
    return factorial(n) / (factorial(k) * factorial(n - k));
}

}  // namespace

std::string method_name(SumMethod m) {
    switch (m) {
        case SumMethod::Cutoff: return "cutoff";
        case SumMethod::AnalyticAeps: return "analytic_aeps";
        case SumMethod::Translation: return "translation";
    }
    return "unknown";
}

SumMethod parse_method(const std::string& name) {
    if (name == "cutoff") return SumMethod::Cutoff;
    if (name == "analytic" || name == "analytic_aeps") return SumMethod::AnalyticAeps;
    if (name == "translation") return SumMethod::Translation;
    throw InvalidArgument("unknown summation method '" + name + "' (cutoff, analytic, translation)");
}

double CutoffProfile::phi(double u) const {
    if (u <= 0.5) return 1.0;
    if (u >= 1.0) return 0.0;
    auto g = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    double s = 2.0 * (u - 0.5);
    double a = g(1.0 - s), b = g(s);
    return a / (a + b);
}

double smooth_pseudo_norm(std::span<const double> xi, Complex tau, int w) {
    double r2 = 0.0;
    for (double c : xi) r2 += c * c;
    double a = std::pow(r2, w);  // |xi|^(2w)
    return std::pow(a + std::norm(tau), 1.0 / (2.0 * w));
}

double cutoff_weight(const CutoffProfile& profile, double eps, std::span<const double> xi, Complex tau, int w) {
    return 1.0 - profile.phi(smooth_pseudo_norm(xi, tau, w) / eps);
}

SymbolExpansion pad_orders(const SymbolExpansion& exp, double step) {
    if (!(step > 0.0)) throw InvalidArgument("padding step must be positive");
    const auto& in = exp.entries();
    std::vector<ExpansionEntry> out;
    for (std::size_t j = 0; j < in.size(); ++j) {
        out.push_back(in[j]);
        if (j + 1 == in.size()) break;
        double o = in[j].order;
        while (o - step > in[j + 1].order + kOrderTol) {
            o -= step;
            out.push_back({o, SymExpr(exp.context())});
        }
    }
    return SymbolExpansion(exp.context(), ExpansionMode::Graded, std::move(out));
}

namespace {

std::vector<SymExpr> solve_triangular(const SymbolExpansion& exp, const std::vector<double>& weights,
                                      SumMethod mode) {
    const auto& entries = exp.entries();
    const std::size_t M = entries.size();
    if (M == 0) return {};
    if (weights.size() + 1 < M) {
        throw InvalidArgument("need " + std::to_string(M - 1) + " weights, got " + std::to_string(weights.size()));
    }
    const ContextPtr& ctx = exp.context();
    const bool translation = mode == SumMethod::Translation;
    if (mode == SumMethod::Cutoff) throw InvalidArgument("the cut-off method has no triangular system");
    const double s = translation ? ctx->w : 1.0;
    const bool poly = exp.mode() == ExpansionMode::Polyhomogeneous;
    const double pad = poly ? 1.0 : s;
    for (std::size_t j = 0; j + 1 < M; ++j) {
        if (entries[j].order - pad > entries[j + 1].order + kOrderTol) {
            throw InvalidArgument("orders are not padded: " + format_double(entries[j].order) + " -> " +
                                  format_double(entries[j + 1].order) + " exceeds step " + format_double(pad));
        }
    }
    SymExpr rho = rho_expr(ctx);
    std::vector<SymExpr> r;
    r.reserve(M);
    for (std::size_t j = 0; j < M; ++j) {
        const double upper = entries[j].order;
        const double lower = j + 1 < M ? entries[j + 1].order : upper - pad;
        SymExpr rj = entries[j].symbol;
        for (std::size_t k = 0; k < j; ++k) {
            if (r[k].is_zero()) continue;
            SymExpr op = r[k];
            for (int l = 1;; ++l) {
                double level = entries[k].order - l * s;
                if (level <= lower + kOrderTol) break;
                op = translation ? op.differentiate(Var::tau()) : op * rho;
                if (level > upper + kOrderTol) continue;
                Complex c = translation ? std::pow(Complex(0.0, -weights[k]), l) / factorial(l)
                                        : Complex(std::pow(-weights[k], l) / factorial(l));
                rj -= c * op;
            }
        }
        r.push_back(std::move(rj));
    }
    return r;
}

}  // namespace

std::vector<SymExpr> solve_r_polyhom(const SymbolExpansion& exp, const std::vector<double>& eps) {
    if (exp.mode() != ExpansionMode::Polyhomogeneous) throw InvalidArgument("expansion is not polyhomogeneous");
    return solve_triangular(exp, eps, SumMethod::AnalyticAeps);
}

std::vector<SymExpr> solve_r_graded(const SymbolExpansion& exp, const std::vector<double>& weights,
                                    SumMethod mode) {
    return solve_triangular(exp, weights, mode);
}

SymExpr shift_symbol(const SymExpr& q, double T) {
    if (!(T > 0.0)) throw InvalidArgument("translation T must be positive");
    return q.shift(T);
}

namespace {

/// c_eps * q with derivatives by the Leibniz rule; derivatives of c by nested five-point differences.
class CutoffTerm final : public SymbolFunction {
public:
    CutoffTerm(CutoffProfile profile, double eps, SymExpr q)
        : profile_(profile), eps_(eps), q_(std::move(q)) {}

    int dimension() const override { return q_.dimension(); }
    int weight() const override { return q_.weight(); }

    Complex derivative(const Derivative& d, std::span<const double> x, std::span<const double> xi,
                       Complex tau) const override {
        const int n = dimension(), w = weight();
        if (smooth_pseudo_norm(xi, tau, w) >= 1.2 * eps_) {
            // c = 1 on a neighbourhood of every stencil point used below
            return q_.derivative(d, x, xi, tau);
        }
        Complex total(0.0);
        std::vector<int> sub(n + 1, 0);
        std::function<void(int)> rec = [&](int v) {
            if (v == n + 1) {
                Derivative rest = d;
                double coeff = 1.0;
                for (int i = 0; i < n; ++i) {
                    rest.beta[i] -= sub[i];
                    coeff *= binomial(d.beta[i], sub[i]);
                }
                rest.k -= sub[n];
                coeff *= binomial(d.k, sub[n]);
                double dc = c_derivative(sub, xi, tau);
                if (dc == 0.0) return;
                total += coeff * dc * q_.derivative(rest, x, xi, tau);
                return;
            }
            int top = v < n ? d.beta[v] : d.k;
            for (int a = 0; a <= top; ++a) {
                sub[v] = a;
                rec(v + 1);
            }
            sub[v] = 0;
        };
        rec(0);
        return total;
    }

private:
    double c_derivative(std::vector<int> orders, std::span<const double> xi, Complex tau) const {
        const int n = dimension(), w = weight();
        std::vector<double> pxi(xi.begin(), xi.end());
        const double hx = 2e-3 * eps_, ht = 2e-3 * std::pow(eps_, w);
        std::function<double(int)> rec = [&](int v) -> double {
            if (v == n + 1) return cutoff_weight(profile_, eps_, pxi, tau, w);
            if (orders[v] == 0) return rec(v + 1);
            --orders[v];
            double h = v < n ? hx : ht;
            // five-point stencil, fourth order in h
            const double off[4] = {2 * h, h, -h, -2 * h};
            const double wt[4] = {-1.0, 8.0, -8.0, 1.0};
            double acc = 0.0;
            for (int i = 0; i < 4; ++i) {
                if (v < n) {
                    double saved = pxi[v];
                    pxi[v] += off[i];
                    acc += wt[i] * rec(v);
                    pxi[v] = saved;
                } else {
                    Complex saved = tau;
                    tau += off[i];
                    acc += wt[i] * rec(v);
                    tau = saved;
                }
            }
            ++orders[v];
            return acc / (12 * h);
        };
        return rec(0);
    }

    CutoffProfile profile_;
    double eps_;
    ExprFunction q_;
};

/// a_eps * r. Every derivative has the form exp(-eps rho) * sum_l eps^l E_l with E_0 = d r and
/// E'_l = dE_l - d(rho) E_(l-1); the E_l are built symbolically and cached per derivative.
class AepsTerm final : public SymbolFunction {
public:
    AepsTerm(double eps, SymExpr r) : eps_(eps), r_(std::move(r)), rho_(rho_expr(r_.context())) {
        rho_eval_ = rho_.compile();
    }

    int dimension() const override { return r_.ctx().n; }
    int weight() const override { return r_.ctx().w; }

    Complex derivative(const Derivative& d, std::span<const double> x, std::span<const double> xi,
                       Complex tau) const override {
        bool origin = tau == Complex(0.0) && std::all_of(xi.begin(), xi.end(), [](double c) { return c == 0.0; });
        if (origin) return 0.0;  // a_eps vanishes to infinite order at the origin
        auto E = expansion(d);
        Complex rho = rho_eval_(x, xi, tau);
        Complex damp = std::exp(-eps_ * rho);
        if (damp == Complex(0.0)) return 0.0;
        Complex sum(0.0);
        double power = 1.0;
        for (const auto& e : *E) {
            if (!e.empty()) sum += power * e(x, xi, tau);
            power *= eps_;
        }
        return damp * sum;
    }

private:
    std::shared_ptr<const std::vector<CompiledExpr>> expansion(const Derivative& d) const {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(d);
        if (it != cache_.end()) return it->second;
        std::vector<SymExpr> E{r_};
        auto step = [&](Var v) {
            SymExpr drho = rho_.differentiate(v);
            std::vector<SymExpr> next(E.size() + 1, SymExpr(r_.context()));
            for (std::size_t l = 0; l < E.size(); ++l) {
                next[l] += E[l].differentiate(v);
                next[l + 1] -= drho * E[l];
            }
            E = std::move(next);
        };
        for (std::size_t i = 0; i < d.alpha.size(); ++i) {
            for (int c = 0; c < d.alpha[i]; ++c) step(Var::x(static_cast<int>(i)));
        }
        for (std::size_t i = 0; i < d.beta.size(); ++i) {
            for (int c = 0; c < d.beta[i]; ++c) step(Var::xi(static_cast<int>(i)));
        }
        for (int c = 0; c < d.k; ++c) step(Var::tau());
        auto compiled = std::make_shared<std::vector<CompiledExpr>>();
        for (const auto& e : E) compiled->push_back(e.compile());
        cache_.emplace(d, compiled);
        return compiled;
    }

    double eps_;
    SymExpr r_;
    SymExpr rho_;
    CompiledExpr rho_eval_;
    mutable std::mutex mutex_;
    mutable std::map<Derivative, std::shared_ptr<const std::vector<CompiledExpr>>> cache_;
};

std::shared_ptr<const SymbolFunction> make_term(SumMethod method, double weight, const SymExpr& component) {
    switch (method) {
        case SumMethod::Cutoff: return std::make_shared<CutoffTerm>(CutoffProfile{}, weight, component);
        case SumMethod::AnalyticAeps: return std::make_shared<AepsTerm>(weight, component);
        case SumMethod::Translation: return std::make_shared<ExprFunction>(shift_symbol(component, weight));
    }
    throw InvalidArgument("unknown method");
}

}  // namespace

Json SummationOptions::to_json() const {
    return Json{{"budget", budget},
                {"selection_shells", selection_shells},
                {"selection_samples", selection_samples},
                {"seed", seed},
                {"max_doublings", max_doublings},
                {"taylor_order", taylor_order},
                {"estimate_grid", estimate_grid.to_json()},
                {"analyticity", analyticity.to_json()}};
}

RealizedSymbol::RealizedSymbol(SumMethod method, SymbolExpansion source, std::vector<double> weights,
                               std::vector<SymExpr> components)
    : method_(method), source_(std::move(source)), weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty()) throw InvalidArgument("realized symbol needs at least one component");
    if (weights_.size() != components_.size()) throw InvalidArgument("one weight per component is required");
    for (std::size_t j = 0; j < components_.size(); ++j) {
        if (!(weights_[j] > 0.0)) throw InvalidArgument("weights must be positive");
        terms_.push_back(make_term(method_, weights_[j], components_[j]));
    }
}

Complex RealizedSymbol::derivative(const Derivative& d, std::span<const double> x, std::span<const double> xi,
                                   Complex tau) const {
    Complex sum(0.0);
    for (const auto& t : terms_) sum += t->derivative(d, x, xi, tau);
    return sum;
}

bool RealizedSymbol::certified() const {
    return std::all_of(certification.begin(), certification.end(), [](const EstimateReport& r) { return r.pass; });
}

Json RealizedSymbol::to_json() const {
    Json comps = Json::array();
    for (const auto& c : components_) comps.push_back(c.to_string());
    Json reports = Json::array();
    for (const auto& r : certification) reports.push_back(r.to_json());
    return Json{{"method", method_name(method_)},
                {"depth", depth()},
                {"weights", weights_},
                {"components", std::move(comps)},
                {"source", source_.to_json()},
                {"certified", certified()},
                {"certification", std::move(reports)},
                {"diagnostics", diagnostics}};
}

RealizedSymbol RealizedSymbol::from_json(const Json& j) {
    try {
        auto source = SymbolExpansion::from_json(j.at("source"));
        std::vector<SymExpr> comps;
        for (const auto& c : j.at("components")) comps.push_back(parse_expr(c.get<std::string>(), source.context()));
        RealizedSymbol q(parse_method(j.at("method").get<std::string>()), source,
                         j.at("weights").get<std::vector<double>>(), std::move(comps));
        if (j.contains("certification")) {
            for (const auto& r : j.at("certification")) q.certification.push_back(EstimateReport::from_json(r));
        }
        if (j.contains("diagnostics")) q.diagnostics = j.at("diagnostics");
        return q;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("bad realized symbol: ") + e.what());
    }
}

namespace {

struct Selection {
    double weight = 1.0;
    int doublings = 0;
    EstimateReport report;
};

std::vector<double> default_selection_shells() {
    std::vector<double> s;
    for (int k = -4; k <= 12; ++k) s.push_back(std::pow(10.0, k / 2.0));
    return s;
}

/// Doubles the weight from `start` until |d term| <= 2^-j (1 + ||xi,tau||)^(order + 1 - |beta| - wk) holds for
/// every l + |alpha| + |beta| + k < j (strict) or <= j, with x in K_l = [-(l+1), l+1]^n.
Selection select_weight(SumMethod method, const SymExpr& component, double order, std::size_t j, bool strict,
                        const SummationOptions& opts, const std::string& id) {
    const ContextPtr& ctx = component.context();
    const int n = ctx->n, w = ctx->w;
    Selection sel;
    sel.report.estimate_id = id;
    auto shells = opts.selection_shells.empty() ? default_selection_shells() : opts.selection_shells;
    sel.report.grid = Json{{"j", j}, {"order", order}, {"shells", shells}, {"samples", opts.selection_samples},
                           {"budget", opts.budget}, {"strict", strict}};

    struct Level {
        std::size_t l;
        std::vector<Derivative> ders;
        std::vector<std::vector<double>> x;
        std::vector<SpherePoint> pts;
        std::vector<double> norms;
    };
    std::vector<Level> levels;
    const EstimateMode mode = method == SumMethod::Cutoff ? EstimateMode::RealTau : EstimateMode::HalfPlane;
    for (std::size_t l = 0; l <= j; ++l) {
        int Dl = static_cast<int>(j - l) - (strict ? 1 : 0);
        Dl = std::min(Dl, opts.budget);
        if (Dl < 0) continue;
        Level lv{l, derivatives_up_to(n, Dl), {}, {}, {}};
        std::mt19937_64 rng(opts.seed * 1000003u + j * 1009u + l);
        auto sphere = sample_pseudo_sphere(n, w, opts.selection_samples, mode, rng);
        double box = static_cast<double>(l + 1);
        for (double R : shells) {
            for (const auto& p : sphere) {
                lv.pts.push_back(dilate(p, R, w));
                lv.norms.push_back(R);
                std::vector<double> x(n);
                for (double& c : x) c = uniform(rng, -box, box);
                lv.x.push_back(std::move(x));
            }
        }
        levels.push_back(std::move(lv));
    }
    sel.report.grid["levels"] = levels.size();

    if (levels.empty() || component.is_zero()) {
        sel.report.pass = true;
        sel.report.margin = 1.0;
        sel.report.note = levels.empty() ? "no constraint at this index" : "zero component";
        return sel;
    }

    const double scale = std::ldexp(1.0, -static_cast<int>(j));
    double weight = 1.0;
    std::string blocker;
    for (int doubling = 0; doubling <= opts.max_doublings; ++doubling, weight *= 2.0) {
        auto term = make_term(method, weight, component);
        std::map<Derivative, std::pair<double, double>> worst;  // ratio, shell
        bool ok = true;
        for (const auto& lv : levels) {
            std::vector<double> ratio(lv.ders.size(), 0.0), at(lv.ders.size(), 0.0);
            std::vector<std::string> block(lv.ders.size());
            parallel_for(lv.ders.size(), [&](std::size_t di) {
                const Derivative& d = lv.ders[di];
                for (std::size_t i = 0; i < lv.pts.size(); ++i) {
                    double bound = scale * std::pow(1.0 + lv.norms[i], order + 1.0 - d.beta_order() - w * d.k);
                    double v = std::abs(term->derivative(d, lv.x[i], lv.pts[i].xi, lv.pts[i].tau));
                    double r = v / bound;
                    if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
                    if (r > ratio[di]) {
                        ratio[di] = r;
                        at[di] = lv.norms[i];
                    }
                    if (r > 1.0) return;  // this weight is already rejected
                }
            });
            for (std::size_t di = 0; di < lv.ders.size(); ++di) {
                auto& slot = worst[lv.ders[di]];
                if (ratio[di] > slot.first) slot = {ratio[di], at[di]};
                if (ratio[di] > 1.0 && ok) {
                    ok = false;
                    blocker = "j=" + std::to_string(j) + " l=" + std::to_string(lv.l) + " " + lv.ders[di].label() +
                              " shell " + format_double(at[di]) + " ratio " + format_double(ratio[di]);
                }
            }
            if (!ok) break;
        }
        if (ok) {
            sel.weight = weight;
            sel.doublings = doubling;
            double overall = 0.0;
            for (const auto& [d, slot] : worst) {
                sel.report.table.push_back({d, slot.second, slot.first, true});
                overall = std::max(overall, slot.first);
            }
            sel.report.pass = true;
            sel.report.margin = 1.0 - overall;
            sel.report.grid["weight"] = weight;
            sel.report.grid["doublings"] = doubling;
            return sel;
        }
    }
    throw CertificationError("weight selection failed after " + std::to_string(opts.max_doublings) +
                             " doublings; blocked at " + blocker);
}

SymbolExpansion truncated(const SymbolExpansion& exp, std::size_t count) {
    std::vector<ExpansionEntry> e(exp.entries().begin(), exp.entries().begin() + count);
    return SymbolExpansion(exp.context(), exp.mode(), std::move(e));
}

EstimateReport taylor_report(const SymExpr& q, double order, double T, std::size_t N, int D, const GridPolicy& grid) {
    const ContextPtr& ctx = q.context();
    std::vector<ExpansionEntry> entries;
    SymExpr dq = q;
    for (std::size_t l = 0; l <= N; ++l) {
        Complex c = std::pow(Complex(0.0, -T), static_cast<int>(l)) / factorial(static_cast<int>(l));
        entries.push_back({order - static_cast<double>(l * ctx->w), c * dq});
        dq = dq.differentiate(Var::tau());
    }
    SymbolExpansion exp(ctx, ExpansionMode::Graded, std::move(entries));
    ExprFunction shifted(shift_symbol(q, T));
    auto report = check_expansion_estimates(shifted, exp, N + 1, D, EstimateMode::HalfPlane, grid,
                                            order - static_cast<double>(N) - 1.0);
    report.estimate_id = "taylor_shift";
    report.grid["T"] = T;
    report.grid["taylor_N"] = N;
    return report;
}

GridPolicy scaled_grid(const GridPolicy& g, double R0) {
    GridPolicy out = g;
    for (double& s : out.shells) s *= R0;
    return out;
}

RealizedSymbol run_sum(SumMethod method, const SymbolExpansion& input, const SummationOptions& opts) {
    const ContextPtr& ctx = input.context();
    SymbolExpansion exp = input;
    Json diagnostics = Json::object();
    if (method == SumMethod::Cutoff && exp.mode() != ExpansionMode::Polyhomogeneous) {
        throw InvalidArgument("the cut-off method needs a polyhomogeneous expansion");
    }
    if (exp.mode() == ExpansionMode::Graded) {
        double step = method == SumMethod::Translation ? ctx->w : 1.0;
        std::size_t before = exp.size();
        exp = pad_orders(exp, step);
        if (exp.size() != before) diagnostics["padded_entries"] = exp.size() - before;
    }
    if (exp.size() == 0) throw InvalidArgument("empty expansion");
    std::size_t count = std::min(exp.size(), opts.n_max == static_cast<std::size_t>(-1) ? exp.size() : opts.n_max + 1);
    exp = truncated(exp, count);

    std::vector<double> weights;
    std::vector<SymExpr> components;
    std::vector<EstimateReport> selection;
    const std::string id = method == SumMethod::Cutoff        ? "cutoff_selection"
                           : method == SumMethod::AnalyticAeps ? "aeps_selection"
                                                              : "translation_selection";
    for (std::size_t j = 0; j < count; ++j) {
        SymExpr comp;
        if (method == SumMethod::Cutoff) {
            comp = exp.entries()[j].symbol;
        } else {
            // r_j only needs weights 0..j-1, so solve incrementally on the prefix
            auto r = solve_triangular(truncated(exp, j + 1), weights, method);
            comp = r.back();
        }
        double order = exp.entries()[j].order;
        if (method == SumMethod::Translation && order > -1.0) {
            EstimateReport fixed;
            fixed.estimate_id = id;
            fixed.grid = Json{{"j", j}, {"order", order}, {"weight", 1.0}};
            fixed.pass = true;
            fixed.margin = 1.0;
            fixed.note = "T_j = 1 fixed for orders above -1";
            weights.push_back(1.0);
            components.push_back(comp);
            selection.push_back(std::move(fixed));
            continue;
        }
        Selection sel = select_weight(method, comp, order, j, method == SumMethod::Cutoff, opts, id);
        weights.push_back(sel.weight);
        components.push_back(comp);
        selection.push_back(std::move(sel.report));
    }

    RealizedSymbol q(method, exp, weights, components);
    q.diagnostics = diagnostics;
    q.diagnostics["options"] = opts.to_json();
    q.certification = std::move(selection);

    GridPolicy grid = certification_grid(q, opts.estimate_grid);
    EstimateMode mode = method == SumMethod::Cutoff ? EstimateMode::RealTau : EstimateMode::HalfPlane;
    for (std::size_t N = 1; N <= count; ++N) {
        q.certification.push_back(check_expansion_estimates(q, exp, N, opts.budget, mode, grid));
    }

    EstimateReport analytic = check_analyticity(q, opts.analyticity);
    if (method == SumMethod::Cutoff) {
        q.diagnostics["analyticity"] = analytic.to_json();
    } else {
        q.certification.push_back(std::move(analytic));
    }

    if (method == SumMethod::Translation) {
        for (std::size_t j = 0; j < count; ++j) {
            if (components[j].is_zero()) continue;
            auto rep = taylor_report(components[j], exp.entries()[j].order, weights[j], opts.taylor_order,
                                     opts.budget, opts.estimate_grid);
            rep.grid["j"] = j;
            q.certification.push_back(std::move(rep));
        }
    }
    return q;
}

}  // namespace

GridPolicy certification_grid(const RealizedSymbol& q, const GridPolicy& base) {
    // the asymptotic regime starts once the weights stop acting, so the shells are scaled accordingly
    double R0 = 1.0;
    for (double wgt : q.weights()) {
        R0 = std::max(R0, q.method() == SumMethod::Translation ? std::pow(wgt, 1.0 / q.weight()) : wgt);
    }
    return scaled_grid(base, R0);
}

RealizedSymbol cutoff_sum(const SymbolExpansion& exp, const SummationOptions& opts, const CutoffProfile&) {
    return run_sum(SumMethod::Cutoff, exp, opts);
}

RealizedSymbol analytic_sum(const SymbolExpansion& exp, const SummationOptions& opts) {
    return run_sum(SumMethod::AnalyticAeps, exp, opts);
}

RealizedSymbol translation_sum(const SymbolExpansion& exp, const SummationOptions& opts) {
    return run_sum(SumMethod::Translation, exp, opts);
}

RealizedSymbol realize(SumMethod method, const SymbolExpansion& exp, const SummationOptions& opts) {
    return run_sum(method, exp, opts);
}

EstimateReport taylor_shift_report(const HomogeneousSymbol& q, double T, std::size_t N, int D,
                                   const GridPolicy& grid) {
    return taylor_report(q.expr(), q.degree(), T, N, D, grid);
}

double shift_gain_sup(const HomogeneousSymbol& q, double T, const GridPolicy& grid) {
    const Context& ctx = q.ctx();
    const int n = ctx.n, w = ctx.w, m = q.degree();
    CompiledExpr f = shift_symbol(q.expr(), T).compile();
    std::mt19937_64 rng(grid.seed);
    auto sphere = sample_pseudo_sphere(n, w, grid.sphere_samples, EstimateMode::HalfPlane, rng);
    std::vector<double> radii{0.0};
    for (int k = -24; k <= 32; ++k) radii.push_back(std::pow(10.0, k / 8.0));
    double sup = 0.0;
    for (const auto& p : sphere) {
        std::vector<double> x(n);
        for (double& c : x) c = uniform(rng, -grid.x_box, grid.x_box);
        for (double R : radii) {
            SpherePoint d = dilate(p, R, w);
            double v = std::abs(f(x, d.xi, d.tau)) * std::pow(1.0 + R, -m - 1.0) * std::pow(1.0 + T, 1.0 / w);
            sup = std::max(sup, v);
        }
    }
    return sup;
}

}  // namespace volterra

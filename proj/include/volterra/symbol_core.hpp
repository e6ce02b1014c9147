#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "volterra/symexpr.hpp"

namespace volterra {

using Json = nlohmann::ordered_json;

/// ||xi, tau|| = (|xi|^w + |tau|)^(1/w).
double pseudo_norm(std::span<const double> xi, Complex tau, int w);

/// rho = (|xi|^w + i tau)^(-1/w), principal branch.
Complex rho(std::span<const double> xi, Complex tau, int w);

/// a_eps = exp(-eps * rho), extended by 0 at the origin.
Complex a_epsilon(double eps, std::span<const double> xi, Complex tau, int w);

/// a_eps - sum_{j<J} (-eps rho)^j / j!, evaluated without cancellation.
Complex a_epsilon_remainder(double eps, int J, std::span<const double> xi, Complex tau, int w);

/// rho as an expression over the context: (THETA + |xi|^w - p_w)^(-1/w).
SymExpr rho_expr(const ContextPtr& ctx);

/// |xi|^w as a polynomial in 2n variables.
Poly euclidean_power(int n, int w);

/// C_rho = max(sup |rho|, sup 1/|rho|) over the unit pseudo-sphere, by grid search with zoom.
double rho_constant(int w);

/// Derivative multi-index d_x^alpha d_xi^beta d_tau^k.
struct Derivative {
    std::vector<int> alpha;
    std::vector<int> beta;
    int k = 0;

    static Derivative none(int n) { return {std::vector<int>(n, 0), std::vector<int>(n, 0), 0}; }
    int order() const;
    int beta_order() const;
    std::string label() const;

    friend auto operator<=>(const Derivative&, const Derivative&) = default;
};

/// All derivatives with |alpha| + |beta| + k <= D, in a fixed order.
std::vector<Derivative> derivatives_up_to(int n, int D);

/// Applies the derivative to an expression (x, then xi, then tau).
SymExpr apply_derivative(const SymExpr& e, const Derivative& d);

/// A symbol that can be evaluated together with its partial derivatives.
class SymbolFunction {
public:
    virtual ~SymbolFunction() = default;
    virtual int dimension() const = 0;
    virtual int weight() const = 0;
    virtual Complex derivative(const Derivative& d, std::span<const double> x, std::span<const double> xi,
                               Complex tau) const = 0;

    Complex value(std::span<const double> x, std::span<const double> xi, Complex tau) const {
        return derivative(Derivative::none(dimension()), x, xi, tau);
    }
};

using SymbolFunctionPtr = std::shared_ptr<const SymbolFunction>;

/// SymbolFunction backed by an expression; derivative expressions are built once and cached.
class ExprFunction final : public SymbolFunction {
public:
    explicit ExprFunction(SymExpr e);

    int dimension() const override { return expr_.ctx().n; }
    int weight() const override { return expr_.ctx().w; }
    Complex derivative(const Derivative& d, std::span<const double> x, std::span<const double> xi,
                       Complex tau) const override;
    const SymExpr& expr() const noexcept { return expr_; }

private:
    SymExpr expr_;
    mutable std::mutex mutex_;
    mutable std::map<Derivative, std::shared_ptr<const CompiledExpr>> cache_;
};

/// A symbol tagged with its anisotropic degree.
class HomogeneousSymbol {
public:
    /// Throws InvalidArgument unless infer_degree agrees with `degree` (the zero symbol has every degree).
    HomogeneousSymbol(SymExpr expr, int degree);

    const SymExpr& expr() const noexcept { return expr_; }
    int degree() const noexcept { return degree_; }
    const Context& ctx() const { return expr_.ctx(); }

private:
    SymExpr expr_;
    int degree_;
};

enum class ExpansionMode { Polyhomogeneous, Graded };

struct ExpansionEntry {
    double order = 0.0;
    SymExpr symbol;
};

/// Ordered terms of an asymptotic expansion sum_j q_j with strictly decreasing orders.
class SymbolExpansion {
public:
    SymbolExpansion(ContextPtr ctx, ExpansionMode mode, std::vector<ExpansionEntry> entries);

    /// Polyhomogeneous expansion q_m, q_{m-1}, ... from degree-tagged symbols.
    static SymbolExpansion polyhomogeneous(ContextPtr ctx, int m, const std::vector<SymExpr>& components);

    const ContextPtr& context() const noexcept { return ctx_; }
    ExpansionMode mode() const noexcept { return mode_; }
    const std::vector<ExpansionEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    /// Order of the first term left out by a truncation at N (continues with unit steps past the end).
    double order_after(std::size_t N) const;

    Json to_json() const;
    /// {w, n, principal, mode, entries:[{order, expr}]}; polyhomogeneous gaps are filled with zeros.
    static SymbolExpansion from_json(const Json& j);

private:
    ContextPtr ctx_;
    ExpansionMode mode_;
    std::vector<ExpansionEntry> entries_;
};

ContextPtr context_from_json(const Json& j);
Json context_to_json(const Context& ctx);

struct EstimateRow {
    Derivative d;
    double shell = 0.0;
    double C = 0.0;
    bool resolved = true;
};

/// Empirical constants of a symbol-class estimate over a finite grid.
struct EstimateReport {
    std::string estimate_id;
    Json grid = Json::object();
    std::vector<EstimateRow> table;
    bool pass = false;
    double margin = 0.0;  // min over checks of (target - measured) / target; >= 0 iff pass
    std::string note;

    Json to_json() const;
    static EstimateReport from_json(const Json& j);
};

/// Deterministic uniform double in [a, b).
double uniform(std::mt19937_64& rng, double a, double b);

struct SpherePoint {
    std::vector<double> xi;
    Complex tau;
};

enum class EstimateMode { RealTau, HalfPlane };

/// Points with ||xi, tau|| = 1; real tau in RealTau mode, closed lower half-plane otherwise.
std::vector<SpherePoint> sample_pseudo_sphere(int n, int w, std::size_t count, EstimateMode mode,
                                              std::mt19937_64& rng);

/// Anisotropic dilation (xi, tau) -> (R xi, R^w tau).
SpherePoint dilate(const SpherePoint& p, double R, int w);

struct GridPolicy {
    std::vector<double> shells{1.0, 10.0, 100.0, 1000.0};
    std::size_t sphere_samples = 48;
    double x_box = 1.0;  // x in [-x_box, x_box]^n
    std::uint64_t seed = 1;

    Json to_json() const;
};

/// Relative homogeneity defect over random (point, lambda in [1/2, 2]); pass iff <= 1e-10.
EstimateReport check_homogeneity(const HomogeneousSymbol& q, std::size_t samples, std::uint64_t seed);

struct AnalyticityGrid {
    std::vector<double> shells;  // pseudo-norm radii; default: geometric 0.1 .. 1000
    std::size_t samples_per_shell = 24;
    double x_box = 1.0;
    std::uint64_t seed = 1;
    double tolerance = 1e-6;

    static AnalyticityGrid standard(std::uint64_t seed = 1);
    Json to_json() const;
};

/// Numeric Cauchy-Riemann residual |d_Re q + i d_Im q| / (|d_tau q| + 1) strictly inside Im tau < 0.
EstimateReport check_analyticity(const SymbolFunction& q, const AnalyticityGrid& grid);

/// Empirical constants of the expansion estimate: for each derivative with order <= D and each shell,
/// C = max |d(q - sum_{j<N} q_j)| * ||xi,tau||^-(order_N - |beta| - w k). Pass iff all C are finite and,
/// from the middle shell outwards, C stays within a factor 2 of the largest C on smaller shells.
/// `order_override` replaces order_N when the estimate to certify is weaker than the expansion allows.
EstimateReport check_expansion_estimates(const SymbolFunction& q, const SymbolExpansion& exp, std::size_t N,
                                         int D, EstimateMode mode, const GridPolicy& grid,
                                         std::optional<double> order_override = std::nullopt);

}  // namespace volterra

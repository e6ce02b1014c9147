#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "volterra/symbol_core.hpp"

namespace volterra {

enum class SumMethod { Cutoff, AnalyticAeps, Translation };

std::string method_name(SumMethod m);
/// Accepts "cutoff", "analytic", "analytic_aeps", "translation".
SumMethod parse_method(const std::string& name);

/// Smooth bump: 1 on [0, 1/2], 0 on [1, inf), glued with exp(-1/u) transitions.
struct CutoffProfile {
    double phi(double u) const;
};

/// (|xi|^(2w) + |tau|^2)^(1/(2w)): a smooth pseudo-norm equivalent to ||xi, tau||.
double smooth_pseudo_norm(std::span<const double> xi, Complex tau, int w);

/// c_eps = 1 - phi(N_s / eps). For complex tau the profile is evaluated at |tau|, which is
/// smooth but not analytic; that is exactly the defect the analyticity check is meant to expose.
double cutoff_weight(const CutoffProfile& profile, double eps, std::span<const double> xi, Complex tau, int w);

/// Inserts zero entries so that consecutive orders satisfy m_j - step <= m_(j+1).
SymbolExpansion pad_orders(const SymbolExpansion& exp, double step);

/// Triangular solve q_(m-j) = sum_l ((-eps_(j-l))^l / l!) rho^l r_(m-j+l).
std::vector<SymExpr> solve_r_polyhom(const SymbolExpansion& exp, const std::vector<double>& eps);

/// Graded triangular solve. AnalyticAeps: corrections ((-eps_k)^l / l!) rho^l r_k;
/// Translation: ((-i T_k)^l / l!) d_tau^l r_k; both over k < j with m_(j+1) < m_k - l*s <= m_j
/// (s = 1, resp. w). Throws InvalidArgument when the orders are not padded for the mode.
std::vector<SymExpr> solve_r_graded(const SymbolExpansion& exp, const std::vector<double>& weights, SumMethod mode);

/// q^(T)(x, xi, tau) = q(x, xi, tau - iT).
SymExpr shift_symbol(const SymExpr& q, double T);

struct SummationOptions {
    std::size_t n_max = static_cast<std::size_t>(-1);  // default: every entry of the expansion
    int budget = 3;                                      // |alpha| + |beta| + k <= budget
    std::vector<double> selection_shells;                // default: 10^(k/2), k = -4..12
    std::size_t selection_samples = 12;
    std::uint64_t seed = 1;
    int max_doublings = 60;
    std::size_t taylor_order = 2;                        // N in the Taylor-shift report
    GridPolicy estimate_grid;
    AnalyticityGrid analyticity = AnalyticityGrid::standard();

    Json to_json() const;
};

/// Finite truncation sum_j weight_j * r_j produced by one of the three summation methods.
class RealizedSymbol final : public SymbolFunction {
public:
    RealizedSymbol(SumMethod method, SymbolExpansion source, std::vector<double> weights,
                   std::vector<SymExpr> components);

    int dimension() const override { return source_.context()->n; }
    int weight() const override { return source_.context()->w; }
    Complex derivative(const Derivative& d, std::span<const double> x, std::span<const double> xi,
                       Complex tau) const override;

    SumMethod method() const noexcept { return method_; }
    const SymbolExpansion& source() const noexcept { return source_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<SymExpr>& components() const noexcept { return components_; }
    std::size_t depth() const noexcept { return components_.size() - 1; }
    const SymbolFunction& term(std::size_t j) const { return *terms_.at(j); }

    std::vector<EstimateReport> certification;
    Json diagnostics = Json::object();
    bool certified() const;

    Json to_json() const;
    static RealizedSymbol from_json(const Json& j);

private:
    SumMethod method_;
    SymbolExpansion source_;
    std::vector<double> weights_;
    std::vector<SymExpr> components_;
    std::vector<std::shared_ptr<const SymbolFunction>> terms_;
};

/// q = sum c_(eps_j) q_(m-j) with eps_j chosen by doubling until the per-term bounds hold.
RealizedSymbol cutoff_sum(const SymbolExpansion& exp, const SummationOptions& opts = {},
                          const CutoffProfile& profile = {});

/// q = sum a_(eps_j) r_j, analytic in tau.
RealizedSymbol analytic_sum(const SymbolExpansion& exp, const SummationOptions& opts = {});

/// q = sum r_j^(T_j) with shifted contours, T_j = 1 while m_j > -1.
RealizedSymbol translation_sum(const SymbolExpansion& exp, const SummationOptions& opts = {});

/// Estimate grid with shells scaled by the largest weight (eps_j, or T_j^(1/w) for translation).
GridPolicy certification_grid(const RealizedSymbol& q, const GridPolicy& base);

RealizedSymbol realize(SumMethod method, const SymbolExpansion& exp, const SummationOptions& opts = {});

/// Taylor expansion in T: q^(T) - sum_(l<=N) ((-iT)^l / l!) d_tau^l q against exponent m - |beta| - kw - N - 1.
EstimateReport taylor_shift_report(const HomogeneousSymbol& q, double T, std::size_t N, int D,
                                   const GridPolicy& grid);

/// sup over the grid of |q^(T)| (1 + ||xi,tau||)^(-m-1) (1 + T)^(1/w), i.e. the (1 + T)^(-1/w) gain.
double shift_gain_sup(const HomogeneousSymbol& q, double T, const GridPolicy& grid);

}  // namespace volterra

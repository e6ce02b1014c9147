#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "volterra/poly.hpp"

namespace volterra {

/// Shared setting of a family of symbols: space dimension n, anisotropy weight w
/// and the principal polynomial p_w(x, xi) that defines THETA = p_w + i*tau.
struct Context {
    int n = 1;
    int w = 2;
    Poly principal;
};

using ContextPtr = std::shared_ptr<const Context>;

/// Validates (w even >= 2, principal homogeneous of xi-degree w) and builds a context.
ContextPtr make_context(int n, int w, const Poly& principal);
/// Context with principal |xi|^w.
ContextPtr make_euclidean_context(int n, int w);
bool same_context(const Context& a, const Context& b);

/// Point (x, xi, tau) with tau in the closed lower half-plane.
class EvalPoint {
public:
    EvalPoint(std::vector<double> x, std::vector<double> xi, Complex tau);

    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& xi() const noexcept { return xi_; }
    Complex tau() const noexcept { return tau_; }

private:
    std::vector<double> x_;
    std::vector<double> xi_;
    Complex tau_;
};

enum class VarKind { X, Xi, Tau };

struct Var {
    VarKind kind = VarKind::Tau;
    int index = 0;

    static Var x(int i) { return {VarKind::X, i}; }
    static Var xi(int i) { return {VarKind::Xi, i}; }
    static Var tau() { return {VarKind::Tau, 0}; }
};

/// (THETA + shift)^(k/w). The unshifted factor is stored separately in ThetaKey::k0.
struct ThetaFactor {
    Poly shift;
    int k = 0;
};

/// Theta-structure of a canonical term: THETA^(k0/w) * prod (THETA + shift_f)^(k_f/w).
/// Factors are sorted by shift, have k != 0, nonzero shift, and never a non-negative
/// integer power (those are expanded into powers of THETA).
struct ThetaKey {
    int k0 = 0;
    std::vector<ThetaFactor> factors;

    friend bool operator<(const ThetaKey& a, const ThetaKey& b);
    friend bool operator==(const ThetaKey& a, const ThetaKey& b);
};

class CompiledExpr;

/// Homogeneity classification returned by SymExpr::infer_degree.
struct DegreeInfo {
    enum class Kind { Homogeneous, Zero, NotHomogeneous };
    Kind kind = Kind::NotHomogeneous;
    int degree = 0;

    bool homogeneous() const noexcept { return kind == Kind::Homogeneous; }
    bool is_zero() const noexcept { return kind == Kind::Zero; }
};

/// Immutable canonical expression: sum over Theta-structures of polynomial coefficients in (x, xi).
/// tau never appears explicitly; it is eliminated through i*tau = THETA - p_w.
class SymExpr {
public:
    using TermMap = std::map<ThetaKey, Poly>;

    SymExpr() = default;
    explicit SymExpr(ContextPtr ctx) : ctx_(std::move(ctx)) {}

    static SymExpr constant(ContextPtr ctx, Complex c);
    static SymExpr from_poly(ContextPtr ctx, const Poly& p);
    static SymExpr x(ContextPtr ctx, int i);
    static SymExpr xi(ContextPtr ctx, int i);
    static SymExpr tau(ContextPtr ctx);
    /// THETA^(k/w).
    static SymExpr theta_power(ContextPtr ctx, int k);
    /// (THETA + shift)^(k/w).
    static SymExpr shifted_theta_power(ContextPtr ctx, const Poly& shift, int k);

    const ContextPtr& context() const noexcept { return ctx_; }
    const Context& ctx() const { return *ctx_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    SymExpr& operator+=(const SymExpr& o);
    SymExpr& operator-=(const SymExpr& o);
    SymExpr& operator*=(Complex c);
    friend SymExpr operator+(SymExpr a, const SymExpr& b) { return a += b; }
    friend SymExpr operator-(SymExpr a, const SymExpr& b) { return a -= b; }
    friend SymExpr operator*(SymExpr a, Complex c) { return a *= c; }
    friend SymExpr operator*(Complex c, SymExpr a) { return a *= c; }
    friend SymExpr operator*(const SymExpr& a, const SymExpr& b);
    SymExpr operator-() const { return *this * Complex(-1.0); }

    /// Integer power; negative powers need a single term with constant coefficient.
    SymExpr pow(int k) const;

    SymExpr differentiate(Var v) const;

    /// Substitutes tau -> tau - i*T, i.e. THETA -> THETA + T in every factor.
    SymExpr shift(double T) const;

    Complex evaluate(const EvalPoint& pt) const;
    Complex evaluate(std::span<const double> x, std::span<const double> xi, Complex tau) const;

    CompiledExpr compile() const;

    /// Structural degree under (xi, tau) -> (lambda xi, lambda^w tau), cross-checked numerically.
    DegreeInfo infer_degree() const;

    /// Grammar text; parse(to_string()) reproduces the expression.
    std::string to_string() const;

    friend bool operator==(const SymExpr& a, const SymExpr& b);

private:
    void add_term(const ThetaKey& key, const Poly& coeff);
    void check_compatible(const SymExpr& o) const;

    ContextPtr ctx_;
    TermMap terms_;
};

/// Flattened evaluator for hot loops; shares nothing mutable with the source expression.
class CompiledExpr {
public:
    CompiledExpr() = default;

    Complex operator()(std::span<const double> x, std::span<const double> xi, Complex tau) const;
    bool empty() const noexcept { return terms_.empty(); }

private:
    friend class SymExpr;

    struct Monomial {
        Complex coeff;
        int offset = 0;  // into exps_
    };
    struct FlatPoly {
        std::vector<Monomial> monos;
    };
    struct Term {
        FlatPoly coeff;
        std::vector<std::pair<int, double>> powers;  // (base index, exponent); base 0 is THETA
        bool integral = true;
    };

    Complex eval_poly(const FlatPoly& p, const std::vector<double>& table) const;
    FlatPoly flatten(const Poly& p);

    int n_ = 1;
    int max_exp_ = 0;
    std::vector<int> exps_;
    FlatPoly principal_;
    std::vector<FlatPoly> shifts_;  // base j+1 is THETA + shifts_[j]
    std::vector<Term> terms_;
};

}  // namespace volterra

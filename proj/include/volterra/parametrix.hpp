#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "volterra/symbol_core.hpp"

namespace volterra {

/// One term a_alpha(x) D^alpha of a differential operator, D = -i d/dx.
struct OperatorTerm {
    std::vector<int> alpha;
    Poly coeff;  // polynomial in x only
};

struct PositivityGrid {
    double x_box = 2.0;           // x in [-x_box, x_box]^n
    int x_points = 9;             // per dimension
    std::size_t directions = 64;  // unit xi directions besides the coordinate axes
    std::uint64_t seed = 1;
};

/// P = sum a_alpha(x) D^alpha of even order w with symbol sum a_alpha(x) xi^alpha.
class OperatorSpec {
public:
    OperatorSpec(int n, int w, std::vector<OperatorTerm> terms);

    int n() const noexcept { return n_; }
    int w() const noexcept { return w_; }
    const std::vector<OperatorTerm>& terms() const noexcept { return terms_; }

    /// p_(w-k)(x, xi) = sum_(|alpha| = w-k) a_alpha(x) xi^alpha.
    Poly symbol_part(int k) const;
    Poly principal() const { return symbol_part(0); }

    /// Minimum of p_w(x, xi) over the x grid and unit xi directions. Throws PositivityError when it is not
    /// positive or p_w is not real there.
    double check_positivity(const PositivityGrid& grid = {}) const;

    /// Context with THETA = p_w + i tau. Requires positivity.
    ContextPtr context(const PositivityGrid& grid = {}) const;

    Json to_json() const;
    /// {n, w, terms: [{alpha: [..], coeff: "expr"}]}.
    static OperatorSpec from_json(const Json& j);

private:
    int n_;
    int w_;
    std::vector<OperatorTerm> terms_;
};

struct ParametrixComponents {
    ContextPtr ctx;
    std::vector<HomogeneousSymbol> q;  // q[j] has degree -w-j

    /// Polyhomogeneous expansion q_(-w) + q_(-w-1) + ...
    SymbolExpansion expansion() const;
    Json to_json() const;
};

/// q_(-w) = (p_w + i tau)^-1 = THETA^-1.
HomogeneousSymbol principal_inverse(const OperatorSpec& spec, const PositivityGrid& grid = {});

/// q_(-w-j) = -q_(-w) sum_(k + l + |alpha| = j, l < j) (1/alpha!) d_xi^alpha p_(w-k) D_x^alpha q_(-w-l).
ParametrixComponents parametrix_components(const OperatorSpec& spec, int J, const PositivityGrid& grid = {});

struct ComposeReport {
    std::vector<SymExpr> parts;  // parts[d] is the degree -d part of sigma((P + d_t) o Q)
    bool exact = false;          // parts[0] == 1 and parts[1..N] == 0
    int first_defect = -1;       // smallest d with a wrong part, -1 if none

    Json to_json() const;
};

/// Graded parts of sum_alpha (1/alpha!) d_xi^alpha sigma(P + d_t) D_x^alpha sigma(Q) of degrees 0..-N.
ComposeReport compose_check(const OperatorSpec& spec, const ParametrixComponents& comps, int N);

}  // namespace volterra

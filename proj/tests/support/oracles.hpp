#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "volterra/summation.hpp"

namespace volterra::oracles {

inline double fact(int l) { return l <= 1 ? 1.0 : l * fact(l - 1); }

struct Pt {
    std::vector<double> x, xi;
    Complex tau;
};

inline std::vector<Pt> random_points(int n, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0), neg(-3.0, 0.0);
    std::vector<Pt> out;
    for (std::size_t i = 0; i < count; ++i) {
        Pt p{std::vector<double>(n), std::vector<double>(n), Complex(u(rng), neg(rng))};
        for (int k = 0; k < n; ++k) {
            p.x[k] = u(rng);
            p.xi[k] = u(rng);
        }
        out.push_back(std::move(p));
    }
    return out;
}

// Rebuilds q_j from r and the weights: a_eps r_k contributes (-eps_k)^l / l! rho^l r_k at order m_k - l,
// r_k^(T) contributes (-i T_k)^l / l! d_tau^l r_k at order m_k - l w. rho is the numeric one here.
// `scale` receives the sum of the magnitudes of the contributions.
inline Complex recompose(const SymbolExpansion& exp, const std::vector<SymExpr>& r, const std::vector<double>& wts,
                         SumMethod mode, std::size_t j, const Pt& p, double* scale = nullptr) {
    const auto& e = exp.entries();
    const int w = exp.context()->w;
    const double s = mode == SumMethod::Translation ? w : 1.0;
    const double pad = exp.mode() == ExpansionMode::Polyhomogeneous ? 1.0 : s;
    const double hi = e[j].order;
    const double lo = j + 1 < e.size() ? e[j + 1].order : hi - pad;
    const Complex rh = rho(p.xi, p.tau, w);
    Complex total(0.0);
    if (scale) *scale = 0.0;
    for (std::size_t k = 0; k <= j; ++k) {
        SymExpr dr = r[k];
        for (int l = 0; e[k].order - l * s > lo + 1e-9; ++l) {
            double level = e[k].order - l * s;
            if (level <= hi + 1e-9) {
                Complex c = mode == SumMethod::Translation
                                ? std::pow(Complex(0.0, -wts[k]), l) / fact(l) * dr.evaluate(p.x, p.xi, p.tau)
                                : std::pow(-wts[k], l) / fact(l) * std::pow(rh, l) * r[k].evaluate(p.x, p.xi, p.tau);
                total += c;
                if (scale) *scale += std::abs(c);
            }
            dr = dr.differentiate(Var::tau());
        }
    }
    return total;
}

}  // namespace volterra::oracles

#pragma once

#include <string>
#include <vector>

#include "volterra/parametrix.hpp"

namespace volterra {

struct HeatEntry {
    double x = 0.0;
    int j = 0;
    Complex c;
    double error = 0.0;
    double power = 0.0;  // k_t(x, x) ~ sum_j t^power c_j(x)
};

/// Small-time coefficients of the diagonal heat kernel, c_j(x) = kernel of q_(-w-j) at (x, y = 0, t = 1).
struct HeatCoefficients {
    std::string operator_id;
    int n = 1;
    int w = 2;
    int J = 0;
    std::vector<double> x;
    std::vector<HeatEntry> table;  // index ix * (J + 1) + j

    const HeatEntry& at(std::size_t ix, int j) const { return table[ix * (J + 1) + j]; }
    /// sum_(j <= J) t^power(j) c_j(x[ix]).
    Complex expansion(std::size_t ix, double t) const;
    double max_imag() const;

    Json to_json() const;
};

/// power(j) = (j - n) / w.
double heat_power(int j, int n, int w);

HeatCoefficients heat_coefficients(const OperatorSpec& spec, int J, const std::vector<double>& x,
                                   double resolution = 1.0, const std::string& operator_id = "");

/// Diagonal heat kernel of -d^2/dx^2 + x^2: (4 pi t)^-1/2 (2t / sinh 2t)^1/2 exp(-x^2 tanh t).
double mehler_oracle(double t, double x);

/// Coefficients a_k of (4 pi t)^(1/2) mehler_oracle(t, x) = sum_k a_k t^k, k = 0..K.
std::vector<double> mehler_taylor(double x, int K);

}  // namespace volterra

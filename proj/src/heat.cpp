#include "volterra/heat.hpp"

#include <cmath>
#include <numbers>

#include "volterra/error.hpp"
#include "volterra/kernel_transform.hpp"
#include "volterra/parallel.hpp"

namespace volterra {

namespace {

template <class T>
T mehler_reduced(T t, double x) {
    // (2t / sinh 2t)^(1/2) exp(-x^2 tanh t), with the removable singularity at 0 filled in
    T ratio = std::abs(t) < 1e-8 ? T(1.0) : T(2.0) * t / std::sinh(T(2.0) * t);
    return std::sqrt(ratio) * std::exp(-x * x * std::tanh(t));
}

}  // namespace

double heat_power(int j, int n, int w) {
    return static_cast<double>(j - n) / w;
}

Complex HeatCoefficients::expansion(std::size_t ix, double t) const {
    Complex s(0.0);
    for (int j = 0; j <= J; ++j) {
        const auto& e = at(ix, j);
        s += std::pow(t, e.power) * e.c;
    }
    return s;
}

double HeatCoefficients::max_imag() const {
    double m = 0.0;
    for (const auto& e : table) m = std::max(m, std::abs(e.c.imag()));
    return m;
}

Json HeatCoefficients::to_json() const {
    Json rows = Json::array();
    for (const auto& e : table) {
        rows.push_back({{"x", e.x},
                        {"j", e.j},
                        {"c_j", {{"re", e.c.real()}, {"im", e.c.imag()}}},
                        {"error_estimate", e.error},
                        {"power_of_t", e.power}});
    }
    return {{"operator", operator_id}, {"n", n}, {"w", w}, {"J", J}, {"max_imag", max_imag()}, {"table", rows}};
}

HeatCoefficients heat_coefficients(const OperatorSpec& spec, int J, const std::vector<double>& x, double resolution,
                                   const std::string& operator_id) {
    if (spec.n() != 1) throw InvalidArgument("heat coefficients are implemented for n = 1");
    if (x.empty()) throw InvalidArgument("at least one x sample is required");
    if (!(resolution > 0.0)) throw InvalidArgument("resolution must be positive");
    auto comps = parametrix_components(spec, J);

    HeatCoefficients out;
    out.operator_id = operator_id;
    out.n = spec.n();
    out.w = spec.w();
    out.J = J;
    out.x = x;
    out.table.resize(x.size() * (J + 1));
    parallel_for(out.table.size(), [&](std::size_t i) {
        std::size_t ix = i / (J + 1);
        int j = static_cast<int>(i % (J + 1));
        auto v = homogeneous_kernel_at(comps.q[j], x[ix], 1.0, resolution, true);
        out.table[i] = {x[ix], j, v.value, v.error, heat_power(j, out.n, out.w)};
    });
    return out;
}

double mehler_oracle(double t, double x) {
    if (!(t > 0.0)) throw DomainError("mehler_oracle needs t > 0");
    return mehler_reduced(t, x) / std::sqrt(4.0 * std::numbers::pi * t);
}

std::vector<double> mehler_taylor(double x, int K) {
    if (K < 0) throw InvalidArgument("K must be >= 0");
    // Cauchy integral on |t| = r; the nearest singularity is at |t| = pi / 2
    const double r = 0.5;
    const int M = 256;
    std::vector<double> a(K + 1, 0.0);
    for (int m = 0; m < M; ++m) {
        double th = 2.0 * std::numbers::pi * m / M;
        std::complex<double> t = std::polar(r, th);
        std::complex<double> g = mehler_reduced(t, x);
        for (int k = 0; k <= K; ++k) {
            a[k] += (g * std::polar(std::pow(r, -k), -k * th)).real() / M;
        }
    }
    return a;
}

}  // namespace volterra

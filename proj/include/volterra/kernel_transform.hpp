#pragma once

#include <optional>
#include <string>
#include <vector>

#include "volterra/summation.hpp"

namespace volterra {

/// Space-time kernel samples k(x; y, t) on a y-grid times a t-grid. values[iy * t.size() + it].
struct KernelSlice {
    double x = 0.0;
    std::vector<double> y;
    std::vector<double> t;
    std::vector<Complex> values;
    std::vector<double> errors;  // per-sample quadrature error estimate
    double sigma = 0.0;          // tau contour: Im tau = -sigma
    double resolution = 1.0;
    Json quadrature = Json::object();

    Complex at(std::size_t iy, std::size_t it) const { return values[iy * t.size() + it]; }
    double error_at(std::size_t iy, std::size_t it) const { return errors[iy * t.size() + it]; }

    Json to_json() const;
    /// Rows y,t,re,im,sigma,error.
    std::string to_csv() const;
};

struct KernelOptions {
    std::optional<double> sigma;  // default: 1 for analytic inputs, 0 for cut-off sums
    double resolution = 1.0;      // multiplies the number of xi nodes
    double tol = 1e-6;            // absolute error budget per sample
    double extent = 0.0;          // minimum xi half-width; raised to cover cut-off supports
    double max_step = 0.0;        // cap on the xi step (0: none); resolves cut-off transitions
};

/// k(y, t) = (2 pi)^-2 int e^(i y xi) int_(Im tau = -sigma) e^(i t tau) q(x, xi, tau) dtau dxi, n = 1.
/// The tau integral runs over half-period panels with Wynn acceleration; the xi integral is a trapezoid
/// rule whose error is estimated by halving the step. `order` is the symbol order, which must be negative.
KernelSlice inverse_fourier_kernel(const SymbolFunction& q, double order, double x, const std::vector<double>& y,
                                   const std::vector<double>& t, const KernelOptions& opts = {});
KernelSlice inverse_fourier_kernel(const HomogeneousSymbol& q, double x, const std::vector<double>& y,
                                   const std::vector<double>& t, const KernelOptions& opts = {});
KernelSlice inverse_fourier_kernel(const RealizedSymbol& q, double x, const std::vector<double>& y,
                                   const std::vector<double>& t, const KernelOptions& opts = {});

/// The default t-grid: +-{0.1, 0.25, 0.5, 1, 1.5, 2} plus -0.1 .. -2 intermediate points.
std::vector<double> default_time_grid();

struct VolterraReport {
    bool pass = false;
    double negative_max = 0.0;  // max |k| over the window
    double positive_max = 0.0;  // max |k| over t > 0
    double error_allowance = 0.0;
    double threshold = 0.0;
    double ratio = 0.0;  // negative_max / positive_max (0 when both vanish)
    double window_lo = 0.0, window_hi = 0.0;

    Json to_json() const;
};

/// Pass iff max_(t in window) |k| <= tol * max_(t > 0) |k| + the largest quadrature error in the window.
VolterraReport volterra_check(const KernelSlice& k, double window_lo, double window_hi, double tol = 1e-5);

struct KernelValue {
    Complex value;
    double error = 0.0;
};

/// q_m(x, 0, t) for a homogeneous symbol with m <= -w-1. With `regularize`, larger degrees are reduced first
/// through k_q(t) = (i / t) k_(d_tau q)(t), which is exact.
KernelValue homogeneous_kernel_at(const HomogeneousSymbol& q, double x, double t = 1.0, double resolution = 1.0,
                                  bool regularize = false);

/// Exponent p with q_m(x, 0, t) = t^p q_m(x, 0, 1): p = -(m + n + w) / w.
double kernel_time_exponent(int m, int n, int w);

}  // namespace volterra

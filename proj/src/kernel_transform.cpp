#include "volterra/kernel_transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "volterra/error.hpp"
#include "volterra/parallel.hpp"

namespace volterra {

namespace {

constexpr double kPi = std::numbers::pi;

/// Wynn epsilon extrapolation of a sequence of partial sums.
class Wynn {
public:
    Complex push(Complex s) {
        std::vector<Complex> next{s};
        Complex prev(0.0);  // eps_(k-1) of the previous diagonal
        for (std::size_t k = 0; k < diag_.size(); ++k) {
            Complex diff = next[k] - diag_[k];
            // a vanishing difference means this column has converged; stop the diagonal there
            if (std::abs(diff) <= 1e-300) break;
            next.push_back((k == 0 ? Complex(0.0) : prev) + 1.0 / diff);
            prev = diag_[k];
        }
        diag_ = std::move(next);
        return diag_[(diag_.size() - 1) & ~std::size_t(1)];
    }

private:
    std::vector<Complex> diag_;
};

struct Inner {
    Complex value;
    double error = 0.0;
};

/// int_0^inf e^(i t s) g(s) ds for t != 0: half-period panels, GK21 on each, Wynn on the partial sums.
template <class G>
Inner half_line(const G& g, double t, double tol) {
    using boost::math::quadrature::gauss_kronrod;
    const double P = kPi / std::abs(t);
    auto f = [&](double s) { return std::exp(Complex(0.0, t * s)) * g(s); };
    Wynn wynn;
    Complex partial(0.0), est(0.0), last(0.0), before(0.0);
    double quad_err = 0.0;
    constexpr int kMaxPanels = 4000;
    for (int k = 0; k < kMaxPanels; ++k) {
        double err = 0.0;
        Complex piece = gauss_kronrod<double, 21>::integrate(f, k * P, (k + 1) * P, 12, 1e-11, &err);
        // QUADPACK's rescaling of the Kronrod-Gauss difference
        double mag = std::abs(piece);
        if (mag > 0.0 && err > 0.0) err = mag * std::min(1.0, std::pow(200.0 * err / mag, 1.5));
        quad_err += err;
        partial += piece;
        before = last;
        last = est;
        est = wynn.push(partial);
        if (k >= 8 && std::abs(est - last) < tol && std::abs(last - before) < tol) {
            return {est, std::abs(est - last) + std::abs(last - before) + quad_err};
        }
        if (k >= 8 && std::abs(piece) < 1e-3 * tol && std::abs(partial - est) < tol) {
            return {partial, std::abs(piece) + quad_err};
        }
    }
    throw QuadratureError("tau integral did not converge after " + std::to_string(kMaxPanels) + " panels");
}

bool is_cutoff(const SymbolFunction& q) {
    auto* r = dynamic_cast<const RealizedSymbol*>(&q);
    return r && r->method() == SumMethod::Cutoff;
}

}  // namespace

std::vector<double> default_time_grid() {
    return {-2.0, -1.5, -1.0, -0.5, -0.25, -0.1, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0};
}

double kernel_time_exponent(int m, int n, int w) { return -static_cast<double>(m + n + w) / w; }

KernelSlice inverse_fourier_kernel(const SymbolFunction& q, double order, double x, const std::vector<double>& y,
                                   const std::vector<double>& t, const KernelOptions& opts) {
    if (q.dimension() != 1) throw InvalidArgument("kernel transforms are implemented for n = 1 only");
    if (!(order < 0.0)) throw DomainError("insufficient decay: symbol order must be negative");
    if (y.empty() || t.empty()) throw InvalidArgument("empty y or t grid");
    if (!(opts.resolution > 0.0)) throw InvalidArgument("resolution must be positive");
    for (double tv : t) {
        if (tv == 0.0 || !std::isfinite(tv)) throw InvalidArgument("t-grid must avoid t = 0");
    }
    const double sigma = opts.sigma ? *opts.sigma : (is_cutoff(q) ? 0.0 : 1.0);
    if (sigma < 0.0) throw InvalidArgument("contour shift sigma must be >= 0");
    const int w = q.weight();

    KernelSlice out;
    out.x = x;
    out.y = y;
    out.t = t;
    out.sigma = sigma;
    out.resolution = opts.resolution;
    out.values.assign(y.size() * t.size(), Complex(0.0));
    out.errors.assign(y.size() * t.size(), 0.0);
    Json per_t = Json::array();

    const std::vector<double> xs{x};
    for (std::size_t it = 0; it < t.size(); ++it) {
        const double tv = t[it];
        const double at = std::abs(tv);
        const double L = std::max({4.0, std::pow(40.0 / at, 1.0 / w), opts.extent});
        double h = 0.25 / std::max(1.0, std::pow(at, 1.0 / w));
        if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
        h /= opts.resolution;
        const std::size_t half = static_cast<std::size_t>(std::ceil(L / h));
        // nodes xi_k = (k - half) h; even nodes form the coarse grid with step 2h
        const std::size_t count = 2 * half + 1;
        const double growth = std::exp(sigma * tv);
        const double inner_tol = 1e-3 * opts.tol / std::max(1.0, growth) / (2.0 * L);
        std::vector<Inner> inner(count);
        parallel_for(count, [&](std::size_t k) {
            double xi = (static_cast<double>(k) - static_cast<double>(half)) * h;
            std::vector<double> xv{xi};
            auto g_pos = [&](double s) { return q.value(xs, xv, Complex(s, -sigma)); };
            auto g_neg = [&](double s) { return q.value(xs, xv, Complex(-s, -sigma)); };
            Inner a = half_line(g_pos, tv, inner_tol);
            Inner b = half_line(g_neg, -tv, inner_tol);
            inner[k] = {a.value + b.value, a.error + b.error};
        });
        const double scale = growth / (4.0 * kPi * kPi);
        double inner_err = 0.0;
        for (const auto& v : inner) inner_err += v.error;
        inner_err *= h * scale;
        for (std::size_t iy = 0; iy < y.size(); ++iy) {
            Complex fine(0.0), coarse(0.0);
            for (std::size_t k = 0; k < count; ++k) {
                double xi = (static_cast<double>(k) - static_cast<double>(half)) * h;
                Complex term = std::exp(Complex(0.0, y[iy] * xi)) * inner[k].value;
                fine += term;
                if ((k - half) % 2 == 0) coarse += term;
            }
            fine *= h * scale;
            coarse *= 2.0 * h * scale;
            out.values[iy * t.size() + it] = fine;
            out.errors[iy * t.size() + it] = std::abs(fine - coarse) + inner_err;
        }
        per_t.push_back(Json{{"t", tv}, {"xi_extent", L}, {"xi_step", h}, {"xi_nodes", count}});
    }
    for (std::size_t i = 0; i < out.errors.size(); ++i) {
        if (!std::isfinite(std::abs(out.values[i]))) throw QuadratureError("non-finite kernel value");
        if (out.errors[i] > opts.tol) {
            throw QuadratureError("estimated quadrature error " + format_double(out.errors[i]) +
                                  " exceeds tolerance " + format_double(opts.tol) + "; raise the resolution");
        }
    }
    out.quadrature = Json{{"method", "tau: half-period panels, Gauss-Kronrod 21, Wynn epsilon; xi: trapezoid"},
                          {"order", order},
                          {"tol", opts.tol},
                          {"grids", std::move(per_t)}};
    return out;
}

KernelSlice inverse_fourier_kernel(const HomogeneousSymbol& q, double x, const std::vector<double>& y,
                                   const std::vector<double>& t, const KernelOptions& opts) {
    ExprFunction f(q.expr());
    return inverse_fourier_kernel(f, q.degree(), x, y, t, opts);
}

KernelSlice inverse_fourier_kernel(const RealizedSymbol& q, double x, const std::vector<double>& y,
                                   const std::vector<double>& t, const KernelOptions& opts) {
    KernelOptions o = opts;
    if (q.method() == SumMethod::Cutoff) {
        // the cut-off terms differ from the plain sum only for ||xi, tau|| <= eps_j
        double smallest = q.weights().front();
        for (double e : q.weights()) {
            o.extent = std::max(o.extent, 1.5 * e);
            smallest = std::min(smallest, e);
        }
        if (o.max_step == 0.0) o.max_step = smallest / 20.0;
    }
    return inverse_fourier_kernel(static_cast<const SymbolFunction&>(q), q.source().entries().front().order, x, y,
                                  t, o);
}

Json KernelSlice::to_json() const {
    Json rows = Json::array();
    for (std::size_t iy = 0; iy < y.size(); ++iy) {
        for (std::size_t it = 0; it < t.size(); ++it) {
            Complex v = at(iy, it);
            rows.push_back(Json{{"y", y[iy]}, {"t", t[it]}, {"re", v.real()}, {"im", v.imag()},
                                {"error", error_at(iy, it)}});
        }
    }
    return Json{{"x", x}, {"sigma", sigma}, {"resolution", resolution}, {"quadrature", quadrature},
                {"samples", std::move(rows)}};
}

std::string KernelSlice::to_csv() const {
    std::ostringstream os;
    os << "y,t,re,im,sigma,error\n";
    for (std::size_t iy = 0; iy < y.size(); ++iy) {
        for (std::size_t it = 0; it < t.size(); ++it) {
            Complex v = at(iy, it);
            os << format_double(y[iy]) << ',' << format_double(t[it]) << ',' << format_double(v.real()) << ','
               << format_double(v.imag()) << ',' << format_double(sigma) << ',' << format_double(error_at(iy, it))
               << '\n';
        }
    }
    return os.str();
}

Json VolterraReport::to_json() const {
    return Json{{"pass", pass},
                {"window", {window_lo, window_hi}},
                {"negative_max", negative_max},
                {"positive_max", positive_max},
                {"ratio", ratio},
                {"error_allowance", error_allowance},
                {"threshold", threshold}};
}

VolterraReport volterra_check(const KernelSlice& k, double window_lo, double window_hi, double tol) {
    VolterraReport r;
    r.window_lo = window_lo;
    r.window_hi = window_hi;
    bool any = false;
    for (std::size_t it = 0; it < k.t.size(); ++it) {
        double tv = k.t[it];
        bool in_window = tv >= window_lo && tv <= window_hi && tv < 0.0;
        any = any || in_window;
        for (std::size_t iy = 0; iy < k.y.size(); ++iy) {
            double v = std::abs(k.at(iy, it));
            if (in_window) {
                r.negative_max = std::max(r.negative_max, v);
                r.error_allowance = std::max(r.error_allowance, k.error_at(iy, it));
            }
            if (tv > 0.0) r.positive_max = std::max(r.positive_max, v);
        }
    }
    if (!any) throw InvalidArgument("negative-time window contains no grid points");
    r.threshold = tol * r.positive_max + r.error_allowance;
    r.ratio = r.positive_max > 0.0 ? r.negative_max / r.positive_max : 0.0;
    r.pass = r.negative_max <= r.threshold;
    return r;
}

KernelValue homogeneous_kernel_at(const HomogeneousSymbol& q, double x, double t, double resolution,
                                  bool regularize) {
    if (!(t > 0.0)) throw InvalidArgument("homogeneous kernels are evaluated at t > 0");
    const int w = q.ctx().w;
    int m = q.degree();
    SymExpr e = q.expr();
    if (e.is_zero()) return {Complex(0.0), 0.0};
    Complex factor(1.0);
    if (m > -w - 1 && !regularize) {
        throw DomainError("divergent integral: degree " + std::to_string(m) + " > -w-1; use regularization");
    }
    // the kernel of d_tau q is -i t times the kernel of q
    while (m > -w - 1) {
        e = e.differentiate(Var::tau());
        m -= w;
        factor *= Complex(0.0, 1.0 / t);
    }
    HomogeneousSymbol reduced(e, m);
    KernelOptions opts;
    opts.resolution = resolution;
    opts.sigma = 1.0 / std::pow(t, 1.0);
    auto slice = inverse_fourier_kernel(reduced, x, {0.0}, {t}, opts);
    return {factor * slice.values[0], std::abs(factor) * slice.errors[0]};
}

}  // namespace volterra

#include "volterra/symexpr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "volterra/error.hpp"

namespace volterra {

ContextPtr make_context(int n, int w, const Poly& principal) {
    if (n < 1) throw InvalidArgument("space dimension must be >= 1");
    if (w < 2 || w % 2 != 0) throw InvalidArgument("weight w must be an even integer >= 2");
    if (principal.dimension() != n) throw InvalidArgument("principal polynomial has wrong dimension");
    auto deg = principal.xi_degree();
    if (!deg || *deg != w) {
        throw InvalidArgument("principal polynomial must be homogeneous of degree w in xi");
    }
    return std::make_shared<const Context>(Context{n, w, principal});
}

ContextPtr make_euclidean_context(int n, int w) {
    Poly sq(n);
    for (int i = 0; i < n; ++i) sq += Poly::xi(n, i) * Poly::xi(n, i);
    return make_context(n, w, sq.pow(w / 2));
}

bool same_context(const Context& a, const Context& b) {
    return &a == &b || (a.n == b.n && a.w == b.w && a.principal == b.principal);
}

EvalPoint::EvalPoint(std::vector<double> x, std::vector<double> xi, Complex tau)
    : x_(std::move(x)), xi_(std::move(xi)), tau_(tau) {
    if (x_.size() != xi_.size()) throw InvalidArgument("x and xi must have the same length");
    if (tau_.imag() > 0.0) throw DomainError("tau must lie in the closed lower half-plane (Im tau <= 0)");
}

bool operator<(const ThetaKey& a, const ThetaKey& b) {
    if (a.k0 != b.k0) return a.k0 < b.k0;
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size();
    for (std::size_t i = 0; i < a.factors.size(); ++i) {
        int c = Poly::compare(a.factors[i].shift, b.factors[i].shift);
        if (c != 0) return c < 0;
        if (a.factors[i].k != b.factors[i].k) return a.factors[i].k < b.factors[i].k;
    }
    return false;
}

bool operator==(const ThetaKey& a, const ThetaKey& b) {
    return !(a < b) && !(b < a);
}

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Brings (key, coeff) to canonical form; may split into several terms.
void canonicalize(ThetaKey key, Poly coeff, int w, std::vector<std::pair<ThetaKey, Poly>>& out) {
    if (coeff.is_zero()) return;
    std::vector<ThetaFactor> merged;
    std::sort(key.factors.begin(), key.factors.end(), [](const ThetaFactor& a, const ThetaFactor& b) {
        return Poly::compare(a.shift, b.shift) < 0;
    });
    for (auto& f : key.factors) {
        if (f.shift.is_zero()) {
            key.k0 += f.k;
            continue;
        }
        if (!merged.empty() && Poly::compare(merged.back().shift, f.shift) == 0) {
            merged.back().k += f.k;
        } else {
            merged.push_back(std::move(f));
        }
    }
    std::erase_if(merged, [](const ThetaFactor& f) { return f.k == 0; });
    key.factors = std::move(merged);

    auto it = std::find_if(key.factors.begin(), key.factors.end(),
                           [w](const ThetaFactor& f) { return f.k > 0 && f.k % w == 0; });
    if (it == key.factors.end()) {
        out.emplace_back(std::move(key), std::move(coeff));
        return;
    }
    // (THETA + s)^j = sum_i C(j,i) THETA^i s^(j-i)
    int j = it->k / w;
    Poly shift = it->shift;
    key.factors.erase(it);
    for (int i = 0; i <= j; ++i) {
        ThetaKey k2 = key;
        k2.k0 += i * w;
        canonicalize(std::move(k2), coeff * shift.pow(j - i) * Complex(binomial(j, i)), w, out);
    }
}

ThetaKey combine(const ThetaKey& a, const ThetaKey& b) {
    ThetaKey k;
    k.k0 = a.k0 + b.k0;
    k.factors = a.factors;
    k.factors.insert(k.factors.end(), b.factors.begin(), b.factors.end());
    return k;
}

Complex ipow(Complex b, int k) {
    bool inv = k < 0;
    unsigned e = static_cast<unsigned>(inv ? -k : k);
    Complex r(1.0);
    while (e) {
        if (e & 1u) r *= b;
        e >>= 1u;
        if (e) b *= b;
    }
    return inv ? Complex(1.0) / r : r;
}

std::string exponent_text(int k, int w) {
    int g = std::gcd(std::abs(k), w);
    int num = k / g;
    int den = w / g;
    if (den == 1) {
        if (num == 1) return "";
        if (num > 0) return "^" + std::to_string(num);
        return "^(" + std::to_string(num) + ")";
    }
    return "^(" + std::to_string(num) + "/" + std::to_string(den) + ")";
}

}  // namespace

void SymExpr::add_term(const ThetaKey& key, const Poly& coeff) {
    std::vector<std::pair<ThetaKey, Poly>> parts;
    canonicalize(key, coeff, ctx_->w, parts);
    for (auto& [k, p] : parts) {
        auto [it, inserted] = terms_.try_emplace(k, p);
        if (!inserted) {
            it->second += p;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
}

void SymExpr::check_compatible(const SymExpr& o) const {
    if (!ctx_ || !o.ctx_) throw InvalidArgument("expression without context");
    if (!same_context(*ctx_, *o.ctx_)) throw InvalidArgument("expressions belong to different contexts");
}

SymExpr SymExpr::constant(ContextPtr ctx, Complex c) {
    return from_poly(ctx, Poly::constant(ctx->n, c));
}

SymExpr SymExpr::from_poly(ContextPtr ctx, const Poly& p) {
    SymExpr e(std::move(ctx));
    e.add_term(ThetaKey{}, p);
    return e;
}

SymExpr SymExpr::x(ContextPtr ctx, int i) {
    int n = ctx->n;
    return from_poly(std::move(ctx), Poly::x(n, i));
}

SymExpr SymExpr::xi(ContextPtr ctx, int i) {
    int n = ctx->n;
    return from_poly(std::move(ctx), Poly::xi(n, i));
}

SymExpr SymExpr::tau(ContextPtr ctx) {
    // tau = -i (THETA - p_w)
    SymExpr e(ctx);
    e.add_term(ThetaKey{ctx->w, {}}, Poly::constant(ctx->n, Complex(0.0, -1.0)));
    e.add_term(ThetaKey{}, ctx->principal * Complex(0.0, 1.0));
    return e;
}

SymExpr SymExpr::theta_power(ContextPtr ctx, int k) {
    SymExpr e(ctx);
    e.add_term(ThetaKey{k, {}}, Poly::constant(ctx->n, 1.0));
    return e;
}

SymExpr SymExpr::shifted_theta_power(ContextPtr ctx, const Poly& shift, int k) {
    SymExpr e(ctx);
    ThetaKey key;
    key.factors.push_back({shift, k});
    e.add_term(key, Poly::constant(ctx->n, 1.0));
    return e;
}

SymExpr& SymExpr::operator+=(const SymExpr& o) {
    if (!ctx_) ctx_ = o.ctx_;
    if (o.terms_.empty()) return *this;
    check_compatible(o);
    for (const auto& [k, p] : o.terms_) {
        auto [it, inserted] = terms_.try_emplace(k, p);
        if (!inserted) {
            it->second += p;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    return *this;
}

SymExpr& SymExpr::operator-=(const SymExpr& o) {
    return *this += -o;
}

SymExpr& SymExpr::operator*=(Complex c) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= c;
        if (it->second.is_zero()) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return *this;
}

SymExpr operator*(const SymExpr& a, const SymExpr& b) {
    SymExpr out(a.ctx_ ? a.ctx_ : b.ctx_);
    if (a.terms_.empty() || b.terms_.empty()) return out;
    a.check_compatible(b);
    for (const auto& [ka, pa] : a.terms_) {
        for (const auto& [kb, pb] : b.terms_) {
            out.add_term(combine(ka, kb), pa * pb);
        }
    }
    return out;
}

SymExpr SymExpr::pow(int k) const {
    if (k >= 0) {
        SymExpr result = constant(ctx_, 1.0);
        for (int i = 0; i < k; ++i) result = result * *this;
        return result;
    }
    if (terms_.size() != 1 || !terms_.begin()->second.is_constant()) {
        throw InvalidArgument("negative power requires a single Theta-power term with constant coefficient");
    }
    const auto& [key, p] = *terms_.begin();
    Complex c = p.constant_term();
    ThetaKey nk;
    nk.k0 = key.k0 * k;
    for (const auto& f : key.factors) nk.factors.push_back({f.shift, f.k * k});
    SymExpr out(ctx_);
    out.add_term(nk, Poly::constant(ctx_->n, ipow(c, k)));
    return out;
}

SymExpr SymExpr::differentiate(Var v) const {
    const int n = ctx_->n;
    const int w = ctx_->w;
    if (v.kind != VarKind::Tau && (v.index < 0 || v.index >= n)) {
        throw InvalidArgument("derivative variable index out of range");
    }
    int var = v.kind == VarKind::X ? v.index : n + v.index;
    SymExpr out(ctx_);
    // derivative of the THETA base (tau part handled by the constant i)
    Poly dtheta = v.kind == VarKind::Tau ? Poly::constant(n, Complex(0.0, 1.0)) : ctx_->principal.derivative(var);
    for (const auto& [key, p] : terms_) {
        if (v.kind != VarKind::Tau) {
            Poly dp = p.derivative(var);
            if (!dp.is_zero()) out.add_term(key, dp);
        }
        if (key.k0 != 0 && !dtheta.is_zero()) {
            ThetaKey k2 = key;
            k2.k0 -= w;
            out.add_term(k2, p * dtheta * Complex(static_cast<double>(key.k0) / w));
        }
        for (std::size_t f = 0; f < key.factors.size(); ++f) {
            Poly dbase = dtheta;
            if (v.kind != VarKind::Tau) dbase += key.factors[f].shift.derivative(var);
            if (dbase.is_zero()) continue;
            ThetaKey k2 = key;
            k2.factors[f].k -= w;
            out.add_term(k2, p * dbase * Complex(static_cast<double>(key.factors[f].k) / w));
        }
    }
    return out;
}

SymExpr SymExpr::shift(double T) const {
    if (!(T > 0.0)) throw InvalidArgument("shift T must be positive");
    const int n = ctx_->n;
    Poly tp = Poly::constant(n, T);
    SymExpr out(ctx_);
    for (const auto& [key, p] : terms_) {
        ThetaKey k2;
        if (key.k0 != 0) k2.factors.push_back({tp, key.k0});
        for (const auto& f : key.factors) k2.factors.push_back({f.shift + tp, f.k});
        out.add_term(k2, p);
    }
    return out;
}

Complex SymExpr::evaluate(const EvalPoint& pt) const {
    return evaluate(pt.x(), pt.xi(), pt.tau());
}

Complex SymExpr::evaluate(std::span<const double> x, std::span<const double> xi, Complex tau) const {
    if (terms_.empty()) return 0.0;
    return compile()(x, xi, tau);
}

DegreeInfo SymExpr::infer_degree() const {
    if (terms_.empty()) return {DegreeInfo::Kind::Zero, 0};
    const int n = ctx_->n;
    std::optional<int> degree;
    for (const auto& [key, p] : terms_) {
        int theta_deg = key.k0;
        for (const auto& f : key.factors) {
            auto sd = f.shift.xi_degree();
            if (!sd || *sd != ctx_->w) return {DegreeInfo::Kind::NotHomogeneous, 0};
            theta_deg += f.k;
        }
        for (const auto& [e, c] : p.terms()) {
            int d = theta_deg;
            for (int i = 0; i < n; ++i) d += e[n + i];
            if (degree && *degree != d) return {DegreeInfo::Kind::NotHomogeneous, 0};
            degree = d;
        }
    }
    // numeric cross-check of the structural answer
    std::mt19937_64 rng(0x5eed);
    auto uni = [&rng](double a, double b) { return a + (b - a) * ((rng() >> 11) * 0x1.0p-53); };
    CompiledExpr f = compile();
    int checked = 0;
    for (int attempt = 0; attempt < 100 && checked < 10; ++attempt) {
        std::vector<double> x(n), xi(n), sxi(n);
        for (int i = 0; i < n; ++i) {
            x[i] = uni(-1.0, 1.0);
            xi[i] = uni(-1.5, 1.5);
        }
        Complex tau = std::polar(uni(0.1, 2.0), uni(-M_PI, 0.0));
        double lambda = uni(0.5, 2.0);
        for (int i = 0; i < n; ++i) sxi[i] = lambda * xi[i];
        Complex base, scaled;
        try {
            base = f(x, xi, tau);
            scaled = f(x, sxi, tau * std::pow(lambda, ctx_->w));
        } catch (const PoleError&) {
            continue;
        }
        Complex expect = std::pow(lambda, *degree) * base;
        double scale = std::abs(expect) + std::abs(scaled);
        if (scale > 0 && std::abs(scaled - expect) > 1e-9 * scale) {
            return {DegreeInfo::Kind::NotHomogeneous, 0};
        }
        ++checked;
    }
    return {DegreeInfo::Kind::Homogeneous, *degree};
}

std::string SymExpr::to_string() const {
    if (terms_.empty()) return "0";
    const int w = ctx_->w;
    const int n = ctx_->n;
    std::string out;
    bool first = true;
    for (const auto& [key, p] : terms_) {
        std::string theta;
        if (key.k0 != 0) theta = "THETA" + exponent_text(key.k0, w);
        for (const auto& f : key.factors) {
            if (!theta.empty()) theta += "*";
            theta += "(THETA + " + f.shift.to_string() + ")" + exponent_text(f.k, w);
        }
        for (const auto& [e, c] : p.terms()) {
            Poly mono(n);
            mono.add_term(e, 1.0);
            std::string m = mono.is_constant() ? "" : mono.to_string();
            std::string body = m;
            if (!theta.empty()) body = body.empty() ? theta : body + "*" + theta;
            std::string piece;
            if (body.empty()) {
                piece = format_complex(c);
            } else if (c == Complex(1.0)) {
                piece = body;
            } else if (c == Complex(-1.0)) {
                piece = "-" + body;
            } else {
                piece = format_complex(c) + "*" + body;
            }
            if (!first) out += " + ";
            out += piece;
            first = false;
        }
    }
    return out;
}

bool operator==(const SymExpr& a, const SymExpr& b) {
    if (a.terms_.empty() && b.terms_.empty()) return true;
    if (!a.ctx_ || !b.ctx_ || !same_context(*a.ctx_, *b.ctx_)) return false;
    if (a.terms_.size() != b.terms_.size()) return false;
    auto ia = a.terms_.begin();
    for (auto ib = b.terms_.begin(); ib != b.terms_.end(); ++ia, ++ib) {
        if (!(ia->first == ib->first) || !(ia->second == ib->second)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

CompiledExpr::FlatPoly CompiledExpr::flatten(const Poly& p) {
    FlatPoly fp;
    for (const auto& [e, c] : p.terms()) {
        Monomial m{c, static_cast<int>(exps_.size())};
        for (int v : e) {
            exps_.push_back(v);
            max_exp_ = std::max(max_exp_, v);
        }
        fp.monos.push_back(m);
    }
    return fp;
}

CompiledExpr SymExpr::compile() const {
    CompiledExpr ce;
    if (!ctx_) return ce;
    ce.n_ = ctx_->n;
    ce.principal_ = ce.flatten(ctx_->principal);
    std::vector<Poly> shifts;
    const double w = ctx_->w;
    for (const auto& [key, p] : terms_) {
        CompiledExpr::Term t;
        t.coeff = ce.flatten(p);
        if (key.k0 != 0) {
            t.powers.emplace_back(0, key.k0 / w);
            t.integral = t.integral && key.k0 % ctx_->w == 0;
        }
        for (const auto& f : key.factors) {
            auto it = std::find_if(shifts.begin(), shifts.end(),
                                   [&](const Poly& s) { return Poly::compare(s, f.shift) == 0; });
            int idx = static_cast<int>(it - shifts.begin());
            if (it == shifts.end()) {
                shifts.push_back(f.shift);
                ce.shifts_.push_back(ce.flatten(f.shift));
            }
            t.powers.emplace_back(idx + 1, f.k / w);
            t.integral = t.integral && f.k % ctx_->w == 0;
        }
        ce.terms_.push_back(std::move(t));
    }
    return ce;
}

Complex CompiledExpr::eval_poly(const FlatPoly& p, const std::vector<double>& table) const {
    const int nv = 2 * n_;
    const int stride = max_exp_ + 1;
    Complex sum(0.0);
    for (const auto& m : p.monos) {
        double v = 1.0;
        const int* e = exps_.data() + m.offset;
        for (int i = 0; i < nv; ++i) {
            if (e[i]) v *= table[i * stride + e[i]];
        }
        sum += m.coeff * v;
    }
    return sum;
}

Complex CompiledExpr::operator()(std::span<const double> x, std::span<const double> xi, Complex tau) const {
    if (tau.imag() > 0.0) throw DomainError("tau must lie in the closed lower half-plane (Im tau <= 0)");
    if (terms_.empty()) return 0.0;
    const int stride = max_exp_ + 1;
    std::vector<double> table(static_cast<std::size_t>(2 * n_ * stride));
    for (int i = 0; i < 2 * n_; ++i) {
        double v = i < n_ ? x[i] : xi[i - n_];
        double acc = 1.0;
        for (int e = 0; e < stride; ++e) {
            table[i * stride + e] = acc;
            acc *= v;
        }
    }
    Complex theta = eval_poly(principal_, table) + Complex(0.0, 1.0) * tau;
    const std::size_t nb = shifts_.size() + 1;
    std::vector<Complex> bases(nb);
    std::vector<Complex> logs(nb);
    std::vector<char> have_log(nb, 0);
    bases[0] = theta;
    for (std::size_t j = 1; j < nb; ++j) bases[j] = theta + eval_poly(shifts_[j - 1], table);

    Complex sum(0.0);
    for (const auto& t : terms_) {
        Complex factor(1.0);
        if (t.integral) {
            for (const auto& [b, a] : t.powers) {
                int k = static_cast<int>(std::lround(a));
                if (bases[b] == Complex(0.0)) {
                    if (k < 0) throw PoleError("Theta-power evaluated at a zero of its base");
                    factor = 0.0;
                } else {
                    factor *= ipow(bases[b], k);
                }
            }
        } else {
            Complex expo(0.0);
            bool zero = false;
            for (const auto& [b, a] : t.powers) {
                if (bases[b] == Complex(0.0)) {
                    if (a < 0) throw PoleError("Theta-power evaluated at a zero of its base");
                    zero = true;
                    continue;
                }
                if (!have_log[b]) {
                    logs[b] = std::log(bases[b]);
                    have_log[b] = 1;
                }
                expo += a * logs[b];
            }
            factor = zero ? Complex(0.0) : std::exp(expo);
        }
        if (factor == Complex(0.0)) continue;
        sum += eval_poly(t.coeff, table) * factor;
    }
    return sum;
}

}  // namespace volterra

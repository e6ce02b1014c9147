#include "volterra/poly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "volterra/error.hpp"

namespace volterra {

std::string format_double(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_complex(Complex c) {
    if (c.imag() == 0.0) return format_double(c.real());
    std::string out = "(" + format_double(c.real());
    if (c.imag() < 0 || std::signbit(c.imag())) {
        out += "-" + format_double(-c.imag());
    } else {
        out += "+" + format_double(c.imag());
    }
    return out + "i)";
}

Poly Poly::constant(int n, Complex c) {
    Poly p(n);
    p.add_term(Exponents(2 * n, 0), c);
    return p;
}

Poly Poly::x(int n, int i) {
    if (i < 0 || i >= n) throw InvalidArgument("x index out of range");
    Poly p(n);
    Exponents e(2 * n, 0);
    e[i] = 1;
    p.add_term(e, 1.0);
    return p;
}

Poly Poly::xi(int n, int i) {
    if (i < 0 || i >= n) throw InvalidArgument("xi index out of range");
    Poly p(n);
    Exponents e(2 * n, 0);
    e[n + i] = 1;
    p.add_term(e, 1.0);
    return p;
}

bool Poly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const auto& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](int k) { return k == 0; });
}

Complex Poly::constant_term() const {
    auto it = terms_.find(Exponents(2 * n_, 0));
    return it == terms_.end() ? Complex(0.0) : it->second;
}

void Poly::add_term(const Exponents& e, Complex c) {
    if (c == Complex(0.0)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == Complex(0.0)) terms_.erase(it);
    }
}

Poly& Poly::operator+=(const Poly& o) {
    if (n_ == 0 && terms_.empty()) n_ = o.n_;
    if (o.n_ != n_ && !o.terms_.empty()) throw InvalidArgument("polynomial dimension mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (n_ == 0 && terms_.empty()) n_ = o.n_;
    if (o.n_ != n_ && !o.terms_.empty()) throw InvalidArgument("polynomial dimension mismatch");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

Poly& Poly::operator*=(Complex c) {
    if (c == Complex(0.0)) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= c;
        if (it->second == Complex(0.0)) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    int n = std::max(a.n_, b.n_);
    if (!a.terms_.empty() && !b.terms_.empty() && a.n_ != b.n_) {
        throw InvalidArgument("polynomial dimension mismatch");
    }
    Poly out(n);
    Exponents e(2 * n, 0);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (int v = 0; v < 2 * n; ++v) e[v] = ea[v] + eb[v];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Poly Poly::pow(int k) const {
    if (k < 0) throw InvalidArgument("negative power of a polynomial");
    Poly result = constant(n_, 1.0);
    Poly base = *this;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

Poly Poly::derivative(int var) const {
    Poly out(n_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        d[var] -= 1;
        out.add_term(d, c * static_cast<double>(e[var]));
    }
    return out;
}

Complex Poly::evaluate(std::span<const double> x, std::span<const double> xi) const {
    Complex sum(0.0);
    for (const auto& [e, c] : terms_) {
        double m = 1.0;
        for (int i = 0; i < n_; ++i) {
            for (int k = 0; k < e[i]; ++k) m *= x[i];
            for (int k = 0; k < e[n_ + i]; ++k) m *= xi[i];
        }
        sum += c * m;
    }
    return sum;
}

std::optional<int> Poly::xi_degree() const {
    std::optional<int> deg;
    for (const auto& [e, c] : terms_) {
        int d = 0;
        for (int i = 0; i < n_; ++i) d += e[n_ + i];
        if (deg && *deg != d) return std::nullopt;
        deg = d;
    }
    return deg;
}

bool Poly::depends_on_x() const {
    for (const auto& [e, c] : terms_) {
        for (int i = 0; i < n_; ++i) {
            if (e[i] != 0) return true;
        }
    }
    return false;
}

int Poly::compare(const Poly& a, const Poly& b) {
    if (a.n_ != b.n_) return a.n_ < b.n_ ? -1 : 1;
    if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size() ? -1 : 1;
    auto ia = a.terms_.begin();
    auto ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib) {
        if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
        if (ia->second.real() != ib->second.real()) return ia->second.real() < ib->second.real() ? -1 : 1;
        if (ia->second.imag() != ib->second.imag()) return ia->second.imag() < ib->second.imag() ? -1 : 1;
    }
    return 0;
}

namespace {

std::string monomial_text(int n, const Exponents& e) {
    std::string out;
    auto append = [&](const std::string& name, int k) {
        if (k == 0) return;
        if (!out.empty()) out += "*";
        out += name;
        if (k != 1) out += "^" + std::to_string(k);
    };
    for (int i = 0; i < n; ++i) append("x" + std::to_string(i + 1), e[i]);
    for (int i = 0; i < n; ++i) append("xi" + std::to_string(i + 1), e[n + i]);
    return out;
}

}  // namespace

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        std::string mono = monomial_text(n_, e);
        std::string piece;
        if (mono.empty()) {
            piece = format_complex(c);
        } else if (c == Complex(1.0)) {
            piece = mono;
        } else if (c == Complex(-1.0)) {
            piece = "-" + mono;
        } else {
            piece = format_complex(c) + "*" + mono;
        }
        if (!first) out += " + ";
        out += piece;
        first = false;
    }
    return out;
}

}  // namespace volterra

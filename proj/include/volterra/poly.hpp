#pragma once

#include <complex>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace volterra {

using Complex = std::complex<double>;

/// Exponent vector of a monomial in (x_1..x_n, xi_1..xi_n), x first.
using Exponents = std::vector<int>;

/// Sparse polynomial with complex coefficients in 2n variables (x then xi).
/// Zero coefficients are never stored, so structural equality is value equality.
class Poly {
public:
    Poly() = default;
    explicit Poly(int n) : n_(n) {}

    static Poly constant(int n, Complex c);
    static Poly x(int n, int i);
    static Poly xi(int n, int i);

    int dimension() const noexcept { return n_; }
    int num_vars() const noexcept { return 2 * n_; }
    const std::map<Exponents, Complex>& terms() const noexcept { return terms_; }

    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const;
    Complex constant_term() const;

    void add_term(const Exponents& e, Complex c);

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(Complex c);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, Complex c) { return a *= c; }
    friend Poly operator*(Complex c, Poly a) { return a *= c; }
    friend Poly operator*(const Poly& a, const Poly& b);
    Poly operator-() const { return *this * Complex(-1.0); }

    Poly pow(int k) const;

    /// d/dv where v indexes the 2n variables (0..n-1 are x, n..2n-1 are xi).
    Poly derivative(int var) const;

    Complex evaluate(std::span<const double> x, std::span<const double> xi) const;

    /// Common total degree in the xi variables, or nullopt when mixed; zero poly gives nullopt too.
    std::optional<int> xi_degree() const;
    bool depends_on_x() const;

    friend bool operator==(const Poly& a, const Poly& b) { return a.n_ == b.n_ && a.terms_ == b.terms_; }

    /// Total order used for canonical sorting of Theta factors.
    static int compare(const Poly& a, const Poly& b);

    /// Grammar text, e.g. "2*x1*xi1^2 - (0+1i)". Empty poly prints as "0".
    std::string to_string() const;

private:
    int n_ = 0;
    std::map<Exponents, Complex> terms_;
};

/// Shortest round-trip text for a double.
std::string format_double(double v);
/// Grammar text for a complex constant: "3", "-2.5" or "(1+2i)".
std::string format_complex(Complex c);

}  // namespace volterra

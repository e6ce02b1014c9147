#include "volterra/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include "volterra/error.hpp"

namespace volterra {

namespace {

class Parser {
public:
    Parser(std::string_view text, int n) : s_(text), n_(n) {}

    ExprTree parse() {
        auto e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("unexpected character '" + std::string(1, s_[pos_]) + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    static ExprTree make(ExprNode::Kind k, std::size_t pos) {
        auto node = std::make_unique<ExprNode>();
        node->kind = k;
        node->position = pos;
        return node;
    }

    ExprTree parse_sum() {
        skip_ws();
        std::size_t start = pos_;
        auto first = parse_product();
        std::vector<ExprTree> parts;
        parts.push_back(std::move(first));
        while (true) {
            skip_ws();
            std::size_t at = pos_;
            if (accept('+')) {
                parts.push_back(parse_product());
            } else if (accept('-')) {
                auto neg = make(ExprNode::Kind::Neg, at);
                neg->children.push_back(parse_product());
                parts.push_back(std::move(neg));
            } else {
                break;
            }
        }
        if (parts.size() == 1) return std::move(parts.front());
        auto add = make(ExprNode::Kind::Add, start);
        add->children = std::move(parts);
        return add;
    }

    ExprTree parse_product() {
        skip_ws();
        std::size_t start = pos_;
        std::vector<ExprTree> parts;
        parts.push_back(parse_unary());
        while (true) {
            skip_ws();
            std::size_t at = pos_;
            if (accept('*')) {
                parts.push_back(parse_unary());
            } else if (accept('/')) {
                auto inv = make(ExprNode::Kind::Pow, at);
                inv->exp_num = -1;
                inv->children.push_back(parse_unary());
                parts.push_back(std::move(inv));
            } else {
                break;
            }
        }
        if (parts.size() == 1) return std::move(parts.front());
        auto mul = make(ExprNode::Kind::Mul, start);
        mul->children = std::move(parts);
        return mul;
    }

    ExprTree parse_unary() {
        skip_ws();
        std::size_t at = pos_;
        if (accept('-')) {
            auto neg = make(ExprNode::Kind::Neg, at);
            neg->children.push_back(parse_unary());
            return neg;
        }
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    ExprTree parse_power() {
        auto base = parse_primary();
        skip_ws();
        std::size_t at = pos_;
        if (!accept('^')) return base;
        auto pw = make(ExprNode::Kind::Pow, at);
        skip_ws();
        if (accept('(')) {
            int sign = 1;
            if (accept('-')) {
                sign = -1;
            } else {
                accept('+');
            }
            pw->exp_num = sign * parse_int();
            if (accept('/')) pw->exp_den = parse_int();
            expect(')');
        } else {
            int sign = 1;
            if (accept('-')) sign = -1;
            pw->exp_num = sign * parse_int();
        }
        if (pw->exp_den <= 0) throw ParseError("exponent denominator must be positive", at);
        int g = std::gcd(std::abs(pw->exp_num), pw->exp_den);
        if (g > 1) {
            pw->exp_num /= g;
            pw->exp_den /= g;
        }
        pw->children.push_back(std::move(base));
        return pw;
    }

    int parse_int() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) throw ParseError("expected integer", start);
        int v = 0;
        auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc()) throw ParseError("integer out of range", start);
        return v;
    }

    ExprTree parse_primary() {
        skip_ws();
        std::size_t at = pos_;
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            if (name == "THETA") return make(ExprNode::Kind::Theta, at);
            if (name == "tau") return make(ExprNode::Kind::Tau, at);
            if (name == "i") {
                auto k = make(ExprNode::Kind::Const, at);
                k->value = Complex(0.0, 1.0);
                return k;
            }
            if (name == "x" || name == "xi") {
                std::size_t dstart = pos_;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                if (dstart == pos_) throw ParseError("unknown variable '" + name + "'", at);
                int idx = std::atoi(std::string(s_.substr(dstart, pos_ - dstart)).c_str());
                if (idx < 1 || idx > n_) {
                    throw ParseError("unknown variable '" + name + std::to_string(idx) + "' for dimension " +
                                         std::to_string(n_),
                                     at);
                }
                auto k = make(name == "x" ? ExprNode::Kind::X : ExprNode::Kind::Xi, at);
                k->index = idx - 1;
                return k;
            }
            throw ParseError("unknown variable '" + name + "'", at);
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "'", at);
    }

    ExprTree parse_number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            } else {
                pos_ = save;
            }
        }
        double v = 0.0;
        auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc() || res.ptr != s_.data() + pos_) throw ParseError("malformed number", start);
        auto k = make(ExprNode::Kind::Const, start);
        // imaginary literal "2.5i", but not the start of an identifier such as "2*i"
        if (pos_ < s_.size() && s_[pos_] == 'i' &&
            (pos_ + 1 >= s_.size() || !std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))) {
            ++pos_;
            k->value = Complex(0.0, v);
        } else {
            k->value = Complex(v, 0.0);
        }
        return k;
    }

    std::string_view s_;
    int n_;
    std::size_t pos_ = 0;
};

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

/// If e == THETA + s with s a polynomial, returns s.
std::optional<Poly> as_shifted_theta(const SymExpr& e) {
    const int w = e.ctx().w;
    std::optional<Poly> shift;
    bool have_theta = false;
    for (const auto& [key, p] : e.terms()) {
        if (key.factors.empty() && key.k0 == w && p.is_constant() && p.constant_term() == Complex(1.0)) {
            have_theta = true;
        } else if (key.factors.empty() && key.k0 == 0) {
            shift = p;
        } else {
            return std::nullopt;
        }
    }
    if (!have_theta) return std::nullopt;
    return shift ? *shift : Poly(e.ctx().n);
}

}  // namespace

ExprTree parse_tree(std::string_view text, int n) {
    return Parser(text, n).parse();
}

Complex evaluate_tree(const ExprNode& node, const Context& ctx, const EvalPoint& pt) {
    using K = ExprNode::Kind;
    switch (node.kind) {
        case K::Const: return node.value;
        case K::X: return pt.x().at(node.index);
        case K::Xi: return pt.xi().at(node.index);
        case K::Tau: return pt.tau();
        case K::Theta: return ctx.principal.evaluate(pt.x(), pt.xi()) + Complex(0.0, 1.0) * pt.tau();
        case K::Add: {
            Complex s(0.0);
            for (const auto& c : node.children) s += evaluate_tree(*c, ctx, pt);
            return s;
        }
        case K::Mul: {
            Complex s(1.0);
            for (const auto& c : node.children) s *= evaluate_tree(*c, ctx, pt);
            return s;
        }
        case K::Neg: return -evaluate_tree(*node.children.front(), ctx, pt);
        case K::Pow: {
            Complex b = evaluate_tree(*node.children.front(), ctx, pt);
            if (node.exp_den == 1) {
                if (b == Complex(0.0) && node.exp_num < 0) throw PoleError("negative power of zero");
                return ipow(b, node.exp_num);
            }
            if (b == Complex(0.0)) {
                if (node.exp_num < 0) throw PoleError("negative power of zero");
                return 0.0;
            }
            return std::exp(static_cast<double>(node.exp_num) / node.exp_den * std::log(b));
        }
    }
    return 0.0;
}

SymExpr normalize(const ExprNode& node, const ContextPtr& ctx) {
    using K = ExprNode::Kind;
    switch (node.kind) {
        case K::Const: return SymExpr::constant(ctx, node.value);
        case K::X: return SymExpr::x(ctx, node.index);
        case K::Xi: return SymExpr::xi(ctx, node.index);
        case K::Tau: return SymExpr::tau(ctx);
        case K::Theta: return SymExpr::theta_power(ctx, ctx->w);
        case K::Add: {
            SymExpr s(ctx);
            for (const auto& c : node.children) s += normalize(*c, ctx);
            return s;
        }
        case K::Mul: {
            SymExpr s = SymExpr::constant(ctx, 1.0);
            for (const auto& c : node.children) s = s * normalize(*c, ctx);
            return s;
        }
        case K::Neg: return -normalize(*node.children.front(), ctx);
        case K::Pow: {
            SymExpr base = normalize(*node.children.front(), ctx);
            const int p = node.exp_num;
            const int q = node.exp_den;
            if (q == 1 && p >= 0) return base.pow(p);
            if (auto shift = as_shifted_theta(base)) {
                if ((ctx->w * p) % q != 0) {
                    throw ParseError("Theta exponent " + std::to_string(p) + "/" + std::to_string(q) +
                                         " is not a multiple of 1/" + std::to_string(ctx->w),
                                     node.position);
                }
                int k = ctx->w * p / q;
                if (shift->is_zero()) return SymExpr::theta_power(ctx, k);
                return SymExpr::shifted_theta_power(ctx, *shift, k);
            }
            if (q != 1) {
                throw ParseError("fractional powers are only defined for THETA or (THETA + polynomial)",
                                 node.position);
            }
            try {
                return base.pow(p);
            } catch (const InvalidArgument& e) {
                throw ParseError(e.what(), node.position);
            }
        }
    }
    return SymExpr(ctx);
}

SymExpr parse_expr(std::string_view text, const ContextPtr& ctx) {
    auto tree = parse_tree(text, ctx->n);
    return normalize(*tree, ctx);
}

namespace {

Poly to_poly(const ExprNode& node, int n) {
    using K = ExprNode::Kind;
    switch (node.kind) {
        case K::Const: return Poly::constant(n, node.value);
        case K::X: return Poly::x(n, node.index);
        case K::Xi: return Poly::xi(n, node.index);
        case K::Tau:
        case K::Theta: throw ParseError("tau and THETA are not allowed in a polynomial", node.position);
        case K::Add: {
            Poly s(n);
            for (const auto& c : node.children) s += to_poly(*c, n);
            return s;
        }
        case K::Mul: {
            Poly s = Poly::constant(n, 1.0);
            for (const auto& c : node.children) s = s * to_poly(*c, n);
            return s;
        }
        case K::Neg: return -to_poly(*node.children.front(), n);
        case K::Pow: {
            Poly b = to_poly(*node.children.front(), n);
            if (node.exp_den == 1 && node.exp_num >= 0) return b.pow(node.exp_num);
            if (node.exp_den == 1 && b.is_constant() && b.constant_term() != Complex(0.0)) {
                return Poly::constant(n, ipow(b.constant_term(), node.exp_num));
            }
            throw ParseError("only non-negative integer powers are allowed in a polynomial", node.position);
        }
    }
    return Poly(n);
}

}  // namespace

Poly parse_poly(std::string_view text, int n) {
    auto tree = parse_tree(text, n);
    return to_poly(*tree, n);
}

}  // namespace volterra

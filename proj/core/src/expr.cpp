#include "gauge/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

namespace gauge {

ParseError::ParseError(std::size_t column, const std::string& message)
    : std::runtime_error("syntax error at column " + std::to_string(column) + ": " + message), column_(column) {}

EvalError::EvalError(std::string subexpression, const std::string& message)
    : std::domain_error(message + " in '" + subexpression + "'"), subexpression_(std::move(subexpression)) {}

enum class NodeKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call, Ite };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs, Min, Max };

struct ExprNode {
    NodeKind kind;
    Rational number;       // Number literal, or the threshold of Ite
    double number_value = 0.0;
    std::size_t var = 0;   // Var, Ite
    Func func = Func::Sin; // Call
    std::vector<std::shared_ptr<const ExprNode>> args;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

const char* func_name(Func f) {
    switch (f) {
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sqrt: return "sqrt";
        case Func::Abs: return "abs";
        case Func::Min: return "min";
        case Func::Max: return "max";
    }
    return "?";
}

std::size_t func_arity(Func f) { return f == Func::Min || f == Func::Max ? 2 : 1; }

std::optional<Func> lookup_func(std::string_view name) {
    for (Func f : {Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt, Func::Abs, Func::Min, Func::Max})
        if (name == func_name(f)) return f;
    return std::nullopt;
}

std::optional<std::size_t> lookup_var(std::string_view name) {
    if (name == "x") return 0;
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9')
        return static_cast<std::size_t>(name[1] - '1');
    return std::nullopt;
}

std::string var_name(std::size_t i) { return i == 0 ? "x" : "x" + std::to_string(i + 1); }

NodePtr make_number(const Rational& r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = NodeKind::Number;
    n->number = r;
    n->number_value = r.to_double();
    return n;
}

NodePtr make_node(NodeKind kind, std::vector<NodePtr> args) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->args = std::move(args);
    return n;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Less, End };

struct Token {
    Tok kind;
    std::string text;
    std::size_t column;  // 1-based
};

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_digit = [&](std::size_t k) { return k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])); };
    while (i < s.size()) {
        const char c = s[i];
        const std::size_t col = i + 1;
        if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
        if (is_digit(i) || (c == '.' && is_digit(i + 1))) {
            std::size_t j = i;
            while (is_digit(j)) ++j;
            bool decimal = false;
            if (j < s.size() && s[j] == '.') {
                decimal = true;
                ++j;
                while (is_digit(j)) ++j;
            }
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (is_digit(k)) {
                    decimal = true;
                    j = k;
                    while (is_digit(j)) ++j;
                }
            }
            // An exponent never absorbs "/q": x^2/2 is (x^2)/2.
            const bool exponent = !out.empty() && out.back().kind == Tok::Caret;
            if (!decimal && !exponent && j < s.size() && s[j] == '/' && is_digit(j + 1)) {
                j += 1;
                while (is_digit(j)) ++j;
            }
            out.push_back({Tok::Number, std::string(s.substr(i, j - i)), col});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), col});
            i = j;
            continue;
        }
        Tok kind;
        switch (c) {
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '^': kind = Tok::Caret; break;
            case '(': kind = Tok::LParen; break;
            case ')': kind = Tok::RParen; break;
            case ',': kind = Tok::Comma; break;
            case '<': kind = Tok::Less; break;
            default: throw ParseError(col, std::string("unexpected character '") + c + "'");
        }
        out.push_back({kind, std::string(1, c), col});
        ++i;
    }
    out.push_back({Tok::End, "", s.size() + 1});
    return out;
}

// ---------------------------------------------------------------------------
// Recursive descent parser

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    NodePtr parse_all() {
        NodePtr e = expr();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    Token take() { return toks_[pos_++]; }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().column, msg); }
    void expect(Tok kind, const char* what) {
        if (peek().kind != kind)
            fail(std::string("expected ") + what + (peek().kind == Tok::End ? " before end of input" : ", found '" + peek().text + "'"));
        ++pos_;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const NodeKind k = take().kind == Tok::Plus ? NodeKind::Add : NodeKind::Sub;
            lhs = make_node(k, {lhs, term()});
        }
        return lhs;
    }

    NodePtr term() {
        NodePtr lhs = factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const NodeKind k = take().kind == Tok::Star ? NodeKind::Mul : NodeKind::Div;
            lhs = make_node(k, {lhs, factor()});
        }
        return lhs;
    }

    NodePtr factor() {
        if (peek().kind == Tok::Minus) {
            take();
            return make_node(NodeKind::Neg, {factor()});
        }
        NodePtr base = atom();
        if (peek().kind == Tok::Caret) {
            take();
            base = make_node(NodeKind::Pow, {base, atom()});
        }
        return base;
    }

    Rational number_literal() {
        const Token t = take();
        try {
            return Rational::parse(t.text);
        } catch (const std::exception& e) {
            throw ParseError(t.column, e.what());
        }
    }

    NodePtr atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number: return make_number(number_literal());
            case Tok::LParen: {
                take();
                NodePtr e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident: break;
            case Tok::End: fail("unexpected end of input");
            default: fail("unexpected '" + t.text + "'");
        }
        const Token id = take();
        if (auto v = lookup_var(id.text)) {
            auto n = std::make_shared<ExprNode>();
            n->kind = NodeKind::Var;
            n->var = *v;
            return n;
        }
        if (id.text == "ite") return ite(id);
        auto f = lookup_func(id.text);
        if (!f) throw ParseError(id.column, "unknown identifier '" + id.text + "'");
        expect(Tok::LParen, "'(' after function name");
        std::vector<NodePtr> args;
        if (peek().kind != Tok::RParen) {
            args.push_back(expr());
            while (peek().kind == Tok::Comma) {
                take();
                args.push_back(expr());
            }
        }
        expect(Tok::RParen, "')'");
        if (args.size() != func_arity(*f))
            throw ParseError(id.column, std::string(func_name(*f)) + " expects " + std::to_string(func_arity(*f)) +
                                            " argument(s), got " + std::to_string(args.size()));
        auto n = std::make_shared<ExprNode>();
        n->kind = NodeKind::Call;
        n->func = *f;
        n->args = std::move(args);
        return n;
    }

    NodePtr ite(const Token& id) {
        expect(Tok::LParen, "'(' after ite");
        if (peek().kind != Tok::Ident || !lookup_var(peek().text)) fail("ite condition must start with a variable");
        const std::size_t var = *lookup_var(take().text);
        expect(Tok::Less, "'<' in ite condition");
        bool negative = false;
        if (peek().kind == Tok::Minus) {
            take();
            negative = true;
        }
        if (peek().kind != Tok::Number) fail("ite threshold must be a number");
        Rational c = number_literal();
        if (negative) c = -c;
        expect(Tok::Comma, "','");
        NodePtr a = expr();
        expect(Tok::Comma, "','");
        NodePtr b = expr();
        if (peek().kind != Tok::RParen) throw ParseError(peek().kind == Tok::Comma ? id.column : peek().column,
                                                         peek().kind == Tok::Comma ? "ite expects 3 arguments" : "expected ')'");
        take();
        auto n = std::make_shared<ExprNode>();
        n->kind = NodeKind::Ite;
        n->var = var;
        n->number = c;
        n->number_value = c.to_double();
        n->args = {a, b};
        return n;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printing and evaluation

std::string print(const ExprNode& n) {
    auto bin = [&](const char* op) { return "(" + print(*n.args[0]) + " " + op + " " + print(*n.args[1]) + ")"; };
    switch (n.kind) {
        case NodeKind::Number:
            return n.number.sign() < 0 ? "(-" + abs(n.number).str() + ")" : n.number.str();
        case NodeKind::Var: return var_name(n.var);
        case NodeKind::Neg: return "(-" + print(*n.args[0]) + ")";
        case NodeKind::Add: return bin("+");
        case NodeKind::Sub: return bin("-");
        case NodeKind::Mul: return bin("*");
        case NodeKind::Div: return bin("/");
        case NodeKind::Pow: return bin("^");
        case NodeKind::Call: {
            std::string s = std::string(func_name(n.func)) + "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) s += (i ? ", " : "") + print(*n.args[i]);
            return s + ")";
        }
        case NodeKind::Ite: {
            const std::string c = n.number.sign() < 0 ? "-" + abs(n.number).str() : n.number.str();
            return "ite(" + var_name(n.var) + " < " + c + ", " + print(*n.args[0]) + ", " + print(*n.args[1]) + ")";
        }
    }
    return "?";
}

[[noreturn]] void eval_fail(const ExprNode& n, const std::string& msg) { throw EvalError(print(n), msg); }

double checked(const ExprNode& n, double v) {
    if (!std::isfinite(v)) eval_fail(n, "non-finite result");
    return v;
}

bool is_integer_valued(double e) { return std::abs(e) < 0x1p53 && e == std::nearbyint(e); }

double eval_node(const ExprNode& n, std::span<const double> x) {
    switch (n.kind) {
        case NodeKind::Number: return n.number_value;
        case NodeKind::Var:
            if (n.var >= x.size()) eval_fail(n, "variable outside the point's dimension");
            return x[n.var];
        case NodeKind::Neg: return -eval_node(*n.args[0], x);
        case NodeKind::Add: return checked(n, eval_node(*n.args[0], x) + eval_node(*n.args[1], x));
        case NodeKind::Sub: return checked(n, eval_node(*n.args[0], x) - eval_node(*n.args[1], x));
        case NodeKind::Mul: return checked(n, eval_node(*n.args[0], x) * eval_node(*n.args[1], x));
        case NodeKind::Div: {
            const double a = eval_node(*n.args[0], x);
            const double b = eval_node(*n.args[1], x);
            if (b == 0.0) eval_fail(n, "division by zero");
            return checked(n, a / b);
        }
        case NodeKind::Pow: {
            const double a = eval_node(*n.args[0], x);
            const double b = eval_node(*n.args[1], x);
            if (!is_integer_valued(b)) {
                if (a < 0.0 || (a == 0.0 && b < 0.0)) eval_fail(n, "non-integer power of a non-positive base");
            } else if (a == 0.0 && b < 0.0) {
                eval_fail(n, "division by zero");
            }
            return checked(n, std::pow(a, b));
        }
        case NodeKind::Call: {
            const double a = eval_node(*n.args[0], x);
            switch (n.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: return checked(n, std::exp(a));
                case Func::Log:
                    if (!(a > 0.0)) eval_fail(n, "log of a non-positive number");
                    return std::log(a);
                case Func::Sqrt:
                    if (a < 0.0) eval_fail(n, "sqrt of a negative number");
                    return std::sqrt(a);
                case Func::Abs: return std::abs(a);
                case Func::Min: return std::min(a, eval_node(*n.args[1], x));
                case Func::Max: return std::max(a, eval_node(*n.args[1], x));
            }
            break;
        }
        case NodeKind::Ite:
            if (n.var >= x.size()) eval_fail(n, "variable outside the point's dimension");
            return x[n.var] < n.number_value ? eval_node(*n.args[0], x) : eval_node(*n.args[1], x);
    }
    eval_fail(n, "malformed expression");
}

std::optional<Rational> exact_node(const ExprNode& n, std::span<const Rational> x) {
    auto arg = [&](std::size_t i) { return exact_node(*n.args[i], x); };
    switch (n.kind) {
        case NodeKind::Number: return n.number;
        case NodeKind::Var:
            if (n.var >= x.size()) return std::nullopt;
            return x[n.var];
        case NodeKind::Neg: {
            auto a = arg(0);
            if (!a) return std::nullopt;
            return -*a;
        }
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div: {
            auto a = arg(0), b = arg(1);
            if (!a || !b) return std::nullopt;
            if (n.kind == NodeKind::Add) return *a + *b;
            if (n.kind == NodeKind::Sub) return *a - *b;
            if (n.kind == NodeKind::Mul) return *a * *b;
            if (b->sign() == 0) return std::nullopt;
            return *a / *b;
        }
        case NodeKind::Pow: {
            auto a = arg(0), b = arg(1);
            if (!a || !b || !b->is_integer()) return std::nullopt;
            const mpz_class& e = b->raw().get_num();
            if (abs(e) > 64) return std::nullopt;
            long k = e.get_si();
            if (k < 0 && a->sign() == 0) return std::nullopt;
            Rational r(1);
            for (long i = 0; i < std::labs(k); ++i) r *= *a;
            return k < 0 ? Rational(1) / r : r;
        }
        case NodeKind::Call: {
            if (n.func != Func::Abs && n.func != Func::Min && n.func != Func::Max) return std::nullopt;
            auto a = arg(0);
            if (!a) return std::nullopt;
            if (n.func == Func::Abs) return abs(*a);
            auto b = arg(1);
            if (!b) return std::nullopt;
            return n.func == Func::Min ? std::min(*a, *b) : std::max(*a, *b);
        }
        case NodeKind::Ite:
            if (n.var >= x.size()) return std::nullopt;
            return x[n.var] < n.number ? arg(0) : arg(1);
    }
    return std::nullopt;
}

std::size_t node_dimension(const ExprNode& n) {
    std::size_t d = (n.kind == NodeKind::Var || n.kind == NodeKind::Ite) ? n.var + 1 : 0;
    for (const auto& a : n.args) d = std::max(d, node_dimension(*a));
    return d;
}

}  // namespace

Expr Expr::parse(std::string_view text) {
    Parser p(lex(text));
    return Expr(p.parse_all());
}

Expr Expr::constant(const Rational& value) {
    if (value.sign() < 0) return Expr(make_node(NodeKind::Neg, {make_number(-value)}));
    return Expr(make_number(value));
}

double Expr::eval(std::span<const double> x) const { return eval_node(*root_, x); }

std::optional<Rational> Expr::eval_exact(std::span<const Rational> x) const { return exact_node(*root_, x); }

std::string Expr::str() const { return print(*root_); }

std::size_t Expr::dimension() const { return node_dimension(*root_); }

}  // namespace gauge

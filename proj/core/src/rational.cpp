#include "gauge/rational.hpp"

#include <cctype>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace gauge {

Rational::Rational(std::int64_t n) : value_(static_cast<long>(n)) {}

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    value_ = mpq_class(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
    value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value)) { value_.canonicalize(); }

Rational& Rational::operator/=(const Rational& o) {
    if (o.sign() == 0) throw std::domain_error("rational division by zero");
    value_ /= o.value_;
    return *this;
}

namespace {

mpz_class parse_integer(std::string_view digits, std::string_view whole) {
    if (digits.empty()) throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    for (char c : digits)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("malformed rational '" + std::string(whole) + "'");
    return mpz_class(std::string(digits), 10);
}

}  // namespace

Rational Rational::parse(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty()) throw std::invalid_argument("malformed rational '" + std::string(text) + "'");

    mpq_class value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        mpz_class num = parse_integer(s.substr(0, slash), text);
        mpz_class den = parse_integer(s.substr(slash + 1), text);
        if (den == 0) throw std::domain_error("rational with zero denominator: '" + std::string(text) + "'");
        value = mpq_class(num, den);
    } else {
        long exponent = 0;
        if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
            std::string_view exp_text = s.substr(e + 1);
            bool exp_negative = false;
            if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
                exp_negative = exp_text.front() == '-';
                exp_text.remove_prefix(1);
            }
            exponent = parse_integer(exp_text, text).get_si();
            if (exp_negative) exponent = -exponent;
            s = s.substr(0, e);
        }
        std::string_view int_part = s;
        std::string_view frac_part;
        if (auto dot = s.find('.'); dot != std::string_view::npos) {
            int_part = s.substr(0, dot);
            frac_part = s.substr(dot + 1);
        }
        if (int_part.empty() && frac_part.empty())
            throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        std::string digits = std::string(int_part) + std::string(frac_part);
        mpz_class num = parse_integer(digits, text);
        mpz_class ten_pow;
        long shift = exponent - static_cast<long>(frac_part.size());
        mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
        value = shift >= 0 ? mpq_class(num * ten_pow) : mpq_class(num, ten_pow);
    }
    value.canonicalize();
    if (negative) value = -value;
    return Rational(value);
}

Rational Rational::from_double(double x) {
    if (!std::isfinite(x)) throw std::domain_error("cannot convert a non-finite double to a rational");
    return Rational(mpq_class(x));
}

Rational Rational::pow2(int exponent) {
    mpz_class p = 1;
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(std::abs(exponent)));
    return exponent >= 0 ? Rational(mpq_class(p)) : Rational(mpq_class(mpz_class(1), p));
}

std::string Rational::str() const {
    if (is_integer()) return value_.get_num().get_str();
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational midpoint(const Rational& a, const Rational& b) { return (a + b) * Rational(1, 2); }

Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace gauge

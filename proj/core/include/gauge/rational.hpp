#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace gauge {

/// Exact rational number. Box endpoints are kept exact so that partition
/// checks never depend on floating point rounding.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t n);  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t num, std::int64_t den);
    explicit Rational(mpq_class value);

    /// Parses "p/q", an integer, or a decimal such as "-0.125" or "1e-3".
    static Rational parse(std::string_view text);
    /// Exact conversion: every finite double is a dyadic rational.
    static Rational from_double(double x);
    static Rational pow2(int exponent);

    [[nodiscard]] double to_double() const { return value_.get_d(); }
    /// Canonical text: "p/q", or "p" when the denominator is one.
    [[nodiscard]] std::string str() const;
    [[nodiscard]] const mpq_class& raw() const { return value_; }
    [[nodiscard]] int sign() const { return sgn(value_); }
    [[nodiscard]] bool is_integer() const { return value_.get_den() == 1; }

    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.value_, b.value_) == 0; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

private:
    mpq_class value_{0};
};

Rational midpoint(const Rational& a, const Rational& b);
Rational abs(const Rational& a);

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace gauge

#pragma once

// Exact rational numbers over arbitrary-precision integers.
//
// Values are always kept in canonical form: the denominator is positive,
// numerator and denominator are coprime, and zero is 0/1.  Repeated
// elimination on 5x5 systems with decimal coefficients easily overflows
// 64-bit numerators, so the integers are GMP-backed.

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace mwp {

class Rational {
public:
    Rational() = default;
    Rational(std::int64_t value);  // NOLINT: implicit from integers is intended
    Rational(const mpz_class& numerator, const mpz_class& denominator);
    explicit Rational(mpq_class value);

    static Rational from_integers(std::int64_t numerator, std::int64_t denominator);

    // Parses "123", "-4.25", ".5", "1/3" or "-7/20" exactly.  Returns nullopt
    // on anything else (including a zero denominator).
    static std::optional<Rational> parse(std::string_view text);

    // Exact value of a finite double, e.g. 0.1 -> 3602879701896397/2^55.
    static Rational from_double_exact(double value);

    // Shortest round-trip decimal of a double, read back exactly: 0.1 -> 1/10.
    static Rational from_double_decimal(double value);

    mpz_class numerator() const { return value_.get_num(); }
    mpz_class denominator() const { return value_.get_den(); }
    const mpq_class& raw() const { return value_; }

    bool is_zero() const { return sgn(value_) == 0; }
    bool is_integer() const { return value_.get_den() == 1; }
    int sign() const { return sgn(value_); }

    // True when the denominator has no prime factors other than 2 and 5.
    bool has_terminating_decimal() const;

    // Decimal text when the expansion terminates ("0.35", "-12", "200"),
    // otherwise "p/q" ("1/3", "-2/7").
    std::string to_string() const;

    double to_double() const { return value_.get_d(); }

    Rational abs() const;
    Rational reciprocal() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& rhs);
    Rational& operator-=(const Rational& rhs);
    Rational& operator*=(const Rational& rhs);
    Rational& operator/=(const Rational& rhs);

    friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
    friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
    friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
    friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        const int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

private:
    mpq_class value_{0};
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace mwp

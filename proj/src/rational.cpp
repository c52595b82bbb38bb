#include "mwp/rational.hpp"

#include <cctype>
#include <climits>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "mwp/errors.hpp"

namespace mwp {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

mpz_class pow10(std::size_t k) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, k);
    return r;
}

}  // namespace

Rational::Rational(std::int64_t value) {
    // mpq_class has no int64 constructor on every platform; go through text
    // only when the value does not fit a long.
    if (value >= LONG_MIN && value <= LONG_MAX) {
        value_ = mpq_class(static_cast<long>(value));
    } else {
        value_ = mpq_class(mpz_class(std::to_string(value)));
    }
}

Rational::Rational(const mpz_class& numerator, const mpz_class& denominator) {
    if (denominator == 0) throw DivisionByZero("rational with zero denominator");
    value_ = mpq_class(numerator, denominator);
    value_.canonicalize();
}

Rational::Rational(mpq_class value) : value_(std::move(value)) {
    if (value_.get_den() == 0) throw DivisionByZero("rational with zero denominator");
    value_.canonicalize();
}

Rational Rational::from_integers(std::int64_t numerator, std::int64_t denominator) {
    return Rational(mpz_class(std::to_string(numerator)), mpz_class(std::to_string(denominator)));
}

std::optional<Rational> Rational::parse(std::string_view text) {
    bool negative = false;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        negative = text.front() == '-';
        text.remove_prefix(1);
    }
    if (text.empty()) return std::nullopt;

    Rational result;
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        auto num = text.substr(0, slash);
        auto den = text.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        const mpz_class d(std::string(den), 10);
        if (d == 0) return std::nullopt;
        const mpz_class n(std::string(num), 10);
        result = Rational(n, d);
    } else {
        auto dot = text.find('.');
        std::string_view whole = text.substr(0, dot);
        std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
        if (whole.empty() && frac.empty()) return std::nullopt;
        if (!whole.empty() && !all_digits(whole)) return std::nullopt;
        if (dot != std::string_view::npos && !frac.empty() && !all_digits(frac)) return std::nullopt;
        std::string digits = std::string(whole) + std::string(frac);
        if (digits.empty()) return std::nullopt;
        result = Rational(mpz_class(digits, 10), pow10(frac.size()));
    }
    return negative ? -result : result;
}

Rational Rational::from_double_exact(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite double");
    return Rational(mpq_class(value));
}

Rational Rational::from_double_decimal(double value) {
    if (!std::isfinite(value)) throw std::invalid_argument("non-finite double");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
    if (ec != std::errc{}) return from_double_exact(value);
    return *parse(std::string_view(buf, end - buf));
}

bool Rational::has_terminating_decimal() const {
    mpz_class d = value_.get_den();
    while (mpz_divisible_ui_p(d.get_mpz_t(), 2)) d /= 2;
    while (mpz_divisible_ui_p(d.get_mpz_t(), 5)) d /= 5;
    return d == 1;
}

std::string Rational::to_string() const {
    const mpz_class& num = value_.get_num();
    const mpz_class& den = value_.get_den();
    if (den == 1) return num.get_str();
    if (!has_terminating_decimal()) return num.get_str() + "/" + den.get_str();

    // den = 2^a 5^b, so num/den = num * 10^k / den / 10^k with k = max(a, b).
    std::size_t k = 0;
    mpz_class scale = 1;
    while (!mpz_divisible_p(scale.get_mpz_t(), den.get_mpz_t())) {
        scale *= 10;
        ++k;
    }
    mpz_class scaled = ::abs(num) * (scale / den);
    std::string digits = scaled.get_str();
    if (digits.size() <= k) digits.insert(0, k - digits.size() + 1, '0');
    std::string out = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
    return sgn(num) < 0 ? "-" + out : out;
}

Rational Rational::abs() const {
    Rational r;
    r.value_ = ::abs(value_);
    return r;
}

Rational Rational::reciprocal() const {
    if (is_zero()) throw DivisionByZero("reciprocal of zero");
    Rational r;
    r.value_ = 1 / value_;
    return r;
}

Rational Rational::operator-() const {
    Rational r;
    r.value_ = -value_;
    return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
    value_ += rhs.value_;
    return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
    value_ -= rhs.value_;
    return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
    value_ *= rhs.value_;
    return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
    if (rhs.is_zero()) throw DivisionByZero();
    value_ /= rhs.value_;
    return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

}  // namespace mwp

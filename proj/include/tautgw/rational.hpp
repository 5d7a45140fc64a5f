#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace tautgw {

/// Exact rational number in lowest terms with a positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(long n) : value_(n) {}
    Rational(int n) : value_(n) {}
    Rational(long n, long d);
    explicit Rational(mpq_class v) : value_(std::move(v)) { value_.canonicalize(); }

    /// Parses "p/q" or "p"; throws std::invalid_argument on malformed input.
    static Rational parse(std::string_view text);

    const mpq_class& raw() const { return value_; }
    mpz_class numerator() const { return value_.get_num(); }
    mpz_class denominator() const { return value_.get_den(); }

    bool is_zero() const { return sgn(value_) == 0; }
    int sign() const { return sgn(value_); }
    bool is_integer() const { return value_.get_den() == 1; }

    /// Always "p/q", including "0/1" and "5/1".
    std::string str() const;

    Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
    Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
    Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
    friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.value_)); }

    friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        int c = cmp(a.value_, b.value_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    mpq_class value_{0};
};

Rational factorial(int n);
Rational binomial(int n, int k);

} // namespace tautgw

#include "tautgw/rational.hpp"

#include <stdexcept>

namespace tautgw {

Rational::Rational(long n, long d)
{
    if (d == 0)
        throw std::domain_error("rational with zero denominator");
    value_ = mpq_class(n, d);
    value_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o)
{
    if (o.is_zero())
        throw std::domain_error("division by zero rational");
    value_ /= o.value_;
    return *this;
}

Rational Rational::parse(std::string_view text)
{
    auto valid_int = [](std::string_view s) {
        if (!s.empty() && (s.front() == '-' || s.front() == '+'))
            s.remove_prefix(1);
        if (s.empty())
            return false;
        for (char c : s)
            if (c < '0' || c > '9')
                return false;
        return true;
    };
    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den) || den.front() == '-')
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    std::string n(num);
    if (n.front() == '+')
        n.erase(0, 1);
    mpz_class zn(n, 10);
    mpz_class zd(std::string(den), 10);
    if (zd == 0)
        throw std::invalid_argument("rational with zero denominator '" + std::string(text) + "'");
    return Rational(mpq_class(zn, zd));
}

std::string Rational::str() const
{
    return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

Rational factorial(int n)
{
    if (n < 0)
        throw std::domain_error("factorial of a negative integer");
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
    return Rational(mpq_class(f));
}

Rational binomial(int n, int k)
{
    if (k < 0 || n < 0 || k > n)
        return Rational(0);
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(mpq_class(b));
}

} // namespace tautgw

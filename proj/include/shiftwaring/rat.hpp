#pragma once

// Exact rational helpers on top of GMP's mpq_class.

#include <gmpxx.h>

#include <cstdint>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftwaring {

using Int = mpz_class;
using Rat = mpq_class;

class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Rat make_rat(const Int &num, const Int &den)
{
    if (den == 0) {
        throw std::domain_error("zero denominator");
    }
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Int pow_int(const Int &base, unsigned long e)
{
    Int r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Rat pow_int(const Rat &base, unsigned long e)
{
    return make_rat(pow_int(Int(base.get_num()), e), pow_int(Int(base.get_den()), e));
}

inline Int floor_rat(const Rat &q)
{
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Int ceil_rat(const Rat &q)
{
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

// floor(n^{1/k}) for n >= 0.
inline Int iroot_floor(const Int &n, unsigned long k)
{
    if (n < 0) {
        throw std::domain_error("iroot_floor of negative integer");
    }
    Int r;
    mpz_root(r.get_mpz_t(), n.get_mpz_t(), k);
    return r;
}

inline Int isqrt_floor(const Int &n)
{
    return iroot_floor(n, 2);
}

// Smallest multiple of 1/granularity that is >= a^{p/q}; a >= 0, q >= 1.
inline Rat rational_power_upper(const Rat &a, unsigned long p, unsigned long q, unsigned long granularity = 64)
{
    if (a < 0 || q == 0) {
        throw std::domain_error("rational_power_upper: bad arguments");
    }
    const Rat target = pow_int(a, p);
    // n/g >= target^{1/q}  <=>  n^q >= target * g^q
    const Rat scaled = target * Rat(pow_int(Int(granularity), q));
    Int n = iroot_floor(ceil_rat(scaled), q);
    while (Rat(pow_int(n, q)) < scaled) {
        ++n;
    }
    return make_rat(n, Int(granularity));
}

inline std::string to_string(const Rat &q)
{
    return q.get_str();
}

inline std::string to_string(const Int &z)
{
    return z.get_str();
}

// Decimal rendering truncated toward zero to `digits` fractional digits.
enum class Rounding { TowardZero, Down, Up };

// At most `digits` fractional digits, trailing zeros dropped.
inline std::string to_decimal(const Rat &q, unsigned digits = 12, Rounding mode = Rounding::TowardZero)
{
    const Int scale = pow_int(Int(10), digits);
    const Rat scaled_q = q * Rat(scale);
    Int scaled;
    switch (mode) {
    case Rounding::Down:
        scaled = floor_rat(scaled_q);
        break;
    case Rounding::Up:
        scaled = ceil_rat(scaled_q);
        break;
    case Rounding::TowardZero:
        scaled = q < 0 ? ceil_rat(scaled_q) : floor_rat(scaled_q);
        break;
    }
    const bool neg = scaled < 0;
    const Int a = neg ? Int(-scaled) : scaled;
    std::string body = Int(a / scale).get_str();
    if (digits > 0) {
        std::string frac = Int(a % scale).get_str();
        frac.insert(0, digits - frac.size(), '0');
        while (!frac.empty() && frac.back() == '0') {
            frac.pop_back();
        }
        if (!frac.empty()) {
            body += "." + frac;
        }
    }
    return (neg ? "-" : "") + body;
}

// Accepts "p", "p/q", and finite decimals "[+-]d[.d][e[+-]d]".
inline Rat parse_rational(std::string_view text)
{
    static const std::regex frac_re(R"(^\s*([+-]?\d+)\s*/\s*(\d+)\s*$)");
    static const std::regex dec_re(R"(^\s*([+-]?)(\d*)(?:\.(\d*))?(?:[eE]([+-]?\d+))?\s*$)");
    const std::string s(text);
    std::smatch m;
    if (std::regex_match(s, m, frac_re)) {
        const Int den(m[2].str(), 10);
        if (den == 0) {
            throw parse_error("zero denominator in '" + s + "'");
        }
        std::string num = m[1].str();
        if (!num.empty() && num.front() == '+') {
            num.erase(0, 1);
        }
        return make_rat(Int(num, 10), den);
    }
    if (std::regex_match(s, m, dec_re)) {
        const std::string ip = m[2].str();
        const std::string fp = m[3].matched ? m[3].str() : std::string();
        if (ip.empty() && fp.empty()) {
            throw parse_error("malformed number '" + s + "'");
        }
        long exp10 = 0;
        if (m[4].matched) {
            const std::string es = m[4].str();
            if (es.size() > 6) {
                throw parse_error("exponent out of range in '" + s + "'");
            }
            exp10 = std::stol(es);
        }
        Int mant((ip.empty() ? std::string("0") : ip) + fp, 10);
        exp10 -= static_cast<long>(fp.size());
        Rat r(mant);
        if (exp10 >= 0) {
            r *= Rat(pow_int(Int(10), static_cast<unsigned long>(exp10)));
        } else {
            r /= Rat(pow_int(Int(10), static_cast<unsigned long>(-exp10)));
        }
        r.canonicalize();
        return m[1].str() == "-" ? Rat(-r) : r;
    }
    throw parse_error("malformed number '" + s + "'");
}

inline Rat rat_abs(const Rat &q)
{
    return q < 0 ? Rat(-q) : q;
}

inline Int binomial(unsigned long n, unsigned long k)
{
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

inline std::int64_t to_i64(const Int &z)
{
    if (!z.fits_slong_p()) {
        throw std::overflow_error("integer does not fit in 64 bits: " + z.get_str());
    }
    return z.get_si();
}

} // namespace shiftwaring

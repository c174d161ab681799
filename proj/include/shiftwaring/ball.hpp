#pragma once

// Midpoint-radius ("ball") enclosures of real numbers over dyadic rationals.
//
// A Ball {mid, rad} stands for every real x with |x - mid| <= rad. All
// operations are outward rounded: the result encloses every value obtained by
// applying the exact operation to points of the operands. Midpoints are
// rounded to the ball's working precision; radii are kept to a short
// mantissa and always rounded up.

#include "rat.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>

namespace shiftwaring {

enum class TriBool { False, True, Unknown };

inline const char *to_string(TriBool t)
{
    switch (t) {
    case TriBool::True:
        return "true";
    case TriBool::False:
        return "false";
    default:
        return "unknown";
    }
}

inline TriBool tri_and(TriBool a, TriBool b)
{
    if (a == TriBool::False || b == TriBool::False) {
        return TriBool::False;
    }
    if (a == TriBool::True && b == TriBool::True) {
        return TriBool::True;
    }
    return TriBool::Unknown;
}

inline TriBool tri_not(TriBool a)
{
    if (a == TriBool::Unknown) {
        return a;
    }
    return a == TriBool::True ? TriBool::False : TriBool::True;
}

class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// mant * 2^exp, exact.
struct Dyadic {
    Int mant{0};
    std::int64_t exp{0};

    Dyadic() = default;
    Dyadic(Int m, std::int64_t e) : mant(std::move(m)), exp(e) { normalize(); }
    explicit Dyadic(long v) : mant(v), exp(0) { normalize(); }

    void normalize()
    {
        if (mant == 0) {
            exp = 0;
            return;
        }
        const auto tz = mpz_scan1(mant.get_mpz_t(), 0);
        if (tz > 0) {
            mant >>= tz;
            exp += static_cast<std::int64_t>(tz);
        }
    }

    [[nodiscard]] bool is_zero() const { return mant == 0; }
    [[nodiscard]] int sign() const { return sgn(mant); }

    // Exponent of the leading bit: 2^msb <= |x| < 2^(msb+1). Undefined for 0.
    [[nodiscard]] std::int64_t msb() const
    {
        return static_cast<std::int64_t>(mpz_sizeinbase(mant.get_mpz_t(), 2)) - 1 + exp;
    }

    [[nodiscard]] Rat to_rat() const
    {
        if (exp >= 0) {
            return Rat(Int(mant << static_cast<mp_bitcnt_t>(exp)));
        }
        Int den = 1;
        den <<= static_cast<mp_bitcnt_t>(-exp);
        return make_rat(mant, den);
    }

    [[nodiscard]] double to_double() const { return to_rat().get_d(); }
};

inline Dyadic operator-(const Dyadic &a)
{
    return Dyadic(Int(-a.mant), a.exp);
}

inline Dyadic abs(const Dyadic &a)
{
    return Dyadic(Int(a.mant < 0 ? Int(-a.mant) : a.mant), a.exp);
}

inline Dyadic operator+(const Dyadic &a, const Dyadic &b)
{
    if (a.is_zero()) {
        return b;
    }
    if (b.is_zero()) {
        return a;
    }
    const auto e = std::min(a.exp, b.exp);
    Int x = a.mant << static_cast<mp_bitcnt_t>(a.exp - e);
    Int y = b.mant << static_cast<mp_bitcnt_t>(b.exp - e);
    return Dyadic(Int(x + y), e);
}

inline Dyadic operator-(const Dyadic &a, const Dyadic &b)
{
    return a + (-b);
}

inline Dyadic operator*(const Dyadic &a, const Dyadic &b)
{
    return Dyadic(Int(a.mant * b.mant), a.exp + b.exp);
}

inline int cmp(const Dyadic &a, const Dyadic &b)
{
    const Dyadic d = a - b;
    return d.sign();
}

inline bool operator<(const Dyadic &a, const Dyadic &b) { return cmp(a, b) < 0; }
inline bool operator<=(const Dyadic &a, const Dyadic &b) { return cmp(a, b) <= 0; }
inline bool operator==(const Dyadic &a, const Dyadic &b) { return a.mant == b.mant && a.exp == b.exp; }

inline Dyadic dyadic_max(const Dyadic &a, const Dyadic &b) { return a < b ? b : a; }
inline Dyadic dyadic_min(const Dyadic &a, const Dyadic &b) { return a < b ? a : b; }

// Truncate to multiples of 2^cutoff, rounding toward -inf or +inf.
inline Dyadic round_to_cutoff(const Dyadic &a, std::int64_t cutoff, bool up)
{
    if (a.is_zero() || a.exp >= cutoff) {
        return a;
    }
    const auto shift = static_cast<mp_bitcnt_t>(cutoff - a.exp);
    Int q;
    if (up) {
        mpz_cdiv_q_2exp(q.get_mpz_t(), a.mant.get_mpz_t(), shift);
    } else {
        mpz_fdiv_q_2exp(q.get_mpz_t(), a.mant.get_mpz_t(), shift);
    }
    return Dyadic(q, cutoff);
}

// Keep at most `bits` significant bits.
inline Dyadic round_bits(const Dyadic &a, std::int64_t bits, bool up)
{
    if (a.is_zero()) {
        return a;
    }
    return round_to_cutoff(a, a.msb() - bits + 1, up);
}

// Dyadic bounds of an exact rational at resolution 2^cutoff.
inline Dyadic rat_floor_dyadic(const Rat &q, std::int64_t cutoff)
{
    Int num = q.get_num();
    Int den = q.get_den();
    if (cutoff < 0) {
        num <<= static_cast<mp_bitcnt_t>(-cutoff);
    } else {
        den <<= static_cast<mp_bitcnt_t>(cutoff);
    }
    Int f;
    mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    return Dyadic(f, cutoff);
}

inline Dyadic rat_ceil_dyadic(const Rat &q, std::int64_t cutoff)
{
    return -rat_floor_dyadic(Rat(-q), cutoff);
}

// floor(log2|q|) for q != 0.
inline std::int64_t rat_ilog2(const Rat &q)
{
    const Rat a = rat_abs(q);
    auto l = static_cast<std::int64_t>(mpz_sizeinbase(a.get_num_mpz_t(), 2)) -
             static_cast<std::int64_t>(mpz_sizeinbase(a.get_den_mpz_t(), 2));
    // 2^(l-1) < a < 2^(l+1); settle which side of 2^l we are on.
    const Rat pivot = l >= 0 ? Rat(Int(Int(1) << static_cast<mp_bitcnt_t>(l)))
                             : make_rat(Int(1), Int(Int(1) << static_cast<mp_bitcnt_t>(-l)));
    return a >= pivot ? l : l - 1;
}

class Ball {
public:
    static constexpr std::int64_t default_prec = 128;
    static constexpr std::int64_t rad_bits = 30;

    Ball() = default;

    Ball(Dyadic mid, Dyadic rad, std::int64_t prec) : mid_(std::move(mid)), rad_(std::move(rad)), prec_(prec)
    {
        if (prec_ < 2) {
            throw std::invalid_argument("ball precision must be >= 2");
        }
        if (rad_.sign() < 0) {
            throw std::invalid_argument("ball radius must be non-negative");
        }
        rad_ = round_bits(rad_, rad_bits, true);
        round_mid();
    }

    explicit Ball(const Int &v, std::int64_t prec = default_prec) : Ball(Dyadic(v, 0), Dyadic(), prec) {}
    explicit Ball(long v, std::int64_t prec = default_prec) : Ball(Dyadic(v), Dyadic(), prec) {}

    static Ball from_rat(const Rat &q, std::int64_t prec)
    {
        if (q == 0) {
            return Ball(Dyadic(), Dyadic(), prec);
        }
        const auto cutoff = std::max(rat_ilog2(q) - prec, -prec);
        const Dyadic lo = rat_floor_dyadic(q, cutoff);
        if (lo.to_rat() == q) {
            return Ball(lo, Dyadic(), prec);
        }
        return Ball(lo, Dyadic(Int(1), cutoff), prec);
    }

    // Smallest ball around [lo, hi].
    static Ball from_endpoints(const Dyadic &lo, const Dyadic &hi, std::int64_t prec)
    {
        if (hi < lo) {
            throw std::invalid_argument("from_endpoints: hi < lo");
        }
        const Dyadic half(Int(1), -1);
        return Ball((lo + hi) * half, (hi - lo) * half, prec);
    }

    [[nodiscard]] const Dyadic &mid() const { return mid_; }
    [[nodiscard]] const Dyadic &rad() const { return rad_; }
    [[nodiscard]] std::int64_t prec() const { return prec_; }
    [[nodiscard]] Dyadic lower() const { return mid_ - rad_; }
    [[nodiscard]] Dyadic upper() const { return mid_ + rad_; }
    [[nodiscard]] bool is_exact() const { return rad_.is_zero(); }

    [[nodiscard]] bool contains(const Rat &q) const
    {
        return lower().to_rat() <= q && q <= upper().to_rat();
    }

    [[nodiscard]] bool contains_zero() const { return lower().sign() <= 0 && upper().sign() >= 0; }

    [[nodiscard]] Ball with_prec(std::int64_t prec) const { return Ball(mid_, rad_, prec); }

    [[nodiscard]] double mid_double() const { return mid_.to_double(); }

    friend Ball operator+(const Ball &a, const Ball &b)
    {
        return Ball(a.mid_ + b.mid_, a.rad_ + b.rad_, std::max(a.prec_, b.prec_));
    }

    friend Ball operator-(const Ball &a) { return Ball(-a.mid_, a.rad_, a.prec_); }

    friend Ball operator-(const Ball &a, const Ball &b)
    {
        return Ball(a.mid_ - b.mid_, a.rad_ + b.rad_, std::max(a.prec_, b.prec_));
    }

    friend Ball operator*(const Ball &a, const Ball &b)
    {
        const Dyadic rad = abs(a.mid_) * b.rad_ + abs(b.mid_) * a.rad_ + a.rad_ * b.rad_;
        return Ball(a.mid_ * b.mid_, rad, std::max(a.prec_, b.prec_));
    }

    friend std::ostream &operator<<(std::ostream &os, const Ball &b)
    {
        return os << "[" << b.mid_.to_double() << " +/- " << b.rad_.to_double() << "]";
    }

private:
    void round_mid()
    {
        if (mid_.is_zero()) {
            return;
        }
        // Relative 2^-prec for |mid| >= 1, absolute 2^-prec below.
        const auto cutoff = std::max(mid_.msb() - prec_ + 1, -prec_);
        const Dyadic rounded = round_to_cutoff(mid_, cutoff, false);
        if (!(rounded == mid_)) {
            rad_ = round_bits(rad_ + (mid_ - rounded), rad_bits, true);
            mid_ = rounded;
        }
    }

    Dyadic mid_;
    Dyadic rad_;
    std::int64_t prec_{default_prec};
};

inline Ball ball_from_decimal(std::string_view text, std::int64_t prec)
{
    if (prec < 2) {
        throw std::invalid_argument("precision must be >= 2");
    }
    return Ball::from_rat(parse_rational(text), prec);
}

inline Ball abs(const Ball &a)
{
    if (a.contains_zero()) {
        const Dyadic hi = dyadic_max(abs(a.lower()), abs(a.upper()));
        return Ball::from_endpoints(Dyadic(), hi, a.prec());
    }
    return a.mid().sign() < 0 ? -a : a;
}

inline Ball pow_int(const Ball &a, unsigned long j)
{
    Ball result(1L, a.prec());
    Ball base = a;
    while (j > 0) {
        if (j & 1UL) {
            result = result * base;
        }
        j >>= 1;
        if (j > 0) {
            base = base * base;
        }
    }
    return result;
}

// Enclosure of 1/x over a ball that excludes zero.
inline Ball inv(const Ball &a)
{
    if (a.contains_zero()) {
        throw domain_error("inv: ball contains zero");
    }
    if (a.mid().sign() < 0) {
        return -inv(-a);
    }
    const Rat lo = a.lower().to_rat();
    const Rat hi = a.upper().to_rat();
    const Rat rlo = 1 / hi;
    const Rat rhi = 1 / lo;
    const auto cutoff = std::max(rat_ilog2(rlo) - a.prec() - 2, -a.prec() - 2);
    return Ball::from_endpoints(rat_floor_dyadic(rlo, cutoff), rat_ceil_dyadic(rhi, cutoff), a.prec());
}

inline Ball operator/(const Ball &a, const Ball &b)
{
    return a * inv(b);
}

namespace detail {

// Dyadic r with r <= v^{1/k} (or >=, when up) at resolution 2^-frac_bits.
inline Dyadic root_bound(const Dyadic &v, unsigned long k, std::int64_t frac_bits, bool up)
{
    // v * 2^{k*frac_bits} = mant * 2^{exp + k*frac_bits}
    const std::int64_t shift = v.exp + static_cast<std::int64_t>(k) * frac_bits;
    Int scaled;
    if (shift >= 0) {
        scaled = v.mant << static_cast<mp_bitcnt_t>(shift);
    } else if (up) {
        mpz_cdiv_q_2exp(scaled.get_mpz_t(), v.mant.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
    } else {
        mpz_fdiv_q_2exp(scaled.get_mpz_t(), v.mant.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
    }
    Int r = iroot_floor(scaled, k);
    if (up && pow_int(r, k) < scaled) {
        ++r;
    }
    return Dyadic(r, -frac_bits);
}

} // namespace detail

// Enclosure of x^{1/k} for a ball of strictly positive reals.
inline Ball root_k(const Ball &a, unsigned long k, std::int64_t prec)
{
    if (k == 0) {
        throw std::invalid_argument("root_k: k must be >= 1");
    }
    if (a.lower().sign() <= 0) {
        throw domain_error("root_k: radicand ball is not strictly positive");
    }
    if (k == 1) {
        return a.with_prec(std::max(prec, a.prec()));
    }
    const Dyadic lo = a.lower();
    const Dyadic hi = a.upper();
    const std::int64_t root_msb = hi.msb() >= 0 ? hi.msb() / static_cast<std::int64_t>(k) : 0;
    const std::int64_t frac_bits = prec - root_msb + 2;
    return Ball::from_endpoints(detail::root_bound(lo, k, frac_bits, false), detail::root_bound(hi, k, frac_bits, true),
                                prec);
}

// Certified strict comparison a < b.
inline TriBool cmp_lt(const Ball &a, const Ball &b)
{
    if (a.upper() < b.lower()) {
        return TriBool::True;
    }
    if (b.upper() <= a.lower()) {
        return TriBool::False;
    }
    return TriBool::Unknown;
}

// Enclosure of two balls' union.
inline Ball hull(const Ball &a, const Ball &b)
{
    return Ball::from_endpoints(dyadic_min(a.lower(), b.lower()), dyadic_max(a.upper(), b.upper()),
                                std::max(a.prec(), b.prec()));
}

// A real number that can be re-evaluated at any precision, with an exact
// rational value when one is known.
struct Real {
    std::optional<Rat> exact;
    std::function<Ball(std::int64_t)> eval;

    static Real of(const Rat &q)
    {
        return Real{q, [q](std::int64_t prec) { return Ball::from_rat(q, prec); }};
    }

    // A fixed enclosure; refinement cannot tighten it.
    static Real of(const Ball &b)
    {
        return Real{std::nullopt, [b](std::int64_t prec) { return b.with_prec(std::max(prec, b.prec())); }};
    }

    // coeff * base^{p/q} for base > 0, exact when p/q is an integer.
    static Real power(const Rat &coeff, const Rat &base, long p, unsigned long q)
    {
        if (base <= 0 || q == 0) {
            throw domain_error("Real::power: base must be positive");
        }
        if (p % static_cast<long>(q) == 0) {
            const long e = p / static_cast<long>(q);
            const Rat pb = pow_int(base, static_cast<unsigned long>(e < 0 ? -e : e));
            return of(coeff * (e < 0 ? Rat(1 / pb) : pb));
        }
        return Real{std::nullopt, [coeff, base, p, q](std::int64_t prec) {
                        const std::int64_t wp = prec + 16;
                        const Rat pb = pow_int(base, static_cast<unsigned long>(p < 0 ? -p : p));
                        Ball r = root_k(Ball::from_rat(pb, wp), q, wp);
                        if (p < 0) {
                            r = inv(r);
                        }
                        return (Ball::from_rat(coeff, wp) * r).with_prec(prec);
                    }};
    }

    [[nodiscard]] Ball at(std::int64_t prec) const { return eval(prec); }
};

inline nlohmann::ordered_json to_json(const Ball &b)
{
    nlohmann::ordered_json j;
    j["mid_mant"] = b.mid().mant.get_str();
    j["mid_exp"] = b.mid().exp;
    j["rad_mant"] = b.rad().mant.get_str();
    j["rad_exp"] = b.rad().exp;
    j["prec"] = b.prec();
    return j;
}

inline Ball ball_from_json(const nlohmann::ordered_json &j)
{
    return Ball(Dyadic(Int(j.at("mid_mant").get<std::string>(), 10), j.at("mid_exp").get<std::int64_t>()),
                Dyadic(Int(j.at("rad_mant").get<std::string>(), 10), j.at("rad_exp").get<std::int64_t>()),
                j.at("prec").get<std::int64_t>());
}

} // namespace shiftwaring

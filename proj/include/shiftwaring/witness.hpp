#pragma once

// The witness family tau_m = s m^k + k m^{k-1} (s - sum theta_i) and the
// diagonal point (tau/s)^{1/k} around which variables are confined.

#include "ball.hpp"
#include "model.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>

namespace shiftwaring {

class undecided_error : public std::runtime_error {
public:
    undecided_error(const std::string &what, std::vector<Int> candidates)
        : std::runtime_error(what), candidates_(std::move(candidates))
    {
    }
    [[nodiscard]] const std::vector<Int> &candidates() const { return candidates_; }

private:
    std::vector<Int> candidates_;
};

struct Precision {
    std::int64_t start{Ball::default_prec};
    std::int64_t cap{4096};
};

struct WitnessTau {
    Int m;
    Rat tau;
    Rat theta_sum;
    Ball center;
};

inline Rat tau_value(const Instance &inst, const Int &m)
{
    const Rat sigma = inst.theta_sum();
    return Rat(inst.s) * Rat(pow_int(m, inst.k)) + Rat(inst.k) * Rat(pow_int(m, inst.k - 1)) * (Rat(inst.s) - sigma);
}

// Enclosure of (tau/s)^{1/k}.
inline Ball diagonal_center(const Instance &inst, const Real &tau, std::int64_t prec)
{
    const std::int64_t wp = prec + 8;
    Ball q;
    if (tau.exact) {
        q = Ball::from_rat(*tau.exact / Rat(inst.s), wp);
    } else {
        q = tau.at(wp) / Ball(static_cast<long>(inst.s), wp);
    }
    return root_k(q, inst.k, prec);
}

inline WitnessTau tau_m(const Instance &inst, const Int &m, std::int64_t prec = Ball::default_prec)
{
    if (m < 1) {
        throw std::invalid_argument("tau_m: m must be >= 1");
    }
    WitnessTau w;
    w.m = m;
    w.tau = tau_value(inst, m);
    w.theta_sum = inst.theta_sum();
    w.center = diagonal_center(inst, Real::of(w.tau), prec);
    return w;
}

struct CenterResult {
    Ball center;
    Int nearest;
};

// The diagonal center and its nearest integer, exact halves rounding down.
inline CenterResult center_m(const Instance &inst, const Real &tau, const Precision &precision = {})
{
    if (tau.exact) {
        if (*tau.exact <= 0) {
            throw std::invalid_argument("center_m: tau must be positive");
        }
        const Rat q = *tau.exact / Rat(inst.s);
        const Int f = iroot_floor(floor_rat(q), inst.k);
        const Rat half = Rat(f) + Rat(1, 2);
        const Int nearest = q <= pow_int(half, inst.k) ? f : Int(f + 1);
        return {diagonal_center(inst, tau, precision.start), nearest};
    }
    if (tau.at(precision.start).upper().sign() <= 0) {
        throw std::invalid_argument("center_m: tau must be positive");
    }
    Int f;
    for (std::int64_t prec = precision.start; prec <= precision.cap; prec *= 2) {
        const Ball tb = tau.at(prec);
        if (tb.lower().sign() <= 0) {
            continue;
        }
        const Ball c = diagonal_center(inst, tau, prec);
        f = floor_rat(c.mid().to_rat());
        const Rat mid_frac = c.mid().to_rat() - Rat(f);
        const Int n = mid_frac <= Rat(1, 2) ? f : Int(f + 1);
        const Ball below = Ball::from_rat(Rat(n) - Rat(1, 2), prec);
        const Ball above = Ball::from_rat(Rat(n) + Rat(1, 2), prec);
        if (cmp_lt(below, c) == TriBool::True && cmp_lt(above, c) == TriBool::False) {
            return {c, n};
        }
    }
    throw undecided_error("center_m: nearest integer undecided at precision cap", {f, Int(f + 1)});
}

} // namespace shiftwaring

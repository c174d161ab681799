#pragma once

// Problem instances (s, k, theta), tolerances and diagonal windows.

#include "ball.hpp"
#include "rat.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shiftwaring {

// Raised when a configuration violates one of the instance hypotheses.
class instance_error : public std::invalid_argument {
public:
    instance_error(std::string hypothesis, const std::string &what)
        : std::invalid_argument(what), hypothesis_(std::move(hypothesis))
    {
    }
    [[nodiscard]] const std::string &hypothesis() const { return hypothesis_; }

private:
    std::string hypothesis_;
};

// Unvalidated instance fields, as they come out of a config file.
struct RawInstance {
    long s{0};
    long k{0};
    std::vector<std::string> theta;
};

struct Instance {
    unsigned s{0};
    unsigned k{0};
    std::vector<Rat> theta;
    std::vector<std::string> theta_text;

    [[nodiscard]] Rat theta_sum() const
    {
        Rat sum = 0;
        for (const auto &t : theta) {
            sum += t;
        }
        return sum;
    }

    [[nodiscard]] RawInstance raw() const
    {
        return RawInstance{static_cast<long>(s), static_cast<long>(k), theta_text};
    }

    friend bool operator==(const Instance &a, const Instance &b)
    {
        return a.s == b.s && a.k == b.k && a.theta == b.theta;
    }
};

inline Instance validate_instance(const RawInstance &raw)
{
    if (raw.s < 2) {
        throw instance_error("s", "s must be >= 2");
    }
    if (raw.k < 2) {
        throw instance_error("k", "k must be >= 2");
    }
    if (raw.s > 64 || raw.k > 64) {
        throw instance_error("size", "s and k must be <= 64");
    }
    if (raw.theta.size() != static_cast<std::size_t>(raw.s)) {
        throw instance_error("theta", "theta has " + std::to_string(raw.theta.size()) + " entries, expected s = " +
                                          std::to_string(raw.s));
    }
    Instance inst;
    inst.s = static_cast<unsigned>(raw.s);
    inst.k = static_cast<unsigned>(raw.k);
    for (std::size_t i = 0; i < raw.theta.size(); ++i) {
        Rat t;
        try {
            t = parse_rational(raw.theta[i]);
        } catch (const parse_error &e) {
            throw instance_error("theta", "theta[" + std::to_string(i) + "]: " + e.what());
        }
        if (t <= 0 || t >= 1) {
            throw instance_error("theta", "theta[" + std::to_string(i) + "] not in open interval (0,1)");
        }
        inst.theta.push_back(t);
        inst.theta_text.push_back(raw.theta[i]);
    }
    return inst;
}

inline Instance make_instance(unsigned s, unsigned k, const std::vector<std::string> &theta)
{
    return validate_instance(RawInstance{static_cast<long>(s), static_cast<long>(k), theta});
}

// min over integer vectors a of sum (a_i - theta_i)^2, attained at a_i in {0, 1}.
inline Rat theta_gap_lower_bound(const Instance &inst)
{
    Rat sum = 0;
    for (const auto &t : inst.theta) {
        const Rat d = t < 1 - t ? t : Rat(1 - t);
        sum += d * d;
    }
    return sum;
}

struct ConstrainedMin {
    Rat value;
    std::vector<long> argmin;
};

// Exact min of sum (a_i - theta_i)^2 over integer a with sum a_i = target and
// |a_i| <= box, with the lexicographically smallest minimiser.
inline ConstrainedMin constrained_theta_min(const Instance &inst, long target_sum, long box)
{
    const long s = static_cast<long>(inst.s);
    if (box < 0 || s * box < (target_sum < 0 ? -target_sum : target_sum)) {
        throw std::invalid_argument("constrained_theta_min: infeasible box " + std::to_string(box) + " for sum " +
                                    std::to_string(target_sum));
    }
    // tail[i][t + i_off] = min over a_i..a_{s-1} summing to t.
    const long span = s * box;
    const auto width = static_cast<std::size_t>(2 * span + 1);
    std::vector<std::vector<std::optional<Rat>>> tail(static_cast<std::size_t>(s) + 1,
                                                      std::vector<std::optional<Rat>>(width));
    tail[static_cast<std::size_t>(s)][static_cast<std::size_t>(span)] = Rat(0);
    for (long i = s - 1; i >= 0; --i) {
        const auto &next = tail[static_cast<std::size_t>(i) + 1];
        auto &cur = tail[static_cast<std::size_t>(i)];
        const Rat &th = inst.theta[static_cast<std::size_t>(i)];
        for (long t = -span; t <= span; ++t) {
            std::optional<Rat> best;
            for (long a = -box; a <= box; ++a) {
                const long rest = t - a;
                if (rest < -span || rest > span) {
                    continue;
                }
                const auto &sub = next[static_cast<std::size_t>(rest + span)];
                if (!sub) {
                    continue;
                }
                const Rat d = Rat(a) - th;
                const Rat v = d * d + *sub;
                if (!best || v < *best) {
                    best = v;
                }
            }
            cur[static_cast<std::size_t>(t + span)] = best;
        }
    }
    ConstrainedMin out;
    out.value = *tail[0][static_cast<std::size_t>(target_sum + span)];
    long remaining = target_sum;
    Rat acc = 0;
    for (long i = 0; i < s; ++i) {
        const Rat &th = inst.theta[static_cast<std::size_t>(i)];
        for (long a = -box; a <= box; ++a) {
            const long rest = remaining - a;
            if (rest < -span || rest > span) {
                continue;
            }
            const auto &sub = tail[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(rest + span)];
            const Rat d = Rat(a) - th;
            if (sub && acc + d * d + *sub == out.value) {
                out.argmin.push_back(a);
                acc += d * d;
                remaining = rest;
                break;
            }
        }
    }
    return out;
}

// The tolerance eta of |sum (x_i - theta_i)^k - tau| < eta.
struct Tolerance {
    Real eta;
    std::string rule;

    static Tolerance absolute(const Rat &eta)
    {
        if (eta <= 0) {
            throw std::invalid_argument("tolerance must be positive");
        }
        return Tolerance{Real::of(eta), "absolute " + to_string(eta)};
    }

    // coeff * tau^{1 - 2/k}
    static Tolerance scaled(const Rat &coeff, const Rat &tau, unsigned k)
    {
        if (coeff <= 0 || tau <= 0) {
            throw std::invalid_argument("tolerance coefficient and tau must be positive");
        }
        return Tolerance{Real::power(coeff, tau, static_cast<long>(k) - 2, k),
                         to_string(coeff) + " * tau^(1-2/" + std::to_string(k) + ")"};
    }
};

// Integers x with |x - center| < radius, clipped at x >= 1. Integers in
// [lo, hi] but outside [certain_lo, certain_hi] could not be decided at the
// working precision and are kept (flagged) so that emptiness claims stay sound.
struct Window {
    Ball center;
    Ball radius;
    std::int64_t lo{1};
    std::int64_t hi{0};
    std::int64_t certain_lo{1};
    std::int64_t certain_hi{0};

    [[nodiscard]] bool empty() const { return hi < lo; }
    [[nodiscard]] std::int64_t width() const { return empty() ? 0 : hi - lo + 1; }

    [[nodiscard]] TriBool contains(std::int64_t x) const
    {
        if (x < lo || x > hi) {
            return TriBool::False;
        }
        return (x >= certain_lo && x <= certain_hi) ? TriBool::True : TriBool::Unknown;
    }

    [[nodiscard]] bool has_flagged() const
    {
        return !empty() && (certain_lo > lo || certain_hi < hi || certain_hi < certain_lo);
    }

    // Number of candidate vectors, saturating.
    [[nodiscard]] double candidates(unsigned s) const
    {
        double n = 1;
        for (unsigned i = 0; i < s; ++i) {
            n *= static_cast<double>(width());
        }
        return n;
    }
};

} // namespace shiftwaring

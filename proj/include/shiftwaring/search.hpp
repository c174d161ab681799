#pragma once

// Certified exhaustive search for x in the diagonal window with
// |sum (x_i - theta_i)^k - tau| < eta.
//
// Enumeration is depth-first in lexicographic order over the window box.
// Because x_i >= 1 > theta_i, every term (x_i - theta_i)^k is strictly
// increasing in x_i, so the remaining variables at their window minimum or
// maximum bound every completion of a partial assignment. A subtree is
// skipped only when that bound certifies both that it holds no solution and
// that it cannot improve the running minimum residual.

#include "ball.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "witness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace shiftwaring {

inline constexpr int schema_version = 1;

class budget_error : public std::runtime_error {
public:
    budget_error(const std::string &what, double estimate) : std::runtime_error(what), estimate_(estimate) {}
    [[nodiscard]] double estimate() const { return estimate_; }

private:
    double estimate_;
};

using Point = std::vector<std::int64_t>;

// Window radius: an absolute value, coeff * tau^{1/(2k)}, or any other real.
struct RadiusRule {
    std::optional<Rat> absolute;
    std::optional<Rat> coeff;
    std::optional<Real> custom;
    std::string label;

    static RadiusRule fixed(const Rat &r) { return RadiusRule{r, std::nullopt, std::nullopt, {}}; }
    static RadiusRule scaled(const Rat &c) { return RadiusRule{std::nullopt, c, std::nullopt, {}}; }
    static RadiusRule of(Real r, std::string label) { return RadiusRule{std::nullopt, std::nullopt, std::move(r), std::move(label)}; }

    [[nodiscard]] Real radius(const Real &tau, unsigned k) const
    {
        if (absolute) {
            return Real::of(*absolute);
        }
        if (custom) {
            return *custom;
        }
        if (!tau.exact) {
            const Rat c = *coeff;
            return Real{std::nullopt, [c, tau, k](std::int64_t prec) {
                            const std::int64_t wp = prec + 16;
                            return (Ball::from_rat(c, wp) * root_k(tau.at(wp), 2 * k, wp)).with_prec(prec);
                        }};
        }
        return Real::power(*coeff, *tau.exact, 1, 2 * k);
    }

    [[nodiscard]] std::string describe(unsigned k) const
    {
        if (absolute) {
            return "absolute " + to_string(*absolute);
        }
        if (custom) {
            return label;
        }
        return to_string(*coeff) + " * tau^(1/" + std::to_string(2 * k) + ")";
    }
};

enum class SearchMode { Auto, DepthFirst, MeetInMiddle };

struct SearchSpec {
    Instance inst;
    Real tau;
    Tolerance eta;
    RadiusRule radius;
    Precision precision{};
    double max_candidates{1e8};
    unsigned workers{1};
    SearchMode mode{SearchMode::DepthFirst};
    bool prune{true};
};

struct Candidate {
    Point x;
    Ball residual;
    std::optional<Rat> exact_residual;
    std::vector<TriBool> in_window;
};

struct SearchStats {
    std::uint64_t enumerated{0};
    std::uint64_t pruned{0};
    std::uint64_t refinements{0};
};

enum class SearchStatus { Solutions, Empty, Undecided };

inline const char *to_string(SearchStatus s)
{
    switch (s) {
    case SearchStatus::Solutions:
        return "Solutions";
    case SearchStatus::Empty:
        return "Empty";
    default:
        return "Undecided";
    }
}

struct SearchOutcome {
    SearchStatus status{SearchStatus::Empty};
    std::vector<Candidate> solutions;
    std::vector<Candidate> undecided;
    std::optional<Ball> min_residual;
    std::optional<Rat> min_residual_exact;
    Point argmin;
    Window window;
    SearchStats stats;
    std::int64_t prec{0};
    std::string eta_rule;
    std::string radius_rule;
    std::string mode;
};

inline Rat residual_exact(const Instance &inst, const Point &x, const Rat &tau)
{
    Rat sum = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += pow_int(Rat(x[i]) - inst.theta[i], inst.k);
    }
    return rat_abs(sum - tau);
}

// Enclosure of |sum (x_i - theta_i)^k - tau|.
inline Ball residual(const Instance &inst, const Point &x, const Real &tau, std::int64_t prec)
{
    if (x.size() != inst.s) {
        throw std::invalid_argument("residual: point has wrong dimension");
    }
    Ball sum(0L, prec);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 1) {
            throw std::invalid_argument("residual: variables must be >= 1");
        }
        sum = sum + pow_int(Ball(x[i], prec) - Ball::from_rat(inst.theta[i], prec), inst.k);
    }
    return abs(sum - tau.at(prec));
}

namespace detail {

inline Int dyadic_floor(const Dyadic &d)
{
    if (d.exp >= 0) {
        return Int(d.mant << static_cast<mp_bitcnt_t>(d.exp));
    }
    Int r;
    mpz_fdiv_q_2exp(r.get_mpz_t(), d.mant.get_mpz_t(), static_cast<mp_bitcnt_t>(-d.exp));
    return r;
}

inline Int dyadic_ceil(const Dyadic &d)
{
    return Int(-dyadic_floor(-d));
}

} // namespace detail

inline Window window_around(const Ball &center, const Ball &radius)
{
    if (radius.lower().sign() <= 0) {
        throw undecided_error("window radius is not certified positive", {});
    }
    if (Dyadic(Int(1), -1) <= center.rad() + radius.rad()) {
        throw undecided_error("window bounds too uncertain to construct", {});
    }
    Window w;
    w.center = center;
    w.radius = radius;
    const Int lo = detail::dyadic_floor(center.lower() - radius.upper()) + 1;
    const Int hi = detail::dyadic_ceil(center.upper() + radius.upper()) - 1;
    const Int clo = detail::dyadic_floor(center.upper() - radius.lower()) + 1;
    const Int chi = detail::dyadic_ceil(center.lower() + radius.lower()) - 1;
    w.lo = std::max<std::int64_t>(1, to_i64(lo));
    w.hi = to_i64(hi);
    w.certain_lo = std::max<std::int64_t>(1, to_i64(clo));
    w.certain_hi = to_i64(chi);
    return w;
}

// Integers x >= 1 with |x - (tau/s)^{1/k}| < radius.
inline Window build_window(const Instance &inst, const Ball &tau, const Ball &radius)
{
    if (tau.lower().sign() <= 0) {
        throw std::invalid_argument("build_window: tau must be positive");
    }
    const std::int64_t prec = std::max(tau.prec(), radius.prec());
    return window_around(diagonal_center(inst, Real::of(tau), prec), radius);
}

namespace detail {

// Threshold eta for one precision level.
struct EtaBound {
    std::optional<Rat> exact;
    Ball ball;

    [[nodiscard]] TriBool lt(const Rat &r) const
    {
        if (exact) {
            return r < *exact ? TriBool::True : TriBool::False;
        }
        return cmp_lt(Ball::from_rat(r, ball.prec()), ball);
    }
    [[nodiscard]] TriBool lt(const Ball &r) const
    {
        return cmp_lt(r, exact ? Ball::from_rat(*exact, r.prec()) : ball);
    }
};

// Exact residuals.
struct ExactArith {
    using Num = Rat;
    Rat tau;
    std::int64_t prec;

    [[nodiscard]] Rat term(std::int64_t x, const Rat &theta, unsigned k) const { return pow_int(Rat(x) - theta, k); }
    [[nodiscard]] Rat zero() const { return Rat(0); }
    [[nodiscard]] Rat distance(const Rat &sum) const { return rat_abs(sum - tau); }
    // 0 if tau lies within [lo, hi], otherwise the distance to the nearer end.
    [[nodiscard]] Rat gap(const Rat &lo, const Rat &hi) const
    {
        if (hi < tau) {
            return tau - hi;
        }
        if (lo > tau) {
            return lo - tau;
        }
        return Rat(0);
    }
    [[nodiscard]] bool surely_above(const Rat &lo) const { return lo > tau; }
    [[nodiscard]] bool surely_below(const Rat &hi) const { return hi < tau; }
    [[nodiscard]] Ball ball(const Rat &r) const { return Ball::from_rat(r, prec); }
    [[nodiscard]] std::optional<Rat> exact(const Rat &r) const { return r; }

    struct Best {
        std::optional<Rat> value;
        Point argmin;

        void offer(const Rat &r, const Point &x)
        {
            if (!value || r < *value) {
                value = r;
                argmin = x;
            }
        }
        void merge(const Best &o)
        {
            if (o.value) {
                offer(*o.value, o.argmin);
            }
        }
        // Every residual >= bound is no better than the current minimum.
        [[nodiscard]] bool dominates(const Rat &bound) const { return value && bound >= *value; }
    };
};

// Ball residuals, for tau known only as an enclosure.
struct BallArith {
    using Num = Ball;
    Ball tau;
    std::int64_t prec;

    [[nodiscard]] Ball term(std::int64_t x, const Rat &theta, unsigned k) const
    {
        return pow_int(Ball(x, prec) - Ball::from_rat(theta, prec), k);
    }
    [[nodiscard]] Ball zero() const { return Ball(0L, prec); }
    [[nodiscard]] Ball distance(const Ball &sum) const { return abs(sum - tau); }
    [[nodiscard]] Ball gap(const Ball &lo, const Ball &hi) const
    {
        if (cmp_lt(hi, tau) == TriBool::True) {
            return tau - hi;
        }
        if (cmp_lt(tau, lo) == TriBool::True) {
            return lo - tau;
        }
        return Ball(0L, prec);
    }
    [[nodiscard]] bool surely_above(const Ball &lo) const { return cmp_lt(tau, lo) == TriBool::True; }
    [[nodiscard]] bool surely_below(const Ball &hi) const { return cmp_lt(hi, tau) == TriBool::True; }
    [[nodiscard]] Ball ball(const Ball &r) const { return r; }
    [[nodiscard]] std::optional<Rat> exact(const Ball &) const { return std::nullopt; }

    struct Best {
        std::optional<Dyadic> lower;
        std::optional<Dyadic> upper;
        Point argmin;
        std::int64_t prec{Ball::default_prec};

        void offer(const Ball &r, const Point &x)
        {
            prec = r.prec();
            if (!lower || r.lower() < *lower) {
                lower = r.lower();
            }
            if (!upper || r.upper() < *upper) {
                upper = r.upper();
                argmin = x;
            }
        }
        void merge(const Best &o)
        {
            if (!o.upper) {
                return;
            }
            prec = o.prec;
            if (!lower || *o.lower < *lower) {
                lower = o.lower;
            }
            if (!upper || *o.upper < *upper) {
                upper = o.upper;
                argmin = o.argmin;
            }
        }
        [[nodiscard]] bool dominates(const Ball &bound) const { return upper && *upper < bound.lower(); }
    };
};

template <class Arith>
struct TaskResult {
    std::vector<Candidate> solutions;
    std::vector<Candidate> undecided;
    typename Arith::Best best;
    SearchStats stats;
};

template <class Arith>
class Engine {
public:
    using Num = typename Arith::Num;

    Engine(const Instance &inst, const Window &window, Arith arith, EtaBound eta, bool prune)
        : inst_(inst), window_(window), arith_(std::move(arith)), eta_(std::move(eta)), prune_(prune)
    {
        const auto width = static_cast<std::size_t>(window_.width());
        terms_.assign(inst_.s, {});
        for (unsigned i = 0; i < inst_.s; ++i) {
            terms_[i].reserve(width);
            for (std::int64_t x = window_.lo; x <= window_.hi; ++x) {
                terms_[i].push_back(arith_.term(x, inst_.theta[i], inst_.k));
            }
        }
        // rem_min_[d] / rem_max_[d]: sum over variables d.. at their window min / max.
        rem_min_.assign(inst_.s + 1, arith_.zero());
        rem_max_.assign(inst_.s + 1, arith_.zero());
        for (int d = static_cast<int>(inst_.s) - 1; d >= 0 && width > 0; --d) {
            rem_min_[d] = rem_min_[d + 1] + terms_[d].front();
            rem_max_[d] = rem_max_[d + 1] + terms_[d].back();
        }
    }

    [[nodiscard]] std::size_t tasks() const { return static_cast<std::size_t>(window_.width()); }

    // All completions with x_0 = window.lo + task.
    TaskResult<Arith> run_task(std::size_t task) const
    {
        TaskResult<Arith> out;
        Point x(inst_.s);
        x[0] = window_.lo + static_cast<std::int64_t>(task);
        const Num partial = terms_[0][task];
        if (subtree_excluded(partial, 1, out)) {
            ++out.stats.pruned;
            return out;
        }
        descend(x, 1, partial, out);
        return out;
    }

    // Meet-in-the-middle over the first h and remaining s - h variables.
    TaskResult<Arith> run_split() const
    {
        TaskResult<Arith> out;
        const unsigned h = inst_.s / 2;
        struct Half {
            Num sum;
            Point x;
        };
        std::vector<Half> right;
        enumerate(h, inst_.s, [&](const Point &x, const Num &sum) { right.push_back({sum, x}); });
        std::stable_sort(right.begin(), right.end(), [](const Half &a, const Half &b) { return a.sum < b.sum; });
        out.stats.enumerated += right.size();
        const Num eta_hi = arith_.exact(eta_.exact ? *eta_.exact : eta_.ball.upper().to_rat()).value();
        enumerate(0, h, [&](const Point &xa, const Num &sa) {
            ++out.stats.enumerated;
            const Num target = arith_.tau - sa;
            const auto first = std::upper_bound(right.begin(), right.end(), target - eta_hi,
                                                [](const Num &v, const Half &e) { return v < e.sum; });
            for (auto it = first; it != right.end() && it->sum < target + eta_hi; ++it) {
                classify(join(xa, it->x), arith_.distance(sa + it->sum), out);
            }
            const auto at = std::lower_bound(right.begin(), right.end(), target,
                                             [](const Half &e, const Num &v) { return e.sum < v; });
            const Half *pick = nullptr;
            Num pick_d;
            if (at != right.end()) {
                pick = &*at;
                pick_d = at->sum - target;
            }
            if (at != right.begin()) {
                const Num below = (at - 1)->sum;
                const auto run = std::lower_bound(right.begin(), at, below,
                                                  [](const Half &e, const Num &v) { return e.sum < v; });
                const Num d = target - below;
                if (!pick || d < pick_d || (d == pick_d && run->x < pick->x)) {
                    pick = &*run;
                    pick_d = d;
                }
            }
            if (pick) {
                out.best.offer(pick_d, join(xa, pick->x));
            }
        });
        std::sort(out.solutions.begin(), out.solutions.end(),
                  [](const Candidate &a, const Candidate &b) { return a.x < b.x; });
        std::sort(out.undecided.begin(), out.undecided.end(),
                  [](const Candidate &a, const Candidate &b) { return a.x < b.x; });
        return out;
    }

private:
    static Point join(const Point &a, const Point &b)
    {
        Point r = a;
        r.insert(r.end(), b.begin(), b.end());
        return r;
    }

    template <class Fn>
    void enumerate(unsigned from, unsigned to, Fn &&fn) const
    {
        Point x(to - from, window_.lo);
        const auto width = window_.width();
        if (width <= 0) {
            return;
        }
        while (true) {
            Num sum = arith_.zero();
            for (unsigned i = from; i < to; ++i) {
                sum = sum + terms_[i][static_cast<std::size_t>(x[i - from] - window_.lo)];
            }
            fn(x, sum);
            int d = static_cast<int>(x.size()) - 1;
            while (d >= 0 && x[static_cast<std::size_t>(d)] == window_.hi) {
                x[static_cast<std::size_t>(d)] = window_.lo;
                --d;
            }
            if (d < 0) {
                return;
            }
            ++x[static_cast<std::size_t>(d)];
        }
    }

    // True when no completion of `partial` (variables depth.. free) can be a
    // solution or improve the task's minimum.
    bool subtree_excluded(const Num &partial, unsigned depth, const TaskResult<Arith> &out) const
    {
        if (!prune_ || depth >= inst_.s) {
            return false;
        }
        const Num lb = arith_.gap(partial + rem_min_[depth], partial + rem_max_[depth]);
        return eta_.lt(lb) == TriBool::False && out.best.dominates(lb);
    }

    void descend(Point &x, unsigned depth, const Num &partial, TaskResult<Arith> &out) const
    {
        if (depth == inst_.s) {
            ++out.stats.enumerated;
            const Num r = arith_.distance(partial);
            out.best.offer(r, x);
            classify(x, r, out);
            return;
        }
        const auto &row = terms_[depth];
        for (std::size_t j = 0; j < row.size(); ++j) {
            const Num next = partial + row[j];
            if (subtree_excluded(next, depth + 1, out)) {
                ++out.stats.pruned;
                // Terms increase with x, so every later value overshoots too.
                if (arith_.surely_above(next + rem_min_[depth + 1])) {
                    break;
                }
                continue;
            }
            x[depth] = window_.lo + static_cast<std::int64_t>(j);
            descend(x, depth + 1, next, out);
        }
    }

    void classify(const Point &x, const Num &r, TaskResult<Arith> &out) const
    {
        const TriBool below = eta_.lt(r);
        if (below == TriBool::False) {
            return;
        }
        Candidate c;
        c.x = x;
        c.residual = arith_.ball(r);
        c.exact_residual = arith_.exact(r);
        TriBool all_in = TriBool::True;
        for (const auto xi : x) {
            c.in_window.push_back(window_.contains(xi));
            all_in = tri_and(all_in, c.in_window.back());
        }
        if (below == TriBool::True && all_in == TriBool::True) {
            out.solutions.push_back(std::move(c));
        } else {
            out.undecided.push_back(std::move(c));
        }
    }

    const Instance &inst_;
    const Window &window_;
    Arith arith_;
    EtaBound eta_;
    bool prune_;
    std::vector<std::vector<Num>> terms_;
    std::vector<Num> rem_min_;
    std::vector<Num> rem_max_;
};

template <class Arith>
void fill_min(const typename Arith::Best &best, std::int64_t prec, SearchOutcome &out);

template <>
inline void fill_min<ExactArith>(const ExactArith::Best &best, std::int64_t prec, SearchOutcome &out)
{
    if (best.value) {
        out.min_residual_exact = *best.value;
        out.min_residual = Ball::from_rat(*best.value, prec);
        out.argmin = best.argmin;
    }
}

template <>
inline void fill_min<BallArith>(const BallArith::Best &best, std::int64_t prec, SearchOutcome &out)
{
    if (best.upper) {
        const Dyadic lo = best.lower->sign() < 0 ? Dyadic() : *best.lower;
        out.min_residual = Ball::from_endpoints(lo, *best.upper, prec);
        out.argmin = best.argmin;
    }
}

template <class Arith>
SearchOutcome run_engine(const SearchSpec &spec, const Window &window, Arith arith, EtaBound eta, bool split)
{
    Engine<Arith> engine(spec.inst, window, std::move(arith), std::move(eta), spec.prune);
    TaskResult<Arith> total;
    if constexpr (std::is_same_v<Arith, ExactArith>) {
        if (split) {
            total = engine.run_split();
        }
    }
    if (!split) {
        std::vector<TaskResult<Arith>> parts(engine.tasks());
        for_each_task(parts.size(), spec.workers, [&](std::size_t i) { parts[i] = engine.run_task(i); });
        for (auto &p : parts) {
            total.solutions.insert(total.solutions.end(), std::make_move_iterator(p.solutions.begin()),
                                   std::make_move_iterator(p.solutions.end()));
            total.undecided.insert(total.undecided.end(), std::make_move_iterator(p.undecided.begin()),
                                   std::make_move_iterator(p.undecided.end()));
            total.best.merge(p.best);
            total.stats.enumerated += p.stats.enumerated;
            total.stats.pruned += p.stats.pruned;
        }
    }
    SearchOutcome out;
    out.window = window;
    out.solutions = std::move(total.solutions);
    out.undecided = std::move(total.undecided);
    out.stats = total.stats;
    fill_min<Arith>(total.best, window.center.prec(), out);
    return out;
}

} // namespace detail

inline SearchOutcome search(const SearchSpec &spec)
{
    if (spec.inst.s < 2 || spec.inst.theta.size() != spec.inst.s) {
        throw std::invalid_argument("search: invalid instance");
    }
    const Real radius = spec.radius.radius(spec.tau, spec.inst.k);
    SearchOutcome out;
    std::uint64_t refinements = 0;
    for (std::int64_t prec = spec.precision.start;; prec *= 2) {
        const Ball tau_ball = spec.tau.at(prec);
        if (tau_ball.lower().sign() <= 0) {
            throw std::invalid_argument("search: tau must be positive");
        }
        const Window window = window_around(diagonal_center(spec.inst, spec.tau, prec), radius.at(prec));
        const double estimate = window.candidates(spec.inst.s);
        if (estimate > spec.max_candidates) {
            throw budget_error("search: window holds about " + std::to_string(estimate) +
                                   " candidates, above the budget of " + std::to_string(spec.max_candidates),
                               estimate);
        }
        detail::EtaBound eta{spec.eta.eta.exact, spec.eta.eta.at(prec)};
        if (eta.exact ? *eta.exact <= 0 : eta.ball.upper().sign() <= 0) {
            throw std::invalid_argument("search: eta must be positive");
        }
        const bool exact = spec.tau.exact.has_value();
        const bool split = exact && spec.inst.s >= 4 &&
                           (spec.mode == SearchMode::MeetInMiddle ||
                            (spec.mode == SearchMode::Auto && estimate > 1e6));
        if (exact) {
            out = detail::run_engine(spec, window, detail::ExactArith{*spec.tau.exact, prec}, eta, split);
        } else {
            out = detail::run_engine(spec, window, detail::BallArith{tau_ball, prec}, eta, false);
        }
        out.prec = prec;
        out.mode = split ? "meet-in-middle" : "depth-first";
        if (out.undecided.empty() || prec * 2 > spec.precision.cap) {
            break;
        }
        ++refinements;
    }
    out.stats.refinements = refinements;
    out.eta_rule = spec.eta.rule;
    out.radius_rule = spec.radius.describe(spec.inst.k);
    if (!out.solutions.empty()) {
        out.status = SearchStatus::Solutions;
    } else if (!out.undecided.empty()) {
        out.status = SearchStatus::Undecided;
    } else {
        out.status = SearchStatus::Empty;
    }
    return out;
}

struct ProfileRow {
    Int m;
    Rat tau;
    std::optional<Ball> min_residual;
    std::optional<Rat> min_residual_exact;
    Point argmin;
};

// Minimum residual over the window around tau_m for each m.
inline std::vector<ProfileRow> min_residual_profile(const Instance &inst, const std::vector<Int> &ms,
                                                    const RadiusRule &radius, const Precision &precision = {},
                                                    unsigned workers = 1, double max_candidates = 1e8)
{
    std::vector<ProfileRow> rows;
    rows.reserve(ms.size());
    for (const auto &m : ms) {
        const Rat tau = tau_value(inst, m);
        SearchSpec spec{inst, Real::of(tau), Tolerance::absolute(Rat(1)), radius, precision, max_candidates, workers};
        const SearchOutcome o = search(spec);
        rows.push_back({m, tau, o.min_residual, o.min_residual_exact, o.argmin});
    }
    return rows;
}

inline nlohmann::ordered_json candidate_json(const Candidate &c)
{
    nlohmann::ordered_json j;
    j["x"] = c.x;
    j["residual"] = c.exact_residual ? nlohmann::ordered_json(to_string(*c.exact_residual)) : nullptr;
    j["residual_ball"] = to_json(c.residual);
    std::vector<std::string> flags;
    for (auto f : c.in_window) {
        flags.emplace_back(to_string(f));
    }
    j["in_window"] = flags;
    return j;
}

inline nlohmann::ordered_json window_json(const Window &w)
{
    nlohmann::ordered_json j;
    j["center"] = to_json(w.center);
    j["center_approx"] = w.center.mid_double();
    j["radius"] = to_json(w.radius);
    j["radius_approx"] = w.radius.mid_double();
    j["lo"] = w.lo;
    j["hi"] = w.hi;
    j["certain_lo"] = w.certain_lo;
    j["certain_hi"] = w.certain_hi;
    return j;
}

inline nlohmann::ordered_json to_json(const SearchOutcome &o)
{
    nlohmann::ordered_json j;
    j["status"] = to_string(o.status);
    nlohmann::ordered_json sols = nlohmann::ordered_json::array();
    for (const auto &c : o.solutions) {
        sols.push_back(candidate_json(c));
    }
    j["solutions"] = sols;
    nlohmann::ordered_json und = nlohmann::ordered_json::array();
    for (const auto &c : o.undecided) {
        und.push_back(candidate_json(c));
    }
    j["undecided"] = und;
    j["min_residual"] = o.min_residual_exact ? nlohmann::ordered_json(to_string(*o.min_residual_exact)) : nullptr;
    j["min_residual_ball"] = o.min_residual ? to_json(*o.min_residual) : nlohmann::ordered_json(nullptr);
    j["min_residual_approx"] = o.min_residual ? nlohmann::ordered_json(o.min_residual->mid_double()) : nullptr;
    j["argmin"] = o.argmin;
    j["window"] = window_json(o.window);
    j["eta_rule"] = o.eta_rule;
    j["radius_rule"] = o.radius_rule;
    j["prec"] = o.prec;
    j["mode"] = o.mode;
    j["stats"] = {{"enumerated", o.stats.enumerated},
                  {"pruned", o.stats.pruned},
                  {"refinements", o.stats.refinements}};
    return j;
}

} // namespace shiftwaring

#include "oracles.hpp"

#include <shiftwaring/search.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace shiftwaring;

namespace {

std::vector<Point> points(const std::vector<Candidate> &cs)
{
    std::vector<Point> out;
    for (const auto &c : cs) {
        out.push_back(c.x);
    }
    return out;
}

SearchSpec spec_of(const oracle::RandomSpec &r)
{
    return SearchSpec{r.inst, Real::of(r.tau), Tolerance::absolute(r.eta), RadiusRule::fixed(r.radius)};
}

// tau given only as a sequence of enclosures.
Real opaque(const Rat &q)
{
    return Real{std::nullopt, [q](std::int64_t p) { return Ball::from_rat(q, p); }};
}

void expect_matches(const SearchOutcome &o, const oracle::Result &want, const std::string &what)
{
    EXPECT_TRUE(o.undecided.empty()) << what;
    EXPECT_EQ(o.status, want.solutions.empty() ? SearchStatus::Empty : SearchStatus::Solutions) << what;
    EXPECT_EQ(points(o.solutions), want.solutions) << what;
    EXPECT_EQ(o.min_residual_exact, want.min_residual) << what;
    EXPECT_EQ(o.argmin, want.argmin) << what;
}

const Instance k2 = make_instance(2, 2, {"0.3", "0.7"});

} // namespace

TEST(Search, WitnessTau220IsEmpty)
{
    const SearchOutcome o =
        search({k2, Real::of(Rat(220)), Tolerance::absolute(Rat(1, 2)), RadiusRule::fixed(Rat(2))});
    EXPECT_EQ(o.status, SearchStatus::Empty);
    EXPECT_EQ(*o.min_residual_exact, Rat(29, 50));
    EXPECT_EQ(o.argmin, (Point{11, 11}));
    EXPECT_EQ(o.window.lo, 9);
    EXPECT_EQ(o.window.hi, 12);
    EXPECT_FALSE(o.window.has_flagged());
}

TEST(Search, K2FloorIsSharp)
{
    for (long m : {10L, 50L, 100L}) {
        const Real tau = Real::of(tau_value(k2, Int(m)));
        const SearchOutcome hit = search({k2, tau, Tolerance::absolute(Rat(3, 5)), RadiusRule::fixed(Rat(2))});
        ASSERT_EQ(hit.status, SearchStatus::Solutions);
        EXPECT_EQ(points(hit.solutions), (std::vector<Point>{{m + 1, m + 1}}));
        const SearchOutcome miss = search({k2, tau, Tolerance::absolute(Rat(1, 2)), RadiusRule::fixed(Rat(2))});
        EXPECT_EQ(miss.status, SearchStatus::Empty);
        EXPECT_EQ(*miss.min_residual_exact, Rat(29, 50));
    }
}

TEST(Search, ResidualEnclosesExact)
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const auto r = oracle::random_spec(rng);
        Point x;
        for (unsigned j = 0; j < r.inst.s; ++j) {
            x.push_back(std::uniform_int_distribution<std::int64_t>(1, 30)(rng));
        }
        const Rat want = oracle::residual(r.inst, x, r.tau);
        EXPECT_EQ(residual_exact(r.inst, x, r.tau), want);
        EXPECT_TRUE(residual(r.inst, x, opaque(r.tau), 64).contains(want));
    }
}

TEST(Search, MatchesBruteForceExactPath)
{
    std::mt19937_64 rng(2024);
    int with_solutions = 0;
    for (int i = 0; i < 150; ++i) {
        const auto r = oracle::random_spec(rng);
        const auto want = oracle::brute_force(r.inst, r.tau, r.eta, r.radius, r.scan_lo, r.scan_hi);
        with_solutions += want.solutions.empty() ? 0 : 1;
        SearchSpec spec = spec_of(r);
        expect_matches(search(spec), want, "spec " + std::to_string(i));
        spec.prune = false;
        expect_matches(search(spec), want, "unpruned spec " + std::to_string(i));
    }
    EXPECT_GT(with_solutions, 10);
}

TEST(Search, MatchesBruteForceBallPath)
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 100; ++i) {
        const auto r = oracle::random_spec(rng);
        const auto want = oracle::brute_force(r.inst, r.tau, r.eta, r.radius, r.scan_lo, r.scan_hi);
        // residuals exactly at eta stay undecided here, so only solutions and
        // the minimum enclosure are compared
        SearchSpec spec = spec_of(r);
        spec.tau = opaque(r.tau);
        const SearchOutcome o = search(spec);
        EXPECT_EQ(points(o.solutions), want.solutions) << i;
        if (want.min_residual) {
            ASSERT_TRUE(o.min_residual.has_value()) << i;
            EXPECT_TRUE(o.min_residual->contains(*want.min_residual)) << i;
        } else {
            EXPECT_FALSE(o.min_residual.has_value()) << i;
        }
    }
}

TEST(Search, MeetInMiddleEquivalent)
{
    std::mt19937_64 rng(31337);
    for (int i = 0; i < 60; ++i) {
        const auto r = oracle::random_spec(rng, 4, 5, 2e4);
        const auto want = oracle::brute_force(r.inst, r.tau, r.eta, r.radius, r.scan_lo, r.scan_hi);
        SearchSpec spec = spec_of(r);
        spec.mode = SearchMode::MeetInMiddle;
        const SearchOutcome o = search(spec);
        EXPECT_EQ(o.mode, "meet-in-middle");
        expect_matches(o, want, "mitm spec " + std::to_string(i));
    }
}

TEST(Search, WorkerCountDoesNotChangeOutput)
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 40; ++i) {
        const auto r = oracle::random_spec(rng);
        SearchSpec spec = spec_of(r);
        const std::string serial = to_json(search(spec)).dump();
        for (unsigned w : {2u, 3u, 8u}) {
            spec.workers = w;
            EXPECT_EQ(to_json(search(spec)).dump(), serial) << "workers " << w;
        }
    }
}

TEST(Search, PruningSkipsWork)
{
    const Instance inst = make_instance(3, 3, {"0.25", "0.5", "0.75"});
    const Rat tau = tau_value(inst, Int(30));
    SearchSpec spec{inst, Real::of(tau), Tolerance::absolute(Rat(1)), RadiusRule::fixed(Rat(6))};
    const SearchOutcome pruned = search(spec);
    spec.prune = false;
    const SearchOutcome full = search(spec);
    EXPECT_GT(pruned.stats.pruned, 0u);
    EXPECT_LT(pruned.stats.enumerated, full.stats.enumerated);
    EXPECT_EQ(full.stats.enumerated, static_cast<std::uint64_t>(full.window.candidates(3)));
    EXPECT_EQ(pruned.min_residual_exact, full.min_residual_exact);
    EXPECT_EQ(pruned.argmin, full.argmin);
}

TEST(Search, ScaledRadiusAndTolerance)
{
    // radius c' tau^{1/4}, eta c tau^0 for k = 2
    const Rat tau = tau_value(k2, Int(200));
    SearchSpec spec{k2, Real::of(tau), Tolerance::scaled(Rat(1, 8), tau, 2), RadiusRule::scaled(Rat(1, 8))};
    const SearchOutcome o = search(spec);
    EXPECT_EQ(o.status, SearchStatus::Empty);
    EXPECT_EQ(o.radius_rule, "1/8 * tau^(1/4)");
    // 1/8 * 80400^{1/4} ~ 2.105
    EXPECT_NEAR(o.window.radius.mid_double(), 2.1049, 1e-3);
}

TEST(Search, UnresolvableToleranceIsUndecided)
{
    // eta known only as a fixed ball around the exact minimum 29/50
    const Ball fuzzy = Ball::from_endpoints(Dyadic(Int(57), -7), Dyadic(Int(75), -7), 64); // [0.445, 0.586]
    ASSERT_TRUE(fuzzy.contains(Rat(29, 50)));
    SearchSpec spec{k2, Real::of(Rat(220)), Tolerance{Real::of(fuzzy), "fuzzy"}, RadiusRule::fixed(Rat(2)),
                    Precision{64, 512}};
    const SearchOutcome o = search(spec);
    EXPECT_EQ(o.status, SearchStatus::Undecided);
    EXPECT_EQ(points(o.undecided), (std::vector<Point>{{11, 11}}));
    EXPECT_GT(o.stats.refinements, 0u);
    EXPECT_EQ(o.prec, 512);
}

TEST(Search, BoundaryIntegersAreFlaggedNotDropped)
{
    // tau / s = 48 / 3 = 16, center 4 exactly but never a dyadic ball; radius 1
    // puts 3 and 5 on the boundary.
    const Instance inst = make_instance(3, 2, {"0.3", "0.5", "0.7"});
    const Real tau = opaque(Rat(48));
    SearchSpec spec{inst, tau, Tolerance::absolute(Rat(1, 1000)), RadiusRule::fixed(Rat(1)), Precision{64, 256}};
    const SearchOutcome o = search(spec);
    EXPECT_TRUE(o.window.has_flagged());
    EXPECT_LE(o.window.lo, 3);
    EXPECT_GE(o.window.hi, 5);
    EXPECT_EQ(o.window.contains(4), TriBool::True);
    EXPECT_EQ(o.window.contains(3), TriBool::Unknown);
}

TEST(Search, BudgetIsEnforced)
{
    SearchSpec spec{k2, Real::of(Rat(1000000)), Tolerance::absolute(Rat(1)), RadiusRule::fixed(Rat(500)),
                    Precision{}, 1000};
    try {
        search(spec);
        FAIL();
    } catch (const budget_error &e) {
        EXPECT_GT(e.estimate(), 1000);
    }
}

TEST(Search, RejectsNonPositiveInputs)
{
    EXPECT_THROW(search({k2, Real::of(Rat(-5)), Tolerance::absolute(Rat(1)), RadiusRule::fixed(Rat(2))}),
                 std::invalid_argument);
    EXPECT_THROW(window_around(Ball(5L), Ball(0L)), undecided_error);
}

TEST(Search, EmptyWindow)
{
    // radius 1/10 around sqrt(110) ~ 10.488
    const SearchOutcome o =
        search({k2, Real::of(Rat(220)), Tolerance::absolute(Rat(1)), RadiusRule::fixed(Rat(1, 10))});
    EXPECT_TRUE(o.window.empty());
    EXPECT_EQ(o.status, SearchStatus::Empty);
    EXPECT_FALSE(o.min_residual.has_value());
}

TEST(Search, ProfileFindsTheK2Floor)
{
    const std::vector<Int> ms = {Int(10), Int(50), Int(100)};
    const auto rows = min_residual_profile(k2, ms, RadiusRule::fixed(Rat(2)));
    ASSERT_EQ(rows.size(), 3u);
    for (const auto &row : rows) {
        EXPECT_EQ(*row.min_residual_exact, Rat(29, 50));
        const auto m1 = to_i64(row.m) + 1;
        EXPECT_EQ(row.argmin, (Point{m1, m1}));
    }
}

TEST(Search, JsonCarriesProvenance)
{
    const auto j =
        to_json(search({k2, Real::of(Rat(220)), Tolerance::absolute(Rat(1, 2)), RadiusRule::fixed(Rat(2))}));
    EXPECT_EQ(j["status"], "Empty");
    EXPECT_EQ(j["min_residual"], "29/50");
    EXPECT_EQ(j["eta_rule"], "absolute 1/2");
    EXPECT_EQ(j["radius_rule"], "absolute 2");
    EXPECT_TRUE(j.contains("stats"));
}

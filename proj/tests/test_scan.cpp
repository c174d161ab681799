#include <shiftwaring/scan.hpp>

#include <gtest/gtest.h>

using namespace shiftwaring;

namespace {

const Instance k2 = make_instance(2, 2, {"0.3", "0.7"});

std::size_t count(const std::string &hay, const std::string &needle)
{
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

} // namespace

TEST(GapScan, PredictedIntervalIsEmpty)
{
    const Certificate cert = derive_constants(k2);
    const GapConstants gc = gap_constants(cert, Rat(1, 4));
    const Int m = std::max(cert.m0, Int(50));
    const GapReport rep = gap_scan(gc, m, 101);
    ASSERT_EQ(rep.grid.size(), 101u);
    EXPECT_TRUE(rep.complete);
    EXPECT_TRUE(rep.anomalies.empty());
    EXPECT_EQ(rep.step, rep.predicted_radius / 25);
    EXPECT_EQ(rep.grid[50].tau, rep.tau0);
    EXPECT_EQ(rep.grid[50].offset, 0);
    std::size_t within = 0;
    for (const auto &g : rep.grid) {
        if (g.within_predicted) {
            ++within;
            EXPECT_EQ(g.status, SearchStatus::Empty) << g.offset;
        }
    }
    EXPECT_EQ(within, 51u);
    EXPECT_GE(rep.measured_gap, rep.predicted_radius);
}

TEST(GapScan, MeasuredGapStopsAtFirstSolution)
{
    // A step wide enough to reach tau values where (m+1, m+1) solves the system.
    const Certificate cert = derive_constants(k2);
    const GapConstants gc = gap_constants(cert, Rat(1, 4));
    const Int m = cert.m0;
    // residual at (m+1, m+1) is |29/50 - (tau - tau0)|, eta = C
    const GapReport rep = gap_scan(gc, m, 11, {}, Rat(3, 20));
    long first = -1;
    for (long j = 0; j <= 5; ++j) {
        const auto &lo = rep.grid[static_cast<std::size_t>(5 - j)];
        const auto &hi = rep.grid[static_cast<std::size_t>(5 + j)];
        if (lo.status != SearchStatus::Empty || hi.status != SearchStatus::Empty) {
            first = j;
            break;
        }
    }
    ASSERT_GT(first, 0);
    EXPECT_EQ(rep.measured_gap, Rat(first - 1) * Rat(3, 20));
    // oracle: (m+1, m+1) is a solution exactly when |29/50 - delta| < C
    for (const auto &g : rep.grid) {
        const Rat delta = g.tau - rep.tau0;
        const Rat r = rat_abs(Rat(Rat(29, 50) - delta));
        if (r < gc.C) {
            EXPECT_EQ(g.status, SearchStatus::Solutions) << g.offset;
        }
    }
}

TEST(GapScan, Preconditions)
{
    const Certificate cert = derive_constants(k2);
    const GapConstants gc = gap_constants(cert, Rat(1, 4));
    EXPECT_THROW(gap_scan(gc, cert.m0, 100), std::invalid_argument);
    EXPECT_THROW(gap_scan(gc, cert.m0, 1), std::invalid_argument);
    EXPECT_THROW(gap_scan(gc, Int(cert.m0 - 1), 101), std::invalid_argument);
    EXPECT_THROW(gap_scan(gc, cert.m0, 11, {}, Rat(0)), std::invalid_argument);
}

TEST(GapScan, BudgetMakesItPartial)
{
    const Certificate cert = derive_constants(k2);
    const GapConstants gc = gap_constants(cert, Rat(1, 4));
    ScanOptions opt;
    opt.max_candidates = 0.5;
    const GapReport rep = gap_scan(gc, Int(cert.m0 * 100), 5, opt);
    EXPECT_FALSE(rep.complete);
    EXPECT_EQ(to_json(rep)["counts"]["Skipped"], 5);
}

TEST(GapScan, PlotsAreDeterministicAndStructural)
{
    const Certificate cert = derive_constants(k2);
    const GapConstants gc = gap_constants(cert, Rat(1, 4));
    ScanOptions serial;
    ScanOptions parallel;
    parallel.workers = 4;
    const GapReport a = gap_scan(gc, cert.m0, 21, serial);
    const GapReport b = gap_scan(gc, cert.m0, 21, parallel);
    const Plot pa = emit_plots(a);
    const Plot pb = emit_plots(b);
    EXPECT_EQ(pa.svg, pb.svg);
    EXPECT_EQ(pa.csv, pb.csv);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_EQ(count(pa.csv, "\n"), 22u);
    EXPECT_EQ(pa.csv.substr(0, pa.csv.find('\n')), "offset,tau,tau_approx,status,min_residual,within_predicted");
    EXPECT_EQ(pa.svg.rfind("<svg", 0), 0u);
    EXPECT_NE(pa.svg.find("tau0"), std::string::npos);
    EXPECT_EQ(count(pa.svg, "fill=\"#4c9a5a\""), 21u);
    EXPECT_THROW(emit_plots(GapReport{}), std::invalid_argument);
}

TEST(Phase, EmptySamplesGiveEmptyMatrix)
{
    const PhaseMatrix pm = phase_sweep(k2, {}, {Rat(1, 2)}, {Rat(0)}, Rat(1, 8));
    EXPECT_TRUE(pm.empty());
    EXPECT_THROW(emit_plots(pm), std::invalid_argument);
}

TEST(Phase, CellsSumToOneAndAreSorted)
{
    const std::vector<Int> ms = {Int(20), Int(40), Int(60)};
    const PhaseMatrix pm = phase_sweep(k2, ms, {Rat(1), Rat(1, 4), Rat(1, 2)}, {Rat(1), Rat(-1), Rat(0)}, Rat(1, 8));
    ASSERT_EQ(pm.cells.size(), 3u);
    EXPECT_EQ(pm.alphas, (std::vector<Rat>{Rat(1, 4), Rat(1, 2), Rat(1)}));
    EXPECT_EQ(pm.betas, (std::vector<Rat>{Rat(-1), Rat(0), Rat(1)}));
    for (const auto &row : pm.cells) {
        ASSERT_EQ(row.size(), 3u);
        for (const auto &c : row) {
            EXPECT_FALSE(c.skipped);
            EXPECT_EQ(c.samples(), 3u);
            EXPECT_DOUBLE_EQ(c.density() + c.empty_fraction() + c.undecided_fraction(), 1.0);
        }
    }
    EXPECT_TRUE(density_monotone_in_beta(pm));
}

TEST(Phase, LargeWindowAndToleranceAlwaysSolve)
{
    // radius 1/8 m >= 2 and eta 1/8 m >= 0.6 admit (m+1, m+1) with residual 0.58
    const std::vector<Int> ms = {Int(20), Int(40), Int(60)};
    const PhaseMatrix pm = phase_sweep(k2, ms, {Rat(1)}, {Rat(1)}, Rat(1, 8));
    EXPECT_DOUBLE_EQ(pm.cells[0][0].density(), 1.0);
}

TEST(Phase, BudgetSkipsCellsWithReason)
{
    ScanOptions opt;
    opt.max_candidates = 50;
    const PhaseMatrix pm = phase_sweep(k2, {Int(100)}, {Rat(0), Rat(2)}, {Rat(0)}, Rat(1), opt);
    EXPECT_FALSE(pm.cells[0][0].skipped);
    EXPECT_TRUE(pm.cells[1][0].skipped);
    EXPECT_FALSE(pm.cells[1][0].skip_reason.empty());
    EXPECT_EQ(pm.cells[1][0].samples(), 0u);
    EXPECT_NE(phase_csv(pm).find(",1,0.000000"), std::string::npos);
}

TEST(Phase, MonotonicityCheckCatchesViolations)
{
    PhaseMatrix pm;
    pm.m_samples = {Int(1)};
    pm.alphas = {Rat(0)};
    pm.betas = {Rat(0), Rat(1)};
    pm.cells = {{PhaseCell{Rat(0), Rat(0), 1, 0, 0, false, ""}, PhaseCell{Rat(0), Rat(1), 0, 1, 0, false, ""}}};
    EXPECT_FALSE(density_monotone_in_beta(pm));
    pm.cells[0][1].skipped = true;
    EXPECT_TRUE(density_monotone_in_beta(pm));
}

TEST(Phase, PlotHasOneRectPerCellAndIsDeterministic)
{
    const std::vector<Int> ms = {Int(20), Int(40)};
    ScanOptions parallel;
    parallel.workers = 3;
    const auto alphas = std::vector<Rat>{Rat(1, 4), Rat(1, 2), Rat(1)};
    const auto betas = std::vector<Rat>{Rat(-1), Rat(0), Rat(1)};
    const PhaseMatrix a = phase_sweep(k2, ms, alphas, betas, Rat(1, 8));
    const PhaseMatrix b = phase_sweep(k2, ms, alphas, betas, Rat(1, 8), parallel);
    const Plot pa = emit_plots(a);
    EXPECT_EQ(pa.svg, emit_plots(b).svg);
    EXPECT_EQ(pa.csv, emit_plots(b).csv);
    EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
    EXPECT_EQ(count(pa.svg, "stroke=\"#555555\""), 9u);
    EXPECT_NE(pa.svg.find("exploratory"), std::string::npos);
    EXPECT_EQ(to_json(a)["label"], "exploratory");
}

TEST(Phase, RejectsBadInput)
{
    EXPECT_THROW(phase_sweep(k2, {Int(10)}, {Rat(1, 2)}, {Rat(0)}, Rat(0)), std::invalid_argument);
    EXPECT_THROW(phase_sweep(k2, {Int(0)}, {Rat(1, 2)}, {Rat(0)}, Rat(1)), std::invalid_argument);
    EXPECT_THROW(phase_sweep(k2, {Int(10)}, {Rat(1, 1000)}, {Rat(0)}, Rat(1)), std::invalid_argument);
}

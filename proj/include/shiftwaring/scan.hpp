#pragma once

// Empirical side: solution-free gaps around certified witnesses, and an
// exploratory solvability map over window/tolerance exponents.

#include "certify.hpp"
#include "parallel.hpp"
#include "search.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shiftwaring {

struct ScanOptions {
    Precision precision{};
    unsigned workers{1};
    double max_candidates{1e8};
};

struct GridPoint {
    long offset{0};
    Rat tau;
    std::optional<SearchStatus> status; // nullopt: over budget
    std::optional<Rat> min_residual;
    bool within_predicted{false};
};

struct GapReport {
    Int m;
    Rat tau0;
    Rat predicted_radius;
    Rat step;
    std::vector<GridPoint> grid;
    Rat measured_gap;
    std::vector<long> anomalies; // offsets within the predicted radius that are not Empty
    bool complete{true};
};

// Searches tau0 + j * step, |j| <= (grid_points - 1) / 2, for the system with
// eta = C tau^{1-2/k} and radius C' tau^{1/2k}. The default step spreads the
// grid over twice the predicted radius.
inline GapReport gap_scan(const GapConstants &gc, const Int &m, unsigned grid_points, const ScanOptions &opt = {},
                          std::optional<Rat> step = std::nullopt)
{
    if (grid_points < 3 || grid_points % 2 == 0) {
        throw std::invalid_argument("gap_scan: grid_points must be odd and >= 3");
    }
    if (m < gc.cert.m0) {
        throw std::invalid_argument("gap_scan: m = " + m.get_str() + " is below m0 = " + gc.cert.m0.get_str());
    }
    const auto &inst = gc.cert.inst;
    GapReport rep;
    rep.m = m;
    rep.tau0 = tau_value(inst, m);
    rep.predicted_radius = predicted_radius(gc, rep.tau0);
    const long half = static_cast<long>(grid_points / 2);
    rep.step = step ? *step : Rat(2 * rep.predicted_radius / Rat(half));
    if (rep.step <= 0) {
        throw std::invalid_argument("gap_scan: step must be positive");
    }
    rep.grid.resize(grid_points);
    for_each_task(grid_points, opt.workers, [&](std::size_t i) {
        GridPoint &g = rep.grid[i];
        g.offset = static_cast<long>(i) - half;
        g.tau = rep.tau0 + Rat(g.offset) * rep.step;
        g.within_predicted = rat_abs(g.tau - rep.tau0) <= rep.predicted_radius;
        if (g.tau <= 0) {
            throw std::invalid_argument("gap_scan: grid reaches non-positive tau");
        }
        SearchSpec spec{inst,
                        Real::of(g.tau),
                        Tolerance::scaled(gc.C, g.tau, inst.k),
                        RadiusRule::scaled(gc.C_prime),
                        opt.precision,
                        opt.max_candidates,
                        1};
        try {
            const SearchOutcome o = search(spec);
            g.status = o.status;
            g.min_residual = o.min_residual_exact;
        } catch (const budget_error &) {
            g.status.reset();
        }
    });
    long reach = -1;
    for (long j = 0; j <= half; ++j) {
        const auto &lo = rep.grid[static_cast<std::size_t>(half - j)];
        const auto &hi = rep.grid[static_cast<std::size_t>(half + j)];
        if (lo.status != SearchStatus::Empty || hi.status != SearchStatus::Empty) {
            break;
        }
        reach = j;
    }
    rep.measured_gap = reach < 0 ? Rat(0) : Rat(Rat(reach) * rep.step);
    for (const auto &g : rep.grid) {
        if (!g.status) {
            rep.complete = false;
        }
        if (g.within_predicted && g.status != SearchStatus::Empty) {
            rep.anomalies.push_back(g.offset);
        }
    }
    return rep;
}

struct PhaseCell {
    Rat alpha;
    Rat beta;
    unsigned solutions{0};
    unsigned empty{0};
    unsigned undecided{0};
    bool skipped{false};
    std::string skip_reason;

    [[nodiscard]] unsigned samples() const { return solutions + empty + undecided; }
    [[nodiscard]] double fraction(unsigned n) const { return samples() ? static_cast<double>(n) / samples() : 0.0; }
    [[nodiscard]] double density() const { return fraction(solutions); }
    [[nodiscard]] double empty_fraction() const { return fraction(empty); }
    [[nodiscard]] double undecided_fraction() const { return fraction(undecided); }
};

struct PhaseMatrix {
    Instance inst;
    std::vector<Int> m_samples;
    std::vector<Rat> alphas; // rows, ascending
    std::vector<Rat> betas;  // columns, ascending
    Rat coeff;
    std::vector<std::vector<PhaseCell>> cells;

    [[nodiscard]] bool empty() const { return cells.empty() || m_samples.empty(); }
};

namespace detail {

inline std::pair<long, unsigned long> exponent_parts(const Rat &e)
{
    const Int den = e.get_den();
    if (!den.fits_ulong_p() || !Int(e.get_num()).fits_slong_p() || den > 64) {
        throw std::invalid_argument("phase exponent " + to_string(e) + " has too large a denominator");
    }
    return {Int(e.get_num()).get_si(), den.get_ui()};
}

// coeff * m^e
inline Real scaled_power(const Rat &coeff, const Int &m, const Rat &e)
{
    const auto [p, q] = exponent_parts(e);
    return Real::power(coeff, Rat(m), p, q);
}

} // namespace detail

// For each (alpha, beta), the fraction of sampled m whose tau_m has a solution
// with radius coeff * m^alpha and eta = coeff * m^beta. Exploratory only.
inline PhaseMatrix phase_sweep(const Instance &inst, std::vector<Int> m_samples, std::vector<Rat> alphas,
                               std::vector<Rat> betas, const Rat &coeff, const ScanOptions &opt = {})
{
    if (coeff <= 0) {
        throw std::invalid_argument("phase_sweep: coeff must be positive");
    }
    std::sort(alphas.begin(), alphas.end());
    std::sort(betas.begin(), betas.end());
    PhaseMatrix pm;
    pm.inst = inst;
    pm.m_samples = std::move(m_samples);
    pm.alphas = alphas;
    pm.betas = betas;
    pm.coeff = coeff;
    if (pm.m_samples.empty()) {
        return pm;
    }
    for (const auto &m : pm.m_samples) {
        if (m < 1) {
            throw std::invalid_argument("phase_sweep: m samples must be >= 1");
        }
    }
    const std::size_t na = alphas.size();
    const std::size_t nb = betas.size();
    const std::size_t nm = pm.m_samples.size();
    std::vector<std::optional<SearchStatus>> status(na * nb * nm);
    std::vector<std::string> reasons(na * nb * nm);
    for_each_task(status.size(), opt.workers, [&](std::size_t t) {
        const std::size_t a = t / (nb * nm);
        const std::size_t b = (t / nm) % nb;
        const Int &m = pm.m_samples[t % nm];
        const Real radius = detail::scaled_power(coeff, m, alphas[a]);
        const double r = radius.at(64).upper().to_double();
        const double estimate = std::pow(2 * r + 1, static_cast<double>(inst.s));
        if (estimate > opt.max_candidates) {
            reasons[t] = "estimated " + std::to_string(estimate) + " candidates";
            return;
        }
        const Rat tau = tau_value(inst, m);
        SearchSpec spec{inst,
                        Real::of(tau),
                        Tolerance{detail::scaled_power(coeff, m, betas[b]),
                                  to_string(coeff) + " * m^" + to_string(betas[b])},
                        RadiusRule::of(radius, to_string(coeff) + " * m^" + to_string(alphas[a])),
                        opt.precision,
                        opt.max_candidates,
                        1};
        try {
            status[t] = search(spec).status;
        } catch (const budget_error &e) {
            reasons[t] = e.what();
        }
    });
    pm.cells.assign(na, std::vector<PhaseCell>(nb));
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < nb; ++b) {
            PhaseCell &cell = pm.cells[a][b];
            cell.alpha = alphas[a];
            cell.beta = betas[b];
            for (std::size_t i = 0; i < nm; ++i) {
                const std::size_t t = (a * nb + b) * nm + i;
                if (!status[t]) {
                    cell.skipped = true;
                    cell.skip_reason = reasons[t];
                    continue;
                }
                switch (*status[t]) {
                case SearchStatus::Solutions:
                    ++cell.solutions;
                    break;
                case SearchStatus::Empty:
                    ++cell.empty;
                    break;
                case SearchStatus::Undecided:
                    ++cell.undecided;
                    break;
                }
            }
            if (cell.skipped) {
                cell.solutions = cell.empty = cell.undecided = 0;
            }
        }
    }
    return pm;
}

// Density never decreases along a row as beta grows (skipped cells ignored).
inline bool density_monotone_in_beta(const PhaseMatrix &pm)
{
    for (const auto &row : pm.cells) {
        std::optional<unsigned> prev;
        for (const auto &cell : row) {
            if (cell.skipped) {
                continue;
            }
            if (prev && cell.solutions < *prev) {
                return false;
            }
            prev = cell.solutions;
        }
    }
    return true;
}

namespace detail {

inline std::string fmt(double v, int digits = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string xml_escape(const std::string &s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

inline const char *status_name(const std::optional<SearchStatus> &s)
{
    return s ? to_string(*s) : "Skipped";
}

} // namespace detail

struct Plot {
    std::string svg;
    std::string csv;
};

inline std::string gap_csv(const GapReport &rep)
{
    std::ostringstream os;
    os << "offset,tau,tau_approx,status,min_residual,within_predicted\n";
    for (const auto &g : rep.grid) {
        os << g.offset << ',' << to_string(g.tau) << ',' << detail::fmt(g.tau.get_d(), 6) << ','
           << detail::status_name(g.status) << ',' << (g.min_residual ? to_string(*g.min_residual) : "") << ','
           << (g.within_predicted ? 1 : 0) << '\n';
    }
    return os.str();
}

inline std::string phase_csv(const PhaseMatrix &pm)
{
    std::ostringstream os;
    os << "alpha,beta,coeff,samples,solutions,empty,undecided,skipped,density,empty_fraction,undecided_fraction\n";
    for (const auto &row : pm.cells) {
        for (const auto &c : row) {
            os << to_string(c.alpha) << ',' << to_string(c.beta) << ',' << to_string(pm.coeff) << ',' << c.samples()
               << ',' << c.solutions << ',' << c.empty << ',' << c.undecided << ',' << (c.skipped ? 1 : 0) << ','
               << detail::fmt(c.density(), 6) << ',' << detail::fmt(c.empty_fraction(), 6) << ','
               << detail::fmt(c.undecided_fraction(), 6) << '\n';
        }
    }
    return os.str();
}

// Strip chart of grid statuses with tau0 and the predicted radius marked.
inline Plot emit_plots(const GapReport &rep)
{
    if (rep.grid.empty()) {
        throw std::invalid_argument("emit_plots: empty gap report");
    }
    const double width = 800, height = 160, left = 40, right = 20, top = 40, bar = 50;
    const double plot_w = width - left - right;
    const double n = static_cast<double>(rep.grid.size());
    const double cell = plot_w / n;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">"
       << detail::xml_escape("gap scan at m = " + rep.m.get_str() + ", tau0 = " + to_decimal(rep.tau0, 4) +
                             ", predicted radius = " + to_decimal(rep.predicted_radius, 6))
       << "</text>\n";
    // predicted band
    const double half = (n - 1) / 2;
    const double band = rep.step > 0 ? Rat(rep.predicted_radius / rep.step).get_d() : 0.0;
    const double bx0 = left + (half - band) * cell;
    const double bx1 = left + (half + band + 1) * cell;
    os << "<rect x=\"" << detail::fmt(bx0) << "\" y=\"" << top - 6 << "\" width=\"" << detail::fmt(bx1 - bx0)
       << "\" height=\"" << bar + 12 << "\" fill=\"#dde7f5\"/>\n";
    for (std::size_t i = 0; i < rep.grid.size(); ++i) {
        const auto &g = rep.grid[i];
        const char *color = "#bbbbbb";
        if (g.status == SearchStatus::Empty) {
            color = "#4c9a5a";
        } else if (g.status == SearchStatus::Solutions) {
            color = "#c8453c";
        } else if (g.status == SearchStatus::Undecided) {
            color = "#e89b2f";
        }
        os << "<rect x=\"" << detail::fmt(left + static_cast<double>(i) * cell) << "\" y=\"" << top << "\" width=\""
           << detail::fmt(cell) << "\" height=\"" << bar << "\" fill=\"" << color << "\"/>\n";
    }
    const double x0 = left + (half + 0.5) * cell;
    os << "<line x1=\"" << detail::fmt(x0) << "\" y1=\"" << top - 10 << "\" x2=\"" << detail::fmt(x0) << "\" y2=\""
       << top + bar + 10 << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << detail::fmt(x0) << "\" y=\"" << top + bar + 24
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">tau0</text>\n";
    os << "<text x=\"" << left << "\" y=\"" << height - 10
       << "\" font-family=\"sans-serif\" font-size=\"10\">green: Empty, red: Solutions, orange: Undecided, grey: "
          "skipped; shaded: predicted solution-free radius</text>\n";
    os << "</svg>\n";
    return {os.str(), gap_csv(rep)};
}

// Heatmap of solvability density; rows alpha, columns beta.
inline Plot emit_plots(const PhaseMatrix &pm)
{
    if (pm.empty() || pm.alphas.empty() || pm.betas.empty()) {
        throw std::invalid_argument("emit_plots: empty phase matrix");
    }
    const double cw = 70, ch = 40, left = 80, top = 50;
    const double width = left + cw * static_cast<double>(pm.betas.size()) + 20;
    const double height = top + ch * static_cast<double>(pm.alphas.size()) + 50;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">"
       << detail::xml_escape("exploratory solvability density, s = " + std::to_string(pm.inst.s) +
                             ", k = " + std::to_string(pm.inst.k) + ", coeff = " + to_string(pm.coeff))
       << "</text>\n";
    for (std::size_t b = 0; b < pm.betas.size(); ++b) {
        os << "<text x=\"" << detail::fmt(left + cw * (static_cast<double>(b) + 0.5)) << "\" y=\"" << top - 8
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">beta="
           << detail::xml_escape(to_string(pm.betas[b])) << "</text>\n";
    }
    for (std::size_t a = 0; a < pm.alphas.size(); ++a) {
        const double y = top + ch * static_cast<double>(a);
        os << "<text x=\"" << left - 6 << "\" y=\"" << detail::fmt(y + ch / 2 + 4)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">alpha="
           << detail::xml_escape(to_string(pm.alphas[a])) << "</text>\n";
        for (std::size_t b = 0; b < pm.betas.size(); ++b) {
            const PhaseCell &cell = pm.cells[a][b];
            std::string fill = "#bbbbbb";
            if (!cell.skipped) {
                const double d = cell.density();
                const int r = static_cast<int>(255 - d * (255 - 33));
                const int g = static_cast<int>(255 - d * (255 - 102));
                const int bl = static_cast<int>(255 - d * (255 - 172));
                char buf[16];
                std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, bl);
                fill = buf;
            }
            const double x = left + cw * static_cast<double>(b);
            os << "<rect x=\"" << detail::fmt(x) << "\" y=\"" << detail::fmt(y) << "\" width=\"" << cw
               << "\" height=\"" << ch << "\" fill=\"" << fill << "\" stroke=\"#555555\" stroke-width=\"0.5\"/>\n";
            os << "<text x=\"" << detail::fmt(x + cw / 2) << "\" y=\"" << detail::fmt(y + ch / 2 + 4)
               << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
               << (cell.skipped ? std::string("skip") : detail::fmt(cell.density(), 2)) << "</text>\n";
        }
    }
    os << "<text x=\"10\" y=\"" << detail::fmt(height - 12)
       << "\" font-family=\"sans-serif\" font-size=\"10\">radius = coeff * m^alpha, eta = coeff * m^beta; "
          "density = fraction of sampled m with a solution</text>\n";
    os << "</svg>\n";
    return {os.str(), phase_csv(pm)};
}

inline nlohmann::ordered_json to_json(const GapReport &rep)
{
    nlohmann::ordered_json j;
    j["m"] = rep.m.get_str();
    j["tau0"] = to_string(rep.tau0);
    j["tau0_approx"] = rep.tau0.get_d();
    j["predicted_radius"] = to_string(rep.predicted_radius);
    j["predicted_radius_approx"] = rep.predicted_radius.get_d();
    j["step"] = to_string(rep.step);
    j["grid_points"] = rep.grid.size();
    j["measured_gap"] = to_string(rep.measured_gap);
    j["measured_gap_approx"] = rep.measured_gap.get_d();
    j["gap_at_least_predicted"] = rep.measured_gap >= rep.predicted_radius;
    std::size_t counts[4] = {0, 0, 0, 0};
    for (const auto &g : rep.grid) {
        counts[g.status ? static_cast<int>(*g.status) : 3]++;
    }
    j["counts"] = {{"Solutions", counts[0]}, {"Empty", counts[1]}, {"Undecided", counts[2]}, {"Skipped", counts[3]}};
    j["anomalies"] = rep.anomalies;
    j["complete"] = rep.complete;
    return j;
}

inline nlohmann::ordered_json to_json(const PhaseMatrix &pm)
{
    nlohmann::ordered_json j;
    j["label"] = "exploratory";
    j["coeff"] = to_string(pm.coeff);
    std::vector<std::string> ms, as, bs;
    for (const auto &m : pm.m_samples) {
        ms.push_back(m.get_str());
    }
    for (const auto &a : pm.alphas) {
        as.push_back(to_string(a));
    }
    for (const auto &b : pm.betas) {
        bs.push_back(to_string(b));
    }
    j["m_samples"] = ms;
    j["alphas"] = as;
    j["betas"] = bs;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto &row : pm.cells) {
        for (const auto &c : row) {
            nlohmann::ordered_json jc;
            jc["alpha"] = to_string(c.alpha);
            jc["beta"] = to_string(c.beta);
            jc["skipped"] = c.skipped;
            if (c.skipped) {
                jc["reason"] = c.skip_reason;
                jc["density"] = nullptr;
            } else {
                jc["solutions"] = c.solutions;
                jc["empty"] = c.empty;
                jc["undecided"] = c.undecided;
                jc["density"] = detail::fmt(c.density(), 6);
            }
            cells.push_back(jc);
        }
    }
    j["cells"] = cells;
    j["density_monotone_in_beta"] = density_monotone_in_beta(pm);
    return j;
}

} // namespace shiftwaring

#pragma once

// Subcommand dispatch for the shiftwaring tool.
//
// Exit codes:
//   search         0 solutions, 1 empty, 2 undecided
//   certify/verify 0 ok, 3 anomalies (or failed audit), 4 partial (budget)
//   scan/phase     0 complete, 3 gap anomaly or non-monotone density, 4 partial
//   witness        0
//   5 configuration error, 6 runtime error (including a refused search budget)

#include "certify.hpp"
#include "config.hpp"
#include "scan.hpp"
#include "search.hpp"
#include "witness.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace shiftwaring {

enum ExitCode : int {
    exit_ok = 0,
    exit_empty = 1,
    exit_undecided = 2,
    exit_anomaly = 3,
    exit_partial = 4,
    exit_config = 5,
    exit_runtime = 6,
};

inline const std::vector<std::string> &commands()
{
    static const std::vector<std::string> c = {"witness", "search", "certify", "verify", "scan", "phase"};
    return c;
}

struct RunOptions {
    unsigned workers{1};
    std::optional<std::string> out_dir;
    std::string format{"json"}; // json or csv, for stdout
};

// Everything a command produces, before anything is written.
struct RunOutput {
    int code{exit_ok};
    nlohmann::ordered_json envelope;
    std::optional<std::string> csv;
    std::map<std::string, std::string> files;
};

namespace detail {

inline Precision precision_of(const Config &cfg)
{
    return Precision{cfg.get_int("precision", "start"), cfg.get_int("precision", "cap")};
}

inline double max_candidates_of(const Config &cfg)
{
    return static_cast<double>(cfg.get_int("budget", "max_candidates"));
}

inline Int positive_int(const Config &cfg, const std::string &section, const std::string &key)
{
    const long v = cfg.get_int(section, key);
    if (v < 1) {
        throw config_error(section + "." + key, "must be >= 1");
    }
    return Int(v);
}

inline std::string exactly_one(const Config &cfg, const std::string &section, const std::string &a,
                               const std::string &b)
{
    const bool ha = cfg.has(section, a);
    const bool hb = cfg.has(section, b);
    if (ha == hb) {
        throw config_error(section, "exactly one of " + a + " and " + b + " is required");
    }
    return ha ? a : b;
}

inline std::string lower_decimal(const Dyadic &d) { return to_decimal(d.to_rat(), 12, Rounding::Down); }
inline std::string upper_decimal(const Dyadic &d) { return to_decimal(d.to_rat(), 12, Rounding::Up); }

inline std::string point_text(const Point &x)
{
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out += (i ? " " : "") + std::to_string(x[i]);
    }
    return out;
}

inline std::string csv_quote(const std::string &s) { return '"' + s + '"'; }

inline Certificate certificate_for(const Config &cfg, const Instance &inst)
{
    return derive_constants(inst, cfg.get_rat("certify", "headroom"));
}

inline RunOutput run_witness(const Config &cfg, const Instance &inst)
{
    const Int lo = positive_int(cfg, "witness", "m_lo");
    const Int hi = positive_int(cfg, "witness", "m_hi");
    if (hi < lo) {
        throw config_error("witness.m_hi", "must be >= m_lo");
    }
    RunOutput out;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    std::ostringstream csv;
    csv << "m,tau,tau_decimal,center_lower,center_upper,nearest\n";
    for (Int m = lo; m <= hi; ++m) {
        const Rat tau = tau_value(inst, m);
        const CenterResult c = center_m(inst, Real::of(tau), precision_of(cfg));
        nlohmann::ordered_json j;
        j["m"] = m.get_str();
        j["tau"] = to_string(tau);
        j["tau_decimal"] = to_decimal(tau, 12);
        j["center"] = to_json(c.center);
        j["center_lower"] = lower_decimal(c.center.lower());
        j["center_upper"] = upper_decimal(c.center.upper());
        j["nearest"] = c.nearest.get_str();
        rows.push_back(j);
        csv << m.get_str() << ',' << to_string(tau) << ',' << to_decimal(tau, 12) << ','
            << lower_decimal(c.center.lower()) << ',' << upper_decimal(c.center.upper()) << ',' << c.nearest.get_str()
            << '\n';
    }
    out.envelope["result"] = {{"rows", rows}};
    out.csv = csv.str();
    out.files["witness.json"] = "";
    out.files["witness.csv"] = *out.csv;
    return out;
}

inline RunOutput run_search(const Config &cfg, const Instance &inst, unsigned workers)
{
    const std::string tau_key = exactly_one(cfg, "search", "tau", "m");
    const Rat tau = tau_key == "tau" ? cfg.get_rat("search", "tau") : tau_value(inst, positive_int(cfg, "search", "m"));
    if (tau <= 0) {
        throw config_error("search.tau", "must be positive");
    }
    const std::string eta_key = exactly_one(cfg, "search", "eta", "eta_coeff");
    const Rat eta_v = cfg.get_rat("search", eta_key);
    if (eta_v <= 0) {
        throw config_error("search." + eta_key, "must be positive");
    }
    const Tolerance eta = eta_key == "eta" ? Tolerance::absolute(eta_v) : Tolerance::scaled(eta_v, tau, inst.k);
    const std::string radius_key = exactly_one(cfg, "search", "radius", "radius_coeff");
    const Rat radius_v = cfg.get_rat("search", radius_key);
    if (radius_v <= 0) {
        throw config_error("search." + radius_key, "must be positive");
    }
    const RadiusRule radius = radius_key == "radius" ? RadiusRule::fixed(radius_v) : RadiusRule::scaled(radius_v);
    const std::string mode_text = cfg.get("search", "mode");
    const SearchMode mode = mode_text == "auto"             ? SearchMode::Auto
                            : mode_text == "meet-in-middle" ? SearchMode::MeetInMiddle
                                                            : SearchMode::DepthFirst;

    SearchSpec spec{inst, Real::of(tau), eta, radius, precision_of(cfg), max_candidates_of(cfg), workers, mode,
                    cfg.get("search", "prune") == "true"};
    const SearchOutcome o = search(spec);

    RunOutput out;
    out.code = o.status == SearchStatus::Solutions ? exit_ok
               : o.status == SearchStatus::Empty   ? exit_empty
                                                   : exit_undecided;
    nlohmann::ordered_json result;
    result["tau"] = to_string(tau);
    result["outcome"] = to_json(o);

    std::ostringstream csv;
    csv << "kind,x,residual_exact,residual_lower,residual_upper\n";
    auto rows = [&](const std::vector<Candidate> &cs, const char *kind) {
        for (const auto &c : cs) {
            csv << kind << ',' << csv_quote(point_text(c.x)) << ','
                << (c.exact_residual ? to_string(*c.exact_residual) : "") << ','
                << lower_decimal(c.residual.lower()) << ',' << upper_decimal(c.residual.upper()) << '\n';
        }
    };
    rows(o.solutions, "solution");
    rows(o.undecided, "undecided");
    if (o.min_residual) {
        csv << "argmin," << csv_quote(point_text(o.argmin)) << ','
            << (o.min_residual_exact ? to_string(*o.min_residual_exact) : "") << ','
            << lower_decimal(o.min_residual->lower()) << ',' << upper_decimal(o.min_residual->upper()) << '\n';
    }
    out.csv = csv.str();
    out.files["search.csv"] = *out.csv;

    if (cfg.has("search", "profile_m")) {
        const auto ms = cfg.get_int_list("search", "profile_m");
        for (const auto &m : ms) {
            if (m < 1) {
                throw config_error("search.profile_m", "entries must be >= 1");
            }
        }
        const auto profile = min_residual_profile(inst, ms, radius, precision_of(cfg), workers, max_candidates_of(cfg));
        nlohmann::ordered_json jp = nlohmann::ordered_json::array();
        std::ostringstream pcsv;
        pcsv << "m,tau,min_residual,min_residual_lower,argmin\n";
        for (const auto &r : profile) {
            const std::string exact = r.min_residual_exact ? to_string(*r.min_residual_exact) : "";
            const std::string lower = r.min_residual ? lower_decimal(r.min_residual->lower()) : "";
            jp.push_back({{"m", r.m.get_str()},
                          {"tau", to_string(r.tau)},
                          {"min_residual", r.min_residual_exact ? nlohmann::ordered_json(exact) : nullptr},
                          {"argmin", r.argmin}});
            pcsv << r.m.get_str() << ',' << to_string(r.tau) << ',' << exact << ',' << lower << ','
                 << csv_quote(point_text(r.argmin)) << '\n';
        }
        result["profile"] = jp;
        out.files["profile.csv"] = pcsv.str();
    }
    out.envelope["result"] = result;
    out.files["search.json"] = "";
    return out;
}

inline RunOutput run_certify(const Config &cfg, const Instance &inst)
{
    const Certificate cert = certificate_for(cfg, inst);
    const auto audit_m0 = check_certificate(cert, cert.m0);
    const auto audit_4m0 = check_certificate(cert, 4 * cert.m0);
    RunOutput out;
    out.code = all_hold(audit_m0) && all_hold(audit_4m0) ? exit_ok : exit_anomaly;
    nlohmann::ordered_json result;
    result["certificate"] = to_json(cert);
    result["audit_4m0"] = audit_json(audit_4m0);
    out.envelope["certificate_hash"] = certificate_hash(cert);
    out.envelope["result"] = result;
    out.files["certificate.json"] = to_json(cert).dump(2) + "\n";
    out.files["certify.json"] = "";
    return out;
}

inline Certificate load_certificate(const std::string &path, const Instance &inst)
{
    std::ifstream in(path);
    if (!in) {
        throw config_error("verify.cert", "cannot open certificate file '" + path + "'");
    }
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(in);
        // accept both a bare certificate and a certify envelope
        if (j.contains("result") && j["result"].contains("certificate")) {
            j = j["result"]["certificate"];
        }
        Certificate cert = certificate_from_json(j);
        if (!(cert.inst == inst)) {
            throw config_error("verify.cert", "certificate instance differs from [instance]");
        }
        return cert;
    } catch (const config_error &) {
        throw;
    } catch (const std::exception &e) {
        throw config_error("verify.cert", std::string("malformed certificate: ") + e.what());
    }
}

inline RunOutput run_verify(const Config &cfg, const Instance &inst, unsigned workers)
{
    const Certificate cert = cfg.has("verify", "cert") ? load_certificate(cfg.get("verify", "cert"), inst)
                                                        : certificate_for(cfg, inst);
    const Int lo = cfg.has("verify", "m_lo") ? positive_int(cfg, "verify", "m_lo") : cert.m0;
    const Int hi = cfg.has("verify", "m_hi") ? positive_int(cfg, "verify", "m_hi") : Int(cert.m0 + 10);
    if (hi < lo) {
        throw config_error("verify.m_hi", "must be >= m_lo");
    }
    const auto audit = check_certificate(cert, std::max(lo, cert.m0));
    const VerificationReport rep =
        verify_certificate(cert, lo, hi, precision_of(cfg), workers, max_candidates_of(cfg));
    RunOutput out;
    if (!rep.anomalies.empty() || !all_hold(audit)) {
        out.code = exit_anomaly;
    } else if (!rep.complete()) {
        out.code = exit_partial;
    }
    nlohmann::ordered_json result = to_json(rep);
    result["audit"] = audit_json(audit);
    out.envelope["certificate_hash"] = certificate_hash(cert);
    out.envelope["result"] = result;

    std::ostringstream csv;
    csv << "m,tau,eta,status,min_residual\n";
    for (const auto &r : rep.rows) {
        csv << r.m.get_str() << ',' << to_string(r.tau) << ',' << to_string(r.eta) << ','
            << (r.outcome ? to_string(r.outcome->status) : "skipped") << ','
            << (r.outcome && r.outcome->min_residual_exact ? to_string(*r.outcome->min_residual_exact) : "")
            << '\n';
    }
    out.csv = csv.str();
    out.files["verify.csv"] = *out.csv;
    out.files["verify.json"] = "";
    return out;
}

inline RunOutput run_scan(const Config &cfg, const Instance &inst, unsigned workers)
{
    const Certificate cert = certificate_for(cfg, inst);
    const Rat c0 = cfg.get_rat("scan", "C0");
    if (c0 <= 0) {
        throw config_error("scan.C0", "must be positive");
    }
    const GapConstants gc = gap_constants(cert, c0);
    const Int m = cfg.has("scan", "m") ? positive_int(cfg, "scan", "m") : cert.m0;
    if (m < cert.m0) {
        throw config_error("scan.m", "must be >= m0 = " + cert.m0.get_str());
    }
    const long points = cfg.get_int("scan", "grid_points");
    if (points < 3 || points % 2 == 0) {
        throw config_error("scan.grid_points", "must be odd and >= 3");
    }
    if (points > cfg.get_int("budget", "max_cells")) {
        throw config_error("scan.grid_points", "exceeds budget.max_cells");
    }
    std::optional<Rat> step;
    if (cfg.has("scan", "step")) {
        step = cfg.get_rat("scan", "step");
        if (*step <= 0) {
            throw config_error("scan.step", "must be positive");
        }
    }
    const ScanOptions opt{precision_of(cfg), workers, max_candidates_of(cfg)};
    const GapReport rep = gap_scan(gc, m, static_cast<unsigned>(points), opt, step);

    RunOutput out;
    if (!rep.anomalies.empty()) {
        out.code = exit_anomaly;
    } else if (!rep.complete) {
        out.code = exit_partial;
    }
    nlohmann::ordered_json result;
    result["gap_constants"] = to_json(gc);
    result["report"] = to_json(rep);
    out.envelope["certificate_hash"] = certificate_hash(cert);
    out.envelope["result"] = result;
    const Plot plot = emit_plots(rep);
    out.csv = plot.csv;
    out.files["scan.csv"] = plot.csv;
    out.files["scan.svg"] = plot.svg;
    out.files["scan.json"] = "";
    return out;
}

inline RunOutput run_phase(const Config &cfg, const Instance &inst, unsigned workers)
{
    const Certificate cert = certificate_for(cfg, inst);
    const auto ms = cfg.get_int_list("phase", "m_samples");
    for (const auto &m : ms) {
        if (m < 1) {
            throw config_error("phase.m_samples", "entries must be >= 1");
        }
    }
    const auto alphas = cfg.get_rat_list("phase", "alphas");
    const auto betas = cfg.get_rat_list("phase", "betas");
    if (alphas.empty() || betas.empty()) {
        throw config_error("phase", "alphas and betas must be non-empty");
    }
    for (const auto &e : alphas) {
        (void)detail::exponent_parts(e);
    }
    for (const auto &e : betas) {
        (void)detail::exponent_parts(e);
    }
    if (static_cast<double>(alphas.size()) * static_cast<double>(betas.size()) >
        static_cast<double>(cfg.get_int("budget", "max_cells"))) {
        throw config_error("phase", "alphas x betas exceeds budget.max_cells");
    }
    const Rat coeff = cfg.has("phase", "coeff") ? cfg.get_rat("phase", "coeff") : std::min(cert.c, cert.c_prime);
    if (coeff <= 0) {
        throw config_error("phase.coeff", "must be positive");
    }
    const ScanOptions opt{precision_of(cfg), workers, max_candidates_of(cfg)};
    const PhaseMatrix pm = phase_sweep(inst, ms, alphas, betas, coeff, opt);

    RunOutput out;
    bool partial = false;
    for (const auto &row : pm.cells) {
        for (const auto &cell : row) {
            partial = partial || cell.skipped;
        }
    }
    if (!density_monotone_in_beta(pm)) {
        out.code = exit_anomaly;
    } else if (partial) {
        out.code = exit_partial;
    }
    out.envelope["certificate_hash"] = certificate_hash(cert);
    out.envelope["result"] = to_json(pm);
    out.csv = phase_csv(pm);
    out.files["phase.csv"] = *out.csv;
    if (!pm.empty()) {
        out.files["phase.svg"] = emit_plots(pm).svg;
    }
    out.files["phase.json"] = "";
    return out;
}

inline nlohmann::ordered_json diagnostic(const std::string &kind, const std::string &message,
                                         const std::string &key = {})
{
    nlohmann::ordered_json j;
    j["error"] = kind;
    if (!key.empty()) {
        j["key"] = key;
    }
    j["message"] = message;
    return j;
}

} // namespace detail

// Runs a command and builds its outputs. Throws config_error for invalid
// configuration; nothing is written here.
inline RunOutput execute(const std::string &command, const Config &cfg, unsigned workers = 1)
{
    if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
        throw config_error("", "unknown command '" + command + "'");
    }
    cfg.validate();
    const Instance inst = cfg.instance();
    RunOutput out;
    if (command == "witness") {
        out = detail::run_witness(cfg, inst);
    } else if (command == "search") {
        out = detail::run_search(cfg, inst, workers);
    } else if (command == "certify") {
        out = detail::run_certify(cfg, inst);
    } else if (command == "verify") {
        out = detail::run_verify(cfg, inst, workers);
    } else if (command == "scan") {
        out = detail::run_scan(cfg, inst, workers);
    } else {
        out = detail::run_phase(cfg, inst, workers);
    }
    nlohmann::ordered_json env;
    env["schema_version"] = schema_version;
    env["command"] = command;
    env["exploratory"] = command == "phase";
    env["config"] = cfg.to_text();
    env["certificate_hash"] = out.envelope.contains("certificate_hash") ? out.envelope["certificate_hash"] : nullptr;
    env["exit_code"] = out.code;
    env["result"] = out.envelope["result"];
    out.envelope = env;
    const std::string json_text = out.envelope.dump(2) + "\n";
    for (auto &[name, body] : out.files) {
        if (body.empty() && name.size() > 5 && name.substr(name.size() - 5) == ".json") {
            body = json_text;
        }
    }
    return out;
}

// Runs a command, prints the result to `out` (diagnostics to `err`) and writes
// files to opt.out_dir. Returns the exit code.
inline int run(const std::string &command, const Config &cfg, const RunOptions &opt, std::ostream &out,
               std::ostream &err)
{
    RunOutput result;
    try {
        result = execute(command, cfg, opt.workers);
    } catch (const config_error &e) {
        err << detail::diagnostic("config", e.what(), e.key_path()).dump() << '\n';
        return exit_config;
    } catch (const instance_error &e) {
        err << detail::diagnostic("config", e.what(), "instance." + e.hypothesis()).dump() << '\n';
        return exit_config;
    } catch (const parse_error &e) {
        err << detail::diagnostic("config", e.what()).dump() << '\n';
        return exit_config;
    } catch (const budget_error &e) {
        auto d = detail::diagnostic("budget", e.what());
        d["estimate"] = e.estimate();
        err << d.dump() << '\n';
        return exit_runtime;
    } catch (const std::exception &e) {
        err << detail::diagnostic("runtime", e.what()).dump() << '\n';
        return exit_runtime;
    }
    if (opt.format == "csv") {
        if (!result.csv) {
            err << detail::diagnostic("config", "command '" + command + "' has no CSV output").dump() << '\n';
            return exit_config;
        }
        out << *result.csv;
    } else {
        out << result.envelope.dump(2) << '\n';
    }
    if (opt.out_dir) {
        try {
            std::filesystem::create_directories(*opt.out_dir);
            for (const auto &[name, body] : result.files) {
                std::ofstream f(std::filesystem::path(*opt.out_dir) / name, std::ios::binary);
                f << body;
                if (!f) {
                    throw std::runtime_error("cannot write " + name);
                }
            }
        } catch (const std::exception &e) {
            err << detail::diagnostic("runtime", e.what()).dump() << '\n';
            return exit_runtime;
        }
    }
    return result.code;
}

} // namespace shiftwaring

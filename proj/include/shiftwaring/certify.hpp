#pragma once

// Effective constants for the non-representability of tau_m.
//
// Suppose x = m + a solves |sum (x_i - theta_i)^k - tau_m| < eta with
// eta < c tau_m^{1-2/k} and |x_i - (tau_m/s)^{1/k}| < c' tau_m^{1/2k}. For
// m >= m0 the chain below forces sum a_i = s and then
// sum (a_i - theta_i)^2 < L(theta), which no integer vector achieves. Every
// constant is an exact rational and every step is re-checkable at any m.
//
//   R   >= (2s)^{1/2k}                     tau_m <= 2 s m^k once m >= k
//   B   >= (2s)^{(k-2)/k}                  so eta < c B m^{k-2}
//   c1  = c' R                             c' tau^{1/2k} <= c1 m^{1/2}
//   c2  = c1 + k                           |a_i| < c1 m^{1/2} + k <= c2 m^{1/2}
//   c3  = c1 + eps                         |a_i - theta_i| <= c3 m^{1/2} once eps isqrt(m) >= k + 1
//   c4  = c B / (k m) + sum_{j=2..k} C(k,j)/k s c3^j / isqrt(m)^{j-2}
//                                          |s - sum a_i| < c4 <= headroom < 1
//   k = 2:  c5 = c B                       sum (a_i - theta_i)^2 < c5 < L
//   k >= 3: c6 = sum_{j=3..k} C(k,j) c3^{j-2} / isqrt(m)^{j-3}
//           c7 = c B / C(k,2), c8 = c6 / C(k,2)
//                                          S < c7 + c8 m^{-1/2} S, c8/isqrt(m) <= 1/2  =>  S < 2 c7 < L

#include "model.hpp"
#include "parallel.hpp"
#include "search.hpp"
#include "witness.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace shiftwaring {

struct AuditItem {
    std::string name;
    std::string detail;
    bool holds{false};
};

inline bool all_hold(const std::vector<AuditItem> &items)
{
    for (const auto &i : items) {
        if (!i.holds) {
            return false;
        }
    }
    return true;
}

struct Chain {
    Rat c1, c2, c3, c4;
    std::optional<Rat> c5;
    std::optional<Rat> c6, c7, c8;
};

struct Certificate {
    Instance inst;
    Rat headroom;
    Rat c;
    Rat c_prime;
    Rat eps;
    Int m0;
    Rat L;
    Rat root_bound;     // R
    Rat tol_bound;      // B
    Chain chain;        // evaluated at m0
    std::uint64_t c_halvings{0};
    std::uint64_t c_prime_halvings{0};
    std::uint64_t eps_halvings{0};
};

namespace detail {

inline Rat chain_c4(const Instance &inst, const Rat &c, const Rat &c3, const Rat &tol_bound, const Int &m)
{
    const Int r = isqrt_floor(m);
    Rat c4 = c * tol_bound / (Rat(inst.k) * Rat(m));
    for (unsigned j = 2; j <= inst.k; ++j) {
        c4 += Rat(binomial(inst.k, j)) / Rat(inst.k) * Rat(inst.s) * pow_int(c3, j) / Rat(pow_int(r, j - 2));
    }
    return c4;
}

} // namespace detail

inline Chain chain_at(const Instance &inst, const Rat &c, const Rat &c_prime, const Rat &eps, const Rat &root_bound,
                      const Rat &tol_bound, const Int &m)
{
    Chain ch;
    ch.c1 = c_prime * root_bound;
    ch.c2 = ch.c1 + Rat(inst.k);
    ch.c3 = ch.c1 + eps;
    ch.c4 = detail::chain_c4(inst, c, ch.c3, tol_bound, m);
    if (inst.k == 2) {
        ch.c5 = c * tol_bound;
    } else {
        const Int r = isqrt_floor(m);
        const Rat b2 = Rat(binomial(inst.k, 2));
        Rat c6 = 0;
        for (unsigned j = 3; j <= inst.k; ++j) {
            c6 += Rat(binomial(inst.k, j)) * pow_int(ch.c3, j - 2) / Rat(pow_int(r, j - 3));
        }
        ch.c6 = c6;
        ch.c7 = c * tol_bound / b2;
        ch.c8 = c6 / b2;
    }
    return ch;
}

inline Chain chain_at(const Certificate &cert, const Int &m)
{
    return chain_at(cert.inst, cert.c, cert.c_prime, cert.eps, cert.root_bound, cert.tol_bound, m);
}

namespace detail {

inline std::string str(const Rat &q)
{
    return to_string(q);
}

// The conditions on m alone (everything except m >= m0 and the stored values).
inline std::vector<AuditItem> side_conditions(const Certificate &cert, const Int &m)
{
    std::vector<AuditItem> out;
    const auto &inst = cert.inst;
    const Int r = isqrt_floor(m);
    const Chain ch = chain_at(cert, m);
    out.push_back({"m >= k", "m = " + m.get_str() + ", k = " + std::to_string(inst.k), m >= inst.k});
    out.push_back({"eps * isqrt(m) >= k + 1", str(cert.eps) + " * " + r.get_str() + " >= " + std::to_string(inst.k + 1),
                   cert.eps * Rat(r) >= Rat(inst.k + 1)});
    out.push_back({"c4(m) <= headroom", str(ch.c4) + " <= " + str(cert.headroom), ch.c4 <= cert.headroom});
    if (inst.k >= 3) {
        const Rat lhs = *ch.c8 / Rat(r);
        out.push_back({"c8(m) / isqrt(m) <= 1/2", str(lhs) + " <= 1/2", lhs <= Rat(1, 2)});
    }
    return out;
}

inline bool side_conditions_hold(const Certificate &cert, const Int &m)
{
    return all_hold(side_conditions(cert, m));
}

} // namespace detail

inline std::vector<AuditItem> check_certificate(const Certificate &cert, const Int &m)
{
    if (m < 1) {
        throw std::invalid_argument("check_certificate: m must be >= 1");
    }
    using detail::str;
    const auto &inst = cert.inst;
    const auto &ch = cert.chain;
    std::vector<AuditItem> out;
    out.push_back({"m >= m0", "m = " + m.get_str() + ", m0 = " + cert.m0.get_str(), m >= cert.m0});
    out.push_back({"0 < headroom < 1", str(cert.headroom), cert.headroom > 0 && cert.headroom < 1});
    out.push_back({"c, c', eps > 0", str(cert.c) + ", " + str(cert.c_prime) + ", " + str(cert.eps),
                   cert.c > 0 && cert.c_prime > 0 && cert.eps > 0});
    {
        const Rat lhs = pow_int(cert.root_bound, 2 * inst.k);
        out.push_back({"R^(2k) >= 2s", str(lhs) + " >= " + std::to_string(2 * inst.s), lhs >= Rat(2 * inst.s)});
    }
    {
        const Rat lhs = pow_int(cert.tol_bound, inst.k);
        const Rat rhs = pow_int(Rat(2 * inst.s), inst.k - 2);
        out.push_back({"B^k >= (2s)^(k-2)", str(lhs) + " >= " + str(rhs), lhs >= rhs});
    }
    out.push_back({"L = sum min(theta_i, 1 - theta_i)^2", str(cert.L), cert.L == theta_gap_lower_bound(inst)});
    const Chain def = chain_at(cert, cert.m0);
    const bool matches = def.c1 == ch.c1 && def.c2 == ch.c2 && def.c3 == ch.c3 && def.c4 == ch.c4 &&
                         def.c5 == ch.c5 && def.c6 == ch.c6 && def.c7 == ch.c7 && def.c8 == ch.c8;
    out.push_back({"stored chain matches its definition at m0", matches ? "ok" : "mismatch", matches});
    bool positive = ch.c1 > 0 && ch.c2 > 0 && ch.c3 > 0 && ch.c4 > 0;
    for (const auto *v : {&ch.c5, &ch.c6, &ch.c7, &ch.c8}) {
        if (*v) {
            positive = positive && **v > 0;
        }
    }
    out.push_back({"chain constants positive", positive ? "ok" : "non-positive constant", positive});
    out.push_back({"c4 <= headroom", str(ch.c4) + " <= " + str(cert.headroom), ch.c4 <= cert.headroom});
    for (auto &item : detail::side_conditions(cert, m)) {
        out.push_back(std::move(item));
    }
    if (inst.k == 2) {
        const bool ok = ch.c5 && *ch.c5 < cert.L;
        out.push_back({"c5 < L", (ch.c5 ? str(*ch.c5) : std::string("missing")) + " < " + str(cert.L), ok});
    } else {
        const bool ok = ch.c7 && Rat(2 * *ch.c7) < cert.L;
        out.push_back({"2 c7 < L", (ch.c7 ? str(2 * *ch.c7) : std::string("missing")) + " < " + str(cert.L), ok});
        const bool ok8 = ch.c8 && *ch.c8 / Rat(isqrt_floor(cert.m0)) <= Rat(1, 2);
        out.push_back({"c8 / isqrt(m0) <= 1/2", ch.c8 ? str(*ch.c8 / Rat(isqrt_floor(cert.m0))) : "missing", ok8});
    }
    return out;
}

inline Certificate derive_constants(const Instance &inst, const Rat &headroom = Rat(1, 2))
{
    if (headroom <= 0 || headroom >= 1) {
        throw std::invalid_argument("derive_constants: headroom must lie in (0,1)");
    }
    Certificate cert;
    cert.inst = inst;
    cert.headroom = headroom;
    cert.L = theta_gap_lower_bound(inst);
    cert.root_bound = rational_power_upper(Rat(2 * inst.s), 1, 2 * inst.k);
    cert.tol_bound = rational_power_upper(Rat(2 * inst.s), inst.k - 2, inst.k);

    const Rat half(1, 2);
    const Rat b2 = Rat(binomial(inst.k, 2));
    // Tolerance coefficient: the branch inequality must beat L.
    cert.c = 1;
    auto branch_ok = [&] {
        return inst.k == 2 ? cert.c * cert.tol_bound < cert.L : 2 * cert.c * cert.tol_bound / b2 < cert.L;
    };
    while (!branch_ok()) {
        cert.c *= half;
        ++cert.c_halvings;
    }
    // The j = 2 term of c4 does not decay in m; with c3 <= 2 eps keep it to headroom / 2.
    cert.eps = 1;
    auto leading = [&]() -> Rat { return b2 / Rat(inst.k) * Rat(inst.s) * pow_int(Rat(2 * cert.eps), 2); };
    while (leading() > headroom * half) {
        cert.eps *= half;
        ++cert.eps_halvings;
    }
    cert.c_prime = 1;
    while (cert.c_prime * cert.root_bound > cert.eps) {
        cert.c_prime *= half;
        ++cert.c_prime_halvings;
    }
    // Side conditions are monotone in m: gallop, then bisect for the least m.
    Int hi = 1;
    while (!detail::side_conditions_hold(cert, hi)) {
        hi *= 2;
    }
    Int lo = hi / 2; // fails (or is 0)
    while (hi - lo > 1) {
        const Int mid = (lo + hi) / 2;
        if (detail::side_conditions_hold(cert, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    cert.m0 = hi;
    cert.chain = chain_at(cert, cert.m0);
    return cert;
}

struct GapConstants {
    Certificate cert;
    Rat C0, C, C_prime, C1, C2, C3;
    std::uint64_t c0_halvings{0};
};

// Closing inequalities of the gap argument.
inline std::vector<AuditItem> check_gap_constants(const GapConstants &gc)
{
    using detail::str;
    std::vector<AuditItem> out;
    out.push_back({"C0 <= 1/2", str(gc.C0), gc.C0 > 0 && gc.C0 <= Rat(1, 2)});
    out.push_back({"C1 >= (2/k) s^(-1/k)", str(gc.C1), gc.C1 >= Rat(2, gc.cert.inst.k)});
    const Rat c2 = Rat(3, 2) * gc.C_prime + gc.C1 * gc.C0;
    const Rat c3 = Rat(3, 2) * gc.C + gc.C0;
    out.push_back({"C2 = 3/2 C' + C1 C0", str(gc.C2), gc.C2 == c2});
    out.push_back({"C3 = 3/2 C + C0", str(gc.C3), gc.C3 == c3});
    out.push_back({"C2 <= c'", str(gc.C2) + " <= " + str(gc.cert.c_prime), gc.C2 <= gc.cert.c_prime});
    out.push_back({"C3 <= c", str(gc.C3) + " <= " + str(gc.cert.c), gc.C3 <= gc.cert.c});
    return out;
}

// Constants for: no solution of the C, C' system for tau within
// C0 tau0^{1-2/k} of tau0 = tau_m, m >= m0.
inline GapConstants gap_constants(const Certificate &cert, const Rat &C0)
{
    if (C0 <= 0) {
        throw std::invalid_argument("gap_constants: C0 must be positive");
    }
    GapConstants gc;
    gc.cert = cert;
    gc.C1 = Rat(2, cert.inst.k);
    gc.C0 = C0;
    while (gc.C0 > Rat(1, 2) || gc.C1 * gc.C0 > cert.c_prime / 2 || gc.C0 > cert.c / 2) {
        gc.C0 /= 2;
        ++gc.c0_halvings;
    }
    gc.C_prime = cert.c_prime / 3;
    gc.C = cert.c / 3;
    gc.C2 = Rat(3, 2) * gc.C_prime + gc.C1 * gc.C0;
    gc.C3 = Rat(3, 2) * gc.C + gc.C0;
    return gc;
}

// Certified lower bound of C0 * tau0^{1-2/k}.
inline Rat predicted_radius(const GapConstants &gc, const Rat &tau0)
{
    const unsigned k = gc.cert.inst.k;
    const Real r = Real::power(gc.C0, tau0, static_cast<long>(k) - 2, k);
    if (r.exact) {
        return *r.exact;
    }
    return r.at(128).lower().to_rat();
}

// A rational strictly below coeff * tau^{1-2/k}.
inline Rat tolerance_below(const Rat &coeff, const Rat &tau, unsigned k)
{
    const Ball b = Real::power(coeff, tau, static_cast<long>(k) - 2, k).at(128);
    const Rat lo = b.lower().to_rat();
    return lo * (1 - make_rat(Int(1), Int(Int(1) << 60)));
}

struct VerifyRow {
    Int m;
    Rat tau;
    Rat eta;
    std::optional<SearchOutcome> outcome;
    std::string skipped;
};

struct VerificationReport {
    Certificate cert;
    Int m_lo, m_hi;
    std::vector<VerifyRow> rows;
    std::vector<Int> anomalies;
    std::vector<Int> skipped;

    [[nodiscard]] bool complete() const { return skipped.empty(); }
};

inline VerificationReport verify_certificate(const Certificate &cert, const Int &m_lo, const Int &m_hi,
                                             const Precision &precision = {}, unsigned workers = 1,
                                             double max_candidates = 1e8)
{
    if (m_lo < 1 || m_hi < m_lo) {
        throw std::invalid_argument("verify_certificate: need 1 <= m_lo <= m_hi");
    }
    VerificationReport rep;
    rep.cert = cert;
    rep.m_lo = m_lo;
    rep.m_hi = m_hi;
    const auto n = static_cast<std::size_t>(to_i64(Int(m_hi - m_lo + 1)));
    rep.rows.resize(n);
    for_each_task(n, workers, [&](std::size_t i) {
        VerifyRow &row = rep.rows[i];
        row.m = m_lo + static_cast<unsigned long>(i);
        row.tau = tau_value(cert.inst, row.m);
        row.eta = tolerance_below(cert.c, row.tau, cert.inst.k);
        SearchSpec spec{cert.inst,
                        Real::of(row.tau),
                        Tolerance::absolute(row.eta),
                        RadiusRule::scaled(cert.c_prime),
                        precision,
                        max_candidates,
                        1};
        try {
            row.outcome = search(spec);
        } catch (const budget_error &e) {
            row.skipped = e.what();
        }
    });
    for (const auto &row : rep.rows) {
        if (!row.outcome) {
            rep.skipped.push_back(row.m);
        } else if (row.m >= cert.m0 && row.outcome->status != SearchStatus::Empty) {
            rep.anomalies.push_back(row.m);
        }
    }
    return rep;
}

inline nlohmann::ordered_json audit_json(const std::vector<AuditItem> &items)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &i : items) {
        arr.push_back({{"inequality", i.name}, {"detail", i.detail}, {"holds", i.holds}});
    }
    return arr;
}

inline nlohmann::ordered_json instance_json(const Instance &inst)
{
    nlohmann::ordered_json j;
    j["s"] = inst.s;
    j["k"] = inst.k;
    j["theta"] = inst.theta_text;
    std::vector<std::string> exact;
    for (const auto &t : inst.theta) {
        exact.push_back(to_string(t));
    }
    j["theta_exact"] = exact;
    return j;
}

inline nlohmann::ordered_json chain_json(const Chain &ch)
{
    nlohmann::ordered_json j;
    j["c1"] = to_string(ch.c1);
    j["c2"] = to_string(ch.c2);
    j["c3"] = to_string(ch.c3);
    j["c4"] = to_string(ch.c4);
    auto opt = [](const std::optional<Rat> &v) { return v ? nlohmann::ordered_json(to_string(*v)) : nullptr; };
    j["c5"] = opt(ch.c5);
    j["c6"] = opt(ch.c6);
    j["c7"] = opt(ch.c7);
    j["c8"] = opt(ch.c8);
    return j;
}

inline nlohmann::ordered_json to_json(const Certificate &cert)
{
    nlohmann::ordered_json j;
    j["instance"] = instance_json(cert.inst);
    j["headroom"] = to_string(cert.headroom);
    j["c"] = to_string(cert.c);
    j["c_prime"] = to_string(cert.c_prime);
    j["eps"] = to_string(cert.eps);
    j["m0"] = cert.m0.get_str();
    j["L"] = to_string(cert.L);
    j["R"] = to_string(cert.root_bound);
    j["B"] = to_string(cert.tol_bound);
    j["chain"] = chain_json(cert.chain);
    j["halvings"] = {{"c", cert.c_halvings}, {"c_prime", cert.c_prime_halvings}, {"eps", cert.eps_halvings}};
    j["branch"] = cert.inst.k == 2 ? "k=2: c5 < L" : "k>=3: c8/isqrt(m0) <= 1/2 and 2 c7 < L";
    j["audit_m0"] = audit_json(check_certificate(cert, cert.m0));
    return j;
}

inline Certificate certificate_from_json(const nlohmann::ordered_json &j)
{
    const auto &ji = j.at("instance");
    Certificate cert;
    cert.inst = validate_instance(RawInstance{ji.at("s").get<long>(), ji.at("k").get<long>(),
                                              ji.at("theta").get<std::vector<std::string>>()});
    auto rat = [&](const nlohmann::ordered_json &v) { return parse_rational(v.get<std::string>()); };
    cert.headroom = rat(j.at("headroom"));
    cert.c = rat(j.at("c"));
    cert.c_prime = rat(j.at("c_prime"));
    cert.eps = rat(j.at("eps"));
    cert.m0 = Int(j.at("m0").get<std::string>(), 10);
    cert.L = rat(j.at("L"));
    cert.root_bound = rat(j.at("R"));
    cert.tol_bound = rat(j.at("B"));
    const auto &jc = j.at("chain");
    cert.chain.c1 = rat(jc.at("c1"));
    cert.chain.c2 = rat(jc.at("c2"));
    cert.chain.c3 = rat(jc.at("c3"));
    cert.chain.c4 = rat(jc.at("c4"));
    auto opt = [&](const char *key) -> std::optional<Rat> {
        if (jc.at(key).is_null()) {
            return std::nullopt;
        }
        return rat(jc.at(key));
    };
    cert.chain.c5 = opt("c5");
    cert.chain.c6 = opt("c6");
    cert.chain.c7 = opt("c7");
    cert.chain.c8 = opt("c8");
    if (j.contains("halvings")) {
        cert.c_halvings = j["halvings"].at("c").get<std::uint64_t>();
        cert.c_prime_halvings = j["halvings"].at("c_prime").get<std::uint64_t>();
        cert.eps_halvings = j["halvings"].at("eps").get<std::uint64_t>();
    }
    return cert;
}

inline nlohmann::ordered_json to_json(const GapConstants &gc)
{
    nlohmann::ordered_json j;
    j["C0"] = to_string(gc.C0);
    j["C"] = to_string(gc.C);
    j["C_prime"] = to_string(gc.C_prime);
    j["C1"] = to_string(gc.C1);
    j["C2"] = to_string(gc.C2);
    j["C3"] = to_string(gc.C3);
    j["C0_halvings"] = gc.c0_halvings;
    j["audit"] = audit_json(check_gap_constants(gc));
    return j;
}

// FNV-1a over the compact certificate JSON.
inline std::string certificate_hash(const Certificate &cert)
{
    const std::string text = to_json(cert).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    std::string out = os.str();
    return std::string(16 - out.size(), '0') + out;
}

inline nlohmann::ordered_json to_json(const VerificationReport &rep)
{
    nlohmann::ordered_json j;
    j["certificate_hash"] = certificate_hash(rep.cert);
    j["m0"] = rep.cert.m0.get_str();
    j["m_lo"] = rep.m_lo.get_str();
    j["m_hi"] = rep.m_hi.get_str();
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto &r : rep.rows) {
        nlohmann::ordered_json jr;
        jr["m"] = r.m.get_str();
        jr["tau"] = to_string(r.tau);
        jr["eta"] = to_string(r.eta);
        jr["eta_approx"] = r.eta.get_d();
        if (r.outcome) {
            jr["status"] = to_string(r.outcome->status);
            jr["min_residual"] = r.outcome->min_residual_exact
                                     ? nlohmann::ordered_json(to_string(*r.outcome->min_residual_exact))
                                     : nullptr;
            jr["argmin"] = r.outcome->argmin;
            jr["window"] = {{"lo", r.outcome->window.lo}, {"hi", r.outcome->window.hi}};
            jr["enumerated"] = r.outcome->stats.enumerated;
        } else {
            jr["status"] = "Skipped";
            jr["reason"] = r.skipped;
        }
        jr["certified_range"] = r.m >= rep.cert.m0;
        rows.push_back(jr);
    }
    j["rows"] = rows;
    std::vector<std::string> an, sk;
    for (const auto &m : rep.anomalies) {
        an.push_back(m.get_str());
    }
    for (const auto &m : rep.skipped) {
        sk.push_back(m.get_str());
    }
    j["anomalies"] = an;
    j["skipped"] = sk;
    return j;
}

} // namespace shiftwaring

#include "oracles.hpp"

#include <shiftwaring/certify.hpp>

#include <gtest/gtest.h>

using namespace shiftwaring;

namespace {

struct Case {
    unsigned s, k;
    std::vector<std::string> theta;
};

const std::vector<Case> cases = {
    {2, 2, {"0.3", "0.7"}},
    {3, 2, {"0.25", "0.5", "0.75"}},
    {2, 3, {"0.3", "0.7"}},
    {3, 3, {"0.25", "0.5", "0.75"}},
    {2, 4, {"1/3", "1/5"}},
    {4, 3, {"0.1", "0.2", "0.3", "0.4"}},
};

Instance inst_of(const Case &c) { return make_instance(c.s, c.k, c.theta); }

oracle::RefChain reference_chain(const Certificate &cert, const Int &m)
{
    return oracle::reference_chain(cert.inst, cert.c, cert.c_prime, cert.eps, cert.root_bound, cert.tol_bound, m);
}

} // namespace

TEST(Certify, AuditsPassAtM0AndBeyond)
{
    for (const auto &c : cases) {
        const Certificate cert = derive_constants(inst_of(c));
        for (const Int &m : {cert.m0, Int(cert.m0 + 1), Int(2 * cert.m0), Int(4 * cert.m0), Int(100 * cert.m0)}) {
            const auto audit = check_certificate(cert, m);
            for (const auto &item : audit) {
                EXPECT_TRUE(item.holds) << c.s << "," << c.k << " m=" << m << " " << item.name << ": " << item.detail;
            }
        }
    }
}

TEST(Certify, ChainMatchesReference)
{
    for (const auto &c : cases) {
        const Certificate cert = derive_constants(inst_of(c));
        for (const Int &m : {cert.m0, Int(3 * cert.m0 + 7)}) {
            const Chain ch = chain_at(cert, m);
            const oracle::RefChain ref = reference_chain(cert, m);
            EXPECT_EQ(ch.c1, ref.c1);
            EXPECT_EQ(ch.c2, ref.c2);
            EXPECT_EQ(ch.c3, ref.c3);
            EXPECT_EQ(ch.c4, ref.c4);
            if (c.k == 2) {
                EXPECT_EQ(*ch.c5, ref.c5);
                EXPECT_FALSE(ch.c8.has_value());
            } else {
                EXPECT_EQ(*ch.c6, ref.c6);
                EXPECT_EQ(*ch.c7, ref.c7);
                EXPECT_EQ(*ch.c8, ref.c8);
                EXPECT_FALSE(ch.c5.has_value());
            }
        }
    }
}

TEST(Certify, BoundsOnRootAndTolerance)
{
    for (const auto &c : cases) {
        const Certificate cert = derive_constants(inst_of(c));
        EXPECT_GE(pow_int(cert.root_bound, 2 * c.k), Rat(2 * c.s));
        EXPECT_GE(pow_int(cert.tol_bound, c.k), pow_int(Rat(2 * c.s), c.k - 2));
        EXPECT_EQ(cert.L, theta_gap_lower_bound(cert.inst));
        // tau_m <= 2 s m^k from m0 on
        for (const Int &m : {cert.m0, Int(5 * cert.m0)}) {
            EXPECT_LE(tau_value(cert.inst, m), Rat(2 * c.s) * Rat(pow_int(m, c.k)));
        }
    }
}

TEST(Certify, M0IsLeast)
{
    for (const auto &c : cases) {
        const Certificate cert = derive_constants(inst_of(c));
        ASSERT_GT(cert.m0, 1);
        EXPECT_FALSE(detail::side_conditions_hold(cert, Int(cert.m0 - 1)));
        EXPECT_TRUE(detail::side_conditions_hold(cert, cert.m0));
        // side conditions only improve with m
        for (Int m = cert.m0; m < cert.m0 + 300; m += 7) {
            EXPECT_TRUE(detail::side_conditions_hold(cert, m));
        }
    }
}

TEST(Certify, ShrinkingConstantsKeepsItValid)
{
    for (const auto &c : cases) {
        Certificate cert = derive_constants(inst_of(c));
        for (int i = 0; i < 4; ++i) {
            cert.c /= 2;
            cert.c_prime /= 2;
            cert.chain = chain_at(cert, cert.m0);
            EXPECT_TRUE(all_hold(check_certificate(cert, cert.m0))) << c.s << "," << c.k << " after " << i + 1;
        }
    }
}

TEST(Certify, TamperingIsDetected)
{
    const Certificate good = derive_constants(inst_of(cases[0]));
    ASSERT_TRUE(all_hold(check_certificate(good, good.m0)));

    EXPECT_FALSE(all_hold(check_certificate(good, Int(good.m0 - 1))));

    Certificate bigger_c = good;
    bigger_c.c *= 64;
    bigger_c.chain = chain_at(bigger_c, bigger_c.m0);
    EXPECT_FALSE(all_hold(check_certificate(bigger_c, bigger_c.m0)));

    Certificate stale = good;
    stale.c *= 2; // chain not recomputed
    EXPECT_FALSE(all_hold(check_certificate(stale, stale.m0)));

    Certificate forged = good;
    forged.chain.c4 = Rat(1, 100);
    EXPECT_FALSE(all_hold(check_certificate(forged, forged.m0)));

    Certificate early = good;
    early.m0 = good.m0 / 4;
    early.chain = chain_at(early, early.m0);
    EXPECT_FALSE(all_hold(check_certificate(early, early.m0)));

    Certificate weak_root = good;
    weak_root.root_bound = Rat(1);
    weak_root.chain = chain_at(weak_root, weak_root.m0);
    EXPECT_FALSE(all_hold(check_certificate(weak_root, weak_root.m0)));

    Certificate wrong_l = good;
    wrong_l.L = Rat(10);
    EXPECT_FALSE(all_hold(check_certificate(wrong_l, wrong_l.m0)));

    const Certificate k3 = derive_constants(inst_of(cases[2]));
    Certificate k3_forged = k3;
    k3_forged.chain.c8 = *k3.chain.c8 * 1000;
    EXPECT_FALSE(all_hold(check_certificate(k3_forged, k3_forged.m0)));
}

TEST(Certify, TheoremHoldsForTheWiderRationalSystem)
{
    // The chain only uses eta < c B m^{k-2} and radius <= c1 m^{1/2}, so the
    // rational system with those bounds has no solution for m >= m0.
    for (const auto &c : cases) {
        const Certificate cert = derive_constants(inst_of(c));
        for (Int m = cert.m0; m < cert.m0 + 4; ++m) {
            const Rat tau = tau_value(cert.inst, m);
            const Rat eta = cert.c * cert.tol_bound * Rat(pow_int(m, c.k - 2));
            const Rat radius = cert.chain.c1 * Rat(isqrt_floor(m));
            const std::int64_t lo = std::max<std::int64_t>(1, to_i64(m) - 5);
            const std::int64_t hi = to_i64(m) + static_cast<std::int64_t>(c.k) + 5;
            const auto r = oracle::brute_force(cert.inst, tau, eta, radius, lo, hi);
            ASSERT_FALSE(r.window.empty());
            ASSERT_GT(r.window.front(), lo);
            ASSERT_LT(r.window.back(), hi);
            EXPECT_TRUE(r.solutions.empty()) << c.s << "," << c.k << " m=" << m;
            // and the threshold really is an upper bound on the tolerance rule
            EXPECT_GE(pow_int(Rat(eta / cert.c), c.k), pow_int(tau, c.k - 2));
        }
    }
}

TEST(Certify, JsonRoundTripAndHash)
{
    for (const auto &c : cases) {
        const Certificate cert = derive_constants(inst_of(c));
        const auto j = to_json(cert);
        const Certificate back = certificate_from_json(nlohmann::ordered_json::parse(j.dump()));
        EXPECT_EQ(to_json(back).dump(), j.dump());
        EXPECT_EQ(certificate_hash(back), certificate_hash(cert));
        EXPECT_EQ(certificate_hash(cert).size(), 16u);
        EXPECT_TRUE(j["audit_m0"].is_array());
        for (const auto &item : j["audit_m0"]) {
            EXPECT_TRUE(item["holds"].get<bool>());
        }
    }
    const Certificate a = derive_constants(inst_of(cases[0]));
    Certificate b = a;
    b.c /= 2;
    EXPECT_NE(certificate_hash(a), certificate_hash(b));
}

TEST(Certify, GapConstants)
{
    for (const auto &c : cases) {
        const Certificate cert = derive_constants(inst_of(c));
        const GapConstants gc = gap_constants(cert, Rat(1, 4));
        for (const auto &item : check_gap_constants(gc)) {
            EXPECT_TRUE(item.holds) << item.name << ": " << item.detail;
        }
        const Rat tau0 = tau_value(cert.inst, cert.m0);
        const Rat pr = predicted_radius(gc, tau0);
        EXPECT_GT(pr, 0);
        // pr <= C0 tau0^{1-2/k}
        EXPECT_LE(pow_int(Rat(pr / gc.C0), c.k), pow_int(tau0, c.k - 2));
    }
    EXPECT_THROW(gap_constants(derive_constants(inst_of(cases[0])), Rat(0)), std::invalid_argument);
}

TEST(Certify, ToleranceBelowIsStrict)
{
    for (unsigned k : {2u, 3u, 4u, 5u}) {
        for (long t : {7L, 1000L, 123457L}) {
            const Rat coeff(1, 8);
            const Rat eta = tolerance_below(coeff, Rat(t), k);
            EXPECT_GT(eta, 0);
            // eta < coeff * t^{(k-2)/k}
            EXPECT_LT(pow_int(Rat(eta / coeff), k), pow_int(Rat(t), k - 2));
        }
    }
}

TEST(Certify, VerifyFindsNoAnomalies)
{
    for (const auto &c : cases) {
        const Certificate cert = derive_constants(inst_of(c));
        const VerificationReport rep = verify_certificate(cert, cert.m0, cert.m0 + 5);
        EXPECT_TRUE(rep.anomalies.empty());
        EXPECT_TRUE(rep.complete());
        ASSERT_EQ(rep.rows.size(), 6u);
        for (const auto &row : rep.rows) {
            ASSERT_TRUE(row.outcome.has_value());
            EXPECT_EQ(row.outcome->status, SearchStatus::Empty);
        }
    }
}

TEST(Certify, VerifyBelowM0IsNotAnAnomaly)
{
    const Certificate cert = derive_constants(inst_of(cases[0]));
    const VerificationReport rep = verify_certificate(cert, Int(1), Int(20));
    EXPECT_TRUE(rep.anomalies.empty());
    EXPECT_EQ(rep.rows.size(), 20u);
}

TEST(Certify, VerifyIsWorkerIndependent)
{
    const Certificate cert = derive_constants(inst_of(cases[3]));
    const auto serial = to_json(verify_certificate(cert, cert.m0, cert.m0 + 8, {}, 1)).dump();
    const auto parallel = to_json(verify_certificate(cert, cert.m0, cert.m0 + 8, {}, 4)).dump();
    EXPECT_EQ(serial, parallel);
}

TEST(Certify, VerifyBudgetSkipsRows)
{
    const Certificate cert = derive_constants(inst_of(cases[0]));
    const VerificationReport rep = verify_certificate(cert, cert.m0, cert.m0 + 2, {}, 1, 1);
    EXPECT_FALSE(rep.complete());
    EXPECT_EQ(rep.skipped.size(), 3u);
}

TEST(Certify, RejectsBadArguments)
{
    const Instance inst = inst_of(cases[0]);
    EXPECT_THROW(derive_constants(inst, Rat(1)), std::invalid_argument);
    EXPECT_THROW(derive_constants(inst, Rat(0)), std::invalid_argument);
    const Certificate cert = derive_constants(inst);
    EXPECT_THROW(verify_certificate(cert, Int(5), Int(4)), std::invalid_argument);
    EXPECT_THROW(check_certificate(cert, Int(0)), std::invalid_argument);
}

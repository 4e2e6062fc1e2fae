#include "support.hpp"

#include <icg/taxonomy.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

using namespace icg;

TEST_CASE("multiple-access utility and corners")
{
    const MacGame game(1.0, 1.0);
    CHECK(game.c_max() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(game.c_min() == doctest::Approx(0.5 * std::log2(1.5)).epsilon(1e-15));
    // either corner reaches the sum capacity
    CHECK(game.c_max() + game.c_min() == doctest::Approx(game.c_sum()).epsilon(1e-14));

    CHECK(mac_utility(0.6, 0.6, game) == Payoff{0.0, 0.0});
    const Payoff a = mac_utility(1.0, 0.0, game);
    CHECK(a == game.corner_a());
    CHECK(mac_utility(0.0, 1.0, game) == game.corner_b());
    const Payoff mid = mac_utility(0.25, 0.5, game);
    CHECK(mid[0] == doctest::Approx(0.25 * game.c_max() + 0.75 * game.c_min()));
    CHECK(mid[1] == doctest::Approx(0.5 * game.c_max() + 0.5 * game.c_min()));

    CHECK_THROWS_AS(mac_utility(-0.1, 0.0, game), std::invalid_argument);
    CHECK_THROWS_AS(mac_utility(0.0, 1.5, game), std::invalid_argument);
    CHECK_THROWS_AS(MacGame(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MacGame(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("multiple-access equilibria lie on the full-sharing line")
{
    const MacGame game(3.0, 0.5);
    for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        CHECK(mac_deviation_gain(x, 1.0 - x, game) == doctest::Approx(0.0).epsilon(1e-15));
    }
    icg::testing::Draws d(12);
    for (int i = 0; i < 100; ++i) {
        const double x = d.uniform(0.0, 1.0), y = d.uniform(0.0, 1.0);
        if (std::abs(x + y - 1.0) < 1e-6)
            continue;
        CHECK(mac_deviation_gain(x, y, game) > 0.0);
    }
}

TEST_CASE("multiple-access best-response dynamics")
{
    const MacGame game(1.0, 1.0);

    const auto par = mac_dynamics(game, true, {0.0, 0.0});
    CHECK(par.status == MacStatus::limit_cycle);
    CHECK(par.period == 2);
    CHECK(par.average_utility[0] == doctest::Approx(game.c_min() / 2.0).epsilon(1e-14));
    CHECK(par.average_utility[1] == doctest::Approx(game.c_min() / 2.0).epsilon(1e-14));

    const auto seq = mac_dynamics(game, false, {0.0, 0.0});
    CHECK(seq.status == MacStatus::converged);
    CHECK(seq.trajectory.back() == std::array<double, 2>{1.0, 0.0});
    CHECK(seq.average_utility == game.corner_a());

    const auto settled = mac_dynamics(game, true, {0.3, 0.7});
    CHECK(settled.status == MacStatus::converged);
    CHECK(settled.trajectory.size() == 2);

    const auto capped = mac_dynamics(game, true, {0.0, 0.0}, 1);
    CHECK(capped.status == MacStatus::iteration_cap);
}

TEST_CASE("random access mixed equilibrium")
{
    const MacGame game(1.0, 1.0);
    const auto ne = random_access_mixed_ne(game);
    CHECK(ne.p_low == doctest::Approx(std::log2(1.5)).epsilon(1e-14));
    CHECK(ne.p_low == doctest::Approx(0.585).epsilon(1e-3));
    CHECK(ne.indifference <= 1e-15);
    // against the equilibrium mix, the C_min action pays C_min outright
    CHECK(ne.value[0] == doctest::Approx(game.c_min()).epsilon(1e-14));

    CHECK(random_access_mixed_ne(MacGame(1e-9, 1.0)).p_low == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(random_access_mixed_ne(MacGame(1e6, 1.0)).p_low < 0.1);

    CHECK(random_access_payoff(1, 1, game) == Payoff{0.0, 0.0});
    CHECK(random_access_payoff(0, 0, game) == Payoff{game.c_min(), game.c_min()});
    CHECK(random_access_payoff(1, 0, game) == Payoff{game.c_max(), game.c_min()});
    CHECK(random_access_payoff(0, 1, game) == Payoff{game.c_min(), game.c_max()});
    CHECK_THROWS_AS(random_access_payoff(2, 0, game), std::invalid_argument);

    icg::testing::Draws d(31);
    for (int i = 0; i < 100; ++i) {
        const MacGame g(d.uniform(0.01, 100.0), d.uniform(0.01, 10.0));
        const auto mixed = random_access_mixed_ne(g);
        CHECK(mixed.indifference <= 1e-12);
        CHECK(mixed.p_low > 0.0);
        CHECK(mixed.p_low < 1.0);
    }
}

TEST_CASE("two-band payoffs at the ends of the coupling range")
{
    for (double snr : {1.0, 10.0, 1000.0}) {
        const auto free = pd_payoffs(0.0, snr);
        CHECK(free.temptation == doctest::Approx(free.penalty).epsilon(1e-14));
        CHECK(free.reward == doctest::Approx(free.naive).epsilon(1e-14));
    }

    const auto strong = pd_payoffs(0.9, 1000.0);
    CHECK(strong.naive > strong.penalty);
    CHECK(pd_classify(0.9, 1000.0).region == PdRegion::chicken);
}

TEST_CASE("two-band payoffs match the general rate")
{
    for (double h : {0.1, 0.5, 0.8}) {
        for (double snr : {2.0, 1000.0}) {
            const auto p = pd_payoffs(h, snr);
            CHECK(p.reward == doctest::Approx(two_band_rate(0.0, 0.0, h, snr)).epsilon(1e-14));
            CHECK(p.penalty == doctest::Approx(two_band_rate(0.5, 0.5, h, snr)).epsilon(1e-14));
            const double wf = (1.0 - h) / 2.0;
            CHECK(p.temptation == doctest::Approx(two_band_rate(wf, 0.0, h, snr)).epsilon(1e-14));
            CHECK(p.naive == doctest::Approx(two_band_rate(0.0, wf, h, snr)).epsilon(1e-14));

            // temptation is the best reply to a cooperative partner
            double best = 0.0;
            for (int i = 0; i <= 2000; ++i)
                best = std::max(best, two_band_rate(i / 2000.0, 0.0, h, snr));
            CHECK(best <= p.temptation + 1e-12);
        }
    }
}

TEST_CASE("temptation is the largest payoff over the SNR range")
{
    int violations = 0;
    for (int i = 0; i <= 40; ++i) {
        const double snr = std::pow(10.0, i / 10.0);
        for (int j = 1; j < 100; ++j) {
            const auto p = pd_payoffs(j / 100.0, snr);
            violations += p.temptation < std::max({p.reward, p.penalty, p.naive});
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("region labels along the coupling sweep")
{
    std::vector<PdRegion> seen;
    for (int j = 1; j <= 99; ++j) {
        const auto region = pd_classify(j / 100.0, 1000.0).region;
        if (seen.empty() || seen.back() != region)
            seen.push_back(region);
    }
    CHECK(seen == std::vector<PdRegion>{PdRegion::deadlock, PdRegion::prisoners_dilemma, PdRegion::chicken});
}

TEST_CASE("two-band regions and their limits")
{
    const double snr = 1000.0;
    const auto [lim1, lim2] = pd_limits(snr);
    REQUIRE(lim1 < lim2);

    const auto at1 = pd_payoffs(lim1, snr);
    CHECK(at1.reward == doctest::Approx(at1.penalty).epsilon(1e-8));
    const auto at2 = pd_payoffs(lim2, snr);
    CHECK(at2.naive == doctest::Approx(at2.penalty).epsilon(1e-8));

    CHECK(pd_classify(lim1 / 2.0, snr).region == PdRegion::deadlock);
    CHECK(pd_classify(0.5 * (lim1 + lim2), snr).region == PdRegion::prisoners_dilemma);
    CHECK(pd_classify(0.5 * (lim2 + 1.0), snr).region == PdRegion::chicken);
    CHECK(pd_classify(0.5 * (lim1 + lim2), snr).ordering == "T>R>P>N");
    CHECK(to_string(PdRegion::prisoners_dilemma) == "PrisonersDilemma");

    // each difference changes sign once on the grid
    int flips_rp = 0, flips_np = 0;
    auto prev = pd_payoffs(1e-3, snr);
    for (int i = 2; i < 1000; ++i) {
        const auto cur = pd_payoffs(i * 1e-3, snr);
        flips_rp += (prev.reward > prev.penalty) != (cur.reward > cur.penalty);
        flips_np += (prev.naive > prev.penalty) != (cur.naive > cur.penalty);
        prev = cur;
    }
    CHECK(flips_rp == 1);
    CHECK(flips_np == 1);
}

TEST_CASE("two-band domain errors")
{
    CHECK_THROWS_AS(pd_payoffs(1.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(pd_payoffs(-0.1, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(pd_payoffs(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(pd_payoffs(0.5, std::nan("")), std::invalid_argument);
    CHECK(db_to_linear(30.0) == doctest::Approx(1000.0).epsilon(1e-14));
    CHECK(db_to_linear(0.0) == 1.0);
}

TEST_CASE("flat interference channel bounds")
{
    const auto fb = flat_bounds(1.0, 1.0, 1.0, 1.0);
    CHECK(fb.cap1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fb.cap2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fb.sum_cap == doctest::Approx(std::log2(3.0)).epsilon(1e-15));
    CHECK_FALSE(fb.contains(1.0, 1.0));
    CHECK(fb.contains(1.0, std::log2(3.0) - 1.0));
    CHECK_FALSE(fb.contains(-0.1, 0.0));

    const auto weak = flat_bounds(2.0, 5.0, 0.0, 0.0);
    CHECK(weak.sum_cap == doctest::Approx(std::log2(3.0)).epsilon(1e-15));

    icg::testing::Draws d(90);
    const auto random_bounds = flat_bounds(4.0, 2.0, 0.3, 1.7);
    for (int i = 0; i < 500; ++i) {
        const double r1 = d.uniform(0.0, 3.0), r2 = d.uniform(0.0, 3.0);
        if (!random_bounds.contains(r1, r2))
            continue;
        CHECK(random_bounds.contains(d.uniform(0.0, r1), d.uniform(0.0, r2)));
    }

    CHECK_THROWS_AS(flat_bounds(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(flat_bounds(1.0, 1.0, -1.0, 1.0), std::invalid_argument);
}

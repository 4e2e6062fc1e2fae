#include "support.hpp"

#include <icg/bargaining.hpp>
#include <icg/channel.hpp>
#include <icg/report_io.hpp>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace icg;
using icg::testing::random_problem;

namespace {

BargainProblem table_problem()
{
    BargainProblem prob;
    prob.rates.resize(2, 6);
    prob.rates << 14, 18, 5, 10, 9, 3,
                  6, 10, 5, 15, 19, 19;
    prob.disagreement = Eigen::Vector2d(15, 10);
    return prob;
}

BargainProblem make(std::initializer_list<std::initializer_list<double>> rows, std::initializer_list<double> d)
{
    BargainProblem prob;
    prob.rates.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index n = 0;
    for (const auto& row : rows) {
        Eigen::Index k = 0;
        for (double v : row)
            prob.rates(n, k++) = v;
        ++n;
    }
    prob.disagreement.resize(static_cast<Eigen::Index>(d.size()));
    n = 0;
    for (double v : d)
        prob.disagreement(n++) = v;
    return prob;
}

InterferenceScenario flat_pair(double cross, double mask)
{
    InterferenceScenario s;
    s.n_users = 2;
    s.n_bins = 4;
    Eigen::Matrix2d g;
    g << 1.0, cross, cross, 1.0;
    s.gain.assign(4, g);
    s.noise = Eigen::MatrixXd::Ones(2, 4);
    s.mask = Eigen::MatrixXd::Constant(2, 4, mask);
    return validate_scenario(s);
}

} // namespace

TEST_CASE("worked example reproduces the sorting table")
{
    const auto out = nbs_two_player(table_problem());
    REQUIRE(out.feasible);
    REQUIRE(out.trace);
    const auto& tr = *out.trace;
    CHECK(*tr.k_s == 3);
    CHECK(*tr.k_min == 1);
    CHECK(*tr.k_max == 5);
    CHECK(out.alpha(0, 3) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(out.rates(0) == doctest::Approx(40.0 + 1.0 / 3.0).epsilon(1e-12));
    CHECK(out.rates(1) == doctest::Approx(48.0).epsilon(1e-12));
    CHECK(out.shared_bin == 3);
    CHECK(out.nash_product == doctest::Approx((40.0 + 1.0 / 3.0 - 15.0) * 38.0));
    const double gamma[] = {-1.0 / 58.0, 17.0 / 48.0, 22.0 / 43.0, 32.0 / 28.0, 41.0 / 9.0, -4.4};
    for (int k = 0; k < 6; ++k)
        CHECK(tr.threshold(k) == doctest::Approx(gamma[k]).epsilon(1e-12));
}

TEST_CASE("two-player small cases")
{
    const auto even = nbs_two_player(make({{10, 10}, {10, 10}}, {0, 0}));
    REQUIRE(even.feasible);
    CHECK(even.rates(0) == doctest::Approx(10.0));
    CHECK(even.rates(1) == doctest::Approx(10.0));
    CHECK(even.nash_product == doctest::Approx(100.0));

    const auto hopeless = nbs_two_player(make({{1, 2, 3}, {3, 2, 1}}, {1e6, 1e6}));
    CHECK_FALSE(hopeless.feasible);
    CHECK(hopeless.rates == Eigen::Vector2d(1e6, 1e6));
    CHECK(hopeless.alpha.isZero(0.0));
    CHECK(hopeless.nash_product == 0.0);

    // a bin only user 1 can use sorts first
    const auto lopsided = nbs_two_player(make({{4, 1}, {0, 3}}, {0, 0}));
    REQUIRE(lopsided.feasible);
    CHECK(lopsided.trace->order.front() == 0);
    CHECK(lopsided.alpha(0, 0) == 1.0);

    CHECK_THROWS_AS(nbs_two_player(make({{1}, {1}, {1}}, {0, 0, 0})), std::invalid_argument);
    CHECK_THROWS(nbs_two_player(make({{-1, 1}, {1, 1}}, {0, 0})));
    CHECK_THROWS(nbs_two_player(make({{1, 1}, {1, 1}}, {std::numeric_limits<double>::quiet_NaN(), 0})));
}

TEST_CASE("feasible outcomes satisfy the sharing condition and sorting invariants")
{
    int shared = 0;
    for (int i = 0; i < 400; ++i) {
        const auto prob = random_problem(derive_seed(50, {static_cast<std::uint64_t>(i)}), 2, 2 + i % 14);
        const auto out = nbs_two_player(prob);
        REQUIRE(out.trace);
        const auto& tr = *out.trace;
        for (Eigen::Index j = 1; j < tr.surplus_first.size(); ++j) {
            CHECK(tr.surplus_first(j) >= tr.surplus_first(j - 1));
            CHECK(tr.surplus_second(j) <= tr.surplus_second(j - 1));
        }
        if (!out.feasible)
            continue;
        CHECK(out.rates(0) > prob.disagreement(0));
        CHECK(out.rates(1) > prob.disagreement(1));
        if (tr.k_min && tr.k_max)
            for (Eigen::Index j = *tr.k_min + 1; j < *tr.k_max; ++j)
                CHECK(tr.threshold(j) >= tr.threshold(j - 1));

        int fractional = 0;
        for (Eigen::Index k = 0; k < prob.n_bins(); ++k) {
            CHECK(out.alpha(0, k) + out.alpha(1, k) == doctest::Approx(1.0).epsilon(1e-15));
            const bool dead = prob.rates(0, k) == 0.0 && prob.rates(1, k) == 0.0;
            if (!dead && out.alpha(0, k) > 0.0 && out.alpha(0, k) < 1.0)
                ++fractional;
        }
        CHECK(fractional <= 1);
        if (out.shared_bin) {
            ++shared;
            const auto k = *out.shared_bin;
            const double lhs = prob.rates(0, k) / (out.rates(0) - prob.disagreement(0));
            const double rhs = prob.rates(1, k) / (out.rates(1) - prob.disagreement(1));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        }
    }
    CHECK(shared > 50);
}

TEST_CASE("oracle agrees with the closed form")
{
    const auto table = nbs_oracle(table_problem());
    REQUIRE(table.feasible);
    CHECK(table.rates(0) == doctest::Approx(40.0 + 1.0 / 3.0).epsilon(1e-6));
    CHECK(table.rates(1) == doctest::Approx(48.0).epsilon(1e-6));
    CHECK(table.kkt_residual <= 1e-8);

    const auto single = nbs_oracle(make({{2}, {2}}, {0, 0}));
    REQUIRE(single.feasible);
    CHECK(single.alpha(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(single.rates(0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(single.rates(1) == doctest::Approx(1.0).epsilon(1e-9));

    for (int i = 0; i < 200; ++i) {
        const auto prob = random_problem(derive_seed(60, {static_cast<std::uint64_t>(i)}), 2, 8);
        const auto fast = nbs_two_player(prob);
        const auto slow = nbs_oracle(prob);
        REQUIRE(fast.feasible == slow.feasible);
        if (!fast.feasible)
            continue;
        CHECK(fast.nash_product == doctest::Approx(slow.nash_product).epsilon(1e-6));
        // surpluses far below the rates limit how well the gradient can be resolved
        const double conditioning = prob.disagreement.maxCoeff() / (slow.rates - prob.disagreement).minCoeff();
        CHECK(slow.kkt_residual <= 1e-8 * std::max(1.0, conditioning));
    }
}

TEST_CASE("oracle with three users on a diagonal-favourable instance")
{
    const auto prob = make({{6, 1, 1}, {1, 6, 1}, {1, 1, 6}}, {0.5, 0.5, 0.5});
    const auto out = nbs_oracle(prob);
    REQUIRE(out.feasible);
    for (int n = 0; n < 3; ++n)
        CHECK(out.alpha(n, n) == doctest::Approx(1.0).epsilon(1e-6));

    // exhaustive grid over the three bin simplices at step 1/20
    const int steps = 20;
    std::vector<Eigen::Vector3d> simplex;
    for (int a = 0; a <= steps; ++a)
        for (int b = 0; a + b <= steps; ++b)
            simplex.emplace_back(double(a) / steps, double(b) / steps, double(steps - a - b) / steps);
    double grid_best = 0.0;
    Eigen::Matrix3d alpha;
    for (const auto& x : simplex)
        for (const auto& y : simplex)
            for (const auto& z : simplex) {
                alpha << x, y, z;
                const Eigen::VectorXd rates = shared_rates(prob, alpha);
                grid_best = std::max(grid_best, nash_product(prob, rates));
            }
    CHECK(out.nash_product >= grid_best - 1e-9);
    CHECK(out.nash_product == doctest::Approx(5.5 * 5.5 * 5.5).epsilon(1e-9));
}

TEST_CASE("oracle handles many users and infeasible input")
{
    for (int i = 0; i < 40; ++i) {
        const int users = 3 + i % 3;
        const auto prob = random_problem(derive_seed(70, {static_cast<std::uint64_t>(i)}), users, 6);
        const auto out = nbs_oracle(prob);
        const auto margin = max_min_surplus(prob);
        CHECK(out.feasible == (margin.margin > 0.0));
        if (!out.feasible)
            continue;
        CHECK(out.kkt_residual <= 1e-8);
        CHECK((out.rates - prob.disagreement).minCoeff() > 0.0);
        CHECK(nash_product(prob, out.rates) >= nash_product(prob, shared_rates(prob, margin.alpha)) - 1e-9);
        for (Eigen::Index k = 0; k < prob.n_bins(); ++k)
            CHECK(out.alpha.col(k).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_FALSE(nbs_oracle(make({{1, 1}, {1, 1}, {1, 1}}, {1, 1, 1})).feasible);
}

TEST_CASE("competitive disagreement point")
{
    const auto sym = disagreement_competitive(flat_pair(0.4, 10.0), DisagreementMode::mask);
    CHECK(sym(0) == doctest::Approx(sym(1)).epsilon(1e-15));
    CHECK(sym(0) == doctest::Approx(4.0 * std::log2(1.0 + 10.0 / 5.0)).epsilon(1e-14));

    const auto quiet = flat_pair(0.0, 10.0);
    const auto d = disagreement_competitive(quiet, DisagreementMode::mask);
    const Eigen::VectorXd sums = exclusive_rates(quiet).rowwise().sum();
    CHECK(d.isApprox(sums, 1e-15));

    CHECK_THROWS_AS(disagreement_competitive(builtin::triangle(), DisagreementMode::budget), DivergenceError);
    CHECK_THROWS(disagreement_competitive(builtin::triangle(), DisagreementMode::mask));

    const auto dom = icg::testing::dominant_scenario(3, 2, 5);
    const auto settled = disagreement_competitive(dom, DisagreementMode::budget);
    CHECK(settled.minCoeff() > 0.0);

    const auto prob = problem_from_scenario(flat_pair(0.4, 10.0));
    CHECK(prob.rates.isApprox(Eigen::MatrixXd::Constant(2, 4, std::log2(11.0))));
    CHECK(prob.disagreement.isApprox(sym));
}

TEST_CASE("flat-channel time sharing")
{
    for (double a : {1.0, 2.0, 3.0}) {
        const auto out = nbs_flat_fdm(10.0, a, a);
        REQUIRE(out.feasible);
        CHECK(out.rho == doctest::Approx(0.5).epsilon(1e-8));
    }

    const auto clean = nbs_flat_fdm(100.0, 0.0, 0.0);
    CHECK_FALSE(clean.feasible);
    CHECK(clean.rates.isApprox(clean.disagreement));

    const auto out = nbs_flat_fdm(10.0, 1.0, 1.0);
    REQUIRE(out.feasible);
    CHECK(out.disagreement(0) == doctest::Approx(0.5 * std::log2(1.0 + 10.0 / 11.0)));
    double grid_best = 0.0;
    for (int i = 1; i < 100000; ++i) {
        const double rho = i / 100000.0;
        const double s1 = flat_fdm_rate(rho, 10.0) - out.disagreement(0);
        const double s2 = flat_fdm_rate(1.0 - rho, 10.0) - out.disagreement(1);
        if (s1 > 0.0 && s2 > 0.0)
            grid_best = std::max(grid_best, s1 * s2);
    }
    CHECK(std::abs(out.nash_product - grid_best) <= 1e-8);

    const auto skew = nbs_flat_fdm(10.0, 0.5, 2.0);
    REQUIRE(skew.feasible);
    CHECK(skew.rho > 0.5);
}

TEST_CASE("expected exclusive rates")
{
    const auto fixed = flat_pair(0.3, 5.0);
    const auto same = expected_exclusive_rates([&](std::uint64_t) { return fixed; }, 9, 16);
    CHECK(same.problem.rates.isApprox(exclusive_rates(fixed), 1e-15));
    CHECK(same.problem.disagreement.isApprox(disagreement_competitive(fixed, DisagreementMode::mask), 1e-15));
    CHECK(same.rates_stderr.isZero(1e-15));
    CHECK(same.disagreement_stderr.isZero(1e-15));

    auto spec = uniform_rayleigh_spec(2, 4, 1.0, 0.5, 1.0, 100.0, 0);
    double ratio_sum = 0.0;
    for (int rep = 0; rep < 30; ++rep) {
        spec.seed = derive_seed(81, {static_cast<std::uint64_t>(rep)});
        const auto small = expected_exclusive_rates(spec, 200);
        const auto large = expected_exclusive_rates(spec, 400);
        ratio_sum += large.rates_stderr.mean() / small.rates_stderr.mean();
    }
    CHECK(ratio_sum / 30.0 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));

    auto quiet = uniform_rayleigh_spec(2, 4, 1.0, 1e-9, 1.0, 100.0, 3);
    const auto limit = expected_exclusive_rates(quiet, 300);
    const Eigen::VectorXd sums = limit.problem.rates.rowwise().sum();
    CHECK(limit.problem.disagreement.isApprox(sums, 1e-6));

    const auto a = expected_exclusive_rates(spec, 50);
    const auto b = expected_exclusive_rates(spec, 50);
    CHECK(a.problem.rates == b.problem.rates);
    CHECK_THROWS(expected_exclusive_rates(spec, 0));
}

TEST_CASE("bargaining outcome export")
{
    const auto prob = table_problem();
    const auto out = nbs_two_player(prob);
    const auto doc = bargaining_to_json(prob, out);
    CHECK(doc.at("k_s") == 4);
    CHECK(doc.at("feasible") == true);
    CHECK(doc.at("rates")[1].get<double>() == 48.0);
    CHECK(doc.at("trace").at("k_max") == 6);

    const auto round = problem_from_json(problem_to_json(prob));
    CHECK(round.rates == prob.rates);
    CHECK(round.disagreement == prob.disagreement);

    const std::string csv = bargaining_to_csv(prob, out);
    CHECK(csv.rfind("position,bin,rate1,rate2,L,A,B,Gamma,alpha1,alpha2,boundary_rate1,boundary_rate2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

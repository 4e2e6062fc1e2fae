#include <icg/taxonomy.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace icg {

MacGame::MacGame(double p, double sigma2) : power(p), noise(sigma2)
{
    if (!(power > 0.0) || !(noise > 0.0) || !std::isfinite(power) || !std::isfinite(noise))
        throw std::invalid_argument("MAC game: power and noise must be positive");
}

double MacGame::c_max() const { return 0.5 * std::log2(1.0 + power / noise); }
double MacGame::c_min() const { return 0.5 * std::log2(1.0 + power / (power + noise)); }
double MacGame::c_sum() const { return 0.5 * std::log2(1.0 + 2.0 * power / noise); }

Payoff mac_utility(double alpha1, double alpha2, const MacGame& game)
{
    if (!(alpha1 >= 0.0 && alpha1 <= 1.0 && alpha2 >= 0.0 && alpha2 <= 1.0))
        throw std::invalid_argument("MAC game: time-sharing fractions must lie in [0, 1]");
    if (alpha1 + alpha2 > 1.0)
        return {0.0, 0.0};
    const double hi = game.c_max();
    const double lo = game.c_min();
    return {alpha1 * hi + (1.0 - alpha1) * lo, alpha2 * hi + (1.0 - alpha2) * lo};
}

double mac_best_response(double other)
{
    return 1.0 - other;
}

double mac_deviation_gain(double alpha1, double alpha2, const MacGame& game)
{
    const Payoff now = mac_utility(alpha1, alpha2, game);
    const Payoff dev1 = mac_utility(mac_best_response(alpha2), alpha2, game);
    const Payoff dev2 = mac_utility(alpha1, mac_best_response(alpha1), game);
    return std::max({0.0, dev1[0] - now[0], dev2[1] - now[1]});
}

MacDynamics mac_dynamics(const MacGame& game, bool parallel, std::array<double, 2> initial, int max_iterations)
{
    (void)mac_utility(initial[0], initial[1], game);
    MacDynamics out;
    out.trajectory.push_back(initial);
    auto current = initial;
    for (int it = 1; it <= max_iterations; ++it) {
        std::array<double, 2> next = current;
        if (parallel) {
            next = {mac_best_response(current[1]), mac_best_response(current[0])};
        } else {
            next[0] = mac_best_response(current[1]);
            next[1] = mac_best_response(next[0]);
        }
        out.trajectory.push_back(next);
        const double step = std::max(std::abs(next[0] - current[0]), std::abs(next[1] - current[1]));
        current = next;
        if (step <= 1e-12) {
            out.status = MacStatus::converged;
            out.average_utility = mac_utility(current[0], current[1], game);
            return out;
        }
        for (int when = it - 2; when >= 0; --when) {
            if (out.trajectory[static_cast<std::size_t>(when)] == current) {
                out.status = MacStatus::limit_cycle;
                out.period = it - when;
                Payoff total{0.0, 0.0};
                for (int t = when + 1; t <= it; ++t) {
                    const auto& a = out.trajectory[static_cast<std::size_t>(t)];
                    const Payoff u = mac_utility(a[0], a[1], game);
                    total[0] += u[0];
                    total[1] += u[1];
                }
                out.average_utility = {total[0] / out.period, total[1] / out.period};
                return out;
            }
        }
    }
    out.average_utility = mac_utility(current[0], current[1], game);
    return out;
}

Payoff random_access_payoff(int action1, int action2, const MacGame& game)
{
    if ((action1 != 0 && action1 != 1) || (action2 != 0 && action2 != 1))
        throw std::invalid_argument("random access: actions are 0 (C_min) or 1 (C_max)");
    if (action1 == 1 && action2 == 1)
        return {0.0, 0.0};
    const double hi = game.c_max();
    const double lo = game.c_min();
    return {action1 == 1 ? hi : lo, action2 == 1 ? hi : lo};
}

MixedEquilibrium random_access_mixed_ne(const MacGame& game)
{
    MixedEquilibrium ne;
    ne.p_low = game.c_min() / game.c_max();
    const double p = ne.p_low;
    // user I's expected payoff for each pure action against user II mixing with p
    auto expected = [&](int action) {
        return p * random_access_payoff(action, 0, game)[0] + (1.0 - p) * random_access_payoff(action, 1, game)[0];
    };
    ne.indifference = std::abs(expected(0) - expected(1));
    double value = 0.0;
    for (int a1 = 0; a1 < 2; ++a1)
        for (int a2 = 0; a2 < 2; ++a2)
            value += (a1 == 0 ? p : 1.0 - p) * (a2 == 0 ? p : 1.0 - p) * random_access_payoff(a1, a2, game)[0];
    ne.value = {value, value};
    return ne;
}

double two_band_rate(double alpha, double beta, double h, double snr)
{
    const double inv = 1.0 / snr;
    return 0.5 * std::log2(1.0 + (1.0 - alpha) / (inv + beta * h)) +
           0.5 * std::log2(1.0 + alpha / (inv + (1.0 - beta) * h));
}

PdPayoffs pd_payoffs(double h, double snr)
{
    if (!(h >= 0.0 && h < 1.0))
        throw std::invalid_argument("coupling h must lie in [0, 1)");
    if (!(snr > 0.0) || !std::isfinite(snr))
        throw std::invalid_argument("snr must be positive");
    const double inv = 1.0 / snr;
    PdPayoffs p;
    p.reward = 0.5 * std::log2(1.0 + 1.0 / inv);
    p.naive = 0.5 * std::log2(1.0 + 1.0 / (inv + (1.0 - h) * h / 2.0));
    p.temptation = 0.5 * std::log2(1.0 + ((1.0 + h) / 2.0) / inv) + 0.5 * std::log2(1.0 + ((1.0 - h) / 2.0) / (inv + h));
    p.penalty = std::log2(1.0 + 0.5 / (inv + h / 2.0));
    return p;
}

std::string to_string(PdRegion r)
{
    switch (r) {
    case PdRegion::deadlock: return "Deadlock";
    case PdRegion::prisoners_dilemma: return "PrisonersDilemma";
    case PdRegion::chicken: return "Chicken";
    }
    return "unknown";
}

GameClassification pd_classify(double h, double snr)
{
    GameClassification c;
    c.payoffs = pd_payoffs(h, snr);
    const auto& p = c.payoffs;

    std::array<std::pair<char, double>, 4> ranked{
        {{'T', p.temptation}, {'R', p.reward}, {'P', p.penalty}, {'N', p.naive}}};
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i > 0)
            c.ordering += ranked[i - 1].second == ranked[i].second ? '=' : '>';
        c.ordering += ranked[i].first;
    }

    if (p.penalty >= p.reward)
        c.region = PdRegion::deadlock;
    else if (p.penalty >= p.naive)
        c.region = PdRegion::prisoners_dilemma;
    else
        c.region = PdRegion::chicken;
    return c;
}

namespace {

template <typename F>
double bracketed_root(F f, const char* what)
{
    const double step = 1e-3;
    double prev_h = step;
    double prev = f(prev_h);
    for (int i = 2; i < 1000; ++i) {
        const double h = i * step;
        const double v = f(h);
        if ((prev < 0.0) != (v < 0.0)) {
            double lo = prev_h, hi = h;
            const bool rising = prev < 0.0;
            while (hi - lo > 1e-10) {
                const double mid = 0.5 * (lo + hi);
                ((f(mid) < 0.0) == rising ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_h = h;
        prev = v;
    }
    throw std::runtime_error(std::string("no sign change of ") + what + " on (0, 1)");
}

} // namespace

std::pair<double, double> pd_limits(double snr)
{
    const double lim1 = bracketed_root(
        [snr](double h) {
            const auto p = pd_payoffs(h, snr);
            return p.reward - p.penalty;
        },
        "R - P");
    const double lim2 = bracketed_root(
        [snr](double h) {
            const auto p = pd_payoffs(h, snr);
            return p.naive - p.penalty;
        },
        "N - P");
    return {lim1, lim2};
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

bool FlatBounds::contains(double r1, double r2) const
{
    return r1 >= 0.0 && r2 >= 0.0 && r1 <= cap1 && r2 <= cap2 && r1 + r2 <= sum_cap;
}

FlatBounds flat_bounds(double p1, double p2, double a, double b)
{
    if (!(p1 > 0.0) || !(p2 > 0.0) || !(a >= 0.0) || !(b >= 0.0))
        throw std::invalid_argument("flat bounds: powers must be positive and cross gains nonnegative");
    FlatBounds fb;
    fb.cap1 = std::log2(1.0 + p1);
    fb.cap2 = std::log2(1.0 + p2);
    fb.sum_cap = std::log2(std::min(1.0 + p1 + a * p2, 1.0 + p2 + b * p1));
    return fb;
}

} // namespace icg

#ifndef ICG_WATERFILL_HPP
#define ICG_WATERFILL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace icg {

class WaterfillError : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

template <typename Derived>
using VectorOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>;

namespace detail {

template <typename Scalar>
std::vector<Eigen::Index> ascending_order(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& key)
{
    std::vector<Eigen::Index> order(static_cast<std::size_t>(key.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return key(a) < key(b); });
    return order;
}

template <typename Derived>
void check_levels(const Eigen::MatrixBase<Derived>& nu)
{
    if (nu.size() == 0)
        throw WaterfillError("water-filling over an empty bin set");
    for (Eigen::Index k = 0; k < nu.size(); ++k)
        if (!(nu(k) > 0))
            throw WaterfillError("effective noise must be strictly positive");
}

// Water level for p(k) = max(0, c(k) mu - nu(k)) with sum p = budget, found by
// growing the active set in ascending order of nu / c. Bins with infinite nu
// never become active.
template <typename Scalar>
Scalar active_set_level(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& nu,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* weights, Scalar budget)
{
    const Eigen::Index K = nu.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> key = nu;
    if (weights)
        key = nu.cwiseQuotient(*weights);
    const auto order = ascending_order<Scalar>(key);

    Eigen::Index finite = 0;
    while (finite < K && std::isfinite(key(order[static_cast<std::size_t>(finite)])))
        ++finite;
    if (finite == 0) {
        if (budget > 0)
            throw WaterfillError("positive power but no usable bin");
        return Scalar(0);
    }

    Scalar noise_sum(0);
    Scalar weight_sum(0);
    Scalar level(0);
    for (Eigen::Index j = 0; j < finite; ++j) {
        const Eigen::Index k = order[static_cast<std::size_t>(j)];
        noise_sum += nu(k);
        weight_sum += weights ? (*weights)(k) : Scalar(1);
        level = (budget + noise_sum) / weight_sum;
        if (j + 1 == finite || level <= key(order[static_cast<std::size_t>(j + 1)]))
            break;
    }
    return level;
}

} // namespace detail

/// Water level mu of the rate-maximizing allocation p(k) = max(0, mu - nu(k)).
template <typename Derived>
typename Derived::Scalar water_level(const Eigen::MatrixBase<Derived>& nu, typename Derived::Scalar budget)
{
    using Scalar = typename Derived::Scalar;
    detail::check_levels(nu);
    if (budget < 0)
        throw WaterfillError("negative power budget");
    return detail::active_set_level<Scalar>(nu.derived().eval(), nullptr, budget);
}

/// Allocation maximizing sum_k log2(1 + p(k)/nu(k)) with sum p = budget, p >= 0.
/// A bin whose nu equals the water level receives zero power.
template <typename Derived>
VectorOf<Derived> waterfill(const Eigen::MatrixBase<Derived>& nu, typename Derived::Scalar budget)
{
    using Scalar = typename Derived::Scalar;
    const Scalar level = water_level(nu, budget);
    return (Scalar(level) - nu.array()).cwiseMax(Scalar(0)).matrix();
}

/// Maximizes sum_k c(k) log2(1 + p(k)/nu(k)) under the budget:
/// p(k) = max(0, c(k) mu - nu(k)).
template <typename Derived, typename WeightDerived>
VectorOf<Derived> weighted_waterfill(const Eigen::MatrixBase<Derived>& nu, const Eigen::MatrixBase<WeightDerived>& weights,
                                     typename Derived::Scalar budget)
{
    using Scalar = typename Derived::Scalar;
    detail::check_levels(nu);
    if (weights.size() != nu.size())
        throw WaterfillError("weights and noise levels differ in length");
    for (Eigen::Index k = 0; k < weights.size(); ++k)
        if (!(weights(k) > 0) || !std::isfinite(weights(k)))
            throw WaterfillError("band weights must be positive and finite");
    if (budget < 0)
        throw WaterfillError("negative power budget");
    const VectorOf<Derived> c = weights.template cast<Scalar>();
    const Scalar level = detail::active_set_level<Scalar>(nu.derived().eval(), &c, budget);
    return (c.array() * level - nu.array()).cwiseMax(Scalar(0)).matrix();
}

/// Rate in bits of allocation `p` against effective noise `nu`.
template <typename Derived, typename PowerDerived>
typename Derived::Scalar waterfill_rate(const Eigen::MatrixBase<Derived>& nu, const Eigen::MatrixBase<PowerDerived>& p)
{
    using Scalar = typename Derived::Scalar;
    Scalar r(0);
    for (Eigen::Index k = 0; k < nu.size(); ++k)
        if (p(k) > 0)
            r += std::log2(Scalar(1) + p(k) / nu(k));
    return r;
}

namespace detail {

// Smallest-power allocation p(k) = clamp(mu - nu(k), 0, cap(k)) reaching `target` bits.
// Rate is monotone in mu, so the level is bracketed and bisected.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> margin_fill(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& nu,
                                                     const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>* caps,
                                                     Scalar target, Scalar rate_tol)
{
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index K = nu.size();
    auto shape = [&](Scalar level) {
        Vec p = (level - nu.array()).cwiseMax(Scalar(0)).matrix();
        for (Eigen::Index k = 0; k < K; ++k) {
            if (!std::isfinite(nu(k)))
                p(k) = 0;
            else if (caps)
                p(k) = std::min(p(k), (*caps)(k));
        }
        return p;
    };
    auto rate = [&](Scalar level) { return waterfill_rate(nu, shape(level)); };

    if (target == 0)
        return Vec::Zero(K);

    Scalar lo = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index k = 0; k < K; ++k)
        lo = std::min(lo, nu(k));
    if (!std::isfinite(lo))
        throw WaterfillError("positive target rate but no usable bin");

    if (caps) {
        Scalar ceiling(0);
        for (Eigen::Index k = 0; k < K; ++k)
            if (std::isfinite(nu(k)))
                ceiling += std::log2(Scalar(1) + (*caps)(k) / nu(k));
        if (ceiling < target - rate_tol)
            throw WaterfillError("target rate exceeds what the mask allows");
        if (ceiling <= target)
            return shape(std::numeric_limits<Scalar>::max());
    }

    Scalar hi = lo * 2;
    while (rate(hi) < target)
        hi *= 2;

    for (int it = 0; it < 400; ++it) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi)
            break;
        const Scalar r = rate(mid);
        if (std::abs(r - target) <= rate_tol / 16)
            return shape(mid);
        (r < target ? lo : hi) = mid;
    }
    return shape(hi);
}

} // namespace detail

/// Minimum-total-power allocation achieving `target_rate` bits; water-filling
/// shape with the level found by bisection.
template <typename Derived>
VectorOf<Derived> margin_waterfill(const Eigen::MatrixBase<Derived>& nu, typename Derived::Scalar target_rate)
{
    using Scalar = typename Derived::Scalar;
    detail::check_levels(nu);
    if (target_rate < 0)
        throw WaterfillError("negative target rate");
    return detail::margin_fill<Scalar>(nu.derived().eval(), nullptr, target_rate, Scalar(1e-10));
}

/// margin_waterfill with per-bin PSD caps; throws when the caps cannot reach the target.
template <typename Derived, typename CapDerived>
VectorOf<Derived> capped_margin_waterfill(const Eigen::MatrixBase<Derived>& nu, const Eigen::MatrixBase<CapDerived>& caps,
                                          typename Derived::Scalar target_rate)
{
    using Scalar = typename Derived::Scalar;
    detail::check_levels(nu);
    if (target_rate < 0)
        throw WaterfillError("negative target rate");
    const VectorOf<Derived> c = caps.template cast<Scalar>();
    return detail::margin_fill<Scalar>(nu.derived().eval(), &c, target_rate, Scalar(1e-10));
}

/// Weighted water-filling with per-bin PSD caps:
/// p(k) = clamp(c(k) mu - nu(k), 0, cap(k)), sum p = min(budget, sum cap).
template <typename Derived, typename WeightDerived, typename CapDerived>
VectorOf<Derived> capped_waterfill(const Eigen::MatrixBase<Derived>& nu, const Eigen::MatrixBase<WeightDerived>& weights,
                                   const Eigen::MatrixBase<CapDerived>& caps, typename Derived::Scalar budget)
{
    using Scalar = typename Derived::Scalar;
    using Vec = VectorOf<Derived>;
    detail::check_levels(nu);
    const Eigen::Index K = nu.size();
    if (weights.size() != K || caps.size() != K)
        throw WaterfillError("weights, caps and noise levels differ in length");
    if (budget < 0)
        throw WaterfillError("negative power budget");

    const Vec c = weights.template cast<Scalar>();
    Vec cap = caps.template cast<Scalar>();
    for (Eigen::Index k = 0; k < K; ++k)
        if (!std::isfinite(nu(k)))
            cap(k) = 0;
    if (cap.sum() <= budget)
        return cap;

    auto shape = [&](Scalar level) {
        return (c.array() * level - nu.array()).cwiseMax(Scalar(0)).cwiseMin(cap.array()).matrix().eval();
    };
    Scalar lo(0);
    Scalar hi(0);
    for (Eigen::Index k = 0; k < K; ++k)
        if (cap(k) > 0)
            hi = std::max(hi, (nu(k) + cap(k)) / c(k));
    for (int it = 0; it < 400; ++it) {
        const Scalar mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi)
            break;
        (shape(mid).sum() < budget ? lo : hi) = mid;
    }
    // Exact level on the identified free set.
    Scalar level = hi;
    Scalar capped(0), free_noise(0), free_weight(0);
    for (Eigen::Index k = 0; k < K; ++k) {
        const Scalar v = c(k) * level - nu(k);
        if (v >= cap(k))
            capped += cap(k);
        else if (v > 0) {
            free_noise += nu(k);
            free_weight += c(k);
        }
    }
    if (free_weight > 0) {
        const Scalar exact = (budget - capped + free_noise) / free_weight;
        if (std::abs(shape(exact).sum() - budget) <= std::abs(shape(level).sum() - budget))
            level = exact;
    }
    return shape(level);
}

} // namespace icg

#endif // ICG_WATERFILL_HPP

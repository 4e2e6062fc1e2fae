#ifndef ICG_SRC_SIMPLEX_HPP
#define ICG_SRC_SIMPLEX_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <vector>

namespace icg::detail {

// Dense tableau simplex for  max c'x  s.t.  A x <= b, x >= 0, with b >= 0 so the
// slack basis is feasible. Bland's rule; intended for the small problems of
// the bargaining module.
struct LpSolution
{
    Eigen::VectorXd x;
    double objective = 0.0;
};

inline LpSolution solve_standard_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
{
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if ((b.array() < 0.0).any())
        throw std::invalid_argument("simplex: right-hand side must be nonnegative");

    // rows 0..m-1 constraints, row m objective (stored as -c)
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    t.topLeftCorner(m, n) = A;
    t.block(0, n, m, m).setIdentity();
    t.topRightCorner(m, 1) = b;
    t.bottomLeftCorner(1, n) = -c.transpose();

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i)
        basis[static_cast<std::size_t>(i)] = n + i;

    const double eps = 1e-12;
    const Eigen::Index rhs = n + m;
    for (int guard = 0; guard < 100000; ++guard) {
        Eigen::Index enter = -1;
        for (Eigen::Index j = 0; j < n + m; ++j)
            if (t(m, j) < -eps) {
                enter = j;
                break;
            }
        if (enter < 0)
            break;

        Eigen::Index leave = -1;
        double best = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (t(i, enter) <= eps)
                continue;
            const double ratio = t(i, rhs) / t(i, enter);
            if (leave < 0 || ratio < best - eps ||
                (ratio <= best + eps && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave < 0)
            throw std::runtime_error("simplex: unbounded objective");

        t.row(leave) /= t(leave, enter);
        for (Eigen::Index i = 0; i <= m; ++i)
            if (i != leave && t(i, enter) != 0.0)
                t.row(i) -= t(i, enter) * t.row(leave);
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    LpSolution sol;
    sol.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i)
        if (basis[static_cast<std::size_t>(i)] < n)
            sol.x(basis[static_cast<std::size_t>(i)]) = std::max(0.0, t(i, rhs));
    sol.objective = c.dot(sol.x);
    return sol;
}

} // namespace icg::detail

#endif // ICG_SRC_SIMPLEX_HPP

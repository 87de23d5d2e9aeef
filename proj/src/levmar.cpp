#include "kinex/levmar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kinex {

Eigen::MatrixXd numeric_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x,
                                 double rel_step) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd jac;
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = rel_step * std::max(std::abs(x[j]), 1.0);
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const Eigen::VectorXd rp = f(xp), rm = f(xm);
        if (j == 0) jac.resize(rp.size(), n);
        jac.col(j) = (rp - rm) / (xp[j] - xm[j]);
    }
    return jac;
}

LmResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                             const LmOptions& opts) {
    LmResult out;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd r = f(x);
    double cost = 0.5 * r.squaredNorm();
    double lambda = opts.initial_lambda;
    const Eigen::Index n = x.size();

    if (!std::isfinite(cost)) {
        out.x = x;
        out.cost = cost;
        out.message = "residual not finite at the starting point";
        return out;
    }

    Eigen::MatrixXd jac = numeric_jacobian(f, x, opts.fd_step);
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() <= std::numeric_limits<double>::min() || cost == 0.0) {
            out.converged = true;
            out.message = "zero gradient";
            break;
        }
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-300);

        bool accepted = false;
        int tries = 0;
        double new_cost = cost;
        Eigen::VectorXd step, x_new, r_new;
        for (; tries < 40; ++tries) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            step = a.ldlt().solve(-g);
            x_new = x + step;
            r_new = f(x_new);
            new_cost = 0.5 * r_new.squaredNorm();
            if (std::isfinite(new_cost) && new_cost <= cost) {
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No descent direction left at machine precision: treat as converged
            // when the gradient is already negligible relative to the cost.
            out.converged = g.norm() <= 1e-6 * std::max(cost, 1e-300);
            out.message = out.converged ? "stationary" : "step rejected at maximum damping";
            break;
        }
        const double decrease = cost - new_cost;
        const bool small_step = step.norm() <= opts.rel_tol * (x.norm() + opts.rel_tol);
        x = x_new;
        r = r_new;
        cost = new_cost;
        lambda = std::max(lambda / 10.0, 1e-12);
        // A tiny decrease only counts when it was not forced by extra damping.
        if (small_step || (tries == 0 && decrease <= opts.rel_tol * cost)) {
            out.converged = true;
            out.message = small_step ? "step below tolerance" : "cost decrease below tolerance";
            ++it;
            break;
        }
        jac = numeric_jacobian(f, x, opts.fd_step);
    }
    if (it >= opts.max_iterations && !out.converged) out.message = "iteration limit reached";

    out.x = x;
    out.cost = cost;
    out.iterations = it;
    jac = numeric_jacobian(f, x, opts.fd_step);
    const Eigen::Index m = r.size();
    const double s2 = m > n ? 2.0 * cost / static_cast<double>(m - n) : 0.0;
    Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(jtj);
    out.covariance = s2 * cod.pseudoInverse();
    return out;
}

}  // namespace kinex

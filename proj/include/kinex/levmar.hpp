#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace kinex {

struct LmOptions {
    int max_iterations = 200;
    double rel_tol = 1e-9;       // on cost decrease and on step size
    double initial_lambda = 1e-3;
    double fd_step = 1e-7;       // relative central-difference step
};

struct LmResult {
    Eigen::VectorXd x;
    Eigen::MatrixXd covariance;  // s^2 (J^T J)^-1 at the solution, s^2 = |r|^2 / (m - n)
    double cost = 0.0;           // 0.5 |r|^2
    int iterations = 0;
    bool converged = false;
    std::string message;
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Central-difference Jacobian of f at x.
Eigen::MatrixXd numeric_jacobian(const ResidualFunction& f, const Eigen::VectorXd& x,
                                 double rel_step = 1e-7);

/// Damped Gauss-Newton with Marquardt diagonal scaling. Never throws on
/// non-convergence; callers inspect `converged`.
LmResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                             const LmOptions& opts = {});

}  // namespace kinex

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "imputekit/design.hpp"
#include "imputekit/rng.hpp"

namespace imputekit {

/// Least-squares fit of a target on a design matrix, with Gaussian residuals.
struct LinearGaussianModel
{
    Eigen::VectorXd beta;
    double sigma2 = 0.0;  // RSS / dof
    double rss = 0.0;
    Eigen::MatrixXd xtx_inv;
    std::size_t dof = 0;
    // Set when X'X was rank deficient and a ridge term was added.
    bool ridge_applied = false;
};

LinearGaussianModel fit_linear(const DesignMatrix& x, std::span<const double> y);

// X beta.
std::vector<double> predict_norm(const LinearGaussianModel& model, const DesignMatrix& x_new);

// X beta + N(0, sigma2) noise, coefficients held fixed.
std::vector<double> draw_norm_nob(const LinearGaussianModel& model, const DesignMatrix& x_new, RandomStream& rng);

/*!
 * Posterior-predictive draw under the normal / inverse-chi-square model:
 * sigma*^2 = RSS / g with g ~ chi2(dof), beta* ~ N(beta, sigma*^2 (X'X)^-1),
 * then X beta* + N(0, sigma*^2). One parameter draw is shared by all rows
 * of `x_new`.
 */
std::vector<double> draw_norm_bayes(const LinearGaussianModel& model, const DesignMatrix& x_new, RandomStream& rng);

}  // namespace imputekit

#include "imputekit/linear_model.hpp"

#include <cmath>
#include <string>

#include "imputekit/error.hpp"

namespace imputekit {

namespace {

void check_shape(const LinearGaussianModel& model, const DesignMatrix& x_new)
{
    if (static_cast<Eigen::Index>(x_new.cols()) != model.beta.size()) {
        throw FitError("design has " + std::to_string(x_new.cols()) + " columns, model expects " +
                       std::to_string(model.beta.size()));
    }
}

}  // namespace

LinearGaussianModel fit_linear(const DesignMatrix& x, std::span<const double> y)
{
    const auto& xm = x.matrix();
    const auto n = xm.rows();
    const auto q = xm.cols();
    if (static_cast<std::size_t>(n) != y.size()) {
        throw FitError("design has " + std::to_string(n) + " rows but target has " + std::to_string(y.size()));
    }
    if (n <= q) {
        throw FitError("need more rows (" + std::to_string(n) + ") than coefficients (" + std::to_string(q) + ")");
    }
    const Eigen::Map<const Eigen::VectorXd> target(y.data(), n);

    LinearGaussianModel model;
    Eigen::MatrixXd xtx = xm.transpose() * xm;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xm);
    if (qr.rank() < q) {
        xtx.diagonal().array() += 1e-8 * xtx.trace() / static_cast<double>(q);
        model.ridge_applied = true;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(xtx);
    if (llt.info() != Eigen::Success) {
        throw FitError("X'X is not positive definite");
    }
    model.beta = llt.solve(xm.transpose() * target);
    model.xtx_inv = llt.solve(Eigen::MatrixXd::Identity(q, q));
    model.rss = (target - xm * model.beta).squaredNorm();
    model.dof = static_cast<std::size_t>(n - q);
    model.sigma2 = model.rss / static_cast<double>(model.dof);
    return model;
}

std::vector<double> predict_norm(const LinearGaussianModel& model, const DesignMatrix& x_new)
{
    check_shape(model, x_new);
    const Eigen::VectorXd mean = x_new.matrix() * model.beta;
    return {mean.data(), mean.data() + mean.size()};
}

std::vector<double> draw_norm_nob(const LinearGaussianModel& model, const DesignMatrix& x_new, RandomStream& rng)
{
    auto out = predict_norm(model, x_new);
    const double sd = std::sqrt(model.sigma2);
    for (auto& v : out) {
        v += sd * rng.normal();
    }
    return out;
}

std::vector<double> draw_norm_bayes(const LinearGaussianModel& model, const DesignMatrix& x_new, RandomStream& rng)
{
    check_shape(model, x_new);
    if (model.dof < 1) {
        throw FitError("Bayesian draw needs at least one residual degree of freedom");
    }
    Eigen::LLT<Eigen::MatrixXd> chol(model.xtx_inv);
    if (chol.info() != Eigen::Success) {
        throw FitError("(X'X)^-1 is not positive definite");
    }
    const double g = rng.chi_square(static_cast<double>(model.dof));
    const double sigma_star = std::sqrt(model.rss / g);

    Eigen::VectorXd z(model.beta.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        z(k) = rng.normal();
    }
    const Eigen::VectorXd lz = chol.matrixL() * z;
    const Eigen::VectorXd beta_star = model.beta + sigma_star * lz;
    const Eigen::VectorXd mean = x_new.matrix() * beta_star;
    std::vector<double> out(mean.data(), mean.data() + mean.size());
    for (auto& v : out) {
        v += sigma_star * rng.normal();
    }
    return out;
}

}  // namespace imputekit

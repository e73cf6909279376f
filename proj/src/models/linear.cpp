#include "petrank/models/linear.hpp"

#include <cmath>

#include "petrank/error.hpp"

namespace petrank {

LinearModel fit_ols(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y) {
  if (x.rows() == 0) throw Error("EmptyMatrix", "no training rows");
  if (x.rows() != y.size()) throw Error("SchemaInvalid", "x and y row counts differ");
  const VectorXd x_mean = x.colwise().mean().transpose();
  const double y_mean = y.mean();
  const MatrixXd xc = x.rowwise() - x_mean.transpose();
  const VectorXd yc = y.array() - y_mean;

  MatrixXd gram = xc.transpose() * xc;
  gram.diagonal().array() += kOlsRidgeJitter;
  LinearModel model;
  model.coef = gram.ldlt().solve(xc.transpose() * yc);
  model.intercept = y_mean - x_mean.dot(model.coef);
  return model;
}

void ElasticNetParams::check() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw config_error("alpha must be in [0, 1]");
  if (!(lambda >= 0.0)) throw config_error("lambda must be >= 0");
  if (!(tol > 0.0)) throw config_error("tol must be > 0");
  if (max_iter < 1) throw config_error("max_iter must be >= 1");
}

nlohmann::ordered_json to_json(const ElasticNetParams& p) {
  nlohmann::ordered_json j;
  j["alpha"] = p.alpha;
  j["lambda"] = p.lambda;
  j["tol"] = p.tol;
  j["max_iter"] = p.max_iter;
  return j;
}

ElasticNetParams elastic_net_params_from_json(const nlohmann::json& j, ElasticNetParams p) {
  try {
    if (j.contains("alpha")) p.alpha = j["alpha"].get<double>();
    if (j.contains("lambda")) p.lambda = j["lambda"].get<double>();
    if (j.contains("tol")) p.tol = j["tol"].get<double>();
    if (j.contains("max_iter")) p.max_iter = j["max_iter"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("elastic_net params: ") + e.what());
  }
  p.check();
  return p;
}

ElasticNetFit fit_elastic_net(const Eigen::Ref<const MatrixXd>& x,
                              const Eigen::Ref<const VectorXd>& y, const ElasticNetParams& params) {
  params.check();
  if (x.rows() == 0) throw Error("EmptyMatrix", "no training rows");
  if (x.rows() != y.size()) throw Error("SchemaInvalid", "x and y row counts differ");
  const auto n = static_cast<double>(x.rows());
  const Index p = x.cols();

  ElasticNetFit fit;
  const VectorXd x_mean = x.colwise().mean().transpose();
  fit.not_standardized = p > 0 && x_mean.cwiseAbs().maxCoeff() > 1e-6;
  const double y_mean = y.mean();
  const MatrixXd xc = x.rowwise() - x_mean.transpose();
  const VectorXd col_sq = xc.colwise().squaredNorm().transpose() / n;

  const double l1 = params.alpha * params.lambda;
  const double l2 = (1.0 - params.alpha) * params.lambda;

  VectorXd beta = VectorXd::Zero(p);
  VectorXd residual = y.array() - y_mean;
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    double max_change = 0.0;
    for (Index j = 0; j < p; ++j) {
      const double denom = col_sq(j) + l2;
      if (denom == 0.0) continue;
      const double rho = xc.col(j).dot(residual) / n + col_sq(j) * beta(j);
      const double updated = soft_threshold(rho, l1) / denom;
      const double delta = updated - beta(j);
      if (delta != 0.0) {
        residual -= delta * xc.col(j);
        beta(j) = updated;
      }
      max_change = std::max(max_change, std::abs(delta));
    }
    fit.iterations = iter;
    fit.last_max_change = max_change;
    if (max_change < params.tol) {
      fit.converged = true;
      break;
    }
  }
  fit.model.coef = beta;
  fit.model.intercept = y_mean - x_mean.dot(beta);
  return fit;
}

VectorXd elastic_net_kkt_residuals(const Eigen::Ref<const MatrixXd>& x,
                                   const Eigen::Ref<const VectorXd>& y, const LinearModel& model,
                                   const ElasticNetParams& params) {
  const auto n = static_cast<double>(x.rows());
  const VectorXd residual = y - model.predict(x);
  const double l1 = params.alpha * params.lambda;
  const double l2 = (1.0 - params.alpha) * params.lambda;
  VectorXd out(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double grad = x.col(j).dot(residual) / n - l2 * model.coef(j);
    const double b = model.coef(j);
    if (b > 0.0) {
      out(j) = std::abs(grad - l1);
    } else if (b < 0.0) {
      out(j) = std::abs(grad + l1);
    } else {
      out(j) = std::max(0.0, std::abs(grad) - l1);
    }
  }
  return out;
}

}  // namespace petrank

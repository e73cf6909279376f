#pragma once

#include <nlohmann/json.hpp>

#include "petrank/types.hpp"

namespace petrank {

struct LinearModel {
  VectorXd coef;
  double intercept = 0.0;

  template <typename Derived>
  VectorXd predict(const Eigen::MatrixBase<Derived>& x) const {
    return (x * coef).array() + intercept;
  }
};

// Diagonal jitter added to the centered normal equations so rank-deficient
// designs (e.g. a constant column) still have a unique, finite solution.
inline constexpr double kOlsRidgeJitter = 1e-10;

// Least squares with an unpenalized intercept, solved through the centered
// normal equations (Xc'Xc + jitter*I) b = Xc'yc.
LinearModel fit_ols(const Eigen::Ref<const MatrixXd>& x, const Eigen::Ref<const VectorXd>& y);

struct ElasticNetParams {
  double alpha = 0.5;   // L1 share, in [0, 1]
  double lambda = 1.0;  // overall penalty strength
  double tol = 1e-7;
  int max_iter = 10000;

  void check() const;
};

nlohmann::ordered_json to_json(const ElasticNetParams& p);
ElasticNetParams elastic_net_params_from_json(const nlohmann::json& j, ElasticNetParams defaults = {});

struct ElasticNetFit {
  LinearModel model;
  bool converged = false;
  int iterations = 0;
  double last_max_change = 0.0;
  bool not_standardized = false;  // some column mean exceeded 1e-6
};

// Cyclic coordinate descent on
//   (1/2n) ||y - b - X beta||^2 + alpha*lambda*||beta||_1
//     + (1-alpha)/2 * lambda * ||beta||_2^2
// with soft-thresholding updates. Stops once the largest coefficient change
// in a sweep is below tol, or after max_iter sweeps.
ElasticNetFit fit_elastic_net(const Eigen::Ref<const MatrixXd>& x,
                              const Eigen::Ref<const VectorXd>& y, const ElasticNetParams& params);

// Per-coordinate violation of the optimality (subgradient) conditions.
VectorXd elastic_net_kkt_residuals(const Eigen::Ref<const MatrixXd>& x,
                                   const Eigen::Ref<const VectorXd>& y, const LinearModel& model,
                                   const ElasticNetParams& params);

inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

}  // namespace petrank

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lifecycle/merge.hpp"

namespace lifecycle {

/// Policy coefficients frozen at one time t. For a kernel value z:
///   V1 - F1 = sum_j exp(log_coef_j + eta_j log z)
///   Y       = sum_j eta_j exp(log_coef_j + eta_j log z)
///   c - cbar = exp(log_c + c_eta log z)
///   V2 - F2 = exp(log_cushion2 + eta_hat log z)
struct PolicySlice {
  double t = 0.0;
  Eigen::ArrayXd log_coef;
  Eigen::ArrayXd eta;
  double F1 = 0.0;
  double F2 = 0.0;
  double cbar = 0.0;
  double income = 0.0;
  double log_c = 0.0;
  double c_eta = 0.0;
  double log_cushion2 = 0.0;
};

struct SliceValues {
  double c_star;
  double V1;
  double V2;
  double cushion1;
  double cushion2;
  /// Common scalar of the exposure vector: exposure = exposure_scale * tangency.
  double exposure_scale;
  double V_star() const { return V1 + V2; }
};

PolicySlice build_slice(const MergedPolicy& policy, double t);

/// Shared read-only tables for a fixed time grid.
class PolicySlices {
 public:
  PolicySlices(const MergedPolicy& policy, std::vector<double> grid);

  const std::vector<double>& grid() const { return grid_; }
  const PolicySlice& operator[](std::size_t k) const { return slices_[k]; }
  std::size_t size() const { return slices_.size(); }
  double eta_hat() const { return eta_hat_; }
  double multiple_terminal() const { return m2_; }

  SliceValues evaluate(std::size_t k, double log_z, Eigen::ArrayXd& scratch) const;

 private:
  std::vector<double> grid_;
  std::vector<PolicySlice> slices_;
  double eta_hat_;
  double m2_;
};

SliceValues evaluate_slice(const PolicySlice& s, double eta_hat, double multiple_terminal, double log_z,
                           Eigen::ArrayXd& scratch);

}  // namespace lifecycle

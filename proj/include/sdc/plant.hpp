#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sdc/errors.hpp"

namespace sdc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Per-variable bounds used for sampling and validation.  They are not hard
// constraints: Newton iterates may leave the box and only trigger warnings.
struct DomainBox {
  Vec x_lo, x_hi;
  Vec u_lo, u_hi;
  Vec p_lo, p_hi;

  static DomainBox cube(int n, int m, double radius = 10.0);
  bool contains_x(const Vec& x) const;
  bool contains_u(const Vec& u) const;
  bool contains_p(const Vec& p) const;
};

// Continuous-time dynamics x' = f(x,u) with analytic first and second
// derivatives.  Per-component second-derivative blocks:
//   f_xx(x,u)[i](j,k) = d^2 f_i / dx_j dx_k      (n x n, symmetric)
//   f_xu(x,u)[i](j,k) = d^2 f_i / dx_j du_k      (n x m)
//   f_uu(x,u)[i](j,k) = d^2 f_i / du_j du_k      (m x m, symmetric)
// Instances are immutable after construction and safe to share across
// concurrent computations; all evaluation maps must be pure.
struct PlantModel {
  int n = 0;
  int m = 0;
  std::string name;
  std::function<Vec(const Vec&, const Vec&)> f;
  std::function<Mat(const Vec&, const Vec&)> f_x;
  std::function<Mat(const Vec&, const Vec&)> f_u;
  std::function<std::vector<Mat>(const Vec&, const Vec&)> f_xx;
  std::function<std::vector<Mat>(const Vec&, const Vec&)> f_xu;
  std::function<std::vector<Mat>(const Vec&, const Vec&)> f_uu;
  DomainBox domain;
};

struct LinearizedPlant {
  Mat A;  // f_x(0,0)
  Mat B;  // f_u(0,0)
  bool stabilizable = true;  // PBH rank test result, advisory only
};

// Max relative deviation of each analytic derivative from finite
// differences, over sampled points in the domain box.
struct DerivativeReport {
  double err_f_x = 0.0;
  double err_f_u = 0.0;
  double err_f_xx = 0.0;
  double err_f_xu = 0.0;
  double err_f_uu = 0.0;
  double max_error() const;
};

Vec eval_dynamics(const PlantModel& plant, const Vec& x, const Vec& u);

// Throws ModelError if f(0,0) deviates from zero by more than 1e-12.
LinearizedPlant linearize_origin(const PlantModel& plant);

// First derivatives are compared against central differences of f; second
// derivatives against central differences of the analytic first derivatives
// (exact zeros for linear plants instead of difference noise).
DerivativeReport check_derivatives(const PlantModel& plant, int samples,
                                   std::uint64_t seed);

// Checks f(0,0) = 0 and dimension wiring; throws ModelError on violation.
void validate_plant(const PlantModel& plant);

// Built-in plants.
PlantModel builtin_integrator();
PlantModel builtin_linear(const Mat& A0, const Mat& B0);
PlantModel builtin_unicycle(double v_r, double omega_r);

// Registry lookup used by the CLI; throws ConfigError for unknown names.
bool is_builtin_plant(const std::string& name);

}  // namespace sdc

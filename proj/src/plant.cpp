#include "sdc/plant.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "sdc/rng.hpp"

namespace sdc {

DomainBox DomainBox::cube(int n, int m, double radius) {
  DomainBox box;
  box.x_lo = Vec::Constant(n, -radius);
  box.x_hi = Vec::Constant(n, radius);
  box.u_lo = Vec::Constant(m, -radius);
  box.u_hi = Vec::Constant(m, radius);
  box.p_lo = Vec::Constant(n, -radius);
  box.p_hi = Vec::Constant(n, radius);
  return box;
}

namespace {

bool inside(const Vec& lo, const Vec& hi, const Vec& v) {
  return (v.array() >= lo.array()).all() && (v.array() <= hi.array()).all();
}

void require_dims(const PlantModel& plant, const Vec& x, const Vec& u) {
  if (x.size() != plant.n || u.size() != plant.m) {
    throw std::invalid_argument("plant '" + plant.name + "' expects (n,m)=(" +
                                std::to_string(plant.n) + "," +
                                std::to_string(plant.m) + "), got (" +
                                std::to_string(x.size()) + "," +
                                std::to_string(u.size()) + ")");
  }
}

// PBH test: rank [sI - A, B] = n for every eigenvalue s with |Re s| >= 0.
bool pbh_stabilizable(const Mat& A, const Mat& B) {
  const int n = static_cast<int>(A.rows());
  Eigen::EigenSolver<Mat> es(A);
  for (int i = 0; i < n; ++i) {
    std::complex<double> s = es.eigenvalues()[i];
    if (s.real() < 0.0) continue;
    Eigen::MatrixXcd pencil(n, n + B.cols());
    pencil << s * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>(),
        B.cast<std::complex<double>>();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(pencil);
    if (qr.rank() < n) return false;
  }
  return true;
}

double rel_err(double analytic, double reference) {
  return std::abs(analytic - reference) / std::max(1.0, std::abs(reference));
}

double max_rel_err(const Mat& analytic, const Mat& reference) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.rows(); ++i)
    for (Eigen::Index j = 0; j < analytic.cols(); ++j)
      worst = std::max(worst, rel_err(analytic(i, j), reference(i, j)));
  return worst;
}

}  // namespace

bool DomainBox::contains_x(const Vec& x) const { return inside(x_lo, x_hi, x); }
bool DomainBox::contains_u(const Vec& u) const { return inside(u_lo, u_hi, u); }
bool DomainBox::contains_p(const Vec& p) const { return inside(p_lo, p_hi, p); }

double DerivativeReport::max_error() const {
  return std::max({err_f_x, err_f_u, err_f_xx, err_f_xu, err_f_uu});
}

Vec eval_dynamics(const PlantModel& plant, const Vec& x, const Vec& u) {
  require_dims(plant, x, u);
  return plant.f(x, u);
}

void validate_plant(const PlantModel& plant) {
  if (plant.n < 1 || plant.m < 1)
    throw ModelError("plant '" + plant.name + "' has invalid dimensions");
  const Vec x0 = Vec::Zero(plant.n);
  const Vec u0 = Vec::Zero(plant.m);
  const Vec f0 = plant.f(x0, u0);
  if (f0.size() != plant.n)
    throw ModelError("plant '" + plant.name + "' returns wrong state size");
  if (f0.lpNorm<Eigen::Infinity>() > 1e-12)
    throw ModelError("plant '" + plant.name +
                     "' violates f(0,0)=0, |f(0,0)| = " +
                     std::to_string(f0.lpNorm<Eigen::Infinity>()));
  if (plant.domain.x_lo.size() != plant.n)
    throw ModelError("plant '" + plant.name + "' domain box mismatch");
  if (!plant.domain.contains_x(x0) || !plant.domain.contains_u(u0) ||
      !plant.domain.contains_p(x0))
    throw ModelError("plant '" + plant.name +
                     "' domain box does not contain the origin");
  for (int i = 0; i < plant.n; ++i)
    if (!(plant.domain.x_lo[i] < plant.domain.x_hi[i]) ||
        !(plant.domain.p_lo[i] < plant.domain.p_hi[i]))
      throw ModelError("plant '" + plant.name + "' has empty domain box");
  for (int i = 0; i < plant.m; ++i)
    if (!(plant.domain.u_lo[i] < plant.domain.u_hi[i]))
      throw ModelError("plant '" + plant.name + "' has empty input box");
}

LinearizedPlant linearize_origin(const PlantModel& plant) {
  validate_plant(plant);
  LinearizedPlant lin;
  const Vec x0 = Vec::Zero(plant.n);
  const Vec u0 = Vec::Zero(plant.m);
  lin.A = plant.f_x(x0, u0);
  lin.B = plant.f_u(x0, u0);
  lin.stabilizable = pbh_stabilizable(lin.A, lin.B);
  return lin;
}

DerivativeReport check_derivatives(const PlantModel& plant, int samples,
                                   std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  DerivativeReport report;
  GaussianStream rng(seed);
  const int n = plant.n, m = plant.m;

  auto sample_box = [&](const Vec& lo, const Vec& hi) {
    Vec v(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      // map a standard normal through erf-free clamp onto the box interior
      double t = 0.5 + 0.5 * std::tanh(rng.next());
      v[i] = lo[i] + t * (hi[i] - lo[i]);
    }
    return v;
  };

  for (int s = 0; s < samples; ++s) {
    const Vec x = sample_box(plant.domain.x_lo, plant.domain.x_hi);
    const Vec u = sample_box(plant.domain.u_lo, plant.domain.u_hi);
    const double dx = 1e-5 * std::max(1.0, x.norm());
    const double du = 1e-5 * std::max(1.0, u.norm());

    // first order vs central differences of f
    Mat fd_fx(n, n), fd_fu(n, m);
    for (int j = 0; j < n; ++j) {
      Vec e = Vec::Zero(n);
      e[j] = dx;
      fd_fx.col(j) = (plant.f(x + e, u) - plant.f(x - e, u)) / (2.0 * dx);
    }
    for (int j = 0; j < m; ++j) {
      Vec e = Vec::Zero(m);
      e[j] = du;
      fd_fu.col(j) = (plant.f(x, u + e) - plant.f(x, u - e)) / (2.0 * du);
    }
    report.err_f_x = std::max(report.err_f_x, max_rel_err(plant.f_x(x, u), fd_fx));
    report.err_f_u = std::max(report.err_f_u, max_rel_err(plant.f_u(x, u), fd_fu));

    // second order vs central differences of the analytic first derivatives
    const std::vector<Mat> fxx = plant.f_xx(x, u);
    const std::vector<Mat> fxu = plant.f_xu(x, u);
    const std::vector<Mat> fuu = plant.f_uu(x, u);
    for (int j = 0; j < n; ++j) {
      Vec e = Vec::Zero(n);
      e[j] = dx;
      Mat d_fx = (plant.f_x(x + e, u) - plant.f_x(x - e, u)) / (2.0 * dx);
      Mat d_fu = (plant.f_u(x + e, u) - plant.f_u(x - e, u)) / (2.0 * dx);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k)
          report.err_f_xx =
              std::max(report.err_f_xx, rel_err(fxx[i](j, k), d_fx(i, k)));
        for (int k = 0; k < m; ++k)
          report.err_f_xu =
              std::max(report.err_f_xu, rel_err(fxu[i](j, k), d_fu(i, k)));
      }
    }
    for (int j = 0; j < m; ++j) {
      Vec e = Vec::Zero(m);
      e[j] = du;
      Mat d_fu = (plant.f_u(x, u + e) - plant.f_u(x, u - e)) / (2.0 * du);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < m; ++k)
          report.err_f_uu =
              std::max(report.err_f_uu, rel_err(fuu[i](j, k), d_fu(i, k)));
    }
  }
  return report;
}

namespace {

std::vector<Mat> zero_blocks(int count, int rows, int cols) {
  return std::vector<Mat>(count, Mat::Zero(rows, cols));
}

}  // namespace

PlantModel builtin_integrator() {
  PlantModel p;
  p.n = 1;
  p.m = 1;
  p.name = "integrator";
  p.f = [](const Vec&, const Vec& u) { return u; };
  p.f_x = [](const Vec&, const Vec&) { return Mat::Zero(1, 1); };
  p.f_u = [](const Vec&, const Vec&) { return Mat::Ones(1, 1); };
  p.f_xx = [](const Vec&, const Vec&) { return zero_blocks(1, 1, 1); };
  p.f_xu = [](const Vec&, const Vec&) { return zero_blocks(1, 1, 1); };
  p.f_uu = [](const Vec&, const Vec&) { return zero_blocks(1, 1, 1); };
  p.domain = DomainBox::cube(1, 1);
  validate_plant(p);
  return p;
}

PlantModel builtin_linear(const Mat& A0, const Mat& B0) {
  if (A0.rows() != A0.cols() || B0.rows() != A0.rows() || B0.cols() < 1)
    throw ModelError("linear plant needs square A and conforming B");
  const int n = static_cast<int>(A0.rows());
  const int m = static_cast<int>(B0.cols());
  PlantModel p;
  p.n = n;
  p.m = m;
  p.name = "linear";
  p.f = [A0, B0](const Vec& x, const Vec& u) -> Vec { return A0 * x + B0 * u; };
  p.f_x = [A0](const Vec&, const Vec&) { return A0; };
  p.f_u = [B0](const Vec&, const Vec&) { return B0; };
  p.f_xx = [n](const Vec&, const Vec&) { return zero_blocks(n, n, n); };
  p.f_xu = [n, m](const Vec&, const Vec&) { return zero_blocks(n, n, m); };
  p.f_uu = [n, m](const Vec&, const Vec&) { return zero_blocks(n, m, m); };
  p.domain = DomainBox::cube(n, m);
  validate_plant(p);
  return p;
}

PlantModel builtin_unicycle(double v_r, double omega_r) {
  // Tracking-error model of a wheeled robot following a reference with
  // constant linear speed v_r and angular speed omega_r.  State (a,b,theta)
  // is the reference pose in the controlled robot's frame, input (v,omega)
  // the relative velocities.
  PlantModel p;
  p.n = 3;
  p.m = 2;
  p.name = "unicycle";
  p.f = [v_r, omega_r](const Vec& x, const Vec& u) -> Vec {
    const double a = x[0], b = x[1], th = x[2];
    const double v = u[0], w = u[1];
    Vec dx(3);
    dx[0] = v_r * (std::cos(th) - 1.0) + b * omega_r + v - b * w;
    dx[1] = v_r * std::sin(th) - a * omega_r + a * w;
    dx[2] = w;
    return dx;
  };
  p.f_x = [v_r, omega_r](const Vec& x, const Vec& u) -> Mat {
    const double th = x[2], w = u[1];
    Mat J = Mat::Zero(3, 3);
    J(0, 1) = omega_r - w;
    J(0, 2) = -v_r * std::sin(th);
    J(1, 0) = -omega_r + w;
    J(1, 2) = v_r * std::cos(th);
    return J;
  };
  p.f_u = [](const Vec& x, const Vec&) -> Mat {
    Mat J = Mat::Zero(3, 2);
    J(0, 0) = 1.0;
    J(0, 1) = -x[1];
    J(1, 1) = x[0];
    J(2, 1) = 1.0;
    return J;
  };
  p.f_xx = [v_r](const Vec& x, const Vec&) {
    std::vector<Mat> blocks = zero_blocks(3, 3, 3);
    blocks[0](2, 2) = -v_r * std::cos(x[2]);
    blocks[1](2, 2) = -v_r * std::sin(x[2]);
    return blocks;
  };
  p.f_xu = [](const Vec&, const Vec&) {
    std::vector<Mat> blocks = zero_blocks(3, 3, 2);
    blocks[0](1, 1) = -1.0;  // d^2 f_1 / db domega
    blocks[1](0, 1) = 1.0;   // d^2 f_2 / da domega
    return blocks;
  };
  p.f_uu = [](const Vec&, const Vec&) { return zero_blocks(3, 2, 2); };
  p.domain = DomainBox::cube(3, 2);
  validate_plant(p);
  return p;
}

bool is_builtin_plant(const std::string& name) {
  return name == "integrator" || name == "linear" || name == "unicycle";
}

}  // namespace sdc

#include "sdc/riccati.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "sdc/flow.hpp"

namespace sdc {

namespace {

double spectral_radius(const Mat& A) {
  return A.eigenvalues().cwiseAbs().maxCoeff();
}

Mat dare_residual(const Mat& A, const Mat& B, const Mat& Qd, const Mat& Rd,
                  const Mat& Wd, const Mat& S) {
  const Mat G = B.transpose() * S * B + Rd;
  const Mat L = A.transpose() * S * B + Wd;
  return A.transpose() * S * A - S + Qd - L * G.llt().solve(L.transpose());
}

// Solves X = Acl' X Acl + C for symmetric C via Kronecker vectorization;
// fine at desk-scale n.
Mat discrete_lyapunov(const Mat& Acl, const Mat& C) {
  const int n = static_cast<int>(Acl.rows());
  Mat AT = Acl.transpose();
  Mat K(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      K.block(i * n, j * n, n, n) = AT(i, j) * AT;
  Mat lhs = Mat::Identity(n * n, n * n) - K;
  Vec rhs(n * n);
  for (int j = 0; j < n; ++j) rhs.segment(j * n, n) = C.col(j);
  Vec xv = lhs.partialPivLu().solve(rhs);
  Mat X(n, n);
  for (int j = 0; j < n; ++j) X.col(j) = xv.segment(j * n, n);
  return 0.5 * (X + X.transpose());
}

}  // namespace

DiscretizedLinear discretize_linear(const PlantModel& plant, double h, int M) {
  FlowRequest req;
  req.x0 = Vec::Zero(plant.n);
  req.u0 = Vec::Zero(plant.m);
  req.h = h;
  req.M = M;
  req.order = 1;
  const FlowResult flow = integrate_flow(plant, req);
  DiscretizedLinear dl;
  dl.A_h = flow.phi_x_end();
  dl.B_h = flow.phi_u_end();
  dl.h = h;
  return dl;
}

IntersampleWeights intersample_weights(const PlantModel& plant,
                                       const CostSpec& spec, int M) {
  if (spec.mode != CostMode::Intersample)
    throw ConfigError("intersample weights require Intersample mode");
  if (M < 2 || M % 2 != 0) throw ConfigError("quadrature steps M must be even");

  FlowRequest req;
  req.x0 = Vec::Zero(plant.n);
  req.u0 = Vec::Zero(plant.m);
  req.h = spec.h;
  req.M = M;
  req.order = 1;
  const FlowResult flow = integrate_flow(plant, req);
  const std::vector<double> w = simpson_weights(spec.h, M);

  const int n = plant.n, m = plant.m;
  IntersampleWeights iw;
  iw.Qbar = Mat::Zero(n, n);
  iw.Wbar = Mat::Zero(n, m);
  iw.Rbar = Mat::Zero(m, m);
  for (int j = 0; j <= M; ++j) {
    const Mat& At = flow.phi_x[j];
    const Mat& Bt = flow.phi_u[j];
    iw.Qbar += w[j] * (At.transpose() * spec.Q * At);
    iw.Wbar += w[j] * (At.transpose() * spec.Q * Bt);
    iw.Rbar += w[j] * (Bt.transpose() * spec.Q * Bt);
  }
  iw.Rbar += spec.h * spec.R;
  iw.Qbar = 0.5 * (iw.Qbar + iw.Qbar.transpose());
  iw.Rbar = 0.5 * (iw.Rbar + iw.Rbar.transpose());
  return iw;
}

RiccatiSolution solve_dare(const DiscretizedLinear& dl, const Mat& Qd,
                           const Mat& Rd, const Mat& Wd) {
  const Mat& A = dl.A_h;
  const Mat& B = dl.B_h;
  const int n = static_cast<int>(A.rows());

  if (Qd.rows() != n || Rd.rows() != B.cols() || Wd.rows() != n ||
      Wd.cols() != B.cols())
    throw std::invalid_argument("solve_dare weight dimensions mismatch");
  Eigen::LLT<Mat> rd_llt(Rd);
  if (rd_llt.info() != Eigen::Success)
    throw std::invalid_argument("Rd must be positive definite");

  constexpr double kRelTol = 1e-13;
  constexpr long kMaxIter = 1000000;
  Mat S = Mat::Zero(n, n);
  long it = 0;
  for (; it < kMaxIter; ++it) {
    const Mat G = B.transpose() * S * B + Rd;
    const Mat L = A.transpose() * S * B + Wd;
    Mat S_next = A.transpose() * S * A + Qd - L * G.llt().solve(L.transpose());
    S_next = 0.5 * (S_next + S_next.transpose());
    const double change = (S_next - S).norm();
    S = S_next;
    if (!S.allFinite() || S.norm() > 1e14)
      throw NonConvergenceError(
          "Riccati iteration diverged after " + std::to_string(it + 1) +
          " steps; (A_h,B_h) is likely not stabilizable");
    if (change <= kRelTol * std::max(1.0, S.norm())) break;
  }
  if (it >= kMaxIter)
    throw NonConvergenceError("Riccati iteration hit the iteration cap; last residual " +
                              std::to_string(dare_residual(A, B, Qd, Rd, Wd, S).norm()));

  RiccatiSolution sol;
  sol.iterations = static_cast<int>(it + 1);
  sol.K = (B.transpose() * S * B + Rd)
              .llt()
              .solve(B.transpose() * S * A + Wd.transpose());
  sol.Acl = A - B * sol.K;

  // One Newton step: with the current gain fixed, the exact value matrix
  // solves the closed-loop Lyapunov equation.
  const Mat C = Qd - Wd * sol.K - sol.K.transpose() * Wd.transpose() +
                sol.K.transpose() * Rd * sol.K;
  if (spectral_radius(sol.Acl) < 1.0) {
    S = discrete_lyapunov(sol.Acl, 0.5 * (C + C.transpose()));
    sol.K = (B.transpose() * S * B + Rd)
                .llt()
                .solve(B.transpose() * S * A + Wd.transpose());
    sol.Acl = A - B * sol.K;
  }

  sol.S = S;
  sol.residual = dare_residual(A, B, Qd, Rd, Wd, S).norm();
  sol.spectral_radius = spectral_radius(sol.Acl);
  if (sol.spectral_radius >= 1.0)
    throw StabilizationError("DARE solution is not stabilizing: rho(Acl) = " +
                             std::to_string(sol.spectral_radius));
  return sol;
}

RiccatiSolution riccati_for_spec(const PlantModel& plant, const CostSpec& spec) {
  validate_cost_spec(spec, plant.n, plant.m);
  const DiscretizedLinear dl = discretize_linear(plant, spec.h, spec.M);
  if (spec.mode == CostMode::Sampled) {
    const Mat Wd = Mat::Zero(plant.n, plant.m);
    return solve_dare(dl, spec.h * spec.Q, spec.h * spec.R, Wd);
  }
  const IntersampleWeights iw = intersample_weights(plant, spec, spec.M);
  return solve_dare(dl, iw.Qbar, iw.Rbar, iw.Wbar);
}

}  // namespace sdc

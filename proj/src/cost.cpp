#include "sdc/cost.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace sdc {

void validate_cost_spec(const CostSpec& spec, int n, int m) {
  if (spec.Q.rows() != n || spec.Q.cols() != n)
    throw ConfigError("Q must be " + std::to_string(n) + "x" + std::to_string(n));
  if (spec.R.rows() != m || spec.R.cols() != m)
    throw ConfigError("R must be " + std::to_string(m) + "x" + std::to_string(m));
  if ((spec.Q - spec.Q.transpose()).lpNorm<Eigen::Infinity>() > 1e-12)
    throw ConfigError("Q must be symmetric");
  if ((spec.R - spec.R.transpose()).lpNorm<Eigen::Infinity>() > 1e-12)
    throw ConfigError("R must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> esq(spec.Q);
  if (esq.eigenvalues().minCoeff() < -1e-12)
    throw ConfigError("Q must be positive semidefinite");
  Eigen::SelfAdjointEigenSolver<Mat> esr(spec.R);
  if (esr.eigenvalues().minCoeff() <= 0.0)
    throw ConfigError("R must be positive definite");
  if (!(spec.h > 0.0)) throw ConfigError("sampling period h must be positive");
  if (spec.M < 2 || spec.M % 2 != 0)
    throw ConfigError("quadrature steps M must be even and >= 2");
}

std::vector<double> simpson_weights(double h, int M) {
  if (M < 2 || M % 2 != 0)
    throw ConfigError("Simpson rule needs an even number of intervals");
  std::vector<double> w(M + 1, 0.0);
  const double scale = h / (3.0 * M);
  w[0] = scale;
  w[M] = scale;
  for (int j = 1; j < M; ++j) w[j] = scale * (j % 2 == 1 ? 4.0 : 2.0);
  return w;
}

StageCostEval stage_cost_sampled(const CostSpec& spec, const Vec& x, const Vec& u) {
  if (x.size() != spec.Q.rows() || u.size() != spec.R.rows())
    throw std::invalid_argument("stage cost dimension mismatch");
  const double h = spec.h;
  StageCostEval e;
  e.value = h * x.dot(spec.Q * x) + h * u.dot(spec.R * u);
  e.grad_x = 2.0 * h * (spec.Q * x).transpose();
  e.grad_u = 2.0 * h * (spec.R * u).transpose();
  e.hess_xx = 2.0 * h * spec.Q;
  e.hess_ux = Mat::Zero(u.size(), x.size());
  e.hess_uu = 2.0 * h * spec.R;
  e.has_hess_xx = true;
  return e;
}

namespace {

void check_flow_match(const CostSpec& spec, const Vec& x, const Vec& u,
                      const FlowResult& flow) {
  if (flow.request.h != spec.h || flow.request.M != spec.M)
    throw std::invalid_argument("flow grid does not match cost spec");
  const bool same_x = flow.request.x0.size() == x.size() &&
                      (flow.request.x0.array() == x.array()).all();
  const bool same_u = flow.request.u0.size() == u.size() &&
                      (flow.request.u0.array() == u.array()).all();
  if (!same_x || !same_u)
    throw std::invalid_argument("flow was integrated at a different (x,u)");
}

}  // namespace

StageCostEval stage_cost_intersample(const PlantModel& plant, const CostSpec& spec,
                                     const Vec& x, const Vec& u,
                                     const FlowResult& flow) {
  if (spec.mode != CostMode::Intersample)
    throw std::invalid_argument("stage_cost_intersample requires Intersample mode");
  check_flow_match(spec, x, u, flow);
  if (flow.request.order < 2)
    throw std::invalid_argument("intersample stage cost needs an order-2 flow");

  const int n = plant.n, m = plant.m;
  const std::vector<double> w = simpson_weights(spec.h, spec.M);
  const bool with_xx = flow.has_xx();

  StageCostEval e;
  e.grad_x = Eigen::RowVectorXd::Zero(n);
  e.grad_u = Eigen::RowVectorXd::Zero(m);
  e.hess_xx = Mat::Zero(n, n);
  e.hess_ux = Mat::Zero(m, n);
  e.hess_uu = Mat::Zero(m, m);

  for (int j = 0; j <= spec.M; ++j) {
    const Vec& phi = flow.phi[j];
    const Mat& Px = flow.phi_x[j];
    const Mat& Pu = flow.phi_u[j];
    const Vec Qphi = spec.Q * phi;

    e.value += w[j] * phi.dot(Qphi);
    e.grad_x += w[j] * 2.0 * (Qphi.transpose() * Px);
    e.grad_u += w[j] * 2.0 * (Qphi.transpose() * Pu);

    Mat huu = Pu.transpose() * spec.Q * Pu;
    Mat hux = Pu.transpose() * spec.Q * Px;
    Mat hxx;
    if (with_xx) hxx = Px.transpose() * spec.Q * Px;
    for (int i = 0; i < n; ++i) {
      if (Qphi[i] == 0.0) continue;
      huu += Qphi[i] * flow.phi_uu[j][i];
      hux += Qphi[i] * flow.phi_ux[j][i];
      if (with_xx) hxx += Qphi[i] * flow.phi_xx[j][i];
    }
    e.hess_uu += w[j] * 2.0 * huu;
    e.hess_ux += w[j] * 2.0 * hux;
    if (with_xx) e.hess_xx += w[j] * 2.0 * hxx;
  }

  // the h u'Ru input penalty outside the integral
  e.value += spec.h * u.dot(spec.R * u);
  e.grad_u += 2.0 * spec.h * (spec.R * u).transpose();
  e.hess_uu += 2.0 * spec.h * spec.R;
  e.has_hess_xx = with_xx;
  return e;
}

StagePenalty sampled_stage_penalty(const CostSpec& spec, const Vec& x, const Vec& u) {
  StagePenalty p;
  p.state = spec.h * x.dot(spec.Q * x);
  p.input = spec.h * u.dot(spec.R * u);
  return p;
}

StagePenalty intersample_stage_penalty(const CostSpec& spec, const Vec& u,
                                       const FlowResult& flow) {
  if (flow.request.h != spec.h || flow.request.M != spec.M)
    throw std::invalid_argument("flow grid does not match cost spec");
  const std::vector<double> w = simpson_weights(spec.h, spec.M);
  StagePenalty p;
  for (int j = 0; j <= spec.M; ++j)
    p.state += w[j] * flow.phi[j].dot(spec.Q * flow.phi[j]);
  p.input = spec.h * u.dot(spec.R * u);
  return p;
}

ObjectiveTotals accumulate_objective(std::span<const StagePenalty> stages) {
  ObjectiveTotals t;
  for (const StagePenalty& s : stages) {
    t.state += s.state;
    t.input += s.input;
  }
  t.total = t.state + t.input;
  return t;
}

}  // namespace sdc

#include "sdc/hamiltonian.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace sdc {

namespace {

// Contraction sum_i p_i blocks[i].
Mat contract(const Vec& p, const std::vector<Mat>& blocks) {
  Mat out = Mat::Zero(blocks[0].rows(), blocks[0].cols());
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] != 0.0) out += p[i] * blocks[static_cast<size_t>(i)];
  return out;
}

bool positive_definite(const Mat& A) {
  Eigen::LLT<Mat> llt(0.5 * (A + A.transpose()));
  return llt.info() == Eigen::Success;
}

}  // namespace

FlowResult hamiltonian_flow(const PlantModel& plant, const CostSpec& spec,
                            const Vec& x, const Vec& u, bool want_fxx) {
  FlowRequest req;
  req.x0 = x;
  req.u0 = u;
  req.h = spec.h;
  req.M = spec.M;
  req.order = 2;
  req.want_fxx = want_fxx;
  return integrate_flow(plant, req);
}

StageCostEval stage_cost(const PlantModel& plant, const CostSpec& spec,
                         const Vec& x, const Vec& u, const FlowResult& flow) {
  if (spec.mode == CostMode::Sampled) return stage_cost_sampled(spec, x, u);
  return stage_cost_intersample(plant, spec, x, u, flow);
}

double hamiltonian_value(const PlantModel& plant, const CostSpec& spec,
                         const Vec& x, const Vec& u, const Vec& p_plus,
                         const FlowResult& flow) {
  const StageCostEval c = stage_cost(plant, spec, x, u, flow);
  return flow.phi_end().dot(p_plus) + c.value;
}

BackwardStepResult backward_step(const PlantModel& plant, const CostSpec& spec,
                                 const Vec& x_plus, const Vec& p_plus,
                                 const RiccatiSolution& lin,
                                 const NewtonOptions& opts,
                                 const Vec* u_warm) {
  const int n = plant.n, m = plant.m;
  if (x_plus.size() != n || p_plus.size() != n)
    throw std::invalid_argument("backward_step dimension mismatch");

  Vec x = x_plus;
  Vec u = (opts.u_init == UInitStrategy::PreviousU && u_warm != nullptr)
              ? *u_warm
              : Vec(-lin.K * x_plus);

  BackwardStepResult out;
  FlowResult flow;
  for (int it = 0;; ++it) {
    flow = hamiltonian_flow(plant, spec, x, u);
    const StageCostEval c = stage_cost(plant, spec, x, u, flow);

    const Vec r1 = flow.phi_end() - x_plus;
    const Vec r2 = flow.phi_u_end().transpose() * p_plus + c.grad_u.transpose();
    out.stats.iterations = it;
    out.stats.residual_dynamics = r1.lpNorm<Eigen::Infinity>();
    out.stats.residual_stationarity = r2.lpNorm<Eigen::Infinity>();
    if (out.stats.residual_dynamics <= opts.tol &&
        out.stats.residual_stationarity <= opts.tol)
      break;
    if (it >= opts.max_iter)
      throw NonConvergenceError(
          "backward step did not converge in " + std::to_string(opts.max_iter) +
          " iterations; residuals " + std::to_string(out.stats.residual_dynamics) +
          ", " + std::to_string(out.stats.residual_stationarity));

    const Mat Dux = contract(p_plus, flow.phi_ux_end()) + c.hess_ux;
    const Mat Duu = contract(p_plus, flow.phi_uu_end()) + c.hess_uu;
    if (!positive_definite(Duu)) out.stats.hessian_not_pd = true;

    Mat J(n + m, n + m);
    J.topLeftCorner(n, n) = flow.phi_x_end();
    J.topRightCorner(n, m) = flow.phi_u_end();
    J.bottomLeftCorner(m, n) = Dux;
    J.bottomRightCorner(m, m) = Duu;

    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible())
      throw SolverError("singular Newton matrix in backward step");
    Vec r(n + m);
    r.head(n) = r1;
    r.tail(m) = r2;
    const Vec delta = lu.solve(r);
    x -= delta.head(n);
    u -= delta.tail(m);
  }

  const StageCostEval c = stage_cost(plant, spec, x, u, flow);
  out.x = x;
  out.u = u;
  out.p = flow.phi_x_end().transpose() * p_plus + c.grad_x.transpose();
  out.stats.left_domain =
      !plant.domain.contains_x(x) || !plant.domain.contains_u(u);
  return out;
}

ForwardStepResult forward_step(const PlantModel& plant, const CostSpec& spec,
                               const Vec& x, const Vec& p,
                               const RiccatiSolution& lin,
                               const NewtonOptions& opts) {
  const int n = plant.n, m = plant.m;
  if (x.size() != n || p.size() != n)
    throw std::invalid_argument("forward_step dimension mismatch");

  Vec u = -lin.K * x;
  Vec p_plus = 2.0 * lin.S * (lin.Acl * x);

  ForwardStepResult out;
  FlowResult flow;
  for (int it = 0;; ++it) {
    flow = hamiltonian_flow(plant, spec, x, u);
    const StageCostEval c = stage_cost(plant, spec, x, u, flow);

    const Vec g1 = flow.phi_u_end().transpose() * p_plus + c.grad_u.transpose();
    const Vec g2 = flow.phi_x_end().transpose() * p_plus + c.grad_x.transpose() - p;
    out.stats.iterations = it;
    out.stats.residual_stationarity = g1.lpNorm<Eigen::Infinity>();
    out.stats.residual_dynamics = g2.lpNorm<Eigen::Infinity>();
    if (out.stats.residual_stationarity <= opts.tol &&
        out.stats.residual_dynamics <= opts.tol)
      break;
    if (it >= opts.max_iter)
      throw NonConvergenceError(
          "forward step did not converge in " + std::to_string(opts.max_iter) +
          " iterations; residuals " + std::to_string(out.stats.residual_dynamics) +
          ", " + std::to_string(out.stats.residual_stationarity));

    const Mat Dux = contract(p_plus, flow.phi_ux_end()) + c.hess_ux;
    const Mat Duu = contract(p_plus, flow.phi_uu_end()) + c.hess_uu;
    if (!positive_definite(Duu)) out.stats.hessian_not_pd = true;

    Mat J(m + n, m + n);
    J.topLeftCorner(m, m) = Duu;
    J.topRightCorner(m, n) = flow.phi_u_end().transpose();
    J.bottomLeftCorner(n, m) = Dux.transpose();
    J.bottomRightCorner(n, n) = flow.phi_x_end().transpose();

    Eigen::FullPivLU<Mat> lu(J);
    if (!lu.isInvertible())
      throw SolverError("singular Newton matrix in forward step");
    Vec g(m + n);
    g.head(m) = g1;
    g.tail(n) = g2;
    const Vec delta = lu.solve(g);
    u -= delta.head(m);
    p_plus -= delta.tail(n);
  }

  out.x_plus = flow.phi_end();
  out.u = u;
  out.p_plus = p_plus;
  out.stats.left_domain =
      !plant.domain.contains_x(out.x_plus) || !plant.domain.contains_u(u);
  return out;
}

Trajectory backward_trajectory(const PlantModel& plant, const CostSpec& spec,
                               const Vec& x_N, int N,
                               const RiccatiSolution& lin,
                               const NewtonOptions& opts,
                               double terminal_radius) {
  if (N < 1) throw std::invalid_argument("horizon N must be >= 1");
  if (x_N.size() != plant.n)
    throw std::invalid_argument("terminal state dimension mismatch");

  Trajectory traj;
  traj.mode = spec.mode;
  traj.S_used = lin.S;
  traj.points.resize(N + 1);
  traj.meta.steps.resize(N);
  if (x_N.norm() > terminal_radius)
    traj.meta.warnings.push_back(
        "terminal state norm " + std::to_string(x_N.norm()) +
        " exceeds terminal radius " + std::to_string(terminal_radius));

  traj.points[N] = HamiltonianPoint{N, x_N, Vec(), 2.0 * lin.S * x_N};

  for (int k = N - 1; k >= 0; --k) {
    const HamiltonianPoint& next = traj.points[k + 1];
    const Vec* warm = (k == N - 1) ? nullptr : &traj.points[k + 1].u;
    BackwardStepResult step;
    try {
      step = backward_step(plant, spec, next.x, next.p, lin, opts, warm);
    } catch (const Error& e) {
      throw NonConvergenceError("backward trajectory failed at step k=" +
                                std::to_string(k) + ": " + e.what());
    }
    traj.points[k] = HamiltonianPoint{k, step.x, step.u, step.p};
    traj.meta.steps[k] = step.stats;
    traj.meta.total_newton_iterations += step.stats.iterations;
    traj.meta.max_residual_dynamics =
        std::max(traj.meta.max_residual_dynamics, step.stats.residual_dynamics);
    traj.meta.max_residual_stationarity = std::max(
        traj.meta.max_residual_stationarity, step.stats.residual_stationarity);
  }
  return traj;
}

Mat linearized_backward_map(const PlantModel& plant, const CostSpec& spec,
                            const Vec& x, const Vec& u, const Vec& p_plus,
                            const FlowResult& flow) {
  const int n = plant.n, m = plant.m;
  if (!flow.has_xx())
    throw std::invalid_argument("linearized backward map needs phi_xx blocks");
  const StageCostEval c = stage_cost(plant, spec, x, u, flow);
  if (!c.has_hess_xx)
    throw std::invalid_argument("stage cost is missing the xx Hessian block");

  const Mat Dux = contract(p_plus, flow.phi_ux_end()) + c.hess_ux;
  const Mat Duu = contract(p_plus, flow.phi_uu_end()) + c.hess_uu;
  const Mat Dxx = contract(p_plus, flow.phi_xx_end()) + c.hess_xx;

  Mat inner(n + m, n + m);
  inner.topLeftCorner(n, n) = flow.phi_x_end();
  inner.topRightCorner(n, m) = flow.phi_u_end();
  inner.bottomLeftCorner(m, n) = Dux;
  inner.bottomRightCorner(m, m) = Duu;
  Eigen::FullPivLU<Mat> lu(inner);
  if (!lu.isInvertible())
    throw SolverError("singular inner block in linearized backward map");

  Mat left(2 * n, n + m);
  left.topLeftCorner(n, n) = Mat::Identity(n, n);
  left.topRightCorner(n, m).setZero();
  left.bottomLeftCorner(n, n) = Dxx;
  left.bottomRightCorner(n, m) = Dux.transpose();

  Mat right(n + m, 2 * n);
  right.setZero();
  right.topLeftCorner(n, n) = Mat::Identity(n, n);
  right.bottomRightCorner(m, n) = -flow.phi_u_end().transpose();

  Mat Hk = left * lu.solve(right);
  Hk.block(n, n, n, n) += flow.phi_x_end().transpose();
  return Hk;
}

}  // namespace sdc

#pragma once

#include <vector>

#include "sdc/plant.hpp"

namespace sdc {

struct FlowRequest {
  Vec x0;
  Vec u0;            // held constant over the period (zero-order hold)
  double h = 1.0;    // sampling period
  int M = 64;        // grid steps; even, so the grid is Simpson-compatible
  int order = 2;     // sensitivity order: 0, 1 or 2
  bool want_fxx = false;  // also propagate d^2 phi_i / dx^2 (shooting only)
};

// One-period flow phi(t;x,u) together with its sensitivities on the grid
// t_j = j h / M.  Second-order blocks are stored per state component i:
//   phi_ux[j][i] : (m x n)  d^2 phi_i / du dx     at t_j
//   phi_uu[j][i] : (m x m)  d^2 phi_i / du^2
//   phi_xx[j][i] : (n x n)  d^2 phi_i / dx^2      (only when want_fxx)
struct FlowResult {
  FlowRequest request;
  std::vector<double> t;                   // M+1 grid times
  std::vector<Vec> phi;                    // states
  std::vector<Mat> phi_x;                  // n x n
  std::vector<Mat> phi_u;                  // n x m
  std::vector<std::vector<Mat>> phi_ux;
  std::vector<std::vector<Mat>> phi_uu;
  std::vector<std::vector<Mat>> phi_xx;

  int grid_size() const { return request.M + 1; }
  bool has_xx() const { return !phi_xx.empty(); }

  const Vec& phi_end() const { return phi.back(); }
  const Mat& phi_x_end() const { return phi_x.back(); }
  const Mat& phi_u_end() const { return phi_u.back(); }
  const std::vector<Mat>& phi_ux_end() const { return phi_ux.back(); }
  const std::vector<Mat>& phi_uu_end() const { return phi_uu.back(); }
  const std::vector<Mat>& phi_xx_end() const { return phi_xx.back(); }
};

// Endpoint slice of the flow: the discretized plant map and its derivatives.
struct FlowEndpoint {
  Vec phi;
  Mat phi_x;
  Mat phi_u;
  std::vector<Mat> phi_ux;
  std::vector<Mat> phi_uu;
  std::vector<Mat> phi_xx;
};

// Classical fourth-order Runge-Kutta applied jointly to the state equation
// and the first/second-order variational equations, with all quantities
// stored at every grid point.  Throws DivergenceError when any component
// exceeds 1e12 in magnitude.
FlowResult integrate_flow(const PlantModel& plant, const FlowRequest& req);

FlowEndpoint flow_endpoint(const PlantModel& plant, const Vec& x, const Vec& u,
                           double h, int M, int order, bool want_fxx = false);

}  // namespace sdc

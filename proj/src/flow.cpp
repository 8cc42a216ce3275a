#include "sdc/flow.hpp"

#include <cmath>
#include <string>

namespace sdc {

namespace {

constexpr double kDivergenceBound = 1e12;

// Stacked integration state: phi and whichever sensitivity blocks the
// request asked for, advanced together so all RK4 stage evaluations see a
// consistent phi.
struct Stacked {
  Vec x;
  Mat Fx, Fu;                 // d phi/dx, d phi/du
  std::vector<Mat> ux, uu, xx;  // per-component second-order blocks

  Stacked scaled_add(const Stacked& d, double a) const {
    Stacked out;
    out.x = x + a * d.x;
    if (Fx.size()) {
      out.Fx = Fx + a * d.Fx;
      out.Fu = Fu + a * d.Fu;
    }
    auto comb = [a](const std::vector<Mat>& base, const std::vector<Mat>& delta) {
      std::vector<Mat> r(base.size());
      for (size_t i = 0; i < base.size(); ++i) r[i] = base[i] + a * delta[i];
      return r;
    };
    if (!ux.empty()) {
      out.ux = comb(ux, d.ux);
      out.uu = comb(uu, d.uu);
    }
    if (!xx.empty()) out.xx = comb(xx, d.xx);
    return out;
  }

  double max_abs() const {
    double v = x.lpNorm<Eigen::Infinity>();
    if (Fx.size()) {
      v = std::max(v, Fx.lpNorm<Eigen::Infinity>());
      v = std::max(v, Fu.lpNorm<Eigen::Infinity>());
    }
    for (const auto* blocks : {&ux, &uu, &xx})
      for (const Mat& b : *blocks) v = std::max(v, b.lpNorm<Eigen::Infinity>());
    return v;
  }

  bool finite() const {
    if (!x.allFinite()) return false;
    if (Fx.size() && (!Fx.allFinite() || !Fu.allFinite())) return false;
    for (const auto* blocks : {&ux, &uu, &xx})
      for (const Mat& b : *blocks)
        if (!b.allFinite()) return false;
    return true;
  }
};

Stacked derivative(const PlantModel& plant, const Stacked& s, const Vec& u,
                   int order, bool want_xx) {
  const int n = plant.n, m = plant.m;
  Stacked d;
  d.x = plant.f(s.x, u);
  if (order >= 1) {
    const Mat A = plant.f_x(s.x, u);
    d.Fx = A * s.Fx;
    d.Fu = A * s.Fu + plant.f_u(s.x, u);
    if (order >= 2) {
      const std::vector<Mat> fxx = plant.f_xx(s.x, u);
      const std::vector<Mat> fxu = plant.f_xu(s.x, u);
      const std::vector<Mat> fuu = plant.f_uu(s.x, u);
      d.ux.assign(n, Mat());
      d.uu.assign(n, Mat());
      if (want_xx) d.xx.assign(n, Mat());
      for (int i = 0; i < n; ++i) {
        Mat dux = s.Fu.transpose() * fxx[i] * s.Fx + fxu[i].transpose() * s.Fx;
        Mat duu = s.Fu.transpose() * fxx[i] * s.Fu +
                  fxu[i].transpose() * s.Fu + s.Fu.transpose() * fxu[i] +
                  fuu[i];
        Mat dxx;
        if (want_xx) dxx = s.Fx.transpose() * fxx[i] * s.Fx;
        for (int r = 0; r < n; ++r) {
          const double a = A(i, r);
          if (a == 0.0) continue;
          dux += a * s.ux[r];
          duu += a * s.uu[r];
          if (want_xx) dxx += a * s.xx[r];
        }
        d.ux[i] = std::move(dux);
        d.uu[i] = std::move(duu);
        if (want_xx) d.xx[i] = std::move(dxx);
      }
    }
  }
  (void)m;
  return d;
}

void validate(const PlantModel& plant, const FlowRequest& req) {
  if (req.x0.size() != plant.n || req.u0.size() != plant.m)
    throw std::invalid_argument("flow request dimensions do not match plant");
  if (!(req.h > 0.0)) throw std::invalid_argument("sampling period must be positive");
  if (req.M < 2 || req.M % 2 != 0)
    throw std::invalid_argument("grid steps M must be even and >= 2");
  if (req.order < 0 || req.order > 2)
    throw std::invalid_argument("sensitivity order must be 0, 1 or 2");
  if (req.want_fxx && req.order < 2)
    throw std::invalid_argument("phi_xx blocks require order 2");
}

}  // namespace

FlowResult integrate_flow(const PlantModel& plant, const FlowRequest& req) {
  validate(plant, req);
  const int n = plant.n, m = plant.m;
  const int M = req.M;
  const double dt = req.h / M;

  Stacked s;
  s.x = req.x0;
  if (req.order >= 1) {
    s.Fx = Mat::Identity(n, n);
    s.Fu = Mat::Zero(n, m);
  }
  if (req.order >= 2) {
    s.ux.assign(n, Mat::Zero(m, n));
    s.uu.assign(n, Mat::Zero(m, m));
    if (req.want_fxx) s.xx.assign(n, Mat::Zero(n, n));
  }

  FlowResult out;
  out.request = req;
  out.t.resize(M + 1);
  out.phi.resize(M + 1);
  if (req.order >= 1) {
    out.phi_x.resize(M + 1);
    out.phi_u.resize(M + 1);
  }
  if (req.order >= 2) {
    out.phi_ux.resize(M + 1);
    out.phi_uu.resize(M + 1);
    if (req.want_fxx) out.phi_xx.resize(M + 1);
  }

  auto store = [&](int j, const Stacked& st) {
    out.t[j] = j * dt;
    out.phi[j] = st.x;
    if (req.order >= 1) {
      out.phi_x[j] = st.Fx;
      out.phi_u[j] = st.Fu;
    }
    if (req.order >= 2) {
      out.phi_ux[j] = st.ux;
      out.phi_uu[j] = st.uu;
      if (req.want_fxx) out.phi_xx[j] = st.xx;
    }
  };
  store(0, s);

  for (int j = 0; j < M; ++j) {
    const Stacked k1 = derivative(plant, s, req.u0, req.order, req.want_fxx);
    const Stacked k2 = derivative(plant, s.scaled_add(k1, dt / 2.0), req.u0,
                                  req.order, req.want_fxx);
    const Stacked k3 = derivative(plant, s.scaled_add(k2, dt / 2.0), req.u0,
                                  req.order, req.want_fxx);
    const Stacked k4 =
        derivative(plant, s.scaled_add(k3, dt), req.u0, req.order, req.want_fxx);
    // s + dt/6 (k1 + 2 k2 + 2 k3 + k4)
    s = s.scaled_add(k1, dt / 6.0)
            .scaled_add(k2, dt / 3.0)
            .scaled_add(k3, dt / 3.0)
            .scaled_add(k4, dt / 6.0);
    if (!s.finite() || s.max_abs() > kDivergenceBound)
      throw DivergenceError("flow integration diverged at grid index " +
                            std::to_string(j + 1) + " (t = " +
                            std::to_string((j + 1) * dt) + ")");
    store(j + 1, s);
  }
  return out;
}

FlowEndpoint flow_endpoint(const PlantModel& plant, const Vec& x, const Vec& u,
                           double h, int M, int order, bool want_fxx) {
  FlowRequest req;
  req.x0 = x;
  req.u0 = u;
  req.h = h;
  req.M = M;
  req.order = order;
  req.want_fxx = want_fxx;
  FlowResult full = integrate_flow(plant, req);
  FlowEndpoint end;
  end.phi = full.phi.back();
  if (order >= 1) {
    end.phi_x = full.phi_x.back();
    end.phi_u = full.phi_u.back();
  }
  if (order >= 2) {
    end.phi_ux = full.phi_ux.back();
    end.phi_uu = full.phi_uu.back();
    if (want_fxx) end.phi_xx = full.phi_xx.back();
  }
  return end;
}

}  // namespace sdc

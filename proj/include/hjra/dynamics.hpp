#pragma once

#include <array>
#include <cmath>
#include <span>
#include <string>

#include "hjra/geometry.hpp"
#include "hjra/grid.hpp"

namespace hjra {

// Joint 9D state used by the simulator; never gridded.
struct JointState9 {
  double xd = 0, yd = 0, zd = 0;     // defender position (m)
  double vxd = 0, vyd = 0, vzd = 0;  // defender velocity (m/s)
  double xa = 0, ya = 0, za = 0;     // attacker position (m)
};

// Sub-system states, in grid axis order.
using HorizontalState6 = std::array<double, 6>;  // (x_D, y_D, v_x, v_y, x_A, y_A)
using VerticalState3 = std::array<double, 3>;    // (z_D, v_z_D, z_A)
using RelVertState2 = std::array<double, 2>;     // (z_D - z_A, v_z_D)
using RelHorizState4 = std::array<double, 4>;    // (x_D-x_A, y_D-y_A, v_x, v_y)

HorizontalState6 project_horizontal(const JointState9& x);
VerticalState3 project_vertical(const JointState9& x);
RelVertState2 project_rel_vertical(const JointState9& x);
RelHorizState4 project_rel_horizontal(const JointState9& x);
JointState9 assemble_joint(const HorizontalState6& h, const VerticalState3& z);

// Velocity command for one sub-game: scalar (dim 1) or planar pair (dim 2).
struct Control {
  std::array<double, 2> u{0.0, 0.0};
  int dim = 0;
};

enum class Player { Defender, Attacker };

enum class ModelId {
  HorizontalGame6D,  // defender maximizes, attacker minimizes
  VerticalGame3D,    // defender minimizes, attacker maximizes
  RelVertical2D,     // defender minimizes, attacker maximizes
  RelHorizontal4D,   // defender minimizes, attacker maximizes
  AttackerReach2D    // attacker minimizes (no defender)
};

const char* model_name(ModelId id);

// A sub-system's flow, analytic optimal Hamiltonian, costate-to-control maps,
// and Lax-Friedrichs dissipation bounds. The min/max role of each player is
// fixed per model (the sub-games flip optimization directions); all sign
// handling lives here.
struct DynamicsModel {
  ModelId id;
  double kx = 0.7, ky = 0.7, kz = 1.5;
  double uhd = 6.0, uha = 3.0, uzd = 4.0, uza = 2.0;

  static DynamicsModel from_scenario(ModelId id, const Scenario& s);

  int state_dim() const;
  int control_dim(Player p) const;  // 0 when the player has no input
  double control_bound(Player p) const;

  // +1 when the player maximizes the Hamiltonian, -1 when it minimizes,
  // 0 when it has no control in this model.
  int role_sign(Player p) const;

  void flow(std::span<const double> state, const Control& u_d,
            const Control& u_a, std::span<double> out) const;

  // Closed-form optimum of costate . flow over both admissible control sets.
  // Only velocity components of `state` enter (positional homogeneity).
  double hamiltonian(std::span<const double> state,
                     std::span<const double> costate) const;

  // Extremizing control for one player given a costate; zero costate
  // coefficient yields the zero command.
  Control optimal_control(std::span<const double> costate, Player p) const;

  // Per-axis global bounds of |dH/dp_i| over the grid box and admissible
  // controls; the Lax-Friedrichs dissipation coefficients.
  std::vector<double> dissipation_bounds(const GridSpec& grid) const;
};

namespace detail {

// Per-term first-order upwinding for the solver sweeps. Linear advection
// terms a*p_i pick the one-sided derivative the characteristic points at;
// the +-c*|p| and +-c*||.||_2 player terms use the Godunov/Osher-Sethian
// one-sided selections. Exact on smooth profiles (D- = D+), monotone under
// the dissipation-bound CFL step.
inline double up_linear(double a, double dm, double dp) {
  return a >= 0.0 ? a * dp : a * dm;
}
// |p| selection for a coefficient that maximizes (+c|p|): grow both ways.
inline double mag_max(double dm, double dp) {
  return std::max(std::max(dp, 0.0), std::max(-dm, 0.0));
}
// |p| selection for a minimizing coefficient (-c|p|).
inline double mag_min(double dm, double dp) {
  return std::max(std::max(dm, 0.0), std::max(-dp, 0.0));
}
inline double norm2_max(double wa, double dma, double dpa, double wb,
                        double dmb, double dpb) {
  const double qa = std::max(dpa, 0.0), ra = std::max(-dma, 0.0);
  const double qb = std::max(dpb, 0.0), rb = std::max(-dmb, 0.0);
  return std::sqrt(wa * wa * (qa * qa + ra * ra) +
                   wb * wb * (qb * qb + rb * rb));
}
inline double norm2_min(double wa, double dma, double dpa, double wb,
                        double dmb, double dpb) {
  const double qa = std::max(dma, 0.0), ra = std::max(-dpa, 0.0);
  const double qb = std::max(dmb, 0.0), rb = std::max(-dpb, 0.0);
  return std::sqrt(wa * wa * (qa * qa + ra * ra) +
                   wb * wb * (qb * qb + rb * rb));
}

// Exact per-axis Godunov value of G(p) = a*p + c*|p| over the one-sided
// slope interval, for the marching form W <- W + dt*H. Rarefaction
// (D- <= D+) takes the max over the interval, shock the min; G is piecewise
// linear so the extremes sit at the interval ends or the kink at zero.
inline double godunov_1d(double a, double c, double dm, double dp) {
  const double gm = a * dm + c * std::abs(dm);
  const double gp = a * dp + c * std::abs(dp);
  if (dm <= dp) {
    double best = std::max(gm, gp);
    if (dm <= 0.0 && 0.0 <= dp && best < 0.0) best = 0.0;
    return best;
  }
  double best = std::min(gm, gp);
  if (dp <= 0.0 && 0.0 <= dm && best > 0.0) best = 0.0;
  return best;
}

// Upwind numerical Hamiltonian; dm/dp are the per-axis one-sided derivative
// arrays at the node, `coords` the node coordinates in grid axis order.
inline double numerical_hamiltonian(ModelId id, const DynamicsModel& m,
                                    const double* coords, const double* dm,
                                    const double* dp) {
  switch (id) {
    case ModelId::HorizontalGame6D: {
      const double vx = coords[2], vy = coords[3];
      return up_linear(vx, dm[0], dp[0]) + up_linear(vy, dm[1], dp[1]) +
             up_linear(-m.kx * vx, dm[2], dp[2]) +
             up_linear(-m.ky * vy, dm[3], dp[3]) +
             m.uhd * norm2_max(m.kx, dm[2], dp[2], m.ky, dm[3], dp[3]) -
             m.uha * norm2_min(1.0, dm[4], dp[4], 1.0, dm[5], dp[5]);
    }
    case ModelId::VerticalGame3D: {
      const double vz = coords[1];
      return up_linear(vz, dm[0], dp[0]) +
             godunov_1d(-m.kz * vz, -m.kz * m.uzd, dm[1], dp[1]) +
             godunov_1d(0.0, m.uza, dm[2], dp[2]);
    }
    case ModelId::RelVertical2D: {
      const double vz = coords[1];
      return godunov_1d(vz, m.uza, dm[0], dp[0]) +
             godunov_1d(-m.kz * vz, -m.kz * m.uzd, dm[1], dp[1]);
    }
    case ModelId::RelHorizontal4D: {
      const double vx = coords[2], vy = coords[3];
      return up_linear(vx, dm[0], dp[0]) + up_linear(vy, dm[1], dp[1]) +
             m.uha * norm2_max(1.0, dm[0], dp[0], 1.0, dm[1], dp[1]) +
             up_linear(-m.kx * vx, dm[2], dp[2]) +
             up_linear(-m.ky * vy, dm[3], dp[3]) -
             m.uhd * norm2_min(m.kx, dm[2], dp[2], m.ky, dm[3], dp[3]);
    }
    case ModelId::AttackerReach2D:
      return -m.uha * norm2_min(1.0, dm[0], dp[0], 1.0, dm[1], dp[1]);
  }
  return 0.0;
}

// Smooth closed-form Hamiltonian shared by the public API and the feedback
// controllers. Must agree with numerical_hamiltonian when D- = D+ (asserted
// by tests).
inline double hamiltonian_inline(ModelId id, const DynamicsModel& m,
                                 const double* coords, const double* p) {
  switch (id) {
    case ModelId::HorizontalGame6D: {
      const double vx = coords[2], vy = coords[3];
      const double ax = m.kx * p[2], ay = m.ky * p[3];
      return p[0] * vx + p[1] * vy - ax * vx - ay * vy +
             m.uhd * std::sqrt(ax * ax + ay * ay) -
             m.uha * std::sqrt(p[4] * p[4] + p[5] * p[5]);
    }
    case ModelId::VerticalGame3D: {
      const double vz = coords[1];
      return p[0] * vz - m.kz * p[1] * vz - m.kz * m.uzd * std::abs(p[1]) +
             m.uza * std::abs(p[2]);
    }
    case ModelId::RelVertical2D: {
      const double vz = coords[1];
      return p[0] * vz - m.kz * p[1] * vz - m.kz * m.uzd * std::abs(p[1]) +
             m.uza * std::abs(p[0]);
    }
    case ModelId::RelHorizontal4D: {
      const double vx = coords[2], vy = coords[3];
      const double ax = m.kx * p[2], ay = m.ky * p[3];
      return p[0] * vx + p[1] * vy - ax * vx - ay * vy -
             m.uhd * std::sqrt(ax * ax + ay * ay) +
             m.uha * std::sqrt(p[0] * p[0] + p[1] * p[1]);
    }
    case ModelId::AttackerReach2D:
      return -m.uha * std::sqrt(p[0] * p[0] + p[1] * p[1]);
  }
  return 0.0;
}

}  // namespace detail

}  // namespace hjra

#include "hjra/dynamics.hpp"

#include <stdexcept>

namespace hjra {

HorizontalState6 project_horizontal(const JointState9& x) {
  return {x.xd, x.yd, x.vxd, x.vyd, x.xa, x.ya};
}

VerticalState3 project_vertical(const JointState9& x) {
  return {x.zd, x.vzd, x.za};
}

RelVertState2 project_rel_vertical(const JointState9& x) {
  return {x.zd - x.za, x.vzd};
}

RelHorizState4 project_rel_horizontal(const JointState9& x) {
  return {x.xd - x.xa, x.yd - x.ya, x.vxd, x.vyd};
}

JointState9 assemble_joint(const HorizontalState6& h, const VerticalState3& z) {
  JointState9 x;
  x.xd = h[0];
  x.yd = h[1];
  x.vxd = h[2];
  x.vyd = h[3];
  x.xa = h[4];
  x.ya = h[5];
  x.zd = z[0];
  x.vzd = z[1];
  x.za = z[2];
  return x;
}

const char* model_name(ModelId id) {
  switch (id) {
    case ModelId::HorizontalGame6D: return "horizontal_game_6d";
    case ModelId::VerticalGame3D: return "vertical_game_3d";
    case ModelId::RelVertical2D: return "rel_vertical_2d";
    case ModelId::RelHorizontal4D: return "rel_horizontal_4d";
    case ModelId::AttackerReach2D: return "attacker_reach_2d";
  }
  return "?";
}

DynamicsModel DynamicsModel::from_scenario(ModelId id, const Scenario& s) {
  DynamicsModel m;
  m.id = id;
  m.kx = s.k_x;
  m.ky = s.k_y;
  m.kz = s.k_z;
  m.uhd = s.u_h_d;
  m.uha = s.u_h_a;
  m.uzd = s.u_z_d;
  m.uza = s.u_z_a;
  return m;
}

int DynamicsModel::state_dim() const {
  switch (id) {
    case ModelId::HorizontalGame6D: return 6;
    case ModelId::VerticalGame3D: return 3;
    case ModelId::RelVertical2D: return 2;
    case ModelId::RelHorizontal4D: return 4;
    case ModelId::AttackerReach2D: return 2;
  }
  return 0;
}

int DynamicsModel::control_dim(Player p) const {
  switch (id) {
    case ModelId::HorizontalGame6D:
    case ModelId::RelHorizontal4D:
      return 2;
    case ModelId::VerticalGame3D:
    case ModelId::RelVertical2D:
      return 1;
    case ModelId::AttackerReach2D:
      return p == Player::Attacker ? 2 : 0;
  }
  return 0;
}

double DynamicsModel::control_bound(Player p) const {
  const bool horizontal = id == ModelId::HorizontalGame6D ||
                          id == ModelId::RelHorizontal4D ||
                          id == ModelId::AttackerReach2D;
  if (p == Player::Defender) return horizontal ? uhd : uzd;
  return horizontal ? uha : uza;
}

int DynamicsModel::role_sign(Player p) const {
  switch (id) {
    case ModelId::HorizontalGame6D:
      return p == Player::Defender ? +1 : -1;
    case ModelId::VerticalGame3D:
    case ModelId::RelVertical2D:
    case ModelId::RelHorizontal4D:
      return p == Player::Defender ? -1 : +1;
    case ModelId::AttackerReach2D:
      return p == Player::Attacker ? -1 : 0;
  }
  return 0;
}

namespace {

void check_bound(const Control& u, int dim, double bound, const char* who) {
  if (u.dim != dim) throw std::invalid_argument(std::string(who) + ": control arity");
  const double norm = dim == 2 ? std::hypot(u.u[0], u.u[1]) : std::abs(u.u[0]);
  if (norm > bound + 1e-9)
    throw std::invalid_argument(std::string(who) + ": control bound violated");
}

}  // namespace

void DynamicsModel::flow(std::span<const double> state, const Control& u_d,
                         const Control& u_a, std::span<double> out) const {
  switch (id) {
    case ModelId::HorizontalGame6D:
      check_bound(u_d, 2, uhd, "defender");
      check_bound(u_a, 2, uha, "attacker");
      out[0] = state[2];
      out[1] = state[3];
      out[2] = kx * (u_d.u[0] - state[2]);
      out[3] = ky * (u_d.u[1] - state[3]);
      out[4] = u_a.u[0];
      out[5] = u_a.u[1];
      return;
    case ModelId::VerticalGame3D:
      check_bound(u_d, 1, uzd, "defender");
      check_bound(u_a, 1, uza, "attacker");
      out[0] = state[1];
      out[1] = kz * (u_d.u[0] - state[1]);
      out[2] = u_a.u[0];
      return;
    case ModelId::RelVertical2D:
      check_bound(u_d, 1, uzd, "defender");
      check_bound(u_a, 1, uza, "attacker");
      out[0] = state[1] - u_a.u[0];
      out[1] = kz * (u_d.u[0] - state[1]);
      return;
    case ModelId::RelHorizontal4D:
      check_bound(u_d, 2, uhd, "defender");
      check_bound(u_a, 2, uha, "attacker");
      out[0] = state[2] - u_a.u[0];
      out[1] = state[3] - u_a.u[1];
      out[2] = kx * (u_d.u[0] - state[2]);
      out[3] = ky * (u_d.u[1] - state[3]);
      return;
    case ModelId::AttackerReach2D:
      check_bound(u_a, 2, uha, "attacker");
      out[0] = u_a.u[0];
      out[1] = u_a.u[1];
      return;
  }
}

double DynamicsModel::hamiltonian(std::span<const double> state,
                                  std::span<const double> costate) const {
  if (static_cast<int>(costate.size()) != state_dim())
    throw std::invalid_argument("hamiltonian: costate arity mismatch");
  return detail::hamiltonian_inline(id, *this, state.data(), costate.data());
}

namespace {

Control disk_extremum(double c0, double c1, double bound, int sign) {
  const double norm = std::hypot(c0, c1);
  Control u;
  u.dim = 2;
  if (norm == 0.0 || sign == 0) return u;
  const double scale = sign * bound / norm;
  u.u[0] = scale * c0;
  u.u[1] = scale * c1;
  return u;
}

Control interval_extremum(double c, double bound, int sign) {
  Control u;
  u.dim = 1;
  if (c == 0.0 || sign == 0) return u;
  u.u[0] = (sign > 0) == (c > 0) ? bound : -bound;
  return u;
}

}  // namespace

Control DynamicsModel::optimal_control(std::span<const double> costate,
                                       Player p) const {
  if (static_cast<int>(costate.size()) != state_dim())
    throw std::invalid_argument("optimal_control: costate arity mismatch");
  const int sign = role_sign(p);
  const double bound = control_bound(p);
  // c is the coefficient of this player's input in costate . flow.
  switch (id) {
    case ModelId::HorizontalGame6D:
      if (p == Player::Defender)
        return disk_extremum(kx * costate[2], ky * costate[3], bound, sign);
      return disk_extremum(costate[4], costate[5], bound, sign);
    case ModelId::VerticalGame3D:
      if (p == Player::Defender)
        return interval_extremum(kz * costate[1], bound, sign);
      return interval_extremum(costate[2], bound, sign);
    case ModelId::RelVertical2D:
      if (p == Player::Defender)
        return interval_extremum(kz * costate[1], bound, sign);
      return interval_extremum(-costate[0], bound, sign);
    case ModelId::RelHorizontal4D:
      if (p == Player::Defender)
        return disk_extremum(kx * costate[2], ky * costate[3], bound, sign);
      return disk_extremum(-costate[0], -costate[1], bound, sign);
    case ModelId::AttackerReach2D:
      if (p == Player::Attacker)
        return disk_extremum(costate[0], costate[1], bound, sign);
      return Control{{0.0, 0.0}, 0};
  }
  return Control{};
}

std::vector<double> DynamicsModel::dissipation_bounds(const GridSpec& grid) const {
  if (grid.ndim() != state_dim())
    throw std::invalid_argument("dissipation_bounds: grid arity mismatch");
  auto maxabs = [&](int axis) {
    return std::max(std::abs(grid.axis(axis).lo), std::abs(grid.axis(axis).hi));
  };
  switch (id) {
    case ModelId::HorizontalGame6D: {
      const double vx = maxabs(2), vy = maxabs(3);
      return {vx, vy, kx * (uhd + vx), ky * (uhd + vy), uha, uha};
    }
    case ModelId::VerticalGame3D: {
      const double vz = maxabs(1);
      return {vz, kz * (uzd + vz), uza};
    }
    case ModelId::RelVertical2D: {
      const double vz = maxabs(1);
      return {vz + uza, kz * (uzd + vz)};
    }
    case ModelId::RelHorizontal4D: {
      const double vx = maxabs(2), vy = maxabs(3);
      return {vx + uha, vy + uha, kx * (uhd + vx), ky * (uhd + vy)};
    }
    case ModelId::AttackerReach2D:
      return {uha, uha};
  }
  return {};
}

}  // namespace hjra

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hjra/grid.hpp"

namespace hjra {

// Signed implicit set: eval < 0 strictly inside, > 0 outside, 0 on the
// boundary. Primitives evaluate the exact signed distance; union (min),
// intersection (max) and complement (negation) compositions keep the sign
// exact but not the interior magnitude.
class ImplicitSet {
 public:
  static ImplicitSet halfspace(std::vector<double> normal, double offset);
  static ImplicitSet box(std::vector<double> lo, std::vector<double> hi);
  static ImplicitSet circle(double cx, double cy, double r);
  static ImplicitSet sphere(double cx, double cy, double cz, double r);
  static ImplicitSet cylinder(double cx, double cy, double r);  // vertical, z-free

  static ImplicitSet set_union(std::vector<ImplicitSet> parts);
  static ImplicitSet set_intersection(std::vector<ImplicitSet> parts);
  static ImplicitSet complement(ImplicitSet inner);

  double eval(std::span<const double> point) const;
  int arity() const;

  static ImplicitSet from_json(const std::string& text);
  std::string to_json() const;

  struct Node;  // opaque expression-tree node
  ImplicitSet() = default;
  explicit ImplicitSet(std::shared_ptr<const Node> root)
      : root_(std::move(root)) {}

 private:
  std::shared_ptr<const Node> root_;
};

double eval_signed(const ImplicitSet& set, std::span<const double> point);

// Game geometry plus agent parameters.
struct DomainBox {
  std::vector<int> counts;
  std::vector<double> lo;
  std::vector<double> hi;
  GridSpec to_grid() const { return GridSpec(counts, lo, hi); }
};

struct Scenario {
  ImplicitSet target;                  // horizontal (x, y) coordinates only
  std::vector<ImplicitSet> obstacles;  // horizontal coordinates only
  double d_h = 3.0;  // horizontal capture radius (m)
  double d_z = 1.0;  // vertical capture radius (m)
  double k_x = 0.7, k_y = 0.7, k_z = 1.5;     // velocity-lag gains (1/s)
  double u_h_d = 6.0, u_h_a = 3.0;            // horizontal speed bounds (m/s)
  double u_z_d = 4.0, u_z_a = 2.0;            // vertical speed bounds (m/s)
  double obstacle_penalty = 1000.0;           // K, dominates tracking cost
  std::map<std::string, DomainBox> domains;   // per-solve grid boxes

  void validate() const;

  double target_sdf(double x, double y) const;
  double obstacle_sdf(double x, double y) const;  // +inf when no obstacles

  static Scenario from_json(const std::string& text);
  static Scenario load(const std::string& path);
  std::string to_json() const;
  void save(const std::string& path) const;

  // FNV-1a over the canonical JSON serialization; 16 hex chars.
  std::string hash() const;
};

enum class CaptureVariant { Classic, InvariantSet };

// Reach/avoid cost fields for the 6D horizontal game. grid6 axes are
// (x_D, y_D, v_x_D, v_y_D, x_A, y_A). The invariant-set variant replaces the
// plain distance capture margin with V_h(x_rel, y_rel, v_x_D, v_y_D) - d_h,
// interpolated from tracking_value (4D over (x_rel, y_rel, v_x_D, v_y_D)).
struct HorizontalCosts {
  ScalarField l;
  ScalarField g;
};
HorizontalCosts build_horizontal_costs(const Scenario& scenario,
                                       const GridSpec& grid6,
                                       CaptureVariant variant,
                                       const ScalarField* tracking_value);

// Target cost for the 3D vertical game; grid3 axes are (z_D, v_z_D, z_A).
ScalarField build_vertical_cost(const Scenario& scenario, const GridSpec& grid3,
                                CaptureVariant variant,
                                const ScalarField* tracking_value);

// Tracking cost for the 4D relative horizontal system; grid4 axes are
// (x_rel, y_rel, v_x_D, v_y_D). Without an anchor the solve is obstacle-free;
// with one, nodes whose defender position (anchor + rel) falls inside an
// obstacle pay the large penalty K.
ScalarField build_tracking_cost_h(
    const Scenario& scenario, const GridSpec& grid4,
    std::optional<std::array<double, 2>> attacker_anchor = std::nullopt);

// Tracking cost |z_rel| for the 2D relative vertical system; grid2 axes are
// (z_rel, v_z_D).
ScalarField build_tracking_cost_z(const GridSpec& grid2);

// Reach/avoid costs for the attacker-only 2D goal solve over (x_A, y_A):
// l = S(p, target), g = -S(p, obstacles) (empty obstacle set gives a large
// negative g so the avoid clamp never binds).
struct AttackerReachCosts {
  ScalarField l;
  ScalarField g;
  bool has_obstacles = false;
};
AttackerReachCosts build_attacker_reach_costs(const Scenario& scenario,
                                              const GridSpec& grid2);

}  // namespace hjra

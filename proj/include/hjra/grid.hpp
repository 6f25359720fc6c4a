#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hjra {

constexpr int kMaxDim = 6;

struct Axis {
  int count = 0;     // number of nodes, >= 3
  double lo = 0.0;   // coordinate of node 0
  double hi = 0.0;   // coordinate of node count-1
  double spacing = 0.0;  // (hi - lo) / (count - 1)
};

// Rectilinear grid geometry. Nodes are flattened row-major with the LAST
// axis varying fastest: idx = ((i0*n1 + i1)*n2 + i2)*...
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(std::vector<int> counts, std::vector<double> lo,
           std::vector<double> hi);

  int ndim() const { return static_cast<int>(axes_.size()); }
  std::size_t numel() const;
  const Axis& axis(int a) const { return axes_[a]; }
  const std::vector<Axis>& axes() const { return axes_; }
  std::size_t stride(int a) const { return strides_[a]; }

  double coord(int a, int i) const { return axes_[a].lo + i * axes_[a].spacing; }
  void node_coords(std::span<const int> idx, std::span<double> out) const;

  std::size_t flatten(std::span<const int> idx) const;
  void unflatten(std::size_t flat, std::span<int> idx) const;

  // Nearest node index along an axis, clamped into range.
  int nearest(int a, double x) const;

  bool operator==(const GridSpec& o) const;

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
};

// Node-sampled scalar function on a GridSpec. Values are owned flat storage,
// immutable during shared reads (sweeps write into a fresh buffer).
struct ScalarField {
  GridSpec spec;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(GridSpec s, double fill = 0.0)
      : spec(std::move(s)), values(spec.numel(), fill) {}

  double& at(std::span<const int> idx) { return values[spec.flatten(idx)]; }
  double at(std::span<const int> idx) const { return values[spec.flatten(idx)]; }
  bool all_finite() const;
};

// Fills a field by evaluating fn at every node (parallel over nodes).
ScalarField sample_field(const GridSpec& spec,
                         const std::function<double(std::span<const double>)>& fn);

// First-order one-sided differences along an axis. Boundary nodes use
// linear-extrapolation ghost values (ghost = 2*edge - next_inner), so the
// left and right derivatives coincide at domain edges.
std::pair<ScalarField, ScalarField> one_sided_derivatives(
    const ScalarField& field, int axis);

// Multilinear interpolation over the 2^ndim enclosing nodes. Points outside
// the bounding box are clamped onto it; *clamped reports when that happened.
double interpolate(const ScalarField& field, std::span<const double> point,
                   bool* clamped = nullptr);

// Multilinear interpolation that extends the boundary cells' interpolant
// linearly past the box instead of clamping (weights may leave [0,1]).
double interpolate_linear_extend(const ScalarField& field,
                                 std::span<const double> point);

// Gradient sampled off-node: central differences at nodes (one-sided at
// edges), multilinearly interpolated to the query point.
void gradient_at(const ScalarField& field, std::span<const double> point,
                 std::span<double> out, bool* clamped = nullptr);

// Central-difference gradient component at a node (one-sided at edges).
double node_gradient(const ScalarField& field, std::span<const int> idx,
                     int axis);

}  // namespace hjra

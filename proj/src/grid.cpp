#include "hjra/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "hjra/parallel.hpp"

namespace hjra {

GridSpec::GridSpec(std::vector<int> counts, std::vector<double> lo,
                   std::vector<double> hi) {
  if (counts.empty() || counts.size() != lo.size() || counts.size() != hi.size())
    throw std::invalid_argument("GridSpec: mismatched axis arrays");
  if (counts.size() > kMaxDim)
    throw std::invalid_argument("GridSpec: too many axes");
  axes_.resize(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a) {
    if (counts[a] < 3)
      throw std::invalid_argument("GridSpec: axis needs at least 3 nodes");
    if (!(hi[a] > lo[a]))
      throw std::invalid_argument("GridSpec: axis max must exceed min");
    axes_[a] = Axis{counts[a], lo[a], hi[a], (hi[a] - lo[a]) / (counts[a] - 1)};
  }
  strides_.assign(axes_.size(), 1);
  for (int a = static_cast<int>(axes_.size()) - 2; a >= 0; --a)
    strides_[a] = strides_[a + 1] * axes_[a + 1].count;
}

std::size_t GridSpec::numel() const {
  std::size_t n = 1;
  for (const auto& ax : axes_) n *= ax.count;
  return n;
}

void GridSpec::node_coords(std::span<const int> idx, std::span<double> out) const {
  for (int a = 0; a < ndim(); ++a) out[a] = coord(a, idx[a]);
}

std::size_t GridSpec::flatten(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < ndim(); ++a) {
    if (idx[a] < 0 || idx[a] >= axes_[a].count)
      throw std::out_of_range("GridSpec::flatten: index out of range");
    flat += static_cast<std::size_t>(idx[a]) * strides_[a];
  }
  return flat;
}

void GridSpec::unflatten(std::size_t flat, std::span<int> idx) const {
  for (int a = 0; a < ndim(); ++a) {
    idx[a] = static_cast<int>(flat / strides_[a]);
    flat %= strides_[a];
  }
}

int GridSpec::nearest(int a, double x) const {
  const Axis& ax = axes_[a];
  int i = static_cast<int>(std::lround((x - ax.lo) / ax.spacing));
  if (i < 0) i = 0;
  if (i >= ax.count) i = ax.count - 1;
  return i;
}

bool GridSpec::operator==(const GridSpec& o) const {
  if (ndim() != o.ndim()) return false;
  for (int a = 0; a < ndim(); ++a) {
    if (axes_[a].count != o.axes_[a].count || axes_[a].lo != o.axes_[a].lo ||
        axes_[a].hi != o.axes_[a].hi)
      return false;
  }
  return true;
}

bool ScalarField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

ScalarField sample_field(const GridSpec& spec,
                         const std::function<double(std::span<const double>)>& fn) {
  ScalarField out(spec);
  const int d = spec.ndim();
  parallel_chunks(spec.numel(), [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDim> idx{};
    std::array<double, kMaxDim> x{};
    spec.unflatten(begin, std::span<int>(idx.data(), d));
    for (std::size_t n = begin; n < end; ++n) {
      for (int a = 0; a < d; ++a) x[a] = spec.coord(a, idx[a]);
      out.values[n] = fn(std::span<const double>(x.data(), d));
      for (int a = d - 1; a >= 0; --a) {
        if (++idx[a] < spec.axis(a).count) break;
        idx[a] = 0;
      }
    }
  });
  return out;
}

std::pair<ScalarField, ScalarField> one_sided_derivatives(
    const ScalarField& field, int axis) {
  const GridSpec& spec = field.spec;
  if (axis < 0 || axis >= spec.ndim())
    throw std::out_of_range("one_sided_derivatives: axis out of range");
  ScalarField left(spec), right(spec);
  const std::size_t s = spec.stride(axis);
  const int count = spec.axis(axis).count;
  const double inv_h = 1.0 / spec.axis(axis).spacing;
  const int d = spec.ndim();

  parallel_chunks(spec.numel(), [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDim> idx{};
    spec.unflatten(begin, std::span<int>(idx.data(), d));
    for (std::size_t n = begin; n < end; ++n) {
      const double c = field.values[n];
      const int i = idx[axis];
      // ghost = 2*edge - next_inner keeps affine slopes through the boundary
      const double lv = (i > 0) ? field.values[n - s]
                                : 2.0 * c - field.values[n + s];
      const double rv = (i < count - 1) ? field.values[n + s]
                                        : 2.0 * c - field.values[n - s];
      left.values[n] = (c - lv) * inv_h;
      right.values[n] = (rv - c) * inv_h;
      for (int a = d - 1; a >= 0; --a) {
        if (++idx[a] < spec.axis(a).count) break;
        idx[a] = 0;
      }
    }
  });
  return {std::move(left), std::move(right)};
}

namespace {

struct CellLocator {
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> w{};  // weight of the upper node per axis
  bool clamped = false;
};

CellLocator locate(const GridSpec& spec, std::span<const double> point,
                   bool clamp) {
  if (static_cast<int>(point.size()) != spec.ndim())
    throw std::invalid_argument("interpolate: point arity mismatch");
  CellLocator loc;
  for (int a = 0; a < spec.ndim(); ++a) {
    if (!std::isfinite(point[a]))
      throw std::invalid_argument("interpolate: non-finite point component");
    const Axis& ax = spec.axis(a);
    double u = (point[a] - ax.lo) / ax.spacing;
    if (clamp) {
      if (u < 0.0) {
        u = 0.0;
        loc.clamped = true;
      } else if (u > ax.count - 1) {
        u = ax.count - 1;
        loc.clamped = true;
      }
    }
    int i = static_cast<int>(u);
    if (i < 0) i = 0;
    if (i > ax.count - 2) i = ax.count - 2;
    loc.base[a] = i;
    loc.w[a] = u - i;  // may leave [0,1] when not clamping
  }
  return loc;
}

double interpolate_cell(const ScalarField& field, const CellLocator& loc) {
  const GridSpec& spec = field.spec;
  const int d = spec.ndim();
  std::size_t base = 0;
  for (int a = 0; a < d; ++a) base += loc.base[a] * spec.stride(a);
  double acc = 0.0;
  const unsigned corners = 1u << d;
  for (unsigned m = 0; m < corners; ++m) {
    double w = 1.0;
    std::size_t off = base;
    for (int a = 0; a < d; ++a) {
      if (m & (1u << a)) {
        w *= loc.w[a];
        off += spec.stride(a);
      } else {
        w *= 1.0 - loc.w[a];
      }
    }
    acc += w * field.values[off];
  }
  return acc;
}

}  // namespace

double interpolate(const ScalarField& field, std::span<const double> point,
                   bool* clamped) {
  CellLocator loc = locate(field.spec, point, true);
  if (clamped) *clamped = loc.clamped;
  return interpolate_cell(field, loc);
}

double interpolate_linear_extend(const ScalarField& field,
                                 std::span<const double> point) {
  return interpolate_cell(field, locate(field.spec, point, false));
}

double node_gradient(const ScalarField& field, std::span<const int> idx,
                     int axis) {
  const GridSpec& spec = field.spec;
  const std::size_t n = spec.flatten(idx);
  const std::size_t s = spec.stride(axis);
  const int i = idx[axis];
  const int count = spec.axis(axis).count;
  const double h = spec.axis(axis).spacing;
  if (i > 0 && i < count - 1)
    return (field.values[n + s] - field.values[n - s]) / (2.0 * h);
  if (i == 0) return (field.values[n + s] - field.values[n]) / h;
  return (field.values[n] - field.values[n - s]) / h;
}

void gradient_at(const ScalarField& field, std::span<const double> point,
                 std::span<double> out, bool* clamped) {
  const GridSpec& spec = field.spec;
  const int d = spec.ndim();
  CellLocator loc = locate(spec, point, true);
  if (clamped) *clamped = loc.clamped;

  for (int g = 0; g < d; ++g) out[g] = 0.0;
  const unsigned corners = 1u << d;
  std::array<int, kMaxDim> idx{};
  for (unsigned m = 0; m < corners; ++m) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      if (m & (1u << a)) {
        w *= loc.w[a];
        idx[a] = loc.base[a] + 1;
      } else {
        w *= 1.0 - loc.w[a];
        idx[a] = loc.base[a];
      }
    }
    if (w == 0.0) continue;
    for (int g = 0; g < d; ++g)
      out[g] += w * node_gradient(field, std::span<const int>(idx.data(), d), g);
  }
}

}  // namespace hjra

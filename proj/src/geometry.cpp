#include "hjra/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "hjra/parallel.hpp"

namespace hjra {

using nlohmann::json;

namespace {
constexpr double kNoAvoid = -1e9;  // finite stand-in for "no avoid set"
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

struct ImplicitSet::Node {
  enum class Kind {
    Halfspace,
    Box,
    Circle,
    Sphere,
    Cylinder,
    Union,
    Intersection,
    Complement
  };
  Kind kind;
  std::vector<double> a, b;  // normal / lo / center, hi
  double scalar = 0.0;       // offset or radius
  std::vector<std::shared_ptr<const Node>> children;
  int arity = 0;
};

using Node = ImplicitSet::Node;

namespace {

double eval_node(const Node& n, std::span<const double> p) {
  switch (n.kind) {
    case Node::Kind::Halfspace: {
      double dot = 0.0, nn = 0.0;
      for (std::size_t i = 0; i < n.a.size(); ++i) {
        dot += n.a[i] * p[i];
        nn += n.a[i] * n.a[i];
      }
      return (dot - n.scalar) / std::sqrt(nn);
    }
    case Node::Kind::Box: {
      double outside = 0.0, inside = -kInf;
      for (std::size_t i = 0; i < n.a.size(); ++i) {
        const double c = 0.5 * (n.a[i] + n.b[i]);
        const double half = 0.5 * (n.b[i] - n.a[i]);
        const double q = std::abs(p[i] - c) - half;
        if (q > 0.0) outside += q * q;
        if (q > inside) inside = q;
      }
      return std::sqrt(outside) + std::min(inside, 0.0);
    }
    case Node::Kind::Circle:
      return std::hypot(p[0] - n.a[0], p[1] - n.a[1]) - n.scalar;
    case Node::Kind::Sphere:
      return std::sqrt((p[0] - n.a[0]) * (p[0] - n.a[0]) +
                       (p[1] - n.a[1]) * (p[1] - n.a[1]) +
                       (p[2] - n.a[2]) * (p[2] - n.a[2])) -
             n.scalar;
    case Node::Kind::Cylinder:
      return std::hypot(p[0] - n.a[0], p[1] - n.a[1]) - n.scalar;
    case Node::Kind::Union: {
      double v = kInf;
      for (const auto& c : n.children) v = std::min(v, eval_node(*c, p));
      return v;
    }
    case Node::Kind::Intersection: {
      double v = -kInf;
      for (const auto& c : n.children) v = std::max(v, eval_node(*c, p));
      return v;
    }
    case Node::Kind::Complement:
      return -eval_node(*n.children[0], p);
  }
  throw std::logic_error("ImplicitSet: bad node");
}

std::shared_ptr<const Node> node_from_json(const json& j);

json node_to_json(const Node& n) {
  json j;
  switch (n.kind) {
    case Node::Kind::Halfspace:
      j["op"] = "halfspace";
      j["normal"] = n.a;
      j["offset"] = n.scalar;
      break;
    case Node::Kind::Box:
      j["op"] = "box";
      j["min"] = n.a;
      j["max"] = n.b;
      break;
    case Node::Kind::Circle:
      j["op"] = "circle";
      j["center"] = n.a;
      j["radius"] = n.scalar;
      break;
    case Node::Kind::Sphere:
      j["op"] = "sphere";
      j["center"] = n.a;
      j["radius"] = n.scalar;
      break;
    case Node::Kind::Cylinder:
      j["op"] = "cylinder";
      j["center"] = n.a;
      j["radius"] = n.scalar;
      break;
    case Node::Kind::Union:
    case Node::Kind::Intersection: {
      j["op"] = n.kind == Node::Kind::Union ? "union" : "intersection";
      json args = json::array();
      for (const auto& c : n.children) args.push_back(node_to_json(*c));
      j["args"] = args;
      break;
    }
    case Node::Kind::Complement:
      j["op"] = "complement";
      j["arg"] = node_to_json(*n.children[0]);
      break;
  }
  return j;
}

std::shared_ptr<const Node> make_prim(Node::Kind kind, std::vector<double> a,
                                      std::vector<double> b, double scalar,
                                      int arity) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  n->scalar = scalar;
  n->arity = arity;
  return n;
}

std::shared_ptr<const Node> node_from_json(const json& j) {
  const std::string op = j.at("op").get<std::string>();
  if (op == "halfspace") {
    auto normal = j.at("normal").get<std::vector<double>>();
    const int ar = static_cast<int>(normal.size());
    return make_prim(Node::Kind::Halfspace, std::move(normal), {},
                     j.at("offset").get<double>(), ar);
  }
  if (op == "box") {
    auto lo = j.at("min").get<std::vector<double>>();
    auto hi = j.at("max").get<std::vector<double>>();
    if (lo.size() != hi.size()) throw std::invalid_argument("box: min/max arity");
    const int ar = static_cast<int>(lo.size());
    return make_prim(Node::Kind::Box, std::move(lo), std::move(hi), 0.0, ar);
  }
  if (op == "circle" || op == "sphere" || op == "cylinder") {
    auto c = j.at("center").get<std::vector<double>>();
    const double r = j.at("radius").get<double>();
    if (op == "circle") {
      if (c.size() != 2) throw std::invalid_argument("circle: center arity");
      return make_prim(Node::Kind::Circle, std::move(c), {}, r, 2);
    }
    if (op == "sphere") {
      if (c.size() != 3) throw std::invalid_argument("sphere: center arity");
      return make_prim(Node::Kind::Sphere, std::move(c), {}, r, 3);
    }
    if (c.size() != 2) throw std::invalid_argument("cylinder: center arity");
    return make_prim(Node::Kind::Cylinder, std::move(c), {}, r, 3);
  }
  if (op == "union" || op == "intersection") {
    auto n = std::make_shared<Node>();
    n->kind = op == "union" ? Node::Kind::Union : Node::Kind::Intersection;
    for (const auto& cj : j.at("args")) n->children.push_back(node_from_json(cj));
    if (n->children.empty()) throw std::invalid_argument(op + ": no operands");
    n->arity = n->children[0]->arity;
    for (const auto& c : n->children)
      if (c->arity != n->arity)
        throw std::invalid_argument(op + ": operand arity mismatch");
    return n;
  }
  if (op == "complement") {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Complement;
    n->children.push_back(node_from_json(j.at("arg")));
    n->arity = n->children[0]->arity;
    return n;
  }
  throw std::invalid_argument("set-expr: unknown op " + op);
}

ImplicitSet wrap_node(std::shared_ptr<const Node> n) {
  return ImplicitSet(std::move(n));
}

}  // namespace

ImplicitSet ImplicitSet::halfspace(std::vector<double> normal, double offset) {
  const int ar = static_cast<int>(normal.size());
  double nn = 0.0;
  for (double v : normal) nn += v * v;
  if (ar == 0 || nn == 0.0)
    throw std::invalid_argument("halfspace: zero normal");
  return wrap_node(
      make_prim(Node::Kind::Halfspace, std::move(normal), {}, offset, ar));
}

ImplicitSet ImplicitSet::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("box: bad extents");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(hi[i] > lo[i])) throw std::invalid_argument("box: max <= min");
  const int ar = static_cast<int>(lo.size());
  return wrap_node(
      make_prim(Node::Kind::Box, std::move(lo), std::move(hi), 0.0, ar));
}

ImplicitSet ImplicitSet::circle(double cx, double cy, double r) {
  return wrap_node(make_prim(Node::Kind::Circle, {cx, cy}, {}, r, 2));
}

ImplicitSet ImplicitSet::sphere(double cx, double cy, double cz, double r) {
  return wrap_node(make_prim(Node::Kind::Sphere, {cx, cy, cz}, {}, r, 3));
}

ImplicitSet ImplicitSet::cylinder(double cx, double cy, double r) {
  return wrap_node(make_prim(Node::Kind::Cylinder, {cx, cy}, {}, r, 3));
}

ImplicitSet ImplicitSet::set_union(std::vector<ImplicitSet> parts) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Union;
  for (auto& p : parts) n->children.push_back(p.root_);
  if (n->children.empty())
    throw std::invalid_argument("union: empty composition");
  n->arity = n->children[0]->arity;
  for (const auto& c : n->children)
    if (c->arity != n->arity)
      throw std::invalid_argument("union: operand arity mismatch");
  return wrap_node(std::move(n));
}

ImplicitSet ImplicitSet::set_intersection(std::vector<ImplicitSet> parts) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Intersection;
  for (auto& p : parts) n->children.push_back(p.root_);
  if (n->children.empty())
    throw std::invalid_argument("intersection: empty composition");
  n->arity = n->children[0]->arity;
  for (const auto& c : n->children)
    if (c->arity != n->arity)
      throw std::invalid_argument("intersection: operand arity mismatch");
  return wrap_node(std::move(n));
}

ImplicitSet ImplicitSet::complement(ImplicitSet inner) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Complement;
  n->children.push_back(inner.root_);
  n->arity = n->children[0]->arity;
  return wrap_node(std::move(n));
}

double ImplicitSet::eval(std::span<const double> point) const {
  if (!root_) throw std::logic_error("ImplicitSet: empty");
  if (static_cast<int>(point.size()) != root_->arity)
    throw std::invalid_argument("ImplicitSet: point arity mismatch");
  return eval_node(*root_, point);
}

int ImplicitSet::arity() const {
  if (!root_) throw std::logic_error("ImplicitSet: empty");
  return root_->arity;
}

ImplicitSet ImplicitSet::from_json(const std::string& text) {
  return ImplicitSet(node_from_json(json::parse(text)));
}

std::string ImplicitSet::to_json() const {
  if (!root_) throw std::logic_error("ImplicitSet: empty");
  return node_to_json(*root_).dump();
}

double eval_signed(const ImplicitSet& set, std::span<const double> point) {
  return set.eval(point);
}

// ---------------------------------------------------------------------------
// Scenario

void Scenario::validate() const {
  if (!(d_h > 0.0) || !(d_z > 0.0))
    throw std::invalid_argument("Scenario: capture radii must be positive");
  if (!(k_x > 0.0) || !(k_y > 0.0) || !(k_z > 0.0))
    throw std::invalid_argument("Scenario: gains must be positive");
  if (!(u_h_d > 0.0) || !(u_h_a > 0.0) || !(u_z_d > 0.0) || !(u_z_a > 0.0))
    throw std::invalid_argument("Scenario: speed bounds must be positive");
  if (!(obstacle_penalty > d_h))
    throw std::invalid_argument("Scenario: K must exceed d_h");
  if (target.arity() != 2)
    throw std::invalid_argument("Scenario: target must be a horizontal set");
  for (const auto& o : obstacles)
    if (o.arity() != 2)
      throw std::invalid_argument("Scenario: obstacles must be horizontal sets");
}

double Scenario::target_sdf(double x, double y) const {
  const double p[3] = {x, y, 0.0};
  return target.eval(std::span<const double>(p, 2));
}

double Scenario::obstacle_sdf(double x, double y) const {
  const double p[3] = {x, y, 0.0};
  double v = kInf;
  for (const auto& o : obstacles)
    v = std::min(v, o.eval(std::span<const double>(p, 2)));
  return v;
}

Scenario Scenario::from_json(const std::string& text) {
  json j = json::parse(text);
  Scenario s;
  s.target = ImplicitSet::from_json(j.at("target").dump());
  for (const auto& oj : j.value("obstacles", json::array()))
    s.obstacles.push_back(ImplicitSet::from_json(oj.dump()));
  s.d_h = j.at("d_h").get<double>();
  s.d_z = j.at("d_z").get<double>();
  const auto& gains = j.at("gains");
  s.k_x = gains.at("kx").get<double>();
  s.k_y = gains.at("ky").get<double>();
  s.k_z = gains.at("kz").get<double>();
  const auto& bounds = j.at("bounds");
  s.u_h_d = bounds.at("UhD").get<double>();
  s.u_h_a = bounds.at("UhA").get<double>();
  s.u_z_d = bounds.at("UzD").get<double>();
  s.u_z_a = bounds.at("UzA").get<double>();
  s.obstacle_penalty = j.at("K").get<double>();
  const json doms = j.value("domains", json::object());
  for (const auto& [name, dj] : doms.items()) {
    DomainBox box;
    box.counts = dj.at("counts").get<std::vector<int>>();
    box.lo = dj.at("min").get<std::vector<double>>();
    box.hi = dj.at("max").get<std::vector<double>>();
    s.domains[name] = std::move(box);
  }
  s.validate();
  return s;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("Scenario: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json(ss.str());
}

std::string Scenario::to_json() const {
  json j;
  j["target"] = json::parse(target.to_json());
  json obs = json::array();
  for (const auto& o : obstacles) obs.push_back(json::parse(o.to_json()));
  j["obstacles"] = obs;
  j["d_h"] = d_h;
  j["d_z"] = d_z;
  j["gains"] = {{"kx", k_x}, {"ky", k_y}, {"kz", k_z}};
  j["bounds"] = {{"UhD", u_h_d}, {"UhA", u_h_a}, {"UzD", u_z_d}, {"UzA", u_z_a}};
  j["K"] = obstacle_penalty;
  json doms = json::object();
  for (const auto& [name, box] : domains)
    doms[name] = {{"counts", box.counts}, {"min", box.lo}, {"max", box.hi}};
  j["domains"] = doms;
  return j.dump(2);
}

void Scenario::save(const std::string& path) const {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("Scenario: cannot write " + path);
  os << to_json() << "\n";
}

std::string Scenario::hash() const {
  const std::string text = to_json();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Cost construction

HorizontalCosts build_horizontal_costs(const Scenario& scenario,
                                       const GridSpec& grid6,
                                       CaptureVariant variant,
                                       const ScalarField* tracking_value) {
  if (grid6.ndim() != 6)
    throw std::invalid_argument("build_horizontal_costs: grid must be 6D");
  if (variant == CaptureVariant::InvariantSet) {
    if (!tracking_value)
      throw std::invalid_argument(
          "build_horizontal_costs: invariant-set variant needs the 4D "
          "tracking value");
    if (tracking_value->spec.ndim() != 4)
      throw std::invalid_argument(
          "build_horizontal_costs: tracking value must be 4D");
  }

  // Axes: (x_D, y_D, v_x_D, v_y_D, x_A, y_A). The SDF terms only depend on
  // the two position pairs, so they are tabulated once per pair.
  const int nxd = grid6.axis(0).count, nyd = grid6.axis(1).count;
  const int nxa = grid6.axis(4).count, nya = grid6.axis(5).count;
  std::vector<double> obs_d(static_cast<std::size_t>(nxd) * nyd);
  std::vector<double> tgt_a(static_cast<std::size_t>(nxa) * nya);
  std::vector<double> obs_a(static_cast<std::size_t>(nxa) * nya);
  for (int i = 0; i < nxd; ++i)
    for (int j = 0; j < nyd; ++j)
      obs_d[static_cast<std::size_t>(i) * nyd + j] =
          scenario.obstacle_sdf(grid6.coord(0, i), grid6.coord(1, j));
  for (int i = 0; i < nxa; ++i)
    for (int j = 0; j < nya; ++j) {
      const double x = grid6.coord(4, i), y = grid6.coord(5, j);
      tgt_a[static_cast<std::size_t>(i) * nya + j] = scenario.target_sdf(x, y);
      obs_a[static_cast<std::size_t>(i) * nya + j] = scenario.obstacle_sdf(x, y);
    }
  const bool has_obs = !scenario.obstacles.empty();

  HorizontalCosts out{ScalarField(grid6), ScalarField(grid6)};
  const int d = 6;
  parallel_chunks(grid6.numel(), [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDim> idx{};
    grid6.unflatten(begin, std::span<int>(idx.data(), d));
    for (std::size_t n = begin; n < end; ++n) {
      const double xd = grid6.coord(0, idx[0]);
      const double yd = grid6.coord(1, idx[1]);
      const double vx = grid6.coord(2, idx[2]);
      const double vy = grid6.coord(3, idx[3]);
      const double xa = grid6.coord(4, idx[4]);
      const double ya = grid6.coord(5, idx[5]);

      const double s_tgt = tgt_a[static_cast<std::size_t>(idx[4]) * nya + idx[5]];
      const double s_obs_a =
          obs_a[static_cast<std::size_t>(idx[4]) * nya + idx[5]];
      const double s_obs_d =
          obs_d[static_cast<std::size_t>(idx[0]) * nyd + idx[1]];

      out.l.values[n] = has_obs ? std::min(s_tgt, s_obs_d) : s_tgt;

      double margin;
      if (variant == CaptureVariant::Classic) {
        margin = std::hypot(xa - xd, ya - yd) - scenario.d_h;
      } else {
        const double rel[4] = {xd - xa, yd - ya, vx, vy};
        margin = interpolate(*tracking_value, rel) - scenario.d_h;
      }
      double inner = std::max(margin, -s_tgt);
      if (has_obs) inner = std::min(inner, s_obs_a);
      out.g.values[n] = -inner;

      for (int a = d - 1; a >= 0; --a) {
        if (++idx[a] < grid6.axis(a).count) break;
        idx[a] = 0;
      }
    }
  });
  return out;
}

ScalarField build_vertical_cost(const Scenario& scenario, const GridSpec& grid3,
                                CaptureVariant variant,
                                const ScalarField* tracking_value) {
  if (grid3.ndim() != 3)
    throw std::invalid_argument("build_vertical_cost: grid must be 3D");
  if (variant == CaptureVariant::InvariantSet) {
    if (!tracking_value)
      throw std::invalid_argument(
          "build_vertical_cost: invariant-set variant needs the 2D tracking "
          "value");
    if (tracking_value->spec.ndim() != 2)
      throw std::invalid_argument(
          "build_vertical_cost: tracking value must be 2D");
  }
  return sample_field(grid3, [&](std::span<const double> x) {
    // x = (z_D, v_z_D, z_A)
    if (variant == CaptureVariant::Classic)
      return std::abs(x[2] - x[0]) - scenario.d_z;
    const double rel[2] = {x[0] - x[2], x[1]};
    return interpolate(*tracking_value, rel) - scenario.d_z;
  });
}

ScalarField build_tracking_cost_h(
    const Scenario& scenario, const GridSpec& grid4,
    std::optional<std::array<double, 2>> attacker_anchor) {
  if (grid4.ndim() != 4)
    throw std::invalid_argument("build_tracking_cost_h: grid must be 4D");
  return sample_field(grid4, [&](std::span<const double> x) {
    // x = (x_rel, y_rel, v_x_D, v_y_D)
    const double rel = std::hypot(x[0], x[1]);
    if (!attacker_anchor) return rel;
    const double px = (*attacker_anchor)[0] + x[0];
    const double py = (*attacker_anchor)[1] + x[1];
    const double o =
        scenario.obstacle_sdf(px, py) <= 0.0 ? scenario.obstacle_penalty : 0.0;
    return std::max(rel, o);
  });
}

ScalarField build_tracking_cost_z(const GridSpec& grid2) {
  if (grid2.ndim() != 2)
    throw std::invalid_argument("build_tracking_cost_z: grid must be 2D");
  return sample_field(
      grid2, [](std::span<const double> x) { return std::abs(x[0]); });
}

AttackerReachCosts build_attacker_reach_costs(const Scenario& scenario,
                                              const GridSpec& grid2) {
  if (grid2.ndim() != 2)
    throw std::invalid_argument("build_attacker_reach_costs: grid must be 2D");
  AttackerReachCosts out;
  out.has_obstacles = !scenario.obstacles.empty();
  out.l = sample_field(grid2, [&](std::span<const double> x) {
    return scenario.target_sdf(x[0], x[1]);
  });
  out.g = sample_field(grid2, [&](std::span<const double> x) {
    return out.has_obstacles ? -scenario.obstacle_sdf(x[0], x[1]) : kNoAvoid;
  });
  return out;
}

}  // namespace hjra

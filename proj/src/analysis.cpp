#include "hjra/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace hjra {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::DefenderGuaranteed: return "DefenderGuaranteed";
    case Verdict::AttackerGuaranteed: return "AttackerGuaranteed";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "?";
}

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Prop1: return "Prop1";
    case Rule::Prop2: return "Prop2";
    case Rule::Prop3: return "Prop3";
    case Rule::Theorem: return "Theorem";
    case Rule::None: return "none";
  }
  return "?";
}

Membership in_winning_region(const ValueSolution& solution,
                             std::span<const double> state, Side side,
                             Game game, double safety_margin) {
  Membership m;
  m.margin = interpolate(solution.field, state, &m.clamped);
  const bool defender_member = game == Game::Horizontal
                                   ? m.margin > safety_margin
                                   : m.margin <= -safety_margin;
  m.member = side == Side::Defender ? defender_member : !defender_member;
  return m;
}

double query_time(const TimeField& field, std::span<const double> point,
                  bool* clamped) {
  const GridSpec& spec = field.spec;
  const int d = spec.ndim();
  if (static_cast<int>(point.size()) != d)
    throw std::invalid_argument("query_time: point arity mismatch");

  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> w{};
  bool clip = false;
  for (int a = 0; a < d; ++a) {
    if (!std::isfinite(point[a]))
      throw std::invalid_argument("query_time: non-finite point");
    const Axis& ax = spec.axis(a);
    double u = (point[a] - ax.lo) / ax.spacing;
    if (u < 0.0) {
      u = 0.0;
      clip = true;
    } else if (u > ax.count - 1) {
      u = ax.count - 1;
      clip = true;
    }
    int i = static_cast<int>(u);
    if (i > ax.count - 2) i = ax.count - 2;
    base[a] = i;
    w[a] = u - i;
  }
  if (clamped) *clamped = clip;

  std::size_t base_flat = 0;
  for (int a = 0; a < d; ++a) base_flat += base[a] * spec.stride(a);

  double acc = 0.0;
  const unsigned corners = 1u << d;
  for (unsigned m = 0; m < corners; ++m) {
    double weight = 1.0;
    std::size_t off = base_flat;
    for (int a = 0; a < d; ++a) {
      if (m & (1u << a)) {
        weight *= w[a];
        off += spec.stride(a);
      } else {
        weight *= 1.0 - w[a];
      }
    }
    const double t = field.times[off];
    if (t == TimeField::kNever) return TimeField::kNever;
    acc += weight * t;
  }
  return acc;
}

ClassificationResult classify(const JointState9& state,
                              const GameArtifacts& artifacts,
                              const ClassifyOptions& opts) {
  const auto xh = project_horizontal(state);
  const auto xz = project_vertical(state);
  const auto rel_z = project_rel_vertical(state);
  const auto rel_h = project_rel_horizontal(state);

  ClassificationResult res;
  bool clamp_goal = false, clamp_cap = false, clamp_vz = false,
       clamp_vh = false;

  const double pa[2] = {state.xa, state.ya};
  const double t_goal = query_time(artifacts.t_goal, pa, &clamp_goal);
  const double t_capture = query_time(artifacts.t_capture, xz, &clamp_cap);
  const auto wdh = in_winning_region(artifacts.phi_h, xh, Side::Defender,
                                     Game::Horizontal, opts.safety_margin);
  const auto wdz = in_winning_region(artifacts.phi_z, xz, Side::Defender,
                                     Game::Vertical, opts.safety_margin);
  const double vz = interpolate(artifacts.v_z.field, rel_z, &clamp_vz);
  const double vh = interpolate(artifacts.v_h.field, rel_h, &clamp_vh);

  res.evidence["t_goal"] = t_goal;
  res.evidence["t_capture"] = t_capture;
  res.evidence["phi_h"] = wdh.margin;
  res.evidence["phi_z"] = wdz.margin;
  res.evidence["v_z_inf"] = vz;
  res.evidence["v_h_T"] = vh;
  res.clamped = clamp_goal || clamp_cap || wdh.clamped || wdz.clamped ||
                clamp_vz || clamp_vh;

  const double d_h = artifacts.scenario.d_h;
  const double d_z = artifacts.scenario.d_z;

  Verdict verdict = Verdict::Indeterminate;
  Rule rule = Rule::None;
  bool rule_clamped = false;

  // A goal the attacker can never reach (trapped by obstacles) cannot win
  // the race, so an infinite t_goal never fires the attacker guarantee.
  if (t_goal < TimeField::kNever && t_goal <= t_capture) {
    verdict = Verdict::AttackerGuaranteed;
    rule = Rule::Prop1;
    rule_clamped = clamp_goal || clamp_cap;
  } else if (wdz.member && t_goal > t_capture && wdh.member) {
    verdict = Verdict::DefenderGuaranteed;
    rule = Rule::Theorem;
    rule_clamped = wdz.clamped || clamp_goal || clamp_cap || wdh.clamped;
  } else if (wdh.member && vz <= d_z) {
    verdict = Verdict::DefenderGuaranteed;
    rule = Rule::Prop2;
    rule_clamped = wdh.clamped || clamp_vz;
  } else if (wdz.member && t_goal > t_capture && vh <= d_h) {
    verdict = Verdict::DefenderGuaranteed;
    rule = Rule::Prop3;
    rule_clamped = wdz.clamped || clamp_goal || clamp_cap || clamp_vh;
  }

  if (rule != Rule::None && rule_clamped) {
    res.verdict = Verdict::Indeterminate;
    res.rule = Rule::None;
    return res;
  }
  res.verdict = verdict;
  res.rule = rule;
  return res;
}

}  // namespace hjra

#pragma once

#include <cstdint>
#include <string>

#include "hjra/grid.hpp"

namespace hjra {

// Sidecar metadata written next to every field file (<base>.meta.json).
// wall_ms is the only field allowed to differ between identical re-runs.
struct FieldMeta {
  std::string dynamics;        // model / field identifier
  std::string parameter_hash;  // scenario hash, 16 hex chars
  double horizon = 0.0;
  double tolerance = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;
};

// Binary field format "HJVF": magic `HJVF`, version u32=1, ndim u32, then per
// axis (count u64, min f64, max f64), then the row-major (last axis fastest)
// f64 payload. Little-endian throughout.
void write_hjvf(const std::string& path, const ScalarField& field);
ScalarField read_hjvf(const std::string& path);

void write_meta(const std::string& field_path, const FieldMeta& meta);
FieldMeta read_meta(const std::string& field_path);

std::string meta_path_for(const std::string& field_path);

}  // namespace hjra

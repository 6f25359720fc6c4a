#include "hjra/hjvf.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "HJVF writer assumes a little-endian host");

namespace hjra {

namespace {

template <typename T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("HJVF: truncated file");
  return v;
}

}  // namespace

void write_hjvf(const std::string& path, const ScalarField& field) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("HJVF: cannot open " + path + " for write");
  os.write("HJVF", 4);
  put<std::uint32_t>(os, 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(field.spec.ndim()));
  for (int a = 0; a < field.spec.ndim(); ++a) {
    const Axis& ax = field.spec.axis(a);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(ax.count));
    put<double>(os, ax.lo);
    put<double>(os, ax.hi);
  }
  os.write(reinterpret_cast<const char*>(field.values.data()),
           static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("HJVF: write failed for " + path);
}

ScalarField read_hjvf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("HJVF: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "HJVF", 4) != 0)
    throw std::runtime_error("HJVF: bad magic in " + path);
  if (get<std::uint32_t>(is) != 1)
    throw std::runtime_error("HJVF: unsupported version in " + path);
  const auto ndim = get<std::uint32_t>(is);
  if (ndim == 0 || ndim > kMaxDim)
    throw std::runtime_error("HJVF: bad ndim in " + path);
  std::vector<int> counts(ndim);
  std::vector<double> lo(ndim), hi(ndim);
  for (std::uint32_t a = 0; a < ndim; ++a) {
    counts[a] = static_cast<int>(get<std::uint64_t>(is));
    lo[a] = get<double>(is);
    hi[a] = get<double>(is);
  }
  ScalarField field{GridSpec(counts, lo, hi)};
  is.read(reinterpret_cast<char*>(field.values.data()),
          static_cast<std::streamsize>(field.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("HJVF: truncated payload in " + path);
  return field;
}

std::string meta_path_for(const std::string& field_path) {
  auto dot = field_path.rfind('.');
  auto slash = field_path.rfind('/');
  std::string base = (dot == std::string::npos ||
                      (slash != std::string::npos && dot < slash))
                         ? field_path
                         : field_path.substr(0, dot);
  return base + ".meta.json";
}

void write_meta(const std::string& field_path, const FieldMeta& meta) {
  nlohmann::json j;
  j["dynamics"] = meta.dynamics;
  j["parameter_hash"] = meta.parameter_hash;
  j["horizon"] = meta.horizon;
  j["tolerance"] = meta.tolerance;
  j["iterations"] = meta.iterations;
  j["converged"] = meta.converged;
  j["wall_ms"] = meta.wall_ms;
  std::ofstream os(meta_path_for(field_path), std::ios::trunc);
  if (!os) throw std::runtime_error("meta: cannot write sidecar for " + field_path);
  os << j.dump(2) << "\n";
}

FieldMeta read_meta(const std::string& field_path) {
  std::ifstream is(meta_path_for(field_path));
  if (!is) throw std::runtime_error("meta: missing sidecar for " + field_path);
  nlohmann::json j;
  is >> j;
  FieldMeta m;
  m.dynamics = j.at("dynamics").get<std::string>();
  m.parameter_hash = j.at("parameter_hash").get<std::string>();
  m.horizon = j.at("horizon").get<double>();
  m.tolerance = j.at("tolerance").get<double>();
  m.iterations = j.at("iterations").get<std::uint64_t>();
  m.converged = j.at("converged").get<bool>();
  m.wall_ms = j.value("wall_ms", 0.0);
  return m;
}

}  // namespace hjra

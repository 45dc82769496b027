#include "tfac/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace tfac {

namespace {

std::ofstream open_out(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  return f;
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return __builtin_bswap64(v);
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_text(const std::string& path, const std::string& text) {
  auto f = open_out(path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_vtk(const std::string& path, const ScalarField& field, double t) {
  const auto& g = field.grid;
  const std::string M = std::to_string(g.M);
  const std::string h = format_double(g.h()), h2 = format_double(0.5 * g.h());
  std::string out;
  out.reserve(field.size() * 24 + 256);
  out += "# vtk DataFile Version 3.0\n";
  out += "phi t=" + format_double(t) + "\n";
  out += "ASCII\nDATASET STRUCTURED_POINTS\n";
  out += "DIMENSIONS " + M + " " + (g.dim >= 2 ? M : "1") + " " + (g.dim >= 3 ? M : "1") + "\n";
  out += "ORIGIN " + h2 + " " + (g.dim >= 2 ? h2 : "0") + " " + (g.dim >= 3 ? h2 : "0") + "\n";
  out += "SPACING " + h + " " + h + " " + h + "\n";
  out += "POINT_DATA " + std::to_string(field.size()) + "\n";
  out += "SCALARS phi double 1\nLOOKUP_TABLE default\n";
  for (double v : field.values) {
    out += format_double(v);
    out += '\n';
  }
  write_text(path, out);
}

void write_raw(const std::string& base, const ScalarField& field, double t) {
  {
    auto f = open_out(base + ".bin");
    for (double v : field.values) {
      const std::uint64_t le = to_little(std::bit_cast<std::uint64_t>(v));
      f.write(reinterpret_cast<const char*>(&le), sizeof le);
    }
    if (!f) throw std::runtime_error("write failed: " + base + ".bin");
  }
  nlohmann::json meta = {{"dim", field.grid.dim}, {"M", field.grid.M},       {"L", field.grid.L},
                         {"t", t},                {"order", "x-fastest"},    {"dtype", "float64"},
                         {"endianness", "little"}};
  write_text(base + ".json", meta.dump(2) + "\n");
}

ScalarField read_raw(const std::string& base, double* t) {
  std::ifstream meta_file(base + ".json");
  if (!meta_file) throw std::runtime_error("cannot open " + base + ".json");
  const auto meta = nlohmann::json::parse(meta_file);
  if (meta.at("order") != "x-fastest" || meta.at("dtype") != "float64") throw std::runtime_error("unsupported raw layout");
  const auto g = make_grid(meta.at("dim").get<int>(), meta.at("M").get<std::size_t>(), meta.at("L").get<double>());
  if (t) *t = meta.at("t").get<double>();
  ScalarField field(g);
  std::ifstream f(base + ".bin", std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + base + ".bin");
  for (auto& v : field.values) {
    std::uint64_t le = 0;
    f.read(reinterpret_cast<char*>(&le), sizeof le);
    v = std::bit_cast<double>(to_little(le));
  }
  if (!f) throw std::runtime_error(base + ".bin is shorter than its sidecar describes");
  return field;
}

}  // namespace tfac

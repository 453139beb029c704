#include "critline/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace critline {

namespace {

static_assert(std::endian::native == std::endian::little, "binary field layout assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw InvalidData("truncated field header");
  return v;
}

}  // namespace

void write_field(std::ostream& out, const SampledField& field) {
  const Grid& g = field.grid();
  put<std::int32_t>(out, g.dim());
  put<double>(out, g.half_width());
  put<std::int64_t>(out, g.points_per_axis());
  put<std::int32_t>(out, static_cast<std::int32_t>(field.variable()));
  out.write(reinterpret_cast<const char*>(field.values().data()),
            static_cast<std::streamsize>(field.values().size() * sizeof(std::complex<double>)));
  if (!out) throw InvalidData("failed to write field");
}

SampledField read_field(std::istream& in) {
  const auto dim = get<std::int32_t>(in);
  const auto L = get<double>(in);
  const auto P = get<std::int64_t>(in);
  const auto tag = get<std::int32_t>(in);
  if (tag != 0 && tag != 1) throw InvalidData("unknown variable tag " + std::to_string(tag));
  const Grid grid(dim, L, P);
  ComplexArray values(grid.size());
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size() * sizeof(std::complex<double>)));
  if (!in) throw InvalidData("truncated field data");
  return SampledField(grid, std::move(values), static_cast<Variable>(tag));
}

void save_field(const std::string& path, const SampledField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path + " for writing");
  write_field(out, field);
}

SampledField load_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  return read_field(in);
}

void write_field_csv(std::ostream& out, const SampledField& field, Index max_rows) {
  const Grid& g = field.grid();
  if (g.size() > max_rows)
    throw InvalidArgument("grid has " + std::to_string(g.size()) + " samples; CSV export is capped at " +
                          std::to_string(max_rows));
  out << (g.dim() == 1 ? "x0" : "x0,x1") << ",re,im\n";
  out << std::setprecision(17);
  for (Index i = 0; i < g.size(); ++i) {
    const Point pt = g.point(i);
    for (Index a = 0; a < pt.size(); ++a) out << pt(a) << ',';
    out << field.values()(i).real() << ',' << field.values()(i).imag() << '\n';
  }
}

nlohmann::json bump_table_header(const BumpTable& table, const Annulus* annulus) {
  nlohmann::json j{{"name", table.name()},
                   {"n", table.dim()},
                   {"support_radius", table.support_radius()},
                   {"spacing", table.spacing()},
                   {"range", table.range()},
                   {"value_at_origin", table.inverse_radial(0.0)}};
  if (annulus) {
    j["A"] = annulus->A;
    j["annulus_min"] = annulus->min_abs;
    j["annulus_threshold"] = annulus->threshold;
    j["annulus_threshold_fraction"] = annulus_threshold_fraction;
  }
  return j;
}

}  // namespace critline

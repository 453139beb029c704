#pragma once

// Field serialization. Binary layout, all little-endian:
//   int32 n | float64 L | int64 points_per_axis | int32 tag (0 space, 1 frequency)
//   then points_per_axis^n complex doubles (re, im) in row-major order.

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "critline/bumps.hpp"
#include "critline/transforms.hpp"

namespace critline {

void write_field(std::ostream& out, const SampledField& field);
SampledField read_field(std::istream& in);

void save_field(const std::string& path, const SampledField& field);
SampledField load_field(const std::string& path);

/// One row per sample: coordinates, re, im. Refuses grids above `max_rows`.
void write_field_csv(std::ostream& out, const SampledField& field, Index max_rows = Index(1) << 16);

/// JSON header written next to a serialized BumpTable.
nlohmann::json bump_table_header(const BumpTable& table, const Annulus* annulus = nullptr);

}  // namespace critline

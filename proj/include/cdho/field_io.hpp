#pragma once

#include <string>

#include "cdho/grid.hpp"
#include "json.hpp"

namespace cdho {

struct FieldFile {
  Field field;
  double time = 0;
  nlohmann::json header;
};

// One JSON header line (n, N, L, space, time, plus `extra` keys) followed by
// little-endian interleaved (re, im) doubles.
void write_field(const std::string& path, const Field& f, double time,
                 const nlohmann::json& extra = nlohmann::json::object());
FieldFile read_field(const std::string& path);

// n = 1 only: columns coordinate, re, im, abs.
void write_field_csv(const std::string& path, const Field& f);

}  // namespace cdho

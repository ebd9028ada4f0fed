#pragma once

// JSON wire formats:
//   Table:      {"dims":[n1,...],"data":[c0,c1,...]}  (row-major)
//   MarginSpec: {"axis_sums":[[...],[...],[...]]}

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "ctables/tensor.hpp"

namespace ctables {

nlohmann::json to_json(const Table& table);
nlohmann::json to_json(const RealTable& table);
nlohmann::json to_json(const MarginSpec& spec);

Table table_from_json(const nlohmann::json& j);
MarginSpec margin_spec_from_json(const nlohmann::json& j);

// Reads a whole JSON document; "-" or empty path means stdin.
nlohmann::json read_json(const std::string& path);

}  // namespace ctables

#include "ctables/io.hpp"

#include <fstream>
#include <iostream>

#include "ctables/error.hpp"

namespace ctables {

namespace {

template <typename T>
nlohmann::json table_json(const BasicTable<T>& table) {
  auto data = table.data();
  return {{"dims", table.dims()}, {"data", std::vector<T>(data.begin(), data.end())}};
}

}  // namespace

nlohmann::json to_json(const Table& table) { return table_json(table); }
nlohmann::json to_json(const RealTable& table) { return table_json(table); }

nlohmann::json to_json(const MarginSpec& spec) { return {{"axis_sums", spec.axis_sums}}; }

Table table_from_json(const nlohmann::json& j) {
  try {
    return Table(j.at("dims").get<Dims>(), j.at("data").get<std::vector<std::int64_t>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad table JSON: ") + e.what());
  }
}

MarginSpec margin_spec_from_json(const nlohmann::json& j) {
  try {
    MarginSpec spec{j.at("axis_sums").get<std::vector<std::vector<std::int64_t>>>()};
    validate_margin_spec(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad margin spec JSON: ") + e.what());
  }
}

nlohmann::json read_json(const std::string& path) {
  try {
    if (path.empty() || path == "-") return nlohmann::json::parse(std::cin);
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidInput, std::string("JSON parse error: ") + e.what());
  }
}

}  // namespace ctables

#include "posyid/grid_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "posyid/errors.hpp"

namespace posyid {

ExponentGrid parse_grid(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("grid file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("variables") || !doc["variables"].is_array()) {
    throw ConfigError("grid file needs a \"variables\" array");
  }
  std::vector<std::vector<double>> grids;
  std::size_t j = 0;
  for (const auto& var : doc["variables"]) {
    ++j;
    try {
      if (var.contains("values")) {
        grids.push_back(var.at("values").get<std::vector<double>>());
      } else if (var.contains("min") && var.contains("max") && var.contains("step")) {
        grids.push_back(ExponentGrid::expand(
            {var.at("min").get<double>(), var.at("max").get<double>(), var.at("step").get<double>()}));
      } else {
        std::ostringstream msg;
        msg << "grid variable " << j << " needs either \"values\" or \"min\"/\"max\"/\"step\"";
        throw ConfigError(msg.str());
      }
    } catch (const nlohmann::json::exception& e) {
      std::ostringstream msg;
      msg << "grid variable " << j << ": " << e.what();
      throw ConfigError(msg.str());
    }
  }
  return ExponentGrid(std::move(grids));
}

ExponentGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_grid(buffer.str());
}

}  // namespace posyid

#pragma once

#include <filesystem>
#include <string_view>

#include "posyid/basis.hpp"

namespace posyid {

/**
 * Reads an exponent grid from a JSON document of the form
 *
 *   {"variables": [{"values": [0, 0.5, 1]},
 *                  {"min": -2, "max": 4, "step": 0.1}]}
 *
 * Each variable lists either explicit exponents or a (min, max, step) range.
 * Throws ConfigError on malformed input.
 */
ExponentGrid parse_grid(std::string_view text);
ExponentGrid load_grid(const std::filesystem::path& path);

}  // namespace posyid

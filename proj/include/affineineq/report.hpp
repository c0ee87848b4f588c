#pragma once

#include "affineineq/inequalities.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace affineineq {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

/// Malformed or inconsistent configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json to_json(const FunctionSpec& spec);
Json to_json(const BodySpec& spec);
Json to_json(const QuadratureLevels& levels);
Json to_json(const Tolerances& tolerances);
Json to_json(const DeficitReport& report);

/// Parsers reject unknown keys and wrong types with ConfigError. Defaults
/// fill missing keys.
FunctionSpec function_spec_from_json(const Json& j);
BodySpec body_spec_from_json(const Json& j);
QuadratureLevels levels_from_json(const Json& j);
Tolerances tolerances_from_json(const Json& j);
Matrix matrix_from_json(const Json& j, const char* what);
Vector vector_from_json(const Json& j, const char* what);

/// True when the spec draws random numbers (random frames, random bodies).
bool is_randomized(const FunctionSpec& spec);
bool is_randomized(const BodySpec& spec);

/// One compact JSON line.
std::string to_line(const Json& j);

}  // namespace affineineq

#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "carma/polyalg.hpp"

namespace carma {

/// Reads {"d":..,"p":..,"q":..,"A":[[..]..],"B":[[..]..]} where each entry of
/// A and B is a row-major d*d list (a flat list or a list of rows). Shapes and
/// B_0 != 0 are validated; problems raise config / shape_mismatch errors.
MatrixPolyPair model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const MatrixPolyPair& pq);

/// Loads a model file; parse errors carry line and column.
MatrixPolyPair load_model(const std::string& path);

/// Parses text as JSON, converting parse failures into a config error that
/// names the source, line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);
nlohmann::json read_json_file(const std::string& path);

/// Row-major matrix (de)serialization shared with the state-space export.
Mat matrix_from_json(const nlohmann::json& j, int rows, int cols, const std::string& what);
nlohmann::json matrix_to_json(const Mat& m);

}  // namespace carma

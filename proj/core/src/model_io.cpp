#include "carma/model_io.hpp"

#include <fstream>
#include <sstream>

#include "carma/error.hpp"

namespace carma {

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

int require_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorCode::config, std::string("model is missing \"") + key + "\"");
  if (!j[key].is_number_integer())
    fail(ErrorCode::config, std::string("model field \"") + key + "\" must be an integer");
  return j[key].get<int>();
}

}  // namespace

nlohmann::json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // byte is 1-based and points just past the offending character.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, offset);
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": malformed JSON (" << e.what() << ")";
    fail(ErrorCode::config, os.str());
  }
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::config, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str(), path);
}

Mat matrix_from_json(const nlohmann::json& j, int rows, int cols, const std::string& what) {
  Mat m(rows, cols);
  if (!j.is_array()) fail(ErrorCode::config, what + " must be an array");
  // Accept a flat row-major list or a list of rows.
  if (!j.empty() && j.front().is_array()) {
    if (static_cast<int>(j.size()) != rows)
      fail(ErrorCode::shape_mismatch, what + " has " + std::to_string(j.size()) + " rows, expected " +
                                          std::to_string(rows));
    for (int r = 0; r < rows; ++r) {
      const auto& row = j[r];
      if (!row.is_array() || static_cast<int>(row.size()) != cols)
        fail(ErrorCode::shape_mismatch, what + " row " + std::to_string(r) + " must have " +
                                            std::to_string(cols) + " entries");
      for (int c = 0; c < cols; ++c) {
        if (!row[c].is_number()) fail(ErrorCode::config, what + " entries must be numbers");
        m(r, c) = row[c].get<double>();
      }
    }
    return m;
  }
  if (static_cast<int>(j.size()) != rows * cols)
    fail(ErrorCode::shape_mismatch, what + " has " + std::to_string(j.size()) +
                                        " entries, expected " + std::to_string(rows * cols));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const auto& v = j[r * cols + c];
      if (!v.is_number()) fail(ErrorCode::config, what + " entries must be numbers");
      m(r, c) = v.get<double>();
    }
  return m;
}

nlohmann::json matrix_to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

MatrixPolyPair model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::config, "model must be a JSON object");
  MatrixPolyPair pq;
  pq.d = require_int(j, "d");
  pq.p = require_int(j, "p");
  pq.q = require_int(j, "q");
  if (pq.d < 1 || pq.q < 0 || pq.p <= pq.q)
    fail(ErrorCode::invalid_parameter, "model orders must satisfy d >= 1 and p > q >= 0");
  if (!j.contains("A") || !j["A"].is_array()) fail(ErrorCode::config, "model is missing array \"A\"");
  if (!j.contains("B") || !j["B"].is_array()) fail(ErrorCode::config, "model is missing array \"B\"");
  if (static_cast<int>(j["A"].size()) != pq.p)
    fail(ErrorCode::shape_mismatch, "\"A\" must list p = " + std::to_string(pq.p) + " matrices");
  if (static_cast<int>(j["B"].size()) != pq.q + 1)
    fail(ErrorCode::shape_mismatch, "\"B\" must list q+1 = " + std::to_string(pq.q + 1) + " matrices");
  for (int i = 0; i < pq.p; ++i)
    pq.A.push_back(matrix_from_json(j["A"][i], pq.d, pq.d, "A_" + std::to_string(i + 1)));
  for (int i = 0; i <= pq.q; ++i)
    pq.B.push_back(matrix_from_json(j["B"][i], pq.d, pq.d, "B_" + std::to_string(i)));
  pq.validate();
  return pq;
}

nlohmann::json model_to_json(const MatrixPolyPair& pq) {
  nlohmann::json j;
  j["d"] = pq.d;
  j["p"] = pq.p;
  j["q"] = pq.q;
  j["A"] = nlohmann::json::array();
  for (const auto& m : pq.A) j["A"].push_back(matrix_to_json(m));
  j["B"] = nlohmann::json::array();
  for (const auto& m : pq.B) j["B"].push_back(matrix_to_json(m));
  return j;
}

MatrixPolyPair load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

}  // namespace carma

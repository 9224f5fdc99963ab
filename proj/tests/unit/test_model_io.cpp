#include <gtest/gtest.h>

#include "carma/error.hpp"
#include "carma/model_io.hpp"
#include "carma/statespace.hpp"

namespace carma {
namespace {

TEST(ModelIo, RoundTrip) {
  const auto j = nlohmann::json::parse(R"({"d":2,"p":1,"q":0,"A":[[[1,2],[3,4]]],"B":[[1,0,0,1]]})");
  const auto pq = model_from_json(j);
  EXPECT_EQ(pq.A[0](0, 1), 2.0);
  EXPECT_EQ(pq.A[0](1, 0), 3.0);
  EXPECT_TRUE(pq.B[0].isIdentity());
  const auto back = model_from_json(model_to_json(pq));
  EXPECT_EQ(back.A[0], pq.A[0]);
  EXPECT_EQ(back.B[0], pq.B[0]);
}

TEST(ModelIo, ShapeErrors) {
  const auto bad = nlohmann::json::parse(R"({"d":2,"p":1,"q":0,"A":[[1,2,3]],"B":[[1,0,0,1]]})");
  try {
    model_from_json(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape_mismatch);
  }
  const auto zero_b = nlohmann::json::parse(R"({"d":1,"p":1,"q":0,"A":[[1]],"B":[[0]]})");
  EXPECT_THROW(model_from_json(zero_b), Error);
  const auto missing = nlohmann::json::parse(R"({"d":1,"p":1,"A":[[1]],"B":[[1]]})");
  try {
    model_from_json(missing);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
  }
}

TEST(ModelIo, ParseErrorCarriesLineAndColumn) {
  try {
    parse_json_text("{\n  \"d\": 1,\n  \"p\": ]\n}", "model.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::config);
    EXPECT_NE(std::string(e.what()).find("model.json:3:8"), std::string::npos) << e.what();
  }
}

TEST(ModelIo, StateSpaceMatricesSerialize) {
  const auto ss = build_state_space(MatrixPolyPair::scalar({3.0, 2.0}, {1.0, 0.5}));
  const auto j = matrix_to_json(ss.A);
  EXPECT_EQ(matrix_from_json(j, 2, 2, "A"), ss.A);
}

}  // namespace
}  // namespace carma

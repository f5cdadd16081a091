// Copyright 2026 The captree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <string>

#include "captree/error.h"
#include "captree/oracle.h"
#include "doctest.h"

namespace captree {
namespace {

TEST_CASE("sanitize word") {
  CHECK(SanitizeWord("Blue!") == "blue");
  CHECK(SanitizeWord("  soaring high ") == "soaring");
  CHECK(SanitizeWord("...") == "");
  CHECK(SanitizeWord("") == "");
}

TEST_CASE("stub fixture") {
  const StubOracle oracle = StubOracle::Load(
      std::string(CAPTREE_TEST_DATA) + "/oracle_stub.json");
  CHECK(oracle.Opposite("green") == "blue");
  CHECK(oracle.Opposite("several") == "one");
  CHECK_FALSE(oracle.Opposite("kites").has_value());
  CHECK_FALSE(oracle.FillMask("a <extra_id_0>").has_value());
}

TEST_CASE("stub from json") {
  const StubOracle oracle = StubOracle::FromJson(
      R"({"mask": {"a <extra_id_0> dog": "big"}})");
  CHECK(oracle.FillMask("a <extra_id_0> dog") == "big");
  CHECK_FALSE(oracle.Opposite("big").has_value());
  CHECK(StubOracle::FromJson("{}").Opposite("x") == std::nullopt);
}

TEST_CASE("stub rejects bad fixtures") {
  for (const char* text :
       {"[]", "{", R"({"opposites": {}})", R"({"opposite": []})",
        R"({"opposite": {"a": 1}})"}) {
    try {
      StubOracle::FromJson(text);
      FAIL("accepted " << text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kParse);
    }
  }
  CHECK_THROWS_AS(StubOracle::Load("/nonexistent/stub.json"), Error);
}

TEST_CASE("prompt constants") {
  CHECK(kMaskToken == "<extra_id_0>");
  CHECK(kOppositePrompt.find("<>") != std::string_view::npos);
}

}  // namespace
}  // namespace captree

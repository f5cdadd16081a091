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


#include "http_client.h"

#include <thread>

#include "httplib.h"

namespace captree::internal {

nlohmann::json PostJson(const std::string& base_url, const std::string& path,
                        const nlohmann::json& body, const RetryPolicy& retry,
                        ErrorCode unavailable) {
  const std::string payload = body.dump();
  auto backoff = retry.initial_backoff;
  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < std::max(1, retry.attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    // One client per call: httplib clients are not meant to be shared
    // across threads.
    httplib::Client client(base_url);
    const auto seconds =
        std::chrono::duration_cast<std::chrono::seconds>(retry.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
        retry.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    auto result = client.Post(path, payload, "application/json");
    if (!result) {
      last_error = base_url + path + ": " + httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 500) {
      last_error = base_url + path + ": HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw Error(ErrorCode::kParse, base_url + path + ": HTTP " +
                                         std::to_string(result->status) +
                                         " " + result->body);
    }
    try {
      return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParse,
                  base_url + path + ": undecodable reply: " + e.what());
    }
  }
  throw Error(unavailable, last_error + " after " +
                               std::to_string(retry.attempts) + " attempts");
}

}  // namespace captree::internal

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


#ifndef CAPTREE_SRC_HTTP_CLIENT_H_
#define CAPTREE_SRC_HTTP_CLIENT_H_

#include <string>

#include "captree/error.h"
#include "captree/oracle.h"
#include "json.hpp"

namespace captree::internal {

// POSTs a JSON body and parses the JSON reply. Connection errors and 5xx
// statuses are retried per `retry`; exhaustion throws `unavailable`. 4xx
// statuses and undecodable replies throw kParse immediately.
nlohmann::json PostJson(const std::string& base_url, const std::string& path,
                        const nlohmann::json& body, const RetryPolicy& retry,
                        ErrorCode unavailable);

}  // namespace captree::internal

#endif  // CAPTREE_SRC_HTTP_CLIENT_H_

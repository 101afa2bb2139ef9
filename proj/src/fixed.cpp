// Copyright 2026 The tierbid Authors
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

#include "tierbid/fixed.hpp"

#include <cstdio>

namespace tierbid {

std::string Fixed::str() const {
  std::int64_t r = raw_;
  const char* sign = "";
  if (r < 0) {
    sign = "-";
    r = -r;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%s%lld.%06lld", sign,
                static_cast<long long>(r / kScale),
                static_cast<long long>(r % kScale));
  return buf;
}

}  // namespace tierbid

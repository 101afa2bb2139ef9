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

#pragma once

#include <stdexcept>
#include <string>

namespace tierbid {

/// Bad input: malformed config, broken referential integrity, violated
/// construction invariant. Maps to process exit code 1.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Filesystem trouble: unreadable input, unwritable output. Exit code 2.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A broken internal invariant; always a bug. Exit code 3.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace tierbid

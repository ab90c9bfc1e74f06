/*
 * Copyright 2026 The stripesim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stripesim {

/// The residual carries no interferer signature (all-zero input to an estimator).
struct ZeroResidualError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Stacked detection matrix does not have full column rank.
struct RankDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// RLS innovation matrix is not invertible (zero noise with a collapsed prior).
struct SingularInnovationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated fronthaul byte stream.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t offset_bytes)
      : std::runtime_error(what + " (at offset " + std::to_string(offset_bytes) + ")"),
        offset(offset_bytes) {}
  std::size_t offset;
};

}  // namespace stripesim

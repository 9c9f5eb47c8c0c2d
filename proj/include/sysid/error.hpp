/*
 Copyright 2026 The sysid Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef SYSID_ERROR_HPP
#define SYSID_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace sysid {

enum class ErrorCode {
  DimensionMismatch,
  InvalidArgument,
  ZeroDenominator,
  SingularGram,
  InvalidDelta,
  NegativeDeviation,
  DomainExceeded,
  InvalidBlock,
  NotUnitVector,
  NotOrdered,
  UnstableRho,
  TooFewSamples,
  SingularRegularizer,
  NonPositiveValue,
  IntegrationDivergence,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code);

/**
 * @brief Exception carrying a machine-readable error code.
 *
 * what() is prefixed with the code name, e.g. "SingularGram: ...".
 */
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

// Throws InvalidDelta unless delta is in (0, 1].
void require_delta(double delta, std::string_view where);

} // namespace sysid

#endif // SYSID_ERROR_HPP

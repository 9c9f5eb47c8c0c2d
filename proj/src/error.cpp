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
#include "sysid/error.hpp"

#include <cmath>

namespace sysid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::ZeroDenominator: return "ZeroDenominator";
  case ErrorCode::SingularGram: return "SingularGram";
  case ErrorCode::InvalidDelta: return "InvalidDelta";
  case ErrorCode::NegativeDeviation: return "NegativeDeviation";
  case ErrorCode::DomainExceeded: return "DomainExceeded";
  case ErrorCode::InvalidBlock: return "InvalidBlock";
  case ErrorCode::NotUnitVector: return "NotUnitVector";
  case ErrorCode::NotOrdered: return "NotOrdered";
  case ErrorCode::UnstableRho: return "UnstableRho";
  case ErrorCode::TooFewSamples: return "TooFewSamples";
  case ErrorCode::SingularRegularizer: return "SingularRegularizer";
  case ErrorCode::NonPositiveValue: return "NonPositiveValue";
  case ErrorCode::IntegrationDivergence: return "IntegrationDivergence";
  case ErrorCode::Config: return "Config";
  case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

void require_delta(double delta, std::string_view where) {
  if (!(delta > 0.0 && delta <= 1.0) || std::isnan(delta)) {
    throw Error(ErrorCode::InvalidDelta,
                std::string(where) + ": delta must lie in (0, 1], got " + std::to_string(delta));
  }
}

} // namespace sysid

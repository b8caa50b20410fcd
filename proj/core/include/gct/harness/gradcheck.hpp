// Copyright 2026 The gctransfer Authors
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

#include <cstdint>
#include <string>
#include <vector>

namespace gct::harness {

struct GradcheckOptions {
  std::uint64_t seed = 7;
  double step = 1e-5;
  double tolerance = 1e-4;
  /// Denominator floor of the relative error. Central differences of an
  /// O(1) loss carry ~1e-10 of rounding noise, so tiny gradients are judged
  /// against this floor instead of their own magnitude.
  double floor = 1e-5;
  /// Name of a case whose output gradient is negated (mutation sanity).
  std::string flip_sign_of;
};

struct GradcheckCase {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;  // elements sitting on a kink
  bool passed = false;
};

struct GradcheckReport {
  std::vector<GradcheckCase> cases;
  bool passed() const;
  const GradcheckCase& at(const std::string& name) const;
};

/// Names of every case in run order.
std::vector<std::string> gradcheck_case_names();

/// Double-precision central differences against the analytic gradients of
/// each op, each loss and the composed network (both architectures, one case
/// per parameter group).
GradcheckReport run_gradcheck(const GradcheckOptions& options = {});

/// Tab-separated: case, max_rel_error, checked, skipped, PASS|FAIL.
std::string format_report(const GradcheckReport& report);

}  // namespace gct::harness

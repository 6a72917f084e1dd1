/* Copyright 2026 The kex Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kex/binning.h"

#include <algorithm>

#include "kex/error.h"

namespace kex {

std::vector<double> EqualFrequencyCuts(std::span<const double> values,
                                       size_t bins) {
  if (bins < 1) throw Error("need at least one bin");
  std::vector<double> cuts;
  if (values.empty()) return cuts;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  for (size_t k = 1; k < bins; ++k) {
    cuts.push_back(sorted[k * sorted.size() / bins]);
  }
  return cuts;
}

size_t BinIndex(std::span<const double> cuts, double value) {
  return static_cast<size_t>(
      std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

}  // namespace kex

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

#ifndef KEX_BINNING_H_
#define KEX_BINNING_H_

#include <cstddef>
#include <span>
#include <vector>

namespace kex {

// Cut points for `bins` equal-frequency bins over `values`: the values at
// ranks k * n / bins for k = 1 .. bins - 1 of the sorted sample. Tied
// values can make bins empty; bin indices remain in [0, bins).
std::vector<double> EqualFrequencyCuts(std::span<const double> values,
                                       size_t bins);

// Index of the bin holding `value`: the number of cut points <= value.
size_t BinIndex(std::span<const double> cuts, double value);

}  // namespace kex

#endif  // KEX_BINNING_H_

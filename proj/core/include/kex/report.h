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

// Rendering of experiment results: wide TSV and aligned text tables, timing
// ratios, ablation tables and ranked extraction lists.

#ifndef KEX_REPORT_H_
#define KEX_REPORT_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kex/crf_features.h"
#include "kex/experiment.h"

namespace kex {

// One line of a results table: a method at one N, with P/R/F1 (percent)
// per variant. Cells of failed runs are missing.
struct ResultLine {
  std::string method;
  std::string top_n;  // "3", ..., or "all"
  std::map<std::string, Prf> cells;
};

struct ResultsTable {
  std::vector<std::string> variants;  // column order
  std::vector<ResultLine> lines;      // row order
};

// Groups matrix rows by (method, N) in first-seen order. Variant columns
// follow first appearance.
ResultsTable BuildResultsTable(std::span<const MatrixRow> rows);

// Columns: method, top_n, then {V}_P, {V}_R, {V}_F1 per variant (percent,
// two decimals, "NA" when missing), then best_variant (highest F1, first
// column wins ties). Empty input yields the header line only.
std::string ResultsToTsv(const ResultsTable& table);
ResultsTable ParseResultsTsv(std::string_view tsv);

// The same table aligned for reading; the best F1 of each row carries a
// trailing '*'.
std::string ResultsToText(const ResultsTable& table);

// Pairs the F1 of `variant_a` in `a` with the F1 of `variant_b` in `b`,
// row by row on (method, top_n). Throws kex::Error listing every row key
// that is missing on either side.
std::vector<std::pair<double, double>> PairF1(const ResultsTable& a,
                                              const std::string& variant_a,
                                              const ResultsTable& b,
                                              const std::string& variant_b);

// Two numeric columns (a, b) per line; '#' lines and a non-numeric first
// line (header) are skipped.
std::vector<std::pair<double, double>> ParsePairsTsv(std::string_view tsv);

struct TimingLine {
  std::string method;
  std::string variant;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
  // Relative to the TA variant of the same method. No train ratio for
  // methods that never train.
  std::optional<double> train_ratio;
  double test_ratio = 1.0;
};

// Throws kex::Error when a method has no TA entry or a zero TA time.
std::vector<TimingLine> TimingRatios(std::span<const CellTiming> timings);

// method,variant,train_s,test_s,train_ratio,test_ratio with ratios to one
// decimal.
std::string TimingToCsv(std::span<const TimingLine> lines);

// removed, f1, delta, positive rows plus baseline and selection lines.
std::string AblationToTsv(const AblationResult& result);

// doc_id, rank, phrase, weight; `top_n` = 0 writes every phrase.
std::string ExtractionsToTsv(std::span<const DocumentExtraction> extractions,
                             size_t top_n);

// Reads the ExtractionsToTsv format back; phrases keep file order within
// each document.
std::vector<DocumentExtraction> ParseExtractionsTsv(std::string_view tsv);

// method, variant, message.
std::string ErrorsToTsv(std::span<const CellError> errors);

}  // namespace kex

#endif  // KEX_REPORT_H_

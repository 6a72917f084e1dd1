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

// First-order linear-chain CRF over the five keyphrase tags.
//
// Feature functions are indicator pairs (observation attribute, tag) plus
// tag-bigram transitions. Transitions that would produce a malformed
// keyphrase run are masked to -inf. Start and end positions are not
// constrained; strict span decoding drops any dangling run.

#ifndef KEX_CRF_H_
#define KEX_CRF_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kex {

// Fixed index order; lower indices win ties during decoding.
enum class Tag : uint8_t { kS = 0, kB = 1, kM = 2, kE = 3, kN = 4 };

inline constexpr size_t kNumTags = 5;
inline constexpr std::array<Tag, kNumTags> kAllTags = {Tag::kS, Tag::kB,
                                                       Tag::kM, Tag::kE,
                                                       Tag::kN};

inline size_t TagIndex(Tag tag) { return static_cast<size_t>(tag); }

// "key_S", "key_B", "key_M", "key_E", "key_N".
std::string_view TagName(Tag tag);
std::optional<Tag> ParseTag(std::string_view name);

// B and M must be followed by M or E; S, E and N by S, B or N.
bool IsLegalTransition(Tag prev, Tag next);
bool IsLegalSequence(std::span<const Tag> tags);

// Tags every leftmost-longest, non-overlapping occurrence of a gold lemma
// sequence as key_S or key_B key_M* key_E; everything else is key_N.
std::vector<Tag> EncodeTags(std::span<const std::string> lemmas,
                            std::span<const std::vector<std::string>> gold);

// Phrases (space-joined lemmas) of the well-formed runs key_S and
// key_B key_M* key_E. Malformed fragments are dropped.
std::set<std::string> DecodeSpans(std::span<const Tag> tags,
                                  std::span<const std::string> lemmas);

// A sequence compiled against a model's attribute registry.
struct CrfInstance {
  std::vector<std::vector<uint32_t>> attributes;  // per position
  std::vector<Tag> tags;                          // empty when unlabeled
  std::string id;

  size_t size() const { return attributes.size(); }
};

class CrfModel {
 public:
  static constexpr size_t kTransitionWeights = kNumTags * kNumTags;

  static size_t TransitionIndex(Tag prev, Tag next) {
    return TagIndex(prev) * kNumTags + TagIndex(next);
  }
  static size_t StateIndex(uint32_t attribute, Tag tag) {
    return kTransitionWeights + attribute * kNumTags + TagIndex(tag);
  }

  // Registers an attribute, growing the weight vector with zeros.
  uint32_t AddAttribute(std::string_view name);
  std::optional<uint32_t> FindAttribute(std::string_view name) const;
  size_t num_attributes() const { return attribute_names_.size(); }
  const std::vector<std::string>& attribute_names() const {
    return attribute_names_;
  }

  size_t num_weights() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<double>& mutable_weights() { return weights_; }
  void set_weights(std::vector<double> weights);

  double l2() const { return l2_; }
  void set_l2(double l2);

  // Free-form key/value pairs persisted with the model.
  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const {
    return metadata_;
  }

  // Maps attribute names to ids. Unknown names are registered when `grow`
  // is true and skipped otherwise.
  CrfInstance Compile(const std::vector<std::vector<std::string>>& attributes,
                      std::vector<Tag> tags, std::string id, bool grow);
  // Compile without growing the registry; unknown names are skipped.
  CrfInstance CompileFrozen(
      const std::vector<std::vector<std::string>>& attributes,
      std::vector<Tag> tags, std::string id) const;

  void Save(std::ostream& out) const;
  static CrfModel Load(std::istream& in);

 private:
  std::vector<std::string> attribute_names_;
  std::unordered_map<std::string, uint32_t> attribute_ids_;
  std::vector<double> weights_ = std::vector<double>(kTransitionWeights, 0.0);
  double l2_ = 1.0;
  std::map<std::string, std::string> metadata_;
};

// Unnormalized log score of a tag sequence; -inf if any transition is
// illegal.
double SequenceScore(const CrfModel& model, const CrfInstance& instance,
                     std::span<const Tag> tags);

// log Z(x) by the forward recursion in log space.
double LogPartition(const CrfModel& model, const CrfInstance& instance);

struct NllGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

// sum over instances of [log Z(x) - score(y)] + l2/2 |w|^2 and its gradient
// (expected minus empirical feature counts plus l2 * w). Throws kex::Error
// naming the instance on a non-finite intermediate.
NllGradient NllAndGradient(const CrfModel& model,
                           std::span<const CrfInstance> batch);

// Highest-scoring legal tag sequence. Ties go to the lowest tag index.
std::vector<Tag> ViterbiDecode(const CrfModel& model,
                               const CrfInstance& instance);

struct CrfTrainOptions {
  double l2 = 1.0;
  int max_epochs = 200;
  double gradient_tolerance = 1e-4;
  uint64_t seed = 0;
};

struct CrfTrainReport {
  int epochs = 0;
  bool converged = false;
  double final_nll = 0.0;
  double gradient_norm = 0.0;  // infinity norm at the final iterate
  std::vector<double> nll_history;  // after each accepted step
};

// Full-batch gradient descent with an Armijo backtracking line search,
// starting from zero weights. Deterministic for fixed input. The model's
// attribute registry must already cover `data`.
CrfTrainReport TrainCrf(CrfModel& model, std::span<const CrfInstance> data,
                        const CrfTrainOptions& options = {});

}  // namespace kex

#endif  // KEX_CRF_H_

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "kiwi/data/batch.hpp"
#include "kiwi/numerics/graph.hpp"

namespace kiwi::models {

enum class WordTask { Mt, Gaps, Source };

std::string task_name(WordTask task);
WordTask parse_task(const std::string& name);

// Which QE side a predictor models as its output language.
enum class Direction { SrcToMt, MtToSrc };

std::string direction_name(Direction d);
Direction parse_direction(const std::string& name);

struct BatchOutput {
  // Scalar loss tensor; null when the batch has no gold for this model or
  // the caller asked for predictions only.
  numerics::TensorPtr loss;
  size_t loss_positions = 0;

  // BAD probability per labeled position, one vector per sentence
  // (word-level models and the estimator token head).
  std::vector<std::vector<double>> word_bad_probs;

  // Sentence quality estimates in [0, 1] (estimator only).
  std::vector<double> sentence_scores;

  // Token prediction accuracy counts (predictor only).
  size_t tokens_correct = 0;
  size_t tokens_total = 0;
};

class Model {
 public:
  virtual ~Model() = default;

  virtual std::string kind() const = 0;

  // Trainable parameters (excludes a frozen predictor inside an estimator).
  virtual const std::vector<numerics::TensorPtr>& parameters() const = 0;

  // Everything that belongs in a checkpoint, frozen parts included.
  virtual const std::vector<numerics::TensorPtr>& all_parameters() const = 0;

  virtual BatchOutput forward_batch(numerics::Graph& g,
                                    const data::Batch& batch,
                                    bool with_loss) = 0;

  // Architecture section of the checkpoint manifest.
  virtual nlohmann::json manifest() const = 0;

  // Whether gradient clipping applies (recurrent architectures).
  virtual bool recurrent() const = 0;
};

}  // namespace kiwi::models

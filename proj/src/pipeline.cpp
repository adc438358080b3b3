#include "cea/pipeline.hpp"

#include <stdexcept>

namespace cea {

CeiGold derive_cei_gold(const Message& message, const std::vector<DiscourseArgument>& args) {
  if (!message.gold_causality || !*message.gold_causality || !message.gold_explanation_span)
    throw std::runtime_error("message '" + message.id +
                             "' has no gold explanation span");
  if (args.empty()) throw std::invalid_argument("no arguments to align with");

  const auto [span_a, span_b] = *message.gold_explanation_span;
  CeiGold gold;
  gold.labels.assign(args.size(), false);
  std::size_t best_overlap = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::size_t a = message.tokens[args[i].first].start;
    const std::size_t b = message.tokens[args[i].last].end;
    const std::size_t lo = std::max(a, span_a);
    const std::size_t hi = std::min(b, span_b);
    const std::size_t overlap = hi > lo ? hi - lo : 0;
    if (overlap > best_overlap) {  // strict: ties keep the earliest argument
      best_overlap = overlap;
      gold.chosen_argument = static_cast<int>(i);
    }
  }
  if (best_overlap == 0)
    throw std::runtime_error("unalignable gold span in message '" + message.id + "'");
  gold.labels[static_cast<std::size_t>(gold.chosen_argument)] = true;
  return gold;
}

std::string to_string(PipelineMode m) {
  return m == PipelineMode::two_stage ? "two_stage" : "cei_only";
}

PipelineMode pipeline_mode_from_string(const std::string& s) {
  if (s == "two_stage") return PipelineMode::two_stage;
  if (s == "cei_only") return PipelineMode::cei_only;
  throw std::invalid_argument("unknown pipeline mode '" + s + "'");
}

PipelineResult run_pipeline(const Message& message, const ConnectiveLexicon& lexicon,
                            const SentimentLexicon& sentiment, const LinearModel& cp,
                            NeuralModel& cei, PipelineMode mode) {
  PipelineResult result;
  result.args = segment(message, lexicon);

  const FeatureVector features = extract_message_features(message, result.args, sentiment);
  const auto [label, margin] = cp.predict(features);
  result.cp_margin = margin;
  result.causality = label;
  result.explanations.assign(result.args.size(), false);

  if (result.args.empty()) return result;
  if (mode == PipelineMode::two_stage && !label) return result;

  result.cei_invoked = true;
  const auto log_probs = cei.forward_cei(message, result.args);
  for (std::size_t i = 0; i < log_probs.size(); ++i)
    result.explanations[i] = log_probs[i][1] > log_probs[i][0];
  return result;
}

}  // namespace cea

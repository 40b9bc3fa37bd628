#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "axsynth/llm_client.h"

namespace axsynth {

// Lowercased, whitespace-split tokens.
std::vector<std::string> caption_tokens(std::string_view text);

struct CiderResult {
  // Raw consensus scores (0..10 scale) per item and their mean.
  std::vector<double> raw;
  double raw_mean = 0;
  // raw / 10 clamped to [0,1].
  std::vector<double> normalized;
  double mean = 0;
};

// CIDEr-D: 1-4 gram TF-IDF vectors, document frequencies over the reference
// sets, clipped similarity and a Gaussian length penalty (sigma 6). Throws
// ValidationError on mismatched lengths, an empty candidate or an item
// without references.
CiderResult cider(std::span<const std::string> candidates,
                  std::span<const std::vector<std::string>> references);

std::string build_judge_prompt(std::string_view description_1,
                               std::string_view description_2);

// 1 or 0 from the first integer in the reply; nullopt when malformed.
std::optional<int> parse_judge_answer(std::string_view response);

struct JudgeResult {
  double accuracy = 0;
  std::size_t yes = 0, no = 0, malformed = 0;
};

// Each (ground_truth, predicted) pair is sent through `client`; malformed
// replies count as 0. ClientError from the client propagates.
JudgeResult judge_accuracy(
    std::span<const std::pair<std::string, std::string>> pairs,
    ChatClient& client);

struct CaptionReport {
  double cider = 0;
  double cider_raw = 0;
  std::optional<double> judge_accuracy;
  std::optional<std::size_t> judge_malformed;
  std::size_t items = 0;
};

std::string to_json(const CaptionReport& report);

}  // namespace axsynth

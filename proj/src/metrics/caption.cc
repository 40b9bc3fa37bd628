#include "axsynth/metrics/caption.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include "../json_util.h"
#include "../parallel.h"
#include "../text_util.h"
#include "axsynth/errors.h"

namespace axsynth {
namespace {

using NGram = std::vector<std::string>;
using Counts = std::map<NGram, double>;

constexpr int kMaxN = 4;
constexpr double kSigma = 6.0;

Counts precook(const std::string& text) {
  const auto words = caption_tokens(text);
  Counts counts;
  for (int k = 1; k <= kMaxN; ++k) {
    for (std::size_t i = 0; i + k <= words.size(); ++i) {
      counts[NGram(words.begin() + i, words.begin() + i + k)] += 1;
    }
  }
  return counts;
}

struct Vec {
  std::array<std::map<NGram, double>, kMaxN> v;
  std::array<double, kMaxN> norm{};
  double length = 0;
};

}  // namespace

std::vector<std::string> caption_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

CiderResult cider(std::span<const std::string> candidates,
                  std::span<const std::vector<std::string>> references) {
  if (candidates.size() != references.size()) {
    throw ValidationError("cider: candidate and reference counts differ");
  }
  std::vector<Counts> tests;
  std::vector<std::vector<Counts>> refs;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (caption_tokens(candidates[i]).empty()) {
      throw ValidationError("cider: empty candidate at item " + std::to_string(i));
    }
    if (references[i].empty()) {
      throw ValidationError("cider: no references at item " + std::to_string(i));
    }
    tests.push_back(precook(candidates[i]));
    std::vector<Counts> r;
    for (const auto& s : references[i]) r.push_back(precook(s));
    refs.push_back(std::move(r));
  }

  std::map<NGram, double> df;
  for (const auto& rs : refs) {
    std::set<NGram> seen;
    for (const auto& r : rs) {
      for (const auto& [g, _] : r) seen.insert(g);
    }
    for (const auto& g : seen) df[g] += 1;
  }
  const double ref_len = std::log(static_cast<double>(refs.size()));

  auto to_vec = [&](const Counts& counts) {
    Vec out;
    for (const auto& [g, tf] : counts) {
      auto it = df.find(g);
      const double d = std::log(std::max(1.0, it == df.end() ? 0.0 : it->second));
      const std::size_t n = g.size() - 1;
      const double w = tf * (ref_len - d);
      out.v[n][g] = w;
      out.norm[n] += w * w;
      // Length is counted over bigrams, as in the common reference code.
      if (n == 1) out.length += tf;
    }
    for (double& x : out.norm) x = std::sqrt(x);
    return out;
  };

  auto sim = [](const Vec& hyp, const Vec& ref) {
    const double delta = hyp.length - ref.length;
    std::array<double, kMaxN> val{};
    for (int n = 0; n < kMaxN; ++n) {
      for (const auto& [g, h] : hyp.v[n]) {
        auto it = ref.v[n].find(g);
        if (it == ref.v[n].end()) continue;
        val[n] += std::min(h, it->second) * it->second;
      }
      if (hyp.norm[n] != 0 && ref.norm[n] != 0) val[n] /= hyp.norm[n] * ref.norm[n];
      val[n] *= std::exp(-(delta * delta) / (2 * kSigma * kSigma));
    }
    return val;
  };

  CiderResult result;
  for (std::size_t i = 0; i < tests.size(); ++i) {
    const Vec hyp = to_vec(tests[i]);
    std::array<double, kMaxN> score{};
    for (const auto& r : refs[i]) {
      const auto s = sim(hyp, to_vec(r));
      for (int n = 0; n < kMaxN; ++n) score[n] += s[n];
    }
    double avg = 0;
    for (double s : score) avg += s;
    avg /= kMaxN;
    avg /= static_cast<double>(refs[i].size());
    avg *= 10.0;
    result.raw.push_back(avg);
    result.normalized.push_back(std::clamp(avg / 10.0, 0.0, 1.0));
  }
  if (!result.raw.empty()) {
    double a = 0, b = 0;
    for (std::size_t i = 0; i < result.raw.size(); ++i) {
      a += result.raw[i];
      b += result.normalized[i];
    }
    result.raw_mean = a / static_cast<double>(result.raw.size());
    result.mean = b / static_cast<double>(result.raw.size());
  }
  return result;
}

std::string build_judge_prompt(std::string_view description_1,
                               std::string_view description_2) {
  std::string out =
      "You are given two strings that corresponds to the description of the "
      "button. \nDo the following two answers have the same meaning "
      "(correspond to the same button that have the same functionality)? \n"
      "Answer with 1 (yes) or 0 (no). \nDescription 1: ";
  out += description_1;
  out += " \nDescription 2: ";
  out += description_2;
  return out;
}

std::optional<int> parse_judge_answer(std::string_view response) {
  const auto v = detail::first_integer(response);
  if (v && (*v == 0 || *v == 1)) return static_cast<int>(*v);
  return std::nullopt;
}

JudgeResult judge_accuracy(
    std::span<const std::pair<std::string, std::string>> pairs,
    ChatClient& client) {
  std::vector<std::optional<int>> answers(pairs.size());
  detail::parallel_for(pairs.size(), client.max_concurrency(), [&](std::size_t i) {
    answers[i] = parse_judge_answer(
        client.complete(build_judge_prompt(pairs[i].first, pairs[i].second)));
  });
  JudgeResult r;
  for (const auto& a : answers) {
    if (!a) {
      ++r.malformed;
    } else if (*a == 1) {
      ++r.yes;
    } else {
      ++r.no;
    }
  }
  r.accuracy = pairs.empty() ? 0.0
                             : static_cast<double>(r.yes) / static_cast<double>(pairs.size());
  return r;
}

std::string to_json(const CaptionReport& r) {
  detail::Json j = detail::Json::object();
  j["cider"] = r.cider;
  j["cider_raw"] = r.cider_raw;
  j["judge_accuracy"] = r.judge_accuracy ? detail::Json(*r.judge_accuracy) : detail::Json();
  j["judge_malformed"] = r.judge_malformed ? detail::Json(*r.judge_malformed) : detail::Json();
  j["items"] = r.items;
  return j.dump(2);
}

}  // namespace axsynth

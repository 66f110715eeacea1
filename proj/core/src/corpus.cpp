#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>

#include "numgeo/error.hpp"
#include "numgeo/stimuli.hpp"

namespace numgeo {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

struct Word {
  std::size_t begin;
  std::size_t end;
};

std::vector<Word> split_words(std::string_view text) {
  std::vector<Word> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    if (i >= text.size()) break;
    const auto begin = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    words.push_back({begin, i});
  }
  return words;
}

std::string padded(std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*zu", width, n);
  return buf;
}

}  // namespace

std::vector<std::string_view> split_sentences(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  auto push = [&](std::size_t end) {
    auto piece = text.substr(start, end - start);
    const auto first = piece.find_first_not_of(" \t\r\n\f\v");
    if (first != std::string_view::npos) {
      const auto last = piece.find_last_not_of(" \t\r\n\f\v");
      out.push_back(piece.substr(first, last - first + 1));
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == text.size() || is_space(text[i + 1]))) {
      push(i + 1);
      start = i + 1;
    }
  }
  if (start < text.size()) push(text.size());
  return out;
}

Stimulus insert_number(std::span<const std::string> words, int value, NumberFormat format, std::size_t position,
                       std::string id) {
  if (position > words.size()) {
    throw Error(Errc::invalid_argument, "insertion position " + std::to_string(position) + " beyond segment of " +
                                            std::to_string(words.size()) + " words");
  }
  Stimulus s;
  s.id = std::move(id);
  s.task = TaskId::PseudoSentence;
  s.value = value;
  s.format = format;
  for (std::size_t i = 0; i <= words.size(); ++i) {
    if (i == position) {
      if (!s.text.empty()) s.text += ' ';
      s.target_start = s.text.size();
      s.text += surface_form(value, format);
      s.target_end = s.text.size();
    }
    if (i < words.size()) {
      if (!s.text.empty()) s.text += ' ';
      s.text += words[i];
    }
  }
  return s;
}

std::vector<Stimulus> chunk_pseudo_sentences(std::string_view corpus_text, std::size_t chunks,
                                             std::size_t insertions_per_value, NumberFormat format, RngSeed seed) {
  if (insertions_per_value < 1) throw Error(Errc::invalid_argument, "insertions_per_value must be >= 1");
  const auto words = split_words(corpus_text);
  if (words.size() < chunks * kSegmentWords) {
    throw Error(Errc::corpus_too_small, "corpus has " + std::to_string(words.size()) + " words, " +
                                            std::to_string(chunks) + " segments need " +
                                            std::to_string(chunks * kSegmentWords));
  }
  const std::size_t needed = 9 * insertions_per_value;
  if (chunks < needed) {
    throw Error(Errc::corpus_too_small, std::to_string(chunks) + " segments cannot host " + std::to_string(needed) +
                                            " insertions in distinct segments");
  }

  CounterRng rng(seed, 0);
  std::vector<std::size_t> order(chunks);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order.begin(), order.end());

  // Segment order[k] receives value 1 + k / insertions_per_value.
  std::vector<int> value_of(chunks, 0);
  for (std::size_t k = 0; k < needed; ++k) value_of[order[k]] = static_cast<int>(1 + k / insertions_per_value);

  std::vector<Stimulus> out;
  out.reserve(needed);
  std::vector<std::string> segment(kSegmentWords);
  for (std::size_t c = 0; c < chunks; ++c) {
    if (value_of[c] == 0) continue;
    for (std::size_t w = 0; w < kSegmentWords; ++w) {
      const auto& word = words[c * kSegmentWords + w];
      segment[w] = std::string(corpus_text.substr(word.begin, word.end - word.begin));
    }
    const auto position = static_cast<std::size_t>(rng.below(kSegmentWords + 1));
    std::string id = std::string(to_string(TaskId::PseudoSentence)) + "/" + std::string(to_string(format)) + "/" +
                     std::to_string(value_of[c]) + "/" + padded(c, 5);
    out.push_back(insert_number(segment, value_of[c], format, position, std::move(id)));
  }
  validate_stimuli(out);
  return out;
}

bool HarvestResult::shortage() const noexcept {
  return std::any_of(counts.begin(), counts.end(), [&](std::size_t c) { return c < per_value; });
}

std::vector<int> HarvestResult::short_values() const {
  std::vector<int> out;
  for (int v = 1; v <= 9; ++v) {
    if (counts[v - 1] < per_value) out.push_back(v);
  }
  return out;
}

HarvestResult harvest_real_sentences(std::string_view corpus_text, std::size_t per_value, NumberFormat format) {
  if (per_value < 1) throw Error(Errc::invalid_argument, "per_value must be >= 1");
  HarvestResult result;
  result.per_value = per_value;

  for (auto sentence : split_sentences(corpus_text)) {
    const auto words = split_words(sentence);
    std::array<bool, 9> used{};
    for (std::size_t w = 0; w < words.size(); ++w) {
      auto core_begin = words[w].begin;
      auto core_end = words[w].end;
      while (core_begin < core_end && is_punct(sentence[core_begin])) ++core_begin;
      while (core_end > core_begin && is_punct(sentence[core_end - 1])) --core_end;
      if (core_begin == core_end) continue;
      const auto value = parse_surface(sentence.substr(core_begin, core_end - core_begin), format);
      if (!value || *value < 1 || *value > 9) continue;
      const auto slot = static_cast<std::size_t>(*value - 1);
      if (used[slot] || result.counts[slot] >= per_value) continue;
      used[slot] = true;

      // Seven-word window, centred on the match where the sentence allows.
      const std::size_t span = std::min(words.size(), kSegmentWords);
      const std::size_t latest = words.size() - span;
      const std::size_t first = std::min(w > 3 ? w - 3 : 0, latest);
      const std::size_t window_begin = words[first].begin;
      const std::size_t window_end = words[first + span - 1].end;

      Stimulus s;
      s.id = std::string(to_string(TaskId::RealSentence)) + "/" + std::string(to_string(format)) + "/" +
             std::to_string(*value) + "/" + padded(result.counts[slot], 3);
      s.task = TaskId::RealSentence;
      s.value = *value;
      s.format = format;
      s.text = std::string(sentence.substr(window_begin, window_end - window_begin));
      s.target_start = core_begin - window_begin;
      s.target_end = core_end - window_begin;
      result.stimuli.push_back(std::move(s));
      ++result.counts[slot];
    }
  }
  validate_stimuli(result.stimuli);
  return result;
}

}  // namespace numgeo

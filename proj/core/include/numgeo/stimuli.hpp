#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numgeo/rng.hpp"

namespace numgeo {

enum class TaskId {
  Quantity,
  ComparisonGreater,
  ComparisonSmaller,
  AdditionPre,
  AdditionPost,
  MultiplicationPre,
  MultiplicationPost,
  Parity,
  Primality,
  Successor,
  Predecessor,
  PseudoSentence,
  RealSentence,
};

inline constexpr std::array<TaskId, 13> kAllTasks = {
    TaskId::Quantity,          TaskId::ComparisonGreater,  TaskId::ComparisonSmaller,
    TaskId::AdditionPre,       TaskId::AdditionPost,       TaskId::MultiplicationPre,
    TaskId::MultiplicationPost, TaskId::Parity,            TaskId::Primality,
    TaskId::Successor,         TaskId::Predecessor,        TaskId::PseudoSentence,
    TaskId::RealSentence,
};

/// The tasks rendered from sentence templates (everything except the two corpora).
inline constexpr std::array<TaskId, 11> kTemplateTasks = {
    TaskId::Quantity,          TaskId::ComparisonGreater, TaskId::ComparisonSmaller,
    TaskId::AdditionPre,       TaskId::AdditionPost,      TaskId::MultiplicationPre,
    TaskId::MultiplicationPost, TaskId::Parity,           TaskId::Primality,
    TaskId::Successor,         TaskId::Predecessor,
};

std::string_view to_string(TaskId task) noexcept;
std::optional<TaskId> try_parse_task(std::string_view name) noexcept;
/// Throws Error(invalid_argument) on unknown names.
TaskId parse_task(std::string_view name);

constexpr bool is_template_task(TaskId task) noexcept {
  return task != TaskId::PseudoSentence && task != TaskId::RealSentence;
}

/// Parity and primality encode categories rather than magnitude.
constexpr bool is_property_task(TaskId task) noexcept {
  return task == TaskId::Parity || task == TaskId::Primality;
}

enum class NumberFormat { Digit, Word };

inline constexpr std::array<NumberFormat, 2> kAllFormats = {NumberFormat::Digit, NumberFormat::Word};

std::string_view to_string(NumberFormat format) noexcept;
std::optional<NumberFormat> try_parse_format(std::string_view name) noexcept;
NumberFormat parse_format(std::string_view name);

/// Surface form of a number in 0..99: "3" or "three", "21" or "twenty-one".
std::string surface_form(int value, NumberFormat format);
/// Inverse of surface_form over 0..99; nullopt when the text is not an exact surface form.
std::optional<int> parse_surface(std::string_view text, NumberFormat format);

bool is_prime(int value) noexcept;

struct Stimulus {
  std::string id;
  TaskId task = TaskId::Quantity;
  int value = 0;
  NumberFormat format = NumberFormat::Digit;
  std::string text;
  std::size_t target_start = 0;  // byte offsets into text, half-open
  std::size_t target_end = 0;

  std::string_view target() const { return std::string_view(text).substr(target_start, target_end - target_start); }
};

/// Checks span validity, span/value agreement and id uniqueness.
/// Throws Error(invalid_argument) or Error(duplicate_id).
void validate_stimuli(std::span<const Stimulus> stimuli);

// ---------------------------------------------------------------------------
// Templates

inline constexpr std::size_t kTemplatesPerTask = 5;

/// Five sentence templates per template task. Placeholders: {N} target,
/// {C} and {C2} context numbers, {P} "odd"/"even", {Q} "prime"/"non-prime".
class TemplateSet {
 public:
  TemplateSet() = default;
  explicit TemplateSet(std::map<TaskId, std::vector<std::string>> templates);

  /// The versioned set shipped with the library (also in data/templates.json).
  static TemplateSet builtin();
  static TemplateSet from_json(std::string_view json_text);
  /// Throws Error(io) when the file is missing or unreadable.
  static TemplateSet load(const std::filesystem::path& path);

  std::string to_json() const;
  int version() const noexcept { return version_; }

  bool contains(TaskId task) const { return templates_.contains(task); }
  const std::vector<std::string>& for_task(TaskId task) const;

 private:
  std::map<TaskId, std::vector<std::string>> templates_;
  int version_ = 1;
};

/// Renders one template for (task, value, format). Context numbers are chosen
/// so the sentence is true; only the target is constrained to 1..9.
/// Throws Error(template_inconsistency) naming task, value and template.
Stimulus render_stimulus(const TemplateSet& templates, TaskId task, int value, NumberFormat format,
                         std::size_t template_index, std::string id);

std::string task_stimulus_id(TaskId task, NumberFormat format, int value, std::size_t index);

/// |tasks| x |values| x |formats| x 5 stimuli in (task, format, value, template) order.
std::vector<Stimulus> generate_task_stimuli(const TemplateSet& templates, std::span<const TaskId> tasks,
                                            std::span<const int> values, std::span<const NumberFormat> formats);

// ---------------------------------------------------------------------------
// Corpus-derived stimuli

inline constexpr std::size_t kSegmentWords = 7;

/// Inserts the number at word boundary `position` (0..words.size()) of a segment.
Stimulus insert_number(std::span<const std::string> words, int value, NumberFormat format, std::size_t position,
                       std::string id);

/// Chunks the corpus into consecutive seven-word segments and inserts each of
/// the values 1..9 into `insertions_per_value` distinct segments at a uniformly
/// random boundary. Returns 9 * insertions_per_value stimuli, one per segment.
/// Throws Error(corpus_too_small) when chunks * 7 words are not available or
/// chunks < 9 * insertions_per_value.
std::vector<Stimulus> chunk_pseudo_sentences(std::string_view corpus_text, std::size_t chunks,
                                             std::size_t insertions_per_value, NumberFormat format, RngSeed seed);

struct HarvestResult {
  std::vector<Stimulus> stimuli;
  std::array<std::size_t, 9> counts{};  // counts[v - 1]
  std::size_t per_value = 0;

  bool shortage() const noexcept;
  std::vector<int> short_values() const;
};

/// Picks, in corpus order, up to per_value sentences that contain the value's
/// surface form as a standalone word, trimmed to a window of at most seven words.
HarvestResult harvest_real_sentences(std::string_view corpus_text, std::size_t per_value, NumberFormat format);

/// Splits on '.', '!' or '?' followed by whitespace or end of text.
std::vector<std::string_view> split_sentences(std::string_view text);

// ---------------------------------------------------------------------------
// JSON-lines interchange

std::string to_json_line(const Stimulus& stimulus);
Stimulus parse_stimulus_line(std::string_view line);

void write_stimuli(std::span<const Stimulus> stimuli, const std::filesystem::path& path);
std::vector<Stimulus> read_stimuli(const std::filesystem::path& path);

}  // namespace numgeo

#include "numgeo/stimuli.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "numgeo/error.hpp"

namespace numgeo {

namespace {

constexpr std::array<std::string_view, 20> kOnes = {
    "zero",    "one",     "two",       "three",    "four",     "five",    "six",
    "seven",   "eight",   "nine",      "ten",      "eleven",   "twelve",  "thirteen",
    "fourteen", "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen"};
constexpr std::array<std::string_view, 10> kTens = {"",      "",      "twenty",  "thirty", "forty",
                                                    "fifty", "sixty", "seventy", "eighty", "ninety"};

constexpr int kMaxSurface = 99;

}  // namespace

std::string_view to_string(TaskId task) noexcept {
  switch (task) {
    case TaskId::Quantity: return "quantity";
    case TaskId::ComparisonGreater: return "comparison_greater";
    case TaskId::ComparisonSmaller: return "comparison_smaller";
    case TaskId::AdditionPre: return "addition_pre";
    case TaskId::AdditionPost: return "addition_post";
    case TaskId::MultiplicationPre: return "multiplication_pre";
    case TaskId::MultiplicationPost: return "multiplication_post";
    case TaskId::Parity: return "parity";
    case TaskId::Primality: return "primality";
    case TaskId::Successor: return "successor";
    case TaskId::Predecessor: return "predecessor";
    case TaskId::PseudoSentence: return "pseudo_sentence";
    case TaskId::RealSentence: return "real_sentence";
  }
  return "unknown";
}

std::optional<TaskId> try_parse_task(std::string_view name) noexcept {
  for (auto task : kAllTasks) {
    if (to_string(task) == name) return task;
  }
  return std::nullopt;
}

TaskId parse_task(std::string_view name) {
  if (auto task = try_parse_task(name)) return *task;
  throw Error(Errc::invalid_argument, "unknown task '" + std::string(name) + "'");
}

std::string_view to_string(NumberFormat format) noexcept {
  return format == NumberFormat::Digit ? "digit" : "word";
}

std::optional<NumberFormat> try_parse_format(std::string_view name) noexcept {
  if (name == "digit") return NumberFormat::Digit;
  if (name == "word") return NumberFormat::Word;
  return std::nullopt;
}

NumberFormat parse_format(std::string_view name) {
  if (auto format = try_parse_format(name)) return *format;
  throw Error(Errc::invalid_argument, "unknown number format '" + std::string(name) + "'");
}

std::string surface_form(int value, NumberFormat format) {
  if (value < 0 || value > kMaxSurface) {
    throw Error(Errc::invalid_argument, "no surface form for " + std::to_string(value));
  }
  if (format == NumberFormat::Digit) return std::to_string(value);
  if (value < 20) return std::string(kOnes[value]);
  std::string out(kTens[value / 10]);
  if (value % 10 != 0) {
    out += '-';
    out += kOnes[value % 10];
  }
  return out;
}

std::optional<int> parse_surface(std::string_view text, NumberFormat format) {
  // The surface vocabulary is tiny, so an exhaustive match is exact and cheap.
  for (int v = 0; v <= kMaxSurface; ++v) {
    if (surface_form(v, format) == text) return v;
  }
  return std::nullopt;
}

bool is_prime(int value) noexcept {
  if (value < 2) return false;
  for (int d = 2; d * d <= value; ++d) {
    if (value % d == 0) return false;
  }
  return true;
}

void validate_stimuli(std::span<const Stimulus> stimuli) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(stimuli.size());
  for (const auto& s : stimuli) {
    if (s.value < 1 || s.value > 9) {
      throw Error(Errc::invalid_argument, "stimulus " + s.id + ": value outside 1..9");
    }
    if (s.target_start >= s.target_end || s.target_end > s.text.size()) {
      throw Error(Errc::invalid_argument, "stimulus " + s.id + ": target span out of range");
    }
    if (parse_surface(s.target(), s.format) != s.value) {
      throw Error(Errc::invalid_argument, "stimulus " + s.id + ": target '" + std::string(s.target()) +
                                              "' is not the " + std::string(to_string(s.format)) +
                                              " form of " + std::to_string(s.value));
    }
    if (!seen.insert(s.id).second) {
      throw Error(Errc::duplicate_id, "stimulus id '" + s.id + "' appears more than once");
    }
  }
}

// ---------------------------------------------------------------------------
// Rendering

namespace {

struct Context {
  std::optional<int> c;
  std::optional<int> c2;
};

Context context_for(TaskId task, int n) {
  switch (task) {
    case TaskId::ComparisonGreater:
    case TaskId::Successor: return {n - 1, std::nullopt};
    case TaskId::ComparisonSmaller:
    case TaskId::Predecessor: return {n + 1, std::nullopt};
    case TaskId::AdditionPre:
    case TaskId::AdditionPost: return {0, n};
    case TaskId::MultiplicationPre:
    case TaskId::MultiplicationPost: return {1, n};
    default: return {};
  }
}

[[noreturn]] void inconsistent(TaskId task, int value, std::size_t index, const std::string& what) {
  throw Error(Errc::template_inconsistency, "task " + std::string(to_string(task)) + ", value " +
                                                std::to_string(value) + ", template " + std::to_string(index) +
                                                ": " + what);
}

}  // namespace

std::string task_stimulus_id(TaskId task, NumberFormat format, int value, std::size_t index) {
  std::ostringstream os;
  os << to_string(task) << '/' << to_string(format) << '/' << value << '/' << index;
  return os.str();
}

Stimulus render_stimulus(const TemplateSet& templates, TaskId task, int value, NumberFormat format,
                         std::size_t template_index, std::string id) {
  if (!is_template_task(task)) inconsistent(task, value, template_index, "corpus tasks have no templates");
  if (value < 1 || value > 9) inconsistent(task, value, template_index, "target must lie in 1..9");
  if (!templates.contains(task)) inconsistent(task, value, template_index, "no templates for task");
  const auto& list = templates.for_task(task);
  if (template_index >= list.size()) inconsistent(task, value, template_index, "template index out of range");

  const std::string_view tmpl = list[template_index];
  const Context ctx = context_for(task, value);

  auto context_text = [&](std::string_view name) -> std::string {
    std::optional<int> number;
    if (name == "C") {
      number = ctx.c;
    } else if (name == "C2") {
      number = ctx.c2;
    } else if (name == "P") {
      if (task != TaskId::Parity) inconsistent(task, value, template_index, "{P} is only defined for parity");
      return value % 2 == 1 ? "odd" : "even";
    } else if (name == "Q") {
      if (task != TaskId::Primality) inconsistent(task, value, template_index, "{Q} is only defined for primality");
      return is_prime(value) ? "prime" : "non-prime";
    } else {
      inconsistent(task, value, template_index, "unknown placeholder {" + std::string(name) + "}");
    }
    if (!number) inconsistent(task, value, template_index, "placeholder {" + std::string(name) + "} undefined for task");
    if (*number < 0 || *number > kMaxSurface) {
      inconsistent(task, value, template_index, "context number " + std::to_string(*number) + " has no surface form");
    }
    return surface_form(*number, format);
  };

  Stimulus out;
  out.id = std::move(id);
  out.task = task;
  out.value = value;
  out.format = format;

  bool have_target = false;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string_view::npos) {
      out.text.append(tmpl.substr(pos));
      break;
    }
    out.text.append(tmpl.substr(pos, open - pos));
    const auto close = tmpl.find('}', open);
    if (close == std::string_view::npos) inconsistent(task, value, template_index, "unterminated placeholder");
    const auto name = tmpl.substr(open + 1, close - open - 1);
    if (name == "N") {
      if (have_target) inconsistent(task, value, template_index, "{N} appears more than once");
      if (out.text.empty()) inconsistent(task, value, template_index, "{N} may not open the sentence");
      have_target = true;
      out.target_start = out.text.size();
      out.text += surface_form(value, format);
      out.target_end = out.text.size();
    } else {
      auto text = context_text(name);
      if (out.text.empty() && !text.empty()) {
        text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
      }
      out.text += text;
    }
    pos = close + 1;
  }
  if (!have_target) inconsistent(task, value, template_index, "template has no {N}");
  return out;
}

std::vector<Stimulus> generate_task_stimuli(const TemplateSet& templates, std::span<const TaskId> tasks,
                                            std::span<const int> values, std::span<const NumberFormat> formats) {
  std::vector<Stimulus> out;
  out.reserve(tasks.size() * values.size() * formats.size() * kTemplatesPerTask);
  for (auto task : tasks) {
    if (!is_template_task(task)) {
      throw Error(Errc::invalid_argument, std::string(to_string(task)) + " is generated from a corpus, not templates");
    }
    for (auto format : formats) {
      for (int value : values) {
        if (value < 1 || value > 9) {
          throw Error(Errc::invalid_argument, "value " + std::to_string(value) + " outside 1..9");
        }
        for (std::size_t t = 0; t < templates.for_task(task).size(); ++t) {
          out.push_back(render_stimulus(templates, task, value, format, t, task_stimulus_id(task, format, value, t)));
        }
      }
    }
  }
  validate_stimuli(out);
  return out;
}

// ---------------------------------------------------------------------------
// JSON lines

std::string to_json_line(const Stimulus& s) {
  nlohmann::ordered_json j;
  j["id"] = s.id;
  j["task"] = std::string(to_string(s.task));
  j["value"] = s.value;
  j["format"] = std::string(to_string(s.format));
  j["text"] = s.text;
  j["target_start"] = s.target_start;
  j["target_end"] = s.target_end;
  return j.dump();
}

Stimulus parse_stimulus_line(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    Stimulus s;
    s.id = j.at("id").get<std::string>();
    s.task = parse_task(j.at("task").get<std::string>());
    s.value = j.at("value").get<int>();
    s.format = parse_format(j.at("format").get<std::string>());
    s.text = j.at("text").get<std::string>();
    s.target_start = j.at("target_start").get<std::size_t>();
    s.target_end = j.at("target_end").get<std::size_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_argument, std::string("malformed stimulus line: ") + e.what());
  }
}

void write_stimuli(std::span<const Stimulus> stimuli, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
  for (const auto& s : stimuli) out << to_json_line(s) << '\n';
  if (!out) throw Error(Errc::io, "failed writing " + path.string());
}

std::vector<Stimulus> read_stimuli(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open stimuli file " + path.string());
  std::vector<Stimulus> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_stimulus_line(line));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate_stimuli(out);
  return out;
}

}  // namespace numgeo

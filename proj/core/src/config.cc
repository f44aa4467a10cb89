#include "fgprop/config.h"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fgprop/corpus.h"
#include "fgprop/error.h"

namespace fgprop {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char *end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error("bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  // std::from_chars for double is missing from older libstdc++.
  std::string s(value);
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(out)) {
    throw Error("bad value '" + s + "' for " + std::string(key));
  }
  return out;
}

std::string format_real(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string_view task_name(Task t) { return t == Task::kFlc ? "flc" : "slc"; }

std::optional<Task> parse_task(std::string_view name) {
  if (name == "flc") return Task::kFlc;
  if (name == "slc") return Task::kSlc;
  return std::nullopt;
}

double ExperimentConfig::resolved_alpha() const {
  if (architecture == Architecture::kBertSingle) {
    return task == Task::kSlc ? 1.0 : 0.0;
  }
  if (alpha) return *alpha;
  return task == Task::kSlc ? 0.9 : 0.1;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    seeds.push_back(parse_number<std::uint64_t>("seeds", item));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (seeds.empty()) throw Error("seed list is empty");
  return seeds;
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "task") {
    auto t = parse_task(value);
    if (!t) throw Error("task must be flc or slc, got '" + std::string(value) + "'");
    task = *t;
  } else if (key == "architecture") {
    auto a = parse_architecture(value);
    if (!a) {
      throw Error("architecture must be one of bert_single, bert_joint, "
                  "bert_granularity, mgn; got '" + std::string(value) + "'");
    }
    architecture = *a;
  } else if (key == "gate") {
    auto g = parse_gate_activation(value);
    if (!g) throw Error("gate must be relu or sigmoid, got '" + std::string(value) + "'");
    gate = *g;
  } else if (key == "alpha") {
    if (value == "auto") {
      alpha.reset();
    } else {
      alpha = parse_real(key, value);
    }
  } else if (key == "seeds") {
    seeds = parse_seed_list(value);
  } else if (key == "learning_rate") {
    learning_rate = parse_real(key, value);
  } else if (key == "weight_decay") {
    weight_decay = parse_real(key, value);
  } else if (key == "warmup_proportion") {
    warmup_proportion = parse_real(key, value);
  } else if (key == "batch_size") {
    batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "max_seq_length") {
    max_seq_length = parse_number<std::size_t>(key, value);
  } else if (key == "max_epochs") {
    max_epochs = parse_number<std::size_t>(key, value);
  } else if (key == "patience") {
    patience = parse_number<std::size_t>(key, value);
  } else if (key == "embedding") {
    if (value == "toy") {
      embedding = EmbeddingKind::kToy;
    } else if (value == "file") {
      embedding = EmbeddingKind::kFile;
    } else {
      throw Error("embedding must be toy or file, got '" + std::string(value) + "'");
    }
  } else if (key == "embedding_dim") {
    embedding_dim = parse_number<std::size_t>(key, value);
  } else if (key == "embedding_seed") {
    embedding_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "embedding_file") {
    embedding_file = std::string(value);
  } else if (key == "corpus") {
    corpus = std::string(value);
  } else if (key == "positive_weight") {
    if (value == "auto") {
      positive_weight.reset();
    } else {
      positive_weight = parse_real(key, value);
    }
  } else {
    throw Error("unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw Error("at least one seed is required");
  if (alpha && (*alpha < 0.0 || *alpha > 1.0)) throw Error("alpha must lie in [0, 1]");
  if (learning_rate <= 0) throw Error("learning_rate must be positive");
  if (weight_decay < 0) throw Error("weight_decay must be nonnegative");
  if (warmup_proportion < 0 || warmup_proportion >= 1) {
    throw Error("warmup_proportion must lie in [0, 1)");
  }
  if (batch_size == 0) throw Error("batch_size must be positive");
  if (max_seq_length == 0) throw Error("max_seq_length must be positive");
  if (max_epochs == 0) throw Error("max_epochs must be positive");
  if (embedding == EmbeddingKind::kToy && embedding_dim == 0) {
    throw Error("embedding_dim must be positive");
  }
  if (embedding == EmbeddingKind::kFile && embedding_file.empty()) {
    throw Error("embedding = file needs embedding_file");
  }
  if (positive_weight && *positive_weight <= 0) {
    throw Error("positive_weight must be positive");
  }
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "task = " << task_name(task) << '\n'
     << "architecture = " << architecture_name(architecture) << '\n'
     << "gate = " << gate_activation_name(gate) << '\n'
     << "alpha = " << (alpha ? format_real(*alpha) : "auto") << '\n'
     << "seeds = ";
  for (std::size_t i = 0; i < seeds.size(); ++i) os << (i ? "," : "") << seeds[i];
  os << '\n'
     << "learning_rate = " << format_real(learning_rate) << '\n'
     << "weight_decay = " << format_real(weight_decay) << '\n'
     << "warmup_proportion = " << format_real(warmup_proportion) << '\n'
     << "batch_size = " << batch_size << '\n'
     << "max_seq_length = " << max_seq_length << '\n'
     << "max_epochs = " << max_epochs << '\n'
     << "patience = " << patience << '\n'
     << "embedding = " << (embedding == EmbeddingKind::kToy ? "toy" : "file") << '\n'
     << "embedding_dim = " << embedding_dim << '\n'
     << "embedding_seed = " << embedding_seed << '\n';
  if (!embedding_file.empty()) os << "embedding_file = " << embedding_file.string() << '\n';
  if (!corpus.empty()) os << "corpus = " << corpus.string() << '\n';
  os << "positive_weight = "
     << (positive_weight ? format_real(*positive_weight) : "auto") << '\n';
  return os.str();
}

ExperimentConfig parse_config(std::string_view text, const std::string &source,
                              const std::filesystem::path &base_dir) {
  ExperimentConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(source, line_no, "expected 'key = value'");
    }
    try {
      config.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const FormatError &) {
      throw;
    } catch (const Error &e) {
      throw FormatError(source, line_no, e.what());
    }
  }
  if (!base_dir.empty()) {
    if (!config.corpus.empty() && config.corpus.is_relative()) {
      config.corpus = (base_dir / config.corpus).lexically_normal();
    }
    if (!config.embedding_file.empty() && config.embedding_file.is_relative()) {
      config.embedding_file = (base_dir / config.embedding_file).lexically_normal();
    }
  }
  return config;
}

ExperimentConfig read_config(const std::filesystem::path &path) {
  return parse_config(read_file(path), path.string(), path.parent_path());
}

}  // namespace fgprop

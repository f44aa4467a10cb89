#include "fgprop/corpus.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "fgprop/error.h"
#include "fgprop/parallel.h"
#include "fgprop/utf8.h"

namespace fs = std::filesystem;

namespace fgprop {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' ||
                        s.back() == '\t' || s.back() == '\n')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  return s;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_size(std::string_view s, std::size_t &out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct Row {
  std::string doc_id;
  Fragment fragment;
  std::size_t line;
};

std::vector<Row> parse_rows(std::istream &in, const std::string &source) {
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    while (!view.empty() && (view.back() == '\r' || view.back() == '\n')) {
      view.remove_suffix(1);
    }
    if (trim(view).empty()) continue;
    auto cols = split_tabs(view);
    if (cols.size() != 4) {
      throw FormatError(source, lineno,
                        "expected 4 tab-separated columns <doc_id, technique, "
                        "begin, end>, found " +
                            std::to_string(cols.size()));
    }
    std::string doc_id(trim(cols[0]));
    if (doc_id.empty()) throw FormatError(source, lineno, "empty doc_id");
    auto technique = parse_technique(trim(cols[1]));
    if (!technique) {
      throw FormatError(source, lineno,
                        "unknown technique identifier '" +
                            std::string(trim(cols[1])) +
                            "'; valid identifiers: " + valid_technique_ids());
    }
    std::size_t begin = 0;
    std::size_t end = 0;
    if (!parse_size(cols[2], begin) || !parse_size(cols[3], end)) {
      throw FormatError(source, lineno,
                        "begin/end must be non-negative integers");
    }
    if (end <= begin) {
      throw FormatError(source, lineno,
                        "fragment end " + std::to_string(end) +
                            " must be greater than begin " +
                            std::to_string(begin));
    }
    rows.push_back({std::move(doc_id), Fragment(begin, end, *technique),
                    lineno});
  }
  return rows;
}

std::vector<fs::path> annotation_files(const fs::path &path) {
  std::vector<fs::path> files;
  if (fs::is_regular_file(path)) {
    files.push_back(path);
    return files;
  }
  if (!fs::is_directory(path)) {
    throw Error("annotation path " + path.string() + " does not exist");
  }
  for (const auto &entry : fs::directory_iterator(path)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension();
    if (ext == ".labels" || ext == ".tsv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::ifstream open_input(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

std::vector<std::string> read_id_list(const fs::path &path) {
  auto in = open_input(path);
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    auto id = trim(line);
    if (id.empty() || id.front() == '#') continue;
    ids.emplace_back(id);
  }
  return ids;
}

}  // namespace

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "?";
}

std::optional<Split> parse_split(std::string_view name) {
  for (Split s : kAllSplits) {
    if (split_name(s) == name) return s;
  }
  return std::nullopt;
}

std::vector<std::string> Corpus::ids_in(Split s) const {
  std::vector<std::string> out;
  for (const auto &[id, split_of] : split) {
    if (split_of == s) out.push_back(id);
  }
  return out;
}

const Document &Corpus::document(const std::string &id) const {
  auto it = documents.find(id);
  if (it == documents.end()) throw Error("unknown document " + id);
  return it->second;
}

const AnnotationSet &Corpus::gold_for(const std::string &id) const {
  auto it = gold.find(id);
  if (it == gold.end()) throw Error("no gold annotations for document " + id);
  return it->second;
}

CorpusPaths CorpusPaths::from_root(const fs::path &root) {
  CorpusPaths paths;
  paths.article_dir = root / "articles";
  paths.annotation_dir = root / "labels";
  if (fs::is_directory(root / "split")) paths.split_dir = root / "split";
  if (fs::is_regular_file(root / "sources.tsv")) {
    paths.sources_file = root / "sources.tsv";
  }
  return paths;
}

std::string read_file(const fs::path &path) {
  auto in = open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string doc_id_from_article_path(const fs::path &path) {
  std::string stem = path.stem().string();
  constexpr std::string_view kPrefix = "article";
  if (stem.size() > kPrefix.size() && stem.starts_with(kPrefix)) {
    return stem.substr(kPrefix.size());
  }
  return stem;
}

Corpus load_corpus(const CorpusPaths &paths) {
  if (!fs::is_directory(paths.article_dir)) {
    throw Error("article directory " + paths.article_dir.string() +
                " does not exist");
  }
  std::vector<fs::path> article_files;
  for (const auto &entry : fs::directory_iterator(paths.article_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      article_files.push_back(entry.path());
    }
  }
  std::sort(article_files.begin(), article_files.end());

  std::vector<std::optional<Document>> loaded(article_files.size());
  parallel_for(article_files.size(), [&](std::size_t i) {
    const auto &file = article_files[i];
    std::u32string text;
    try {
      text = utf8_decode(read_file(file));
    } catch (const Error &e) {
      throw FormatError(file.string(), 0, e.what());
    }
    loaded[i].emplace(doc_id_from_article_path(file), std::move(text));
  });

  Corpus corpus;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    std::string id = loaded[i]->id();
    if (corpus.documents.count(id)) {
      throw FormatError(article_files[i].string(), 0,
                        "duplicate document id " + id);
    }
    corpus.gold.emplace(id, AnnotationSet{id, {}});
    corpus.documents.emplace(id, std::move(*loaded[i]));
  }

  if (fs::exists(paths.annotation_dir)) {
    for (const auto &file : annotation_files(paths.annotation_dir)) {
      auto in = open_input(file);
      for (auto &row : parse_rows(in, file.string())) {
        auto doc = corpus.documents.find(row.doc_id);
        if (doc == corpus.documents.end()) {
          throw FormatError(file.string(), row.line,
                            "annotation references unknown document " +
                                row.doc_id);
        }
        if (row.fragment.end() > doc->second.length()) {
          throw FormatError(
              file.string(), row.line,
              "document " + row.doc_id + ": fragment [" +
                  std::to_string(row.fragment.begin()) + "," +
                  std::to_string(row.fragment.end()) +
                  ") exceeds document length " +
                  std::to_string(doc->second.length()));
        }
        corpus.gold[row.doc_id].fragments.push_back(row.fragment);
      }
    }
  }
  for (auto &[id, set] : corpus.gold) set.sort();

  if (paths.split_dir) {
    for (Split s : kAllSplits) {
      fs::path file = *paths.split_dir / (std::string(split_name(s)) + ".txt");
      if (!fs::exists(file)) {
        throw Error("split file " + file.string() + " is missing");
      }
      for (auto &id : read_id_list(file)) {
        auto [it, inserted] = corpus.split.emplace(id, s);
        if (!inserted && it->second != s) {
          throw Error("document " + id + " is assigned to both " +
                      std::string(split_name(it->second)) + " and " +
                      std::string(split_name(s)));
        }
        if (!inserted) {
          throw Error("document " + id + " is listed twice in " +
                      file.string());
        }
      }
    }
  }

  if (paths.sources_file) {
    auto in = open_input(*paths.sources_file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim(line).empty()) continue;
      auto cols = split_tabs(trim(line));
      if (cols.size() != 2) {
        throw FormatError(paths.sources_file->string(), lineno,
                          "expected <doc_id, prop|nonprop>");
      }
      std::string id(trim(cols[0]));
      auto kind = trim(cols[1]);
      SourceKind k;
      if (kind == "prop" || kind == "propagandistic") {
        k = SourceKind::kPropagandistic;
      } else if (kind == "nonprop" || kind == "non-propagandistic") {
        k = SourceKind::kNonPropagandistic;
      } else {
        throw FormatError(paths.sources_file->string(), lineno,
                          "unknown source kind '" + std::string(kind) + "'");
      }
      if (!corpus.documents.count(id)) {
        throw FormatError(paths.sources_file->string(), lineno,
                          "unknown document " + id);
      }
      corpus.sources[id] = k;
    }
  }
  return corpus;
}

void read_annotation_rows(std::istream &in, const std::string &source,
                          Annotations &out) {
  for (auto &row : parse_rows(in, source)) {
    auto &set = out[row.doc_id];
    set.doc_id = row.doc_id;
    set.fragments.push_back(row.fragment);
  }
}

Annotations read_annotations(const fs::path &path) {
  Annotations out;
  for (const auto &file : annotation_files(path)) {
    auto in = open_input(file);
    read_annotation_rows(in, file.string(), out);
  }
  for (auto &[id, set] : out) set.sort();
  return out;
}

void write_annotations(std::ostream &out, const Annotations &annotations) {
  for (const auto &[id, set] : annotations) {
    std::vector<Fragment> sorted = set.fragments;
    std::sort(sorted.begin(), sorted.end());
    for (const auto &f : sorted) {
      out << id << '\t' << technique_id(f.technique()) << '\t' << f.begin()
          << '\t' << f.end() << '\n';
    }
  }
}

void write_annotation_dir(const fs::path &dir,
                          const Annotations &annotations) {
  fs::create_directories(dir);
  for (const auto &[id, set] : annotations) {
    if (set.empty()) continue;
    std::ofstream out(dir / (id + ".labels"), std::ios::binary);
    if (!out) throw Error("cannot write " + (dir / (id + ".labels")).string());
    Annotations one{{id, set}};
    write_annotations(out, one);
  }
}

void write_corpus(const fs::path &root, const Corpus &corpus) {
  fs::create_directories(root / "articles");
  for (const auto &[id, doc] : corpus.documents) {
    std::ofstream out(root / "articles" / ("article" + id + ".txt"),
                      std::ios::binary);
    if (!out) throw Error("cannot write article " + id);
    out << utf8_encode(doc.text());
  }
  write_annotation_dir(root / "labels", corpus.gold);
  if (corpus.has_split()) {
    fs::create_directories(root / "split");
    for (Split s : kAllSplits) {
      std::ofstream out(root / "split" / (std::string(split_name(s)) + ".txt"),
                        std::ios::binary);
      for (const auto &id : corpus.ids_in(s)) out << id << '\n';
    }
  }
  if (!corpus.sources.empty()) {
    std::ofstream out(root / "sources.tsv", std::ios::binary);
    for (const auto &[id, kind] : corpus.sources) {
      out << id << '\t'
          << (kind == SourceKind::kPropagandistic ? "prop" : "nonprop")
          << '\n';
    }
  }
}

SentenceLabelMap read_sentence_labels(const fs::path &path) {
  SentenceLabelMap out;
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty()) continue;
    auto cols = split_tabs(view);
    if (cols.size() != 3) {
      throw FormatError(path.string(), lineno,
                        "expected 3 tab-separated columns <doc_id, "
                        "sentence_index, propaganda|non-propaganda>");
    }
    std::size_t index = 0;
    if (!parse_size(cols[1], index)) {
      throw FormatError(path.string(), lineno,
                        "sentence index must be a non-negative integer");
    }
    auto label = trim(cols[2]);
    bool positive;
    if (label == "propaganda") {
      positive = true;
    } else if (label == "non-propaganda") {
      positive = false;
    } else {
      throw FormatError(path.string(), lineno,
                        "label must be propaganda or non-propaganda, got '" +
                            std::string(label) + "'");
    }
    auto [it, inserted] =
        out.emplace(std::make_pair(std::string(trim(cols[0])), index),
                    positive);
    if (!inserted) {
      throw FormatError(path.string(), lineno, "duplicate sentence label");
    }
  }
  return out;
}

void write_sentence_labels(std::ostream &out, const SentenceLabelMap &labels) {
  for (const auto &[key, positive] : labels) {
    out << key.first << '\t' << key.second << '\t'
        << (positive ? "propaganda" : "non-propaganda") << '\n';
  }
}

}  // namespace fgprop

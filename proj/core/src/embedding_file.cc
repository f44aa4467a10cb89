#include "fgprop/embedding_file.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include "fgprop/error.h"

namespace fgprop {
namespace {

static_assert(std::endian::native == std::endian::little,
              "embedding I/O assumes a little-endian host");

constexpr char kMagic[8] = {'F', 'G', 'P', 'E', 'M', 'B', '\0', '\1'};

class Reader {
 public:
  Reader(std::string bytes, std::string source)
      : bytes_(std::move(bytes)), source_(std::move(source)) {}

  template <typename T>
  T read(const char *what) {
    T value;
    need(sizeof(T), what);
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string read_string(const char *what) {
    auto len = read<std::uint32_t>(what);
    need(len, what);
    std::string s = bytes_.substr(pos_, len);
    pos_ += len;
    return s;
  }

  void read_floats(float *out, std::size_t count, const char *what) {
    if (count > (bytes_.size() - pos_) / sizeof(float)) fail(what);
    std::memcpy(out, bytes_.data() + pos_, count * sizeof(float));
    pos_ += count * sizeof(float);
  }

  bool at_end() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  [[noreturn]] void fail(const std::string &what) const {
    throw FormatError(source_, 0,
                      "truncated payload reading " + what + " at byte " +
                          std::to_string(pos_));
  }

  [[noreturn]] void invalid(const std::string &what) const {
    throw FormatError(source_, 0, what + " (byte " + std::to_string(pos_) + ")");
  }

 private:
  void need(std::size_t n, const char *what) const {
    if (bytes_.size() - pos_ < n) fail(what);
  }

  std::string bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

template <typename T>
void put(std::ofstream &out, T value) {
  out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

void put_string(std::ofstream &out, const std::string &s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

}  // namespace

EmbeddingFile read_embedding_file(const std::filesystem::path &path) {
  Reader r(read_file(path), path.string());
  char magic[8];
  for (char &c : magic) c = r.read<char>("magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    r.invalid("not an embedding file (bad magic)");
  }
  EmbeddingFile f;
  f.version = r.read<std::uint32_t>("version");
  if (f.version != EmbeddingFile::kVersion) {
    r.invalid("unsupported embedding file version " + std::to_string(f.version));
  }
  f.encoder = r.read_string("encoder name");
  f.dimension = r.read<std::uint32_t>("dimension");
  if (f.dimension == 0) r.invalid("dimension must be positive");
  auto count = r.read<std::uint64_t>("sentence count");
  f.max_len = r.read<std::uint32_t>("max_len");
  f.truncated = r.read<std::uint64_t>("truncated count");
  f.skipped = r.read<std::uint64_t>("skipped count");

  // Every record needs at least 12 bytes plus one sentence vector.
  const std::size_t min_record = 12 + sizeof(float) * f.dimension;
  if (count > r.remaining() / min_record) {
    r.invalid("declared sentence count " + std::to_string(count) +
              " exceeds payload");
  }
  f.records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    EmbeddingRecord rec;
    rec.doc_id = r.read_string("doc_id");
    rec.sentence_index = r.read<std::uint32_t>("sentence index");
    auto tokens = r.read<std::uint32_t>("token count");
    if (tokens > r.remaining() / 8) r.fail("token offsets");
    rec.tokens.reserve(tokens);
    for (std::uint32_t t = 0; t < tokens; ++t) {
      auto begin = r.read<std::uint32_t>("token begin");
      auto end = r.read<std::uint32_t>("token end");
      if (end <= begin) {
        r.invalid("record " + std::to_string(i) + " token " +
                  std::to_string(t) + " has an empty or inverted span");
      }
      rec.tokens.push_back({begin, end});
    }
    const std::size_t values =
        (static_cast<std::size_t>(tokens) + 1) * f.dimension;
    rec.vectors.resize(values);
    r.read_floats(rec.vectors.data(), values, "vectors");
    for (float v : rec.vectors) {
      if (!std::isfinite(v)) {
        r.invalid("record " + std::to_string(i) + " has a non-finite value");
      }
    }
    f.records.push_back(std::move(rec));
  }
  if (!r.at_end()) {
    r.invalid(std::to_string(r.remaining()) +
              " trailing bytes after the declared records");
  }
  return f;
}

void write_embedding_file(const std::filesystem::path &path,
                          const EmbeddingFile &file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, file.version);
  put_string(out, file.encoder);
  put<std::uint32_t>(out, file.dimension);
  put<std::uint64_t>(out, file.records.size());
  put<std::uint32_t>(out, file.max_len);
  put<std::uint64_t>(out, file.truncated);
  put<std::uint64_t>(out, file.skipped);
  for (const auto &rec : file.records) {
    if (rec.vectors.size() != (rec.tokens.size() + 1) * file.dimension) {
      throw Error("record " + rec.doc_id + "/" +
                  std::to_string(rec.sentence_index) +
                  " has a vector payload inconsistent with its token count");
    }
    put_string(out, rec.doc_id);
    put<std::uint32_t>(out, rec.sentence_index);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(rec.tokens.size()));
    for (const auto &t : rec.tokens) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(t.begin));
      put<std::uint32_t>(out, static_cast<std::uint32_t>(t.end));
    }
    out.write(reinterpret_cast<const char *>(rec.vectors.data()),
              static_cast<std::streamsize>(rec.vectors.size() * sizeof(float)));
  }
  if (!out) throw Error("error writing " + path.string());
}

std::vector<std::string> verify_embedding_file(const EmbeddingFile &file,
                                               const Corpus &corpus) {
  std::vector<std::string> problems;
  std::set<std::pair<std::string, std::uint32_t>> seen;
  for (const auto &rec : file.records) {
    const std::string where =
        rec.doc_id + "/" + std::to_string(rec.sentence_index);
    if (!seen.emplace(rec.doc_id, rec.sentence_index).second) {
      problems.push_back(where + ": duplicate record");
      continue;
    }
    auto doc = corpus.documents.find(rec.doc_id);
    if (doc == corpus.documents.end()) {
      problems.push_back(where + ": unknown document");
      continue;
    }
    if (rec.sentence_index >= doc->second.sentences().size()) {
      problems.push_back(where + ": sentence index out of range");
      continue;
    }
    if (rec.tokens.size() > file.max_len) {
      problems.push_back(where + ": " + std::to_string(rec.tokens.size()) +
                         " tokens exceed max_len " +
                         std::to_string(file.max_len));
    }
    const SentenceSpan &s = doc->second.sentence(rec.sentence_index);
    std::size_t prev_end = s.begin;
    for (std::size_t t = 0; t < rec.tokens.size(); ++t) {
      const Token &tok = rec.tokens[t];
      if (tok.begin < s.begin || tok.end > s.end) {
        problems.push_back(where + " token " + std::to_string(t) + " [" +
                           std::to_string(tok.begin) + "," +
                           std::to_string(tok.end) +
                           ") lies outside the sentence span");
      } else if (tok.begin < prev_end) {
        problems.push_back(where + " token " + std::to_string(t) +
                           " overlaps or precedes the previous token");
      }
      prev_end = std::max(prev_end, tok.end);
    }
  }
  return problems;
}

}  // namespace fgprop

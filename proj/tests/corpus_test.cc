#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fgprop/corpus.h"
#include "fgprop/error.h"
#include "fgprop/stats.h"
#include "fgprop/synthetic.h"
#include "fgprop/utf8.h"
#include "test_util.h"

namespace fgprop {
namespace {

using testing::TempDir;
using testing::read_text;
using testing::write_text;

std::string expect_format_error(const CorpusPaths &paths, std::size_t line) {
  try {
    load_corpus(paths);
  } catch (const FormatError &e) {
    EXPECT_EQ(e.line(), line) << e.what();
    return e.what();
  }
  ADD_FAILURE() << "expected a FormatError";
  return {};
}

class SmallCorpus : public ::testing::Test {
 protected:
  void SetUp() override {
    write_text(dir_ / "articles/article111.txt", "Hello brave new world.\nSecond line here.\n");
    write_text(dir_ / "labels/article111.labels",
               "111\tLoaded_Language\t6\t11\n111\tDoubt\t23\t29\n");
  }
  CorpusPaths paths() const { return CorpusPaths::from_root(dir_.path()); }

  TempDir dir_;
};

TEST_F(SmallCorpus, LoadsOneDocumentWithTwoFragments) {
  Corpus c = load_corpus(paths());
  ASSERT_EQ(c.documents.size(), 1u);
  EXPECT_EQ(c.documents.begin()->first, "111");
  EXPECT_EQ(total_fragments(c.gold), 2u);
  EXPECT_EQ(c.document("111").slice(6, 11), "brave");
  EXPECT_FALSE(c.has_split());
}

TEST_F(SmallCorpus, EndNotAfterBeginIsRejectedWithFileAndLine) {
  write_text(dir_ / "labels/article111.labels",
             "111\tDoubt\t1\t3\n111\tLoaded_Language\t9\t9\n");
  std::string msg = expect_format_error(paths(), 2);
  EXPECT_NE(msg.find("article111.labels:2"), std::string::npos) << msg;
}

TEST_F(SmallCorpus, UnknownTechniqueListsAllIdentifiers) {
  write_text(dir_ / "labels/article111.labels", "111\tSpin\t1\t3\n");
  std::string msg = expect_format_error(paths(), 1);
  for (Technique t : all_techniques()) {
    EXPECT_NE(msg.find(std::string(technique_id(t))), std::string::npos)
        << technique_id(t);
  }
}

TEST_F(SmallCorpus, MalformedRowReportsLine) {
  write_text(dir_ / "labels/article111.labels", "111\tDoubt\t1\t3\n\n111\tDoubt\t1\n");
  expect_format_error(paths(), 3);
  write_text(dir_ / "labels/article111.labels", "111\tDoubt\t-1\t3\n");
  expect_format_error(paths(), 1);
}

TEST_F(SmallCorpus, OutOfBoundsNamesDocumentAndOffsets) {
  write_text(dir_ / "labels/article111.labels", "111\tDoubt\t30\t99\n");
  std::string msg = expect_format_error(paths(), 1);
  EXPECT_NE(msg.find("111"), std::string::npos);
  EXPECT_NE(msg.find("[30,99)"), std::string::npos) << msg;
}

TEST_F(SmallCorpus, UnknownDocumentIsRejected) {
  write_text(dir_ / "labels/extra.labels", "999\tDoubt\t1\t2\n");
  std::string msg = expect_format_error(paths(), 1);
  EXPECT_NE(msg.find("999"), std::string::npos);
}

TEST_F(SmallCorpus, OffsetsIncludeLineBreaks) {
  // "Second" starts after the 22 characters of line one plus its newline.
  Corpus c = load_corpus(paths());
  EXPECT_EQ(c.document("111").slice(23, 29), "Second");
}

TEST(Corpus, RoundTripReproducesCanonicalRows) {
  SyntheticOptions o;
  o.articles = 6;
  Corpus c = make_synthetic_corpus(o);
  TempDir dir;
  write_corpus(dir.path(), c);
  Corpus back = load_corpus(CorpusPaths::from_root(dir.path()));
  std::ostringstream a, b;
  write_annotations(a, c.gold);
  write_annotations(b, back.gold);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(back.split, c.split);
  EXPECT_EQ(back.sources, c.sources);
  ASSERT_EQ(back.documents.size(), c.documents.size());
  for (const auto &[id, doc] : c.documents) {
    EXPECT_EQ(back.document(id).text(), doc.text());
  }
}

TEST(Corpus, RowOrderDoesNotMatterAfterCanonicalSort) {
  std::istringstream in("7\tDoubt\t5\t9\n7\tDoubt\t1\t3\n6\tSlogans\t0\t2\n");
  Annotations ann;
  read_annotation_rows(in, "mem", ann);
  std::ostringstream out;
  write_annotations(out, ann);
  EXPECT_EQ(out.str(), "6\tSlogans\t0\t2\n7\tDoubt\t1\t3\n7\tDoubt\t5\t9\n");
}

TEST(Stats, SingleFragmentOfTenCharacters) {
  Corpus c;
  c.documents.emplace("d", Document("d", std::u32string(20, U'x')));
  c.gold["d"] = {"d", {Fragment(0, 10, Technique::kSlogans)}};
  CorpusStats s = compute_stats(c);
  ASSERT_EQ(s.techniques.size(), kNumTechniques);
  // Sorted by count, so the only used technique comes first.
  EXPECT_EQ(s.techniques[0].technique, Technique::kSlogans);
  EXPECT_EQ(s.techniques[0].count, 1u);
  EXPECT_DOUBLE_EQ(s.techniques[0].mean_length, 10.0);
  EXPECT_DOUBLE_EQ(s.techniques[0].sd_length, 0.0);
  EXPECT_EQ(s.techniques[1].count, 0u);
  EXPECT_EQ(s.total_instances, 1u);
}

TEST(Stats, PopulationStandardDeviation) {
  Corpus c;
  c.documents.emplace("d", Document("d", std::u32string(40, U'x')));
  c.gold["d"] = {"d", {Fragment(0, 2, Technique::kDoubt), Fragment(0, 4, Technique::kDoubt),
                       Fragment(0, 4, Technique::kDoubt), Fragment(0, 4, Technique::kDoubt),
                       Fragment(0, 5, Technique::kDoubt), Fragment(0, 5, Technique::kDoubt),
                       Fragment(0, 7, Technique::kDoubt), Fragment(0, 9, Technique::kDoubt)}};
  CorpusStats s = compute_stats(c);
  EXPECT_DOUBLE_EQ(s.techniques[0].mean_length, 5.0);
  EXPECT_DOUBLE_EQ(s.techniques[0].sd_length, 2.0);
}

TEST(Stats, SortedByCountAndSummingToTotal) {
  Corpus c = make_synthetic_corpus({});
  CorpusStats s = compute_stats(c);
  std::size_t sum = 0;
  for (std::size_t i = 0; i < s.techniques.size(); ++i) {
    sum += s.techniques[i].count;
    EXPECT_GE(s.techniques[i].mean_length, 0.0);
    if (i) EXPECT_GE(s.techniques[i - 1].count, s.techniques[i].count);
  }
  EXPECT_EQ(sum, s.total_instances);
  EXPECT_EQ(s.total_instances, total_fragments(c.gold));
  ASSERT_TRUE(s.propagandistic.has_value());
  EXPECT_EQ(s.propagandistic->articles + s.non_propagandistic->articles, s.all.articles);
  EXPECT_NEAR(s.fraction_with_technique,
              static_cast<double>(s.sentences_with_technique) / s.sentences, 1e-15);
}

TEST(Stats, InvariantUnderDocumentOrder) {
  // Rebuild the corpus under shuffled ids: statistics must not move.
  Corpus c = make_synthetic_corpus({});
  std::vector<std::string> ids;
  for (const auto &[id, d] : c.documents) ids.push_back(id);
  std::vector<std::string> renamed = ids;
  std::shuffle(renamed.begin(), renamed.end(), std::mt19937_64(5));
  Corpus p;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::string id = "z" + renamed[i];
    p.documents.emplace(id, Document(id, c.document(ids[i]).text()));
    p.gold[id] = {id, c.gold_for(ids[i]).fragments};
    p.sources[id] = c.sources.at(ids[i]);
    p.split[id] = c.split.at(ids[i]);
  }
  EXPECT_EQ(to_json(compute_stats(c)).dump(), to_json(compute_stats(p)).dump());
}

TEST(Stats, EmptyCorpusIsAnError) {
  EXPECT_THROW(compute_stats(Corpus{}), Error);
}

TEST(Stats, LineCountsWithAndWithoutBlanks) {
  EXPECT_EQ(count_lines(U"a\n\nb\n"), 3u);
  EXPECT_EQ(count_lines(U"a\n\nb"), 3u);
  EXPECT_EQ(count_lines(U""), 0u);
  Corpus c;
  c.documents.emplace("d", Document("d", U"a\n\nb\n"));
  c.gold["d"] = {"d", {}};
  CorpusStats s = compute_stats(c);
  EXPECT_DOUBLE_EQ(s.all.avg_lines, 3.0);
  EXPECT_DOUBLE_EQ(s.all.avg_nonblank_lines, 2.0);
}

TEST(Stats, ExpectedFileMismatchNamesTechnique) {
  Corpus c = make_synthetic_corpus({});
  CorpusStats s = compute_stats(c);
  nlohmann::json expected = {{"articles", s.all.articles},
                             {"total_instances", s.total_instances},
                             {"techniques", nlohmann::json::object()}};
  for (const auto &t : s.techniques) {
    expected["techniques"][std::string(technique_id(t.technique))] = {
        {"count", t.count}, {"mean", t.mean_length}, {"sd", t.sd_length}};
  }
  EXPECT_TRUE(check_expected(s, expected).ok());

  // Drop one fragment of the most frequent technique.
  const Technique victim = s.techniques[0].technique;
  for (auto &[id, set] : c.gold) {
    auto it = std::find_if(set.fragments.begin(), set.fragments.end(),
                           [&](const Fragment &f) { return f.technique() == victim; });
    if (it != set.fragments.end()) {
      set.fragments.erase(it);
      break;
    }
  }
  ExpectationReport rep = check_expected(compute_stats(c), expected);
  ASSERT_FALSE(rep.ok());
  bool named = false;
  for (const auto &m : rep.mismatches) {
    named |= m.find(std::string(technique_id(victim))) != std::string::npos;
  }
  EXPECT_TRUE(named);
}

TEST(Split, ToyCorpusOneDocumentPerSplit) {
  Corpus c;
  for (const char *id : {"a", "b", "c"}) {
    c.documents.emplace(id, Document(id, U"one line\nanother\n"));
    c.gold[id] = {id, {}};
  }
  c.split = {{"a", Split::kTrain}, {"b", Split::kDev}, {"c", Split::kTest}};
  nlohmann::json expected = {{"train", {{"articles", 1}, {"sentences", 2}}},
                             {"dev", {{"articles", 1}}},
                             {"test", {{"articles", 1}}}};
  SplitReport rep = verify_split(c, &expected);
  EXPECT_TRUE(rep.ok());
  for (Split s : kAllSplits) {
    EXPECT_EQ(rep.counts.at(s).articles, 1u);
    EXPECT_EQ(rep.counts.at(s).sentences, 2u);
  }
  expected["dev"]["articles"] = 2;
  EXPECT_FALSE(verify_split(c, &expected).ok());
}

TEST(Split, AbsentDocumentIsAnError) {
  Corpus c;
  c.documents.emplace("a", Document("a", U"x"));
  c.gold["a"] = {"a", {}};
  c.split = {{"a", Split::kTrain}, {"ghost", Split::kTest}};
  EXPECT_THROW(verify_split(c), Error);
  c.split.clear();
  EXPECT_THROW(verify_split(c), Error);
}

TEST(Split, FilesOnDiskAreValidated) {
  TempDir dir;
  write_text(dir / "articles/article1.txt", "x\n");
  write_text(dir / "articles/article2.txt", "y\n");
  write_text(dir / "split/train.txt", "1\n");
  write_text(dir / "split/dev.txt", "1\n");
  write_text(dir / "split/test.txt", "2\n");
  EXPECT_THROW(load_corpus(CorpusPaths::from_root(dir.path())), Error);
  write_text(dir / "split/dev.txt", "");
  Corpus c = load_corpus(CorpusPaths::from_root(dir.path()));
  EXPECT_EQ(c.ids_in(Split::kTrain), std::vector<std::string>{"1"});
  std::filesystem::remove(dir / "split/dev.txt");
  EXPECT_THROW(load_corpus(CorpusPaths::from_root(dir.path())), Error);
}

TEST(SentenceLabels, RoundTrip) {
  SentenceLabelMap labels = {{{"a", 0}, true}, {{"a", 1}, false}, {{"b", 0}, true}};
  TempDir dir;
  std::ostringstream out;
  write_sentence_labels(out, labels);
  write_text(dir / "l.tsv", out.str());
  EXPECT_EQ(read_sentence_labels(dir / "l.tsv"), labels);
  write_text(dir / "bad.tsv", "a\t0\tmaybe\n");
  EXPECT_THROW(read_sentence_labels(dir / "bad.tsv"), FormatError);
}

}  // namespace
}  // namespace fgprop

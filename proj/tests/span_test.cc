#include <random>
#include <set>
#include <stdexcept>

#include <gtest/gtest.h>

#include "fgprop/error.h"
#include "fgprop/span.h"
#include "fgprop/tokenizer.h"
#include "fgprop/utf8.h"

namespace fgprop {
namespace {

constexpr Technique kL = Technique::kLoadedLanguage;

Document doc_of(const std::string &id, const std::string &utf8) {
  return Document(id, utf8_decode(utf8));
}

// A 40-character document made of two 20-character lines (no newline
// inside a sentence, so sentences are [0,20) and [21,41)).
Document two_sentence_doc() {
  return doc_of("d", std::string(20, 'a') + "\n" + std::string(20, 'b'));
}

TEST(Technique, EighteenVariantsWithBijectiveIds) {
  ASSERT_EQ(all_techniques().size(), 18u);
  std::set<std::string_view> ids;
  for (Technique t : all_techniques()) {
    auto id = technique_id(t);
    EXPECT_TRUE(ids.insert(id).second) << id;
    auto back = parse_technique(id);
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, t);
    EXPECT_EQ(technique_from_class(token_class(t)), t);
  }
  EXPECT_FALSE(parse_technique("Loaded Language").has_value());
  EXPECT_EQ(technique_id(Technique::kLoadedLanguage), "Loaded_Language");
  EXPECT_EQ(technique_id(Technique::kStrawMan), "Straw_Men");
  EXPECT_EQ(token_class(Technique::kLoadedLanguage), 1);
  EXPECT_EQ(token_class(Technique::kStrawMan), 18);
}

TEST(Fragment, RejectsEmptyOrInvertedIntervals) {
  EXPECT_THROW(Fragment(5, 5, kL), std::invalid_argument);
  EXPECT_THROW(Fragment(6, 5, kL), std::invalid_argument);
  Fragment f(0, 1, kL);
  EXPECT_EQ(f.length(), 1u);
}

TEST(Document, SentencesAreNonBlankLines) {
  Document d = doc_of("x", "ab\n\ncd e\r\nf\n");
  ASSERT_EQ(d.sentences().size(), 3u);
  EXPECT_EQ(d.sentence(0), (SentenceSpan{0, 2, 0}));
  EXPECT_EQ(d.sentence(1), (SentenceSpan{4, 8, 1}));
  EXPECT_EQ(d.sentence(2), (SentenceSpan{10, 11, 2}));
  EXPECT_THROW(d.sentence(3), std::out_of_range);
}

TEST(Document, OffsetsCountCodePointsNotBytes) {
  Document d = doc_of("x", "caf\xC3\xA9 \xE2\x80\x94 ok");
  EXPECT_EQ(d.length(), 9u);
  EXPECT_EQ(d.slice(0, 4), "caf\xC3\xA9");
}

TEST(Document, SentencesCoverAllNonDelimiterCharacters) {
  Document d = doc_of("x", "one two\n\n  three\nfour\r\n\nfive");
  std::size_t covered = 0;
  std::size_t expected = 0;
  for (const auto &s : d.sentences()) covered += s.length();
  for (char32_t c : d.text()) expected += !is_line_break(c);
  EXPECT_EQ(covered, expected);
  for (std::size_t i = 0; i < d.sentences().size(); ++i) {
    EXPECT_EQ(d.sentences()[i].index, i);
    EXPECT_LT(d.sentences()[i].begin, d.sentences()[i].end);
    if (i) EXPECT_LT(d.sentences()[i - 1].end, d.sentences()[i].begin);
  }
}

TEST(SentenceLabel, ContainedFragmentMakesSentencePositive) {
  Document d = doc_of("d", std::string(20, 'a'));
  AnnotationSet gold{"d", {Fragment(5, 10, kL)}};
  EXPECT_TRUE(sentence_label(d, gold, 0));
}

TEST(SentenceLabel, EmptyGoldIsNegativeEverywhere) {
  Document d = two_sentence_doc();
  AnnotationSet gold{"d", {}};
  EXPECT_EQ(sentence_labels(d, gold), (std::vector<bool>{false, false}));
}

TEST(SentenceLabel, StraddlingFragmentMarksBothSentences) {
  // Sentences are [0,20) and [21,41) here; the fragment [18,25) touches
  // both. Brute force: any shared character index.
  Document d = two_sentence_doc();
  AnnotationSet gold{"d", {Fragment(18, 25, kL)}};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto &s = d.sentence(i);
    bool brute = false;
    for (std::size_t c = 18; c < 25; ++c) brute |= (c >= s.begin && c < s.end);
    EXPECT_EQ(sentence_label(d, gold, i), brute);
    EXPECT_TRUE(brute);
  }
}

TEST(SentenceLabel, DocIdMismatchIsRejected) {
  Document d = two_sentence_doc();
  AnnotationSet gold{"other", {}};
  EXPECT_THROW(sentence_label(d, gold, 0), Error);
}

TEST(FragmentsInSentence, ExactStraddlingAndDisjoint) {
  Document d = two_sentence_doc();
  Fragment exact(0, 20, kL);
  Fragment straddle(18, 25, Technique::kDoubt);
  Fragment disjoint(30, 35, kL);
  AnnotationSet ann{"d", {exact, straddle, disjoint}};
  auto s0 = fragments_in_sentence(d, ann, 0);
  auto s1 = fragments_in_sentence(d, ann, 1);
  EXPECT_EQ(s0, (std::vector<Fragment>{exact, straddle}));
  EXPECT_EQ(s1, (std::vector<Fragment>{straddle, disjoint}));
  AnnotationSet only_disjoint{"d", {disjoint}};
  EXPECT_TRUE(fragments_in_sentence(d, only_disjoint, 0).empty());
}

TEST(FragmentsInSentence, LabelAgreesWithNonEmptyFragmentList) {
  Document d = doc_of("d", "aaaa bbbb\ncccc\n\ndddd eeee ffff\ngg");
  std::mt19937_64 rng(3);
  for (int round = 0; round < 200; ++round) {
    AnnotationSet ann{"d", {}};
    const std::size_t n = rng() % 4;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t a = rng() % d.length();
      std::size_t b = a + 1 + rng() % 4;
      ann.fragments.emplace_back(a, std::min(b, d.length()), kL);
    }
    for (std::size_t s = 0; s < d.sentences().size(); ++s) {
      EXPECT_EQ(sentence_label(d, ann, s), !fragments_in_sentence(d, ann, s).empty());
    }
  }
}

TEST(AnnotationSet, CheckAgainstNamesDocumentAndOffsets) {
  Document d = doc_of("d7", "short");
  AnnotationSet ok{"d7", {Fragment(0, 5, kL)}};
  EXPECT_NO_THROW(ok.check_against(d));
  AnnotationSet bad{"d7", {Fragment(3, 9, kL)}};
  try {
    bad.check_against(d);
    FAIL() << "expected an error";
  } catch (const Error &e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("d7"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[3,9)"), std::string::npos) << msg;
  }
}

TEST(Utf8, RejectsMalformedInput) {
  EXPECT_THROW(utf8_decode("\xC3"), Error);
  EXPECT_THROW(utf8_decode("\xFF"), Error);
  EXPECT_THROW(utf8_decode("\xED\xA0\x80"), Error);  // surrogate
  EXPECT_EQ(utf8_encode(utf8_decode("a\xE2\x82\xAC")), "a\xE2\x82\xAC");
}

TEST(Tokenizer, OffsetsSliceBackToTokenText) {
  std::u32string text = U"Don't stop, café-owners! 42x";
  auto toks = tokenize(text, 100);
  std::vector<std::u32string> words;
  for (auto t : toks) words.push_back(text.substr(t.begin - 100, t.length()));
  EXPECT_EQ(words, (std::vector<std::u32string>{U"Don't", U"stop", U",", U"café",
                                                U"-", U"owners", U"!", U"42x"}));
}

}  // namespace
}  // namespace fgprop

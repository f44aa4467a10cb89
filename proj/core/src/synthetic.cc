#include "fgprop/synthetic.h"

#include <random>
#include <string>

#include "fgprop/error.h"
#include "fgprop/utf8.h"

namespace fgprop {
namespace {

constexpr std::string_view kPhrases[kNumTechniques] = {
    "outrageous disgraceful",  "crooked traitors",     "again repeatedly",
    "unprecedented catastrophe", "supposedly questionable", "terrifying invasion",
    "patriots homeland",       "solely because",       "drain swamp",
    "experts agree",           "either enemies",       "enough period",
    "whatabout hypocrites",    "fascist regime",       "meanwhile celebrities",
    "everyone joining",        "somehow whatever",     "opponents claim",
};

constexpr std::string_view kNeutral[] = {
    "the",       "council",  "met",      "on",       "tuesday",  "to",
    "review",    "budget",   "plans",    "city",     "officials", "said",
    "report",    "would",    "be",       "published", "next",    "week",
    "residents", "attended", "meeting",  "downtown", "library",  "staff",
    "discussed", "road",     "repairs",  "water",    "supply",   "school",
    "funding",   "committee", "members", "voted",    "proposal", "after",
    "long",      "debate",
};

class Source {
 public:
  explicit Source(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

std::string_view synthetic_phrase(Technique t) {
  return kPhrases[technique_index(t)];
}

Corpus make_synthetic_corpus(const SyntheticOptions &o) {
  if (o.articles == 0) throw Error("synthetic corpus needs at least one article");
  if (o.min_sentences == 0 || o.max_sentences < o.min_sentences) {
    throw Error("synthetic sentence range is invalid");
  }
  Source rng(o.seed);
  Corpus corpus;
  const std::size_t n_train =
      static_cast<std::size_t>(o.train_fraction * static_cast<double>(o.articles));
  const std::size_t n_dev =
      static_cast<std::size_t>(o.dev_fraction * static_cast<double>(o.articles));
  for (std::size_t a = 0; a < o.articles; ++a) {
    const std::string id = std::to_string(100000 + a);
    const bool prop_source = a % 2 == 0;
    const double rate = prop_source ? o.positive_rate : o.positive_rate / 2;
    std::string text;
    AnnotationSet gold{id, {}};
    std::size_t pos = 0;  // in characters; all text is ASCII
    const std::size_t sentences =
        o.min_sentences + rng.below(o.max_sentences - o.min_sentences + 1);
    for (std::size_t s = 0; s < sentences; ++s) {
      std::vector<std::string> words;
      const std::size_t len = 5 + rng.below(6);
      for (std::size_t w = 0; w < len; ++w) {
        words.emplace_back(kNeutral[rng.below(std::size(kNeutral))]);
      }
      // Phrases are placed at word slots; -1 marks a neutral word.
      std::vector<int> tech(words.size(), -1);
      if (rng.uniform() < rate) {
        std::size_t count = rng.uniform() < o.second_fragment_rate ? 2 : 1;
        int last = -1;
        for (std::size_t k = 0; k < count; ++k) {
          int t = static_cast<int>(rng.below(kNumTechniques));
          // Two phrases of one technique could touch and decode as one run.
          if (t == last) t = (t + 1) % static_cast<int>(kNumTechniques);
          const std::size_t at = rng.below(words.size() + 1);
          words.insert(words.begin() + static_cast<std::ptrdiff_t>(at),
                       std::string(kPhrases[t]));
          tech.insert(tech.begin() + static_cast<std::ptrdiff_t>(at), t);
          last = t;
        }
      }
      for (std::size_t w = 0; w < words.size(); ++w) {
        if (w > 0) {
          text += ' ';
          ++pos;
        }
        if (tech[w] >= 0) {
          gold.fragments.emplace_back(pos, pos + words[w].size(),
                                      all_techniques()[static_cast<std::size_t>(tech[w])]);
        }
        text += words[w];
        pos += words[w].size();
      }
      text += ".\n";
      pos += 2;
      if (s + 1 < sentences && rng.uniform() < o.blank_line_rate) {
        text += '\n';
        ++pos;
      }
    }
    gold.sort();
    Document doc(id, utf8_decode(text));
    corpus.gold.emplace(id, std::move(gold));
    corpus.documents.emplace(id, std::move(doc));
    corpus.split[id] = a < n_train ? Split::kTrain
                       : a < n_train + n_dev ? Split::kDev
                                             : Split::kTest;
    corpus.sources[id] =
        prop_source ? SourceKind::kPropagandistic : SourceKind::kNonPropagandistic;
  }
  return corpus;
}

}  // namespace fgprop

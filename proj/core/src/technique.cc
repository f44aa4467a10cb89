#include "fgprop/technique.h"

#include <stdexcept>

namespace fgprop {
namespace {

struct TechniqueInfo {
  Technique technique;
  std::string_view id;
  std::string_view name;
};

// Identifiers follow the released corpus label files.
constexpr std::array<TechniqueInfo, kNumTechniques> kTechniques = {{
    {Technique::kLoadedLanguage, "Loaded_Language", "loaded language"},
    {Technique::kNameCalling, "Name_Calling,Labeling", "name calling, labeling"},
    {Technique::kRepetition, "Repetition", "repetition"},
    {Technique::kExaggeration, "Exaggeration,Minimisation",
     "exaggeration, minimization"},
    {Technique::kDoubt, "Doubt", "doubt"},
    {Technique::kAppealToFear, "Appeal_to_fear-prejudice",
     "appeal to fear/prejudice"},
    {Technique::kFlagWaving, "Flag-Waving", "flag-waving"},
    {Technique::kCausalOversimplification, "Causal_Oversimplification",
     "causal oversimplification"},
    {Technique::kSlogans, "Slogans", "slogans"},
    {Technique::kAppealToAuthority, "Appeal_to_Authority",
     "appeal to authority"},
    {Technique::kBlackAndWhiteFallacy, "Black-and-White_Fallacy",
     "black-and-white fallacy"},
    {Technique::kThoughtTerminatingCliches, "Thought-terminating_Cliches",
     "thought-terminating cliches"},
    {Technique::kWhataboutism, "Whataboutism", "whataboutism"},
    {Technique::kReductioAdHitlerum, "Reductio_ad_hitlerum",
     "reductio ad hitlerum"},
    {Technique::kRedHerring, "Red_Herring", "red herring"},
    {Technique::kBandwagon, "Bandwagon", "bandwagon"},
    {Technique::kObfuscation, "Obfuscation,Intentional_Vagueness,Confusion",
     "obfuscation, intentional vagueness, confusion"},
    {Technique::kStrawMan, "Straw_Men", "straw man"},
}};

constexpr std::array<Technique, kNumTechniques> MakeAll() {
  std::array<Technique, kNumTechniques> out{};
  for (std::size_t i = 0; i < kNumTechniques; ++i) {
    out[i] = kTechniques[i].technique;
  }
  return out;
}

constexpr std::array<Technique, kNumTechniques> kAll = MakeAll();

}  // namespace

std::span<const Technique> all_techniques() { return kAll; }

Technique technique_from_class(int cls) {
  if (cls < 1 || cls > static_cast<int>(kNumTechniques)) {
    throw std::out_of_range("token class " + std::to_string(cls) +
                            " is not a technique class");
  }
  return kAll[static_cast<std::size_t>(cls - 1)];
}

std::string_view technique_id(Technique t) {
  return kTechniques[technique_index(t)].id;
}

std::string_view technique_name(Technique t) {
  return kTechniques[technique_index(t)].name;
}

std::optional<Technique> parse_technique(std::string_view id) {
  for (const auto &info : kTechniques) {
    if (info.id == id) return info.technique;
  }
  return std::nullopt;
}

std::string valid_technique_ids() {
  std::string out;
  for (const auto &info : kTechniques) {
    if (!out.empty()) out += " | ";
    out += info.id;
  }
  return out;
}

}  // namespace fgprop

#ifndef FGPROP_TECHNIQUE_H_
#define FGPROP_TECHNIQUE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace fgprop {

// The eighteen propaganda techniques. The enumerator order is the canonical
// technique index used everywhere (token class = index + 1, class 0 = none).
enum class Technique : std::uint8_t {
  kLoadedLanguage,
  kNameCalling,
  kRepetition,
  kExaggeration,
  kDoubt,
  kAppealToFear,
  kFlagWaving,
  kCausalOversimplification,
  kSlogans,
  kAppealToAuthority,
  kBlackAndWhiteFallacy,
  kThoughtTerminatingCliches,
  kWhataboutism,
  kReductioAdHitlerum,
  kRedHerring,
  kBandwagon,
  kObfuscation,
  kStrawMan,
};

inline constexpr std::size_t kNumTechniques = 18;

// Token classes: none + one per technique.
inline constexpr std::size_t kNumTokenClasses = kNumTechniques + 1;
inline constexpr int kNoneClass = 0;

std::span<const Technique> all_techniques();

inline constexpr std::size_t technique_index(Technique t) {
  return static_cast<std::size_t>(t);
}

inline constexpr int token_class(Technique t) {
  return static_cast<int>(technique_index(t)) + 1;
}

// Inverse of token_class(); class must be in [1, 18].
Technique technique_from_class(int cls);

// Stable identifier used in annotation files, e.g. "Loaded_Language".
std::string_view technique_id(Technique t);

// Human-readable name, e.g. "loaded language".
std::string_view technique_name(Technique t);

std::optional<Technique> parse_technique(std::string_view id);

// All identifiers separated by " | " (identifiers contain commas).
std::string valid_technique_ids();

}  // namespace fgprop

#endif  // FGPROP_TECHNIQUE_H_

#pragma once

// Sample-set size rules and the adaptive strategies built from them.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfpp/geometry.hpp"

namespace dfpp {

enum class SizeRule { Lin, BiLin, Mean, Qua };

inline constexpr std::array<SizeRule, 4> kAllSizeRules{SizeRule::Lin, SizeRule::BiLin,
                                                       SizeRule::Mean, SizeRule::Qua};

/// n+1, 2n+1, floor(((n+1) + (n+1)(n+2)/2) / 2) and (n+1)(n+2)/2.
std::size_t sample_size_for(SizeRule rule, std::size_t n);

/// CSV / CLI code: "lin", "2n", "mean", "quad".
std::string_view rule_code(SizeRule rule);
std::optional<SizeRule> parse_rule(std::string_view code);

/// Next-iteration set sizes after a serious step, a type 1 null step and a
/// type 2 null step.
struct Strategy {
  SizeRule serious = SizeRule::Lin;
  SizeRule null1 = SizeRule::Lin;
  SizeRule null2 = SizeRule::Lin;

  friend bool operator==(const Strategy&, const Strategy&) = default;
  friend auto operator<=>(const Strategy&, const Strategy&) = default;

  /// "lin/2n/quad" form.
  std::string code() const;
  static std::optional<Strategy> parse(std::string_view text);
};

std::size_t next_size(const Strategy& s, IterationOutcome outcome, std::size_t n);

/// All 64 strategies in lexicographic order (Lin < BiLin < Mean < Qua).
std::vector<Strategy> enumerate_strategies();

}  // namespace dfpp

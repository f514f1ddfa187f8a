#include "dfpp/strategy.hpp"

#include "dfpp/model.hpp"

namespace dfpp {

std::size_t sample_size_for(SizeRule rule, std::size_t n) {
  switch (rule) {
    case SizeRule::Lin: return n + 1;
    case SizeRule::BiLin: return 2 * n + 1;
    case SizeRule::Mean: return (linear_size(n) + quadratic_size(n)) / 2;
    case SizeRule::Qua: return quadratic_size(n);
  }
  return n + 1;
}

std::string_view rule_code(SizeRule rule) {
  switch (rule) {
    case SizeRule::Lin: return "lin";
    case SizeRule::BiLin: return "2n";
    case SizeRule::Mean: return "mean";
    case SizeRule::Qua: return "quad";
  }
  return "?";
}

std::optional<SizeRule> parse_rule(std::string_view code) {
  for (SizeRule r : kAllSizeRules) {
    if (rule_code(r) == code) return r;
  }
  return std::nullopt;
}

std::string Strategy::code() const {
  std::string out(rule_code(serious));
  out += '/';
  out += rule_code(null1);
  out += '/';
  out += rule_code(null2);
  return out;
}

std::optional<Strategy> Strategy::parse(std::string_view text) {
  std::array<SizeRule, 3> rules{};
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t slash = text.find('/');
    if ((i < 2) == (slash == std::string_view::npos)) return std::nullopt;
    const auto rule = parse_rule(text.substr(0, slash));
    if (!rule) return std::nullopt;
    rules[i] = *rule;
    text = i < 2 ? text.substr(slash + 1) : std::string_view{};
  }
  return Strategy{rules[0], rules[1], rules[2]};
}

std::size_t next_size(const Strategy& s, IterationOutcome outcome, std::size_t n) {
  switch (outcome) {
    case IterationOutcome::Serious: return sample_size_for(s.serious, n);
    case IterationOutcome::NullType1: return sample_size_for(s.null1, n);
    case IterationOutcome::NullType2: return sample_size_for(s.null2, n);
  }
  return sample_size_for(s.serious, n);
}

std::vector<Strategy> enumerate_strategies() {
  std::vector<Strategy> out;
  out.reserve(64);
  for (SizeRule a : kAllSizeRules) {
    for (SizeRule b : kAllSizeRules) {
      for (SizeRule c : kAllSizeRules) out.push_back({a, b, c});
    }
  }
  return out;
}

}  // namespace dfpp

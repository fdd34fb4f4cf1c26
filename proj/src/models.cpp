#include "atsmc/models.hpp"

#include "atsmc/errors.hpp"
#include "atsmc/parser.hpp"
#include "embedded_data.hpp"

namespace atsmc {

namespace data {

std::string_view security_model() { return embedded::kSecurityModel; }
std::string_view privacy_model() { return embedded::kPrivacyModel; }
std::string_view security_individual() { return embedded::kSecurityIndividual; }
std::string_view security_combos() { return embedded::kSecurityCombos; }
std::string_view privacy_individual() { return embedded::kPrivacyIndividual; }
std::string_view privacy_combos() { return embedded::kPrivacyCombos; }
std::string_view security_plan() { return embedded::kSecurityPlan; }
std::string_view privacy_plan() { return embedded::kPrivacyPlan; }
std::string_view security_compare() { return embedded::kSecurityCompare; }
std::string_view privacy_compare() { return embedded::kPrivacyCompare; }

}  // namespace data

namespace {

AttackTree parse_embedded(std::string_view text, const char* which) {
  ParseResult result = parse_model(text);
  if (!result.ok())
    throw Error(std::string("embedded model '") + which + "' failed to parse: " +
                result.errors.front().message);
  return *std::move(result.tree);
}

}  // namespace

AttackTree shipped_security_model() {
  return parse_embedded(data::security_model(), "security");
}

AttackTree shipped_privacy_model() {
  return parse_embedded(data::privacy_model(), "privacy");
}

}  // namespace atsmc

// Bundled reference models, scenario lists, transformation plans, and the
// before/after comparison baselines.  The same text lives under models/ for
// use from the command line; the embedded copies keep `atsmc experiment` and
// the test suite independent of the working directory.
#pragma once

#include <string_view>

#include "atsmc/model.hpp"

namespace atsmc {

namespace data {

std::string_view security_model();       // .adt source
std::string_view privacy_model();        // .adt source
std::string_view security_individual();  // scenario JSON
std::string_view security_combos();      // scenario JSON
std::string_view privacy_individual();   // scenario JSON
std::string_view privacy_combos();       // scenario JSON
std::string_view security_plan();        // plan JSON
std::string_view privacy_plan();         // plan JSON
std::string_view security_compare();     // scenario JSON, comparison baseline
std::string_view privacy_compare();      // scenario JSON, comparison baseline

}  // namespace data

// Parsed and validated embedded models.
AttackTree shipped_security_model();
AttackTree shipped_privacy_model();

}  // namespace atsmc

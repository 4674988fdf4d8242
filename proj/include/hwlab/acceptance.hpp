#ifndef HWLAB_ACCEPTANCE_HPP
#define HWLAB_ACCEPTANCE_HPP

#include <string>
#include <vector>

namespace hwlab {

struct CriterionResult {
  int index = 0;
  std::string name;
  std::string status; // PASS, WARN or FAIL
  std::string detail;
  double seconds = 0.0;

  bool failed() const { return status == "FAIL"; }
};

// Runs the named acceptance criterion ("all" for the full suite). Recipe-
// driven criteria look for checked-in configs under recipes_dir.
std::vector<CriterionResult> run_acceptance(const std::string& suite,
                                            const std::string& recipes_dir = "docs/recipes");

std::vector<std::string> acceptance_suite_names();

} // namespace hwlab

#endif

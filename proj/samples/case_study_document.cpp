// Prints the bundled case study as a plan document; the output is the
// reference file data/case_study.json.

#include <iostream>

#include "millopt/case_study.hpp"

int main() {
  const auto bc = millopt::builtin_case();
  std::cout << millopt::to_document_text(bc.plan, bc.references);
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sturm::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // measured numbers, or the first failing check
};

struct Options {
  std::uint64_t seed = 0x5eed;
  std::string out_dir;  // analysis artifacts land here when nonempty
  int jobs = 1;
};

inline constexpr int criterion_count = 9;

CriterionResult run_one(int id, const Options& opt);
std::vector<CriterionResult> run_all(const Options& opt);

// The deterministic analysis pipeline behind the artifact files; criterion 9
// runs it twice (at different job counts) and compares bytes.
void write_artifacts(const std::string& dir, std::uint64_t seed, int jobs);

// "PASS criterion 1: word-family-identities - ..." lines plus a summary row.
std::string format_table(const std::vector<CriterionResult>& results);
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace sturm::acceptance

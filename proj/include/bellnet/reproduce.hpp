#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace bellnet {

struct RowResult {
  std::string id;
  std::string title;
  enum class Status { pass, fail, skip } status = Status::fail;
  std::string detail;
  double seconds = 0.0;
};

struct ReproduceOptions {
  std::filesystem::path networks_dir;  // empty -> compiled-in default
  uint64_t seed = 0xbe115eed;
  int jobs = 0;
};

// Runs the full verification matrix against the bundled network files: one
// row per claimed bound or identity, each at its pinned tolerance. Rows that
// need a dense statevector beyond the cap report skip, not failure.
std::vector<RowResult> reproduce_paper(const ReproduceOptions& options);

// True when no row failed (skips are allowed).
bool all_rows_passed(const std::vector<RowResult>& rows);

std::string to_string(RowResult::Status status);

}  // namespace bellnet

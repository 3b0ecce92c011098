// Acceptance suite: one line per verified bound or identity. Exits nonzero
// if any row fails; skipped rows (dense cap) do not fail the run.

#include <cstdio>
#include <cstring>

#include "bellnet/reproduce.hpp"

int main(int argc, char** argv) {
  bellnet::ReproduceOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--networks") == 0 && i + 1 < argc) {
      options.networks_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      options.seed = std::strtoull(argv[++i], nullptr, 0);
    } else if (std::strcmp(argv[i], "--jobs") == 0 && i + 1 < argc) {
      options.jobs = std::atoi(argv[++i]);
    }
  }
  std::printf("seed: %#llx\n", static_cast<unsigned long long>(options.seed));
  const auto rows = bellnet::reproduce_paper(options);
  int failed = 0;
  for (const auto& row : rows) {
    std::printf("[%s] %-4s %-55s (%.2fs) %s\n",
                bellnet::to_string(row.status).c_str(), row.id.c_str(),
                row.title.c_str(), row.seconds,
                row.status == bellnet::RowResult::Status::pass
                    ? ""
                    : row.detail.c_str());
    failed += row.status == bellnet::RowResult::Status::fail;
  }
  std::printf("%d/%zu rows passed\n", static_cast<int>(rows.size()) - failed,
              rows.size());
  return failed == 0 ? 0 : 1;
}

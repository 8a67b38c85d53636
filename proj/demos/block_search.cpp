// Range-partitioned search: factor a 40-bit bi-prime with 6-bit blocks, then
// refine a small one bit by bit.

#include <iostream>

#include "hubofact/search.hpp"

int main() {
  using namespace hubofact;

  const BigInt n("1000070001221");
  const BlockPlan plan = default_block_plan(n, 6, BigInt(1000000));
  std::cout << "plan holds " << plan.blocks.size() << " candidate blocks\n";

  RangeSearchOptions options;
  options.workers = 2;
  const SolveReport report = range_search(n, plan, options);
  if (report.found) {
    std::cout << n << " = " << report.p << " * " << report.q << "  (block ("
              << report.hit_block->i << "," << report.hit_block->j
              << "), shifted energy " << report.energy_shifted << ")\n";
  }

  const SolveReport refine = decompose_solve(15, 3);
  std::cout << "bit refinement of 15:";
  for (const auto& step : refine.stage_trace) {
    std::cout << " (" << step.p_step << "," << step.q_step << ")";
  }
  std::cout << " -> p = " << refine.p << ", q = " << refine.q << "\n";
  return 0;
}

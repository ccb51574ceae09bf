#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace weylsheet {

/// Worker count used by grid loops. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(k) for k in [0, count), split into contiguous blocks.
/// Every index is written by exactly one worker, so results do not depend
/// on the split.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (tree) summation; the association order depends only on the length.
double pairwise_sum(std::span<const double> values);

}  // namespace weylsheet

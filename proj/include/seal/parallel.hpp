#pragma once

#include <cstddef>
#include <functional>

namespace seal {

// Runs fn(0..count-1) across worker threads in static chunks. Each index must
// write only to its own slot, so results are identical for any thread count.
// threads <= 0 selects hardware concurrency (capped by SEAL_THREADS if set).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

int default_thread_count();

}  // namespace seal

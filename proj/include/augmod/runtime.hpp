#pragma once

#include <cstdint>
#include <functional>

namespace augmod {

// Worker-thread budget for example-level parallelism (generation, batch
// forward/backward, evaluation). Defaults to AUGMOD_THREADS or the hardware
// count. Results never depend on the thread count: parallel sections write to
// per-index slots and reductions run in index order afterwards.
void set_max_threads(int n);
int max_threads();

void parallel_for(std::int64_t n, const std::function<void(std::int64_t)>& body);

}  // namespace augmod

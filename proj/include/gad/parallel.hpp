#pragma once

#include <cstdint>
#include <functional>

namespace gad {

// Global worker count. Defaults to the hardware concurrency; the CLI
// overrides it from --workers or the GAD_WORKERS environment variable.
int worker_count();
void set_worker_count(int workers);

// Runs fn(begin, end) over a static partition of [0, n) on the configured
// number of workers. Each chunk writes only its own output slots, so results
// are identical regardless of worker count. Nested calls from inside a
// worker run inline on the calling thread.
void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& fn);

} // namespace gad

#pragma once

namespace latentpde {

/// Worker-parallelism cap: LATENTPDE_THREADS when set, else hardware
/// concurrency, at least 1.
int max_worker_threads();

} // namespace latentpde

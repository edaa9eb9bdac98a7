#include "latentpde/threading.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace latentpde {

int max_worker_threads() {
    if (const char* env = std::getenv("LATENTPDE_THREADS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (...) {
            // fall through to hardware default on unparsable values
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace latentpde

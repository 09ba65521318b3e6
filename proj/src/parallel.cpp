#include "dimeron/parallel.hpp"

#include <cstdlib>
#include <string>

namespace dimeron {

std::size_t default_thread_count() {
    if (const char* env = std::getenv("DIMERON_LAB_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0)
                return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace dimeron

#include "segsolve/parallel.hpp"

#include <cstdlib>
#include <string>

namespace segsolve {

unsigned threads_from_environment()
{
    const char* value = std::getenv("SEGSOLVE_THREADS");
    if (!value || !*value)
        return 1;
    try {
        const long n = std::stol(value);
        return n < 1 ? 1u : static_cast<unsigned>(n);
    } catch (const std::exception&) {
        return 1;
    }
}

} // namespace segsolve

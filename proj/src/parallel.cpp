#include "oitk/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oitk {

void configure_threads() {
#ifdef _OPENMP
    if (const char* env = std::getenv("OITK_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1) omp_set_num_threads(n);
        } catch (const std::exception&) {
        }
    }
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace oitk

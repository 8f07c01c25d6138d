#pragma once

namespace oitk {

// Applies the OITK_THREADS cap (if set) to the OpenMP runtime. Safe to call
// repeatedly; a no-op without OpenMP.
void configure_threads();

int max_threads();

}  // namespace oitk

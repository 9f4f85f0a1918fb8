#pragma once

namespace dpp {

// Execution policy for the data-parallel kernels. Serial and Parallel
// produce bit-identical results: every parallel loop writes disjoint
// slots and all reductions run in a fixed index order afterwards.
enum class Exec { Serial, Parallel };

// Number of OpenMP threads the parallel kernels may use. Respects the
// DPP_THREADS environment variable as an upper cap; always >= 1.
int max_threads();

}  // namespace dpp

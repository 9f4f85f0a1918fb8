#include "partdpp/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace dpp {

int max_threads() {
  int n = omp_get_max_threads();
  if (const char* cap = std::getenv("DPP_THREADS")) {
    try {
      int requested = std::stoi(cap);
      if (requested >= 1 && requested < n) n = requested;
    } catch (...) {
      // unparsable cap: ignore and use the OpenMP default
    }
  }
  return n < 1 ? 1 : n;
}

}  // namespace dpp

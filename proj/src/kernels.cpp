#include "cspi/kernels.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "cspi/error.hpp"

namespace cspi::kernels {

void apply_thread_limit_from_env() {
  const char* raw = std::getenv("CSPI_LAB_THREADS");
  if (!raw || !*raw) return;
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != std::string(raw).size() || n < 1)
    throw LabError(ErrorKind::ConfigInvalid,
                   std::string("CSPI_LAB_THREADS must be a positive integer, got '") + raw + "'");
  omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace cspi::kernels

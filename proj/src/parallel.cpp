#include "geqhom/parallel.hpp"

#include <algorithm>

namespace geqhom {
namespace {
std::atomic<unsigned> g_jobs{1};
}

void set_default_jobs(unsigned jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  g_jobs.store(jobs);
}

unsigned default_jobs() { return g_jobs.load(); }

}  // namespace geqhom

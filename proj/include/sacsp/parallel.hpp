#pragma once

namespace sacsp::parallel {

// Number of OpenMP threads a parallel region will use (1 without OpenMP).
int worker_count();

// Apply the SACSP_THREADS env var cap, if set. Called by executables once.
void configure_from_env();

void set_worker_count(int n);

}  // namespace sacsp::parallel

#pragma once

namespace thermvisc {

// Data-parallel width: THERMVISC_THREADS when set to a positive integer,
// otherwise the OpenMP default (1 without OpenMP).
int thread_count();

}  // namespace thermvisc

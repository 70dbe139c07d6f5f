#pragma once

namespace icid {

// Process-wide switch for the OpenMP paths. The parallel kernels are written
// so that results are bit-identical with the switch on or off; turning it off
// is only useful for timing comparisons against the serial reference.
void set_parallel(bool enabled);
bool parallel_enabled();

}  // namespace icid

#pragma once

#include <cstddef>

#include "shearvol/volume.hpp"

namespace shearvol {

/// Bulk-motion suppression by median subtraction: within every B-frame,
/// each depth row has its median across the fast-scan axis subtracted, and
/// negative results are clamped to 0.
VolumeGrid median_subtract(const VolumeGrid& volume);

/// Centered moving mean along depth. For even windows the extra sample is
/// trailing (offsets -w/2+1 .. w/2); near the ends the window shrinks to the
/// samples that exist. Throws ParameterError for window < 1.
VolumeGrid pixel_average_axial(const VolumeGrid& volume, int window = 6);

}  // namespace shearvol

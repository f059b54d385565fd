#pragma once

#include "labelvar/core/dataset.hpp"

namespace labelvar::ingest {

// Collapses a slice-level dataset to one row per scan_id, in order of first
// appearance. Annotation and prediction cells take the maximum over the scan's
// slices, ignoring missing cells (missing only if every slice is missing).
// Metadata takes the value of the slice with the lowest index. Derived columns
// are dropped; recompute them on the CT-level result. A CT-level input is
// returned unchanged.
Dataset aggregate_to_ct(const Dataset& dataset);

}  // namespace labelvar::ingest

#pragma once

#include <string>
#include <vector>

#include "msh/bench.hpp"

namespace msh {

// CSV with header "x,y", "x,y,z" or "x1,y1,x2,y2", optionally followed by
// ",label" (nonnegative integers, 0 = outlier). Throws ParseError with the
// 1-based line number on malformed input, IoError when unreadable.
LabeledDataset load_dataset(const std::string& path);

// Writes the matching header; numbers are round-trip exact (%.17g).
void save_dataset(const std::string& path, const LabeledDataset& dataset);

// Either a bare label file (header "label") or a dataset file with a label
// column.
std::vector<int> load_labels(const std::string& path);

void save_labels(const std::string& path, const std::vector<int>& labels);

}  // namespace msh

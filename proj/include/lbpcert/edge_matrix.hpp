#pragma once

#include <cstddef>
#include <vector>

namespace lbpcert {

/// Sparse nonnegative matrix indexed by directed factor->variable edges
/// (canonical directed_edges order). At most one entry per (row, col);
/// entries are kept in construction order, which fixes the accumulation
/// order of matvec.
struct EdgeMatrix {
  struct Entry {
    int row = 0;
    int col = 0;
    double value = 0.0;
  };

  std::size_t dim = 0;
  std::vector<Entry> entries;
};

}  // namespace lbpcert

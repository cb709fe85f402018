#pragma once

#include <span>

namespace hmhom {

/// Pure entry oracle for a matrix that is never materialized. Indices are in
/// the original (caller-facing) ordering; permutations are handled by the
/// assembly layer. Implementations must be safe for concurrent use and
/// repeated queries must return identical values.
class EntryGenerator {
 public:
  virtual ~EntryGenerator() = default;

  virtual int rows() const = 0;
  virtual int cols() const = 0;
  virtual double entry(int i, int j) const = 0;

  /// Row i restricted to the given columns. The default loops over entry().
  virtual void row(int i, std::span<const int> cols_idx, std::span<double> out) const {
    for (std::size_t k = 0; k < cols_idx.size(); ++k) out[k] = entry(i, cols_idx[k]);
  }

  /// Column j restricted to the given rows.
  virtual void column(int j, std::span<const int> rows_idx, std::span<double> out) const {
    for (std::size_t k = 0; k < rows_idx.size(); ++k) out[k] = entry(rows_idx[k], j);
  }
};

}  // namespace hmhom

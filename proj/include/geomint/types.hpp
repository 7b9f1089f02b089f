#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "geomint/errors.hpp"

namespace geomint {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Partition of the configuration indices {0..n-1} into a free block and a
/// constrained block, both sorted ascending. The constrained velocities are
/// determined by the free ones through the constraint coefficients, so every
/// reduced quantity is indexed by the free block.
struct IndexSplit {
  int n = 0;
  std::vector<int> free;
  std::vector<int> constrained;

  int num_free() const { return static_cast<int>(free.size()); }
  int num_constrained() const { return static_cast<int>(constrained.size()); }
};

/// Lists every violated invariant; empty means the split is well formed.
std::vector<std::string> validate_split(const IndexSplit& split);

/// Throws ValidationError with the first violation, if any.
void require_valid(const IndexSplit& split);

/// Extracts the entries of `full` at the given indices, preserving order.
Vec gather(const Vec& full, const std::vector<int>& idx);

/// Writes `part` back into `full` at the given indices.
void scatter(Vec& full, const std::vector<int>& idx, const Vec& part);

/// Point of the momentum phase space in coordinates.
struct PhaseState {
  Vec q;
  Vec p;
};

/// Point of the velocity phase space in coordinates.
struct TangentState {
  Vec q;
  Vec v;
};

/// State of the constrained-variational dynamics: configuration, free
/// velocities, and the multipliers conjugate to the constrained directions.
struct VakonomicState {
  Vec q;
  Vec vfree;
  Vec mu;
};

/// Time grid plus named column blocks (q, p or v, multipliers, diagnostics).
/// Rows are appended one sample at a time; times must stay strictly
/// increasing. Immutable apart from append, safe to share once filled.
class Trajectory {
public:
  Trajectory() = default;
  explicit Trajectory(std::vector<std::pair<std::string, int>> blocks);

  void append(double t, const Vec& row);

  int rows() const { return static_cast<int>(times_.size()); }
  int width() const { return width_; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<std::pair<std::string, int>>& blocks() const { return blocks_; }

  bool has_block(const std::string& name) const;
  int block_width(const std::string& name) const;

  /// Copy of one block's entries on one row.
  Vec block_row(int row, const std::string& name) const;
  /// Copy of a whole block as a rows x width matrix.
  Mat block_matrix(const std::string& name) const;
  /// Full row (all blocks concatenated).
  Vec row(int r) const;

private:
  int block_offset(const std::string& name) const;

  std::vector<std::pair<std::string, int>> blocks_;
  int width_ = 0;
  std::vector<double> times_;
  std::vector<double> data_;  // row-major rows x width
};

}  // namespace geomint

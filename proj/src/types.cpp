#include "geomint/types.hpp"

#include <algorithm>
#include <cstdio>

namespace geomint {

std::vector<std::string> validate_split(const IndexSplit& split) {
  std::vector<std::string> violations;
  if (split.n < 0) violations.push_back("negative dimension");
  auto check_sorted = [&](const std::vector<int>& v, const char* label) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] < 0 || v[i] >= split.n)
        violations.push_back(std::string(label) + " index " + std::to_string(v[i]) +
                             " out of range");
      if (i > 0 && v[i] <= v[i - 1])
        violations.push_back(std::string(label) + " indices not strictly ascending at " +
                             std::to_string(v[i]));
    }
  };
  check_sorted(split.free, "free");
  check_sorted(split.constrained, "constrained");
  for (int i : split.free) {
    if (std::binary_search(split.constrained.begin(), split.constrained.end(), i))
      violations.push_back("overlap at " + std::to_string(i));
  }
  if (static_cast<int>(split.free.size() + split.constrained.size()) != split.n)
    violations.push_back("cover incomplete: " + std::to_string(split.free.size()) + "+" +
                         std::to_string(split.constrained.size()) +
                         " indices for dimension " + std::to_string(split.n));
  return violations;
}

void require_valid(const IndexSplit& split) {
  auto v = validate_split(split);
  if (!v.empty()) throw ValidationError("invalid index split: " + v.front());
}

Vec gather(const Vec& full, const std::vector<int>& idx) {
  Vec out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[idx[i]];
  return out;
}

void scatter(Vec& full, const std::vector<int>& idx, const Vec& part) {
  for (std::size_t i = 0; i < idx.size(); ++i) full[idx[i]] = part[static_cast<Eigen::Index>(i)];
}

Trajectory::Trajectory(std::vector<std::pair<std::string, int>> blocks)
    : blocks_(std::move(blocks)) {
  for (const auto& [name, w] : blocks_) {
    if (w < 0) throw ValidationError("trajectory block '" + name + "' has negative width");
    width_ += w;
  }
}

void Trajectory::append(double t, const Vec& row) {
  if (!times_.empty() && t <= times_.back())
    throw ValidationError("trajectory times must be strictly increasing: " + std::to_string(t) +
                          " after " + std::to_string(times_.back()));
  if (row.size() != width_)
    throw ValidationError("trajectory row width " + std::to_string(row.size()) +
                          " does not match layout width " + std::to_string(width_));
  times_.push_back(t);
  data_.insert(data_.end(), row.data(), row.data() + row.size());
}

bool Trajectory::has_block(const std::string& name) const {
  for (const auto& [n, w] : blocks_)
    if (n == name) return true;
  return false;
}

int Trajectory::block_offset(const std::string& name) const {
  int off = 0;
  for (const auto& [n, w] : blocks_) {
    if (n == name) return off;
    off += w;
  }
  throw ValidationError("trajectory has no block named '" + name + "'");
}

int Trajectory::block_width(const std::string& name) const {
  for (const auto& [n, w] : blocks_)
    if (n == name) return w;
  throw ValidationError("trajectory has no block named '" + name + "'");
}

Vec Trajectory::block_row(int row, const std::string& name) const {
  int off = block_offset(name);
  int w = block_width(name);
  Vec out(w);
  const double* base = data_.data() + static_cast<std::size_t>(row) * width_ + off;
  for (int j = 0; j < w; ++j) out[j] = base[j];
  return out;
}

Mat Trajectory::block_matrix(const std::string& name) const {
  int off = block_offset(name);
  int w = block_width(name);
  Mat out(rows(), w);
  for (int r = 0; r < rows(); ++r) {
    const double* base = data_.data() + static_cast<std::size_t>(r) * width_ + off;
    for (int j = 0; j < w; ++j) out(r, j) = base[j];
  }
  return out;
}

Vec Trajectory::row(int r) const {
  Vec out(width_);
  const double* base = data_.data() + static_cast<std::size_t>(r) * width_;
  for (int j = 0; j < width_; ++j) out[j] = base[j];
  return out;
}

}  // namespace geomint

namespace geomint::detail {

std::string short_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace geomint::detail

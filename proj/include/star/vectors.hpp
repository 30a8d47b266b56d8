#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace star {

/// Dense unit vectors are served and persisted as 32-bit floats.
using Vector = std::vector<float>;

/// Row-major table of equally sized vectors with unique string ids.
class VectorTable {
 public:
  explicit VectorTable(std::uint32_t dim = 0) : dim_(dim) {}

  std::uint32_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * static_cast<std::size_t>(dim_), dim_};
  }
  std::span<const float> values() const { return values_; }

  /// Throws DimensionMismatch or DuplicateDocumentId.
  void append(std::string id, std::span<const float> v);
  void reserve(std::size_t rows);

  std::optional<std::size_t> find(std::string_view id) const;

  bool operator==(const VectorTable& other) const {
    return dim_ == other.dim_ && ids_ == other.ids_ && values_ == other.values_;
  }

 private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace star

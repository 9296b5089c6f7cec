#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pagesplit/region.hpp"

namespace pagesplit {

enum class SplitOrientation { horizontal, vertical, none };

std::string_view to_string(SplitOrientation o) noexcept;
SplitOrientation parse_split_orientation(std::string_view text);

struct SegmentNode {
  std::string id;
  Region region;
  int depth = 0;
  SplitOrientation split = SplitOrientation::none;
  std::vector<std::string> children;  // reading order

  bool is_leaf() const noexcept { return children.empty(); }
  friend bool operator==(const SegmentNode&, const SegmentNode&) = default;
};

/// Hierarchical rectangular division of a screenshot. Node ids are
/// path-derived: the root is "0", its children "0.0", "0.1", ...
class SegmentTree {
 public:
  static constexpr int kSchemaVersion = 1;

  /// A single leaf covering the whole source image.
  SegmentTree(int source_width, int source_height);

  int source_width() const noexcept { return width_; }
  int source_height() const noexcept { return height_; }
  const std::string& root_id() const noexcept { return root_; }
  const SegmentNode& root() const { return node(root_); }

  const SegmentNode& node(std::string_view id) const;
  const SegmentNode* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  const std::map<std::string, SegmentNode, std::less<>>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Parent id, or nullopt for the root.
  std::optional<std::string> parent(std::string_view id) const;

  /// Splits leaf `id` at absolute `cuts` (y coordinates for horizontal,
  /// x for vertical). Cuts must be strictly increasing and interior.
  void split(std::string_view id, SplitOrientation orientation, std::span<const int> cuts);

  std::vector<std::string> preorder() const;
  /// Leaves in depth-first reading order.
  std::vector<std::string> leaves() const;
  int height() const;  // longest root-to-leaf edge count

  /// Throws TreeError on any structural invariant violation.
  void validate() const;

  nlohmann::json to_json() const;
  static SegmentTree from_json(const nlohmann::json& j);

  friend bool operator==(const SegmentTree&, const SegmentTree&) = default;

 private:
  int width_;
  int height_;
  std::string root_;
  std::map<std::string, SegmentNode, std::less<>> nodes_;
};

}  // namespace pagesplit

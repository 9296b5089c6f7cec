#include "pagesplit/segment_tree.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "pagesplit/errors.hpp"

namespace pagesplit {

std::string_view to_string(SplitOrientation o) noexcept {
  switch (o) {
    case SplitOrientation::horizontal:
      return "horizontal";
    case SplitOrientation::vertical:
      return "vertical";
    case SplitOrientation::none:
      break;
  }
  return "none";
}

SplitOrientation parse_split_orientation(std::string_view text) {
  if (text == "horizontal") return SplitOrientation::horizontal;
  if (text == "vertical") return SplitOrientation::vertical;
  if (text == "none") return SplitOrientation::none;
  throw TreeError("unknown split orientation '" + std::string(text) + "'");
}

SegmentTree::SegmentTree(int source_width, int source_height)
    : width_(source_width), height_(source_height), root_("0") {
  if (source_width < 1 || source_height < 1) {
    throw TreeError("source dimensions must be positive");
  }
  nodes_.emplace(root_, SegmentNode{root_, {0, 0, width_, height_}, 0, SplitOrientation::none, {}});
}

const SegmentNode& SegmentTree::node(std::string_view id) const {
  const auto* n = find(id);
  if (n == nullptr) throw TreeError("unknown segment id '" + std::string(id) + "'");
  return *n;
}

const SegmentNode* SegmentTree::find(std::string_view id) const {
  const auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

std::optional<std::string> SegmentTree::parent(std::string_view id) const {
  node(id);
  const auto dot = id.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  return std::string(id.substr(0, dot));
}

void SegmentTree::split(std::string_view id, SplitOrientation orientation,
                        std::span<const int> cuts) {
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw TreeError("unknown segment id '" + std::string(id) + "'");
  SegmentNode& parent = it->second;
  if (!parent.is_leaf()) throw TreeError("segment '" + parent.id + "' is already split");
  if (orientation == SplitOrientation::none) throw TreeError("split needs an orientation");
  if (cuts.empty()) throw TreeError("split needs at least one cut");

  const Region r = parent.region;
  const bool horiz = orientation == SplitOrientation::horizontal;
  const int lo = horiz ? r.y0 : r.x0;
  const int hi = horiz ? r.y1 : r.x1;
  int prev = lo;
  std::vector<SegmentNode> kids;
  for (std::size_t k = 0; k <= cuts.size(); ++k) {
    const int next = k < cuts.size() ? cuts[k] : hi;
    if (next <= prev || (k < cuts.size() && next >= hi)) {
      throw TreeError("cuts for '" + parent.id + "' must be strictly increasing inside (" +
                      std::to_string(lo) + "," + std::to_string(hi) + ")");
    }
    Region child = r;
    if (horiz) {
      child.y0 = prev;
      child.y1 = next;
    } else {
      child.x0 = prev;
      child.x1 = next;
    }
    kids.push_back({parent.id + "." + std::to_string(k), child, parent.depth + 1,
                    SplitOrientation::none, {}});
    prev = next;
  }
  parent.split = orientation;
  for (auto& kid : kids) {
    parent.children.push_back(kid.id);
  }
  for (auto& kid : kids) {
    std::string key = kid.id;
    nodes_.emplace(std::move(key), std::move(kid));
  }
}

std::vector<std::string> SegmentTree::preorder() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  std::vector<const SegmentNode*> stack{&root()};
  while (!stack.empty()) {
    const SegmentNode* n = stack.back();
    stack.pop_back();
    out.push_back(n->id);
    for (auto c = n->children.rbegin(); c != n->children.rend(); ++c) {
      stack.push_back(&node(*c));
    }
  }
  return out;
}

std::vector<std::string> SegmentTree::leaves() const {
  std::vector<std::string> out;
  for (auto& id : preorder()) {
    if (node(id).is_leaf()) out.push_back(std::move(id));
  }
  return out;
}

int SegmentTree::height() const {
  int h = 0;
  for (const auto& [id, n] : nodes_) h = std::max(h, n.depth);
  return h;
}

void SegmentTree::validate() const {
  const SegmentNode* root_node = find(root_);
  if (root_node == nullptr) throw TreeError("missing root");
  if (root_node->region != Region{0, 0, width_, height_} || root_node->depth != 0) {
    throw TreeError("root must cover the source image at depth 0");
  }
  std::set<std::string, std::less<>> seen;
  std::vector<const SegmentNode*> stack{root_node};
  while (!stack.empty()) {
    const SegmentNode* n = stack.back();
    stack.pop_back();
    if (!seen.insert(n->id).second) throw TreeError("node '" + n->id + "' reached twice");
    if (!n->region.valid_within(width_, height_)) {
      throw TreeError("node '" + n->id + "' region " + n->region.to_string() + " out of bounds");
    }
    if (n->is_leaf() != (n->split == SplitOrientation::none)) {
      throw TreeError("node '" + n->id + "' leaf/orientation mismatch");
    }
    std::int64_t area = 0;
    std::vector<const SegmentNode*> kids;
    for (const auto& cid : n->children) {
      const SegmentNode* c = find(cid);
      if (c == nullptr) throw TreeError("node '" + n->id + "' has unknown child '" + cid + "'");
      if (c->depth != n->depth + 1) throw TreeError("child '" + cid + "' depth mismatch");
      if (!n->region.contains(c->region)) throw TreeError("child '" + cid + "' escapes parent");
      for (const auto* k : kids) {
        if (k->region.overlaps(c->region)) throw TreeError("children of '" + n->id + "' overlap");
      }
      area += c->region.area();
      kids.push_back(c);
      stack.push_back(c);
    }
    if (!kids.empty() && area != n->region.area()) {
      throw TreeError("children of '" + n->id + "' do not tile the parent");
    }
  }
  if (seen.size() != nodes_.size()) throw TreeError("tree has unreachable nodes");
}

nlohmann::json SegmentTree::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& id : preorder()) {
    const auto& n = node(id);
    nodes.push_back({
        {"id", n.id},
        {"region", {{"x0", n.region.x0}, {"y0", n.region.y0}, {"x1", n.region.x1}, {"y1", n.region.y1}}},
        {"depth", n.depth},
        {"split_orientation", std::string(to_string(n.split))},
        {"children", n.children},
    });
  }
  return {
      {"schema", kSchemaVersion},
      {"root", root_},
      {"source_width", width_},
      {"source_height", height_},
      {"nodes", std::move(nodes)},
  };
}

SegmentTree SegmentTree::from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<int>() != kSchemaVersion) {
      throw TreeError("unsupported tree schema " + j.at("schema").dump());
    }
    SegmentTree tree(j.at("source_width").get<int>(), j.at("source_height").get<int>());
    tree.root_ = j.at("root").get<std::string>();
    tree.nodes_.clear();
    for (const auto& jn : j.at("nodes")) {
      SegmentNode n;
      n.id = jn.at("id").get<std::string>();
      const auto& r = jn.at("region");
      n.region = {r.at("x0").get<int>(), r.at("y0").get<int>(), r.at("x1").get<int>(),
                  r.at("y1").get<int>()};
      n.depth = jn.at("depth").get<int>();
      n.split = parse_split_orientation(jn.at("split_orientation").get<std::string>());
      n.children = jn.at("children").get<std::vector<std::string>>();
      std::string key = n.id;
      if (!tree.nodes_.emplace(std::move(key), std::move(n)).second) {
        throw TreeError("duplicate node id");
      }
    }
    tree.validate();
    return tree;
  } catch (const nlohmann::json::exception& e) {
    throw TreeError(std::string("malformed tree json: ") + e.what());
  }
}

}  // namespace pagesplit

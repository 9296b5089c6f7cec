#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "pagesplit/pipeline.hpp"

namespace pagesplit {
namespace {

std::vector<double> tracks_from(const std::vector<int>& lines, int extent) {
  std::vector<double> tracks;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    tracks.push_back(static_cast<double>(lines[i] - lines[i - 1]) / extent);
  }
  return tracks;
}

int index_of(const std::vector<int>& lines, int value) {
  return static_cast<int>(std::lower_bound(lines.begin(), lines.end(), value) - lines.begin());
}

std::string track_list(const std::vector<double>& tracks) {
  std::ostringstream out;
  out << std::setprecision(10);
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    if (i > 0) out << ' ';
    out << tracks[i] << "fr";
  }
  return out.str();
}

}  // namespace

GridTemplate build_grid_template(const SegmentTree& tree,
                                 const std::map<std::string, std::string>& fragments) {
  const auto leaves = tree.leaves();
  std::set<int> xs_set;
  std::set<int> ys_set;
  for (const auto& id : leaves) {
    if (!fragments.contains(id)) throw PipelineError("no fragment for leaf '" + id + "'");
    const Region& r = tree.node(id).region;
    xs_set.insert({r.x0, r.x1});
    ys_set.insert({r.y0, r.y1});
  }
  const std::vector<int> xs(xs_set.begin(), xs_set.end());
  const std::vector<int> ys(ys_set.begin(), ys_set.end());

  GridTemplate grid;
  grid.column_tracks = tracks_from(xs, tree.source_width());
  grid.row_tracks = tracks_from(ys, tree.source_height());

  std::ostringstream html;
  html << "<!DOCTYPE html>\n"
          "<html lang=\"en\">\n"
          "<head>\n"
          "<meta charset=\"utf-8\">\n"
          "<style>\n"
          "body { margin: 0; }\n"
          ".page-grid { display: grid; width: 100%; aspect-ratio: "
       << tree.source_width() << " / " << tree.source_height()
       << "; grid-template-columns: " << track_list(grid.column_tracks)
       << "; grid-template-rows: " << track_list(grid.row_tracks)
       << "; }\n"
          ".page-grid > .segment { min-width: 0; min-height: 0; overflow: hidden; }\n"
          "</style>\n"
          "</head>\n"
          "<body>\n"
          "<div class=\"page-grid\">\n";
  for (const auto& id : leaves) {
    const Region& r = tree.node(id).region;
    const GridPlacement p{index_of(xs, r.x0), index_of(xs, r.x1), index_of(ys, r.y0),
                          index_of(ys, r.y1)};
    grid.placements.emplace(id, p);
    // CSS grid lines are 1-based: row-start / column-start / row-end / column-end.
    html << "<div class=\"segment\" data-segment=\"" << id << "\" style=\"grid-area: "
         << p.row_start + 1 << " / " << p.col_start + 1 << " / " << p.row_end + 1 << " / "
         << p.col_end + 1 << ";\">\n"
         << fragments.at(id) << "\n</div>\n";
  }
  html << "</div>\n</body>\n</html>\n";
  grid.scaffold_html = html.str();
  return grid;
}

}  // namespace pagesplit

#include "pagesplit/prompts.hpp"

#include "pagesplit/text.hpp"

namespace pagesplit {
namespace {

constexpr std::string_view kLeaf = R"(You are an expert web developer who specializes in HTML and CSS.
The image is a cropped region of a webpage screenshot. Write the HTML and CSS that reproduces
this region exactly: match the layout, text, font sizes, colors, spacing and borders.
Use inline <style> or style attributes; do not use JavaScript.
Replace images with placeholder <div>s or <img src="placeholder.png"> of the same size.
Reproduce all visible text verbatim.
Return only the code in a single ```html fenced block.)";

constexpr std::string_view kNode = R"(You are an expert web developer who specializes in HTML and CSS.
The image is a region of a webpage screenshot. It has been divided into smaller parts, and code
has already been written for each part. The code of the parts is given below in reading order
(top to bottom, left to right).
Combine the parts into one coherent piece of HTML and CSS that reproduces the whole region in
the image. Keep the content of each part, fix their relative placement, sizes and spacing so
the result matches the image, and remove duplicated or conflicting styles.
Do not use JavaScript. Return only the code in a single ```html fenced block.

Code of the parts:
{CHILD_CODE})";

constexpr std::string_view kFinal = R"(You are an expert web developer who specializes in HTML and CSS.
The image is a full webpage screenshot. A draft implementation was assembled by placing code
for each region of the screenshot into a CSS grid at the region's position. Refine the draft
into a complete, cohesive HTML document that reproduces the screenshot exactly: fix spacing,
alignment, sizes and colors, and merge styles so the page renders as one design.
Keep all text verbatim. Do not use JavaScript.
Return the complete document in a single ```html fenced block.

Draft:
{GRID_TEMPLATE})";

std::string join(std::span<const std::string> parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += parts[i];
  }
  return out;
}

}  // namespace

PromptSet PromptSet::defaults() {
  return {std::string(kLeaf), std::string(kNode), std::string(kFinal)};
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  PromptSet set = defaults();
  const auto read_if = [&dir](const char* name, std::string& into) {
    const auto p = dir / name;
    if (std::filesystem::exists(p)) into = read_text_file(p);
  };
  read_if("leaf.txt", set.leaf);
  read_if("node.txt", set.node);
  read_if("final.txt", set.final);
  return set;
}

const std::string& PromptSet::for_role(PromptRole role) const noexcept {
  switch (role) {
    case PromptRole::leaf:
      return leaf;
    case PromptRole::node:
      return node;
    case PromptRole::final:
      break;
  }
  return final;
}

std::string render_prompt(const PromptSet& prompts, PromptRole role,
                          std::span<const std::string> child_code,
                          std::string_view grid_template) {
  std::string text = prompts.for_role(role);
  const std::string children = join(child_code);
  const bool wants_children = !children.empty() && text.find("{CHILD_CODE}") == std::string::npos;
  const bool wants_grid =
      !grid_template.empty() && text.find("{GRID_TEMPLATE}") == std::string::npos;
  text = replace_all(std::move(text), "{CHILD_CODE}", children);
  text = replace_all(std::move(text), "{GRID_TEMPLATE}", grid_template);
  if (wants_grid) {
    text += "\n\n";
    text += grid_template;
  } else if (wants_children) {
    text += "\n\n";
    text += children;
  }
  return text;
}

}  // namespace pagesplit

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "pagesplit/types.hpp"

namespace pagesplit {

/// Prompt templates for the three roles. Placeholders: {CHILD_CODE} (children
/// code in reading order) and {GRID_TEMPLATE} (the assembled grid scaffold).
struct PromptSet {
  std::string leaf;
  std::string node;
  std::string final;

  static PromptSet defaults();

  /// Reads leaf.txt, node.txt and final.txt from `dir`; a missing file keeps
  /// the built-in template for that role.
  static PromptSet load(const std::filesystem::path& dir);

  const std::string& for_role(PromptRole role) const noexcept;
};

/// Fills a role template. When the template has no placeholder for the
/// supplied code, the code is appended after the instructions.
std::string render_prompt(const PromptSet& prompts, PromptRole role,
                          std::span<const std::string> child_code,
                          std::string_view grid_template = {});

}  // namespace pagesplit

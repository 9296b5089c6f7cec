#include "pagesplit/pipeline.hpp"

#include <chrono>
#include <exception>
#include <future>

#include "pagesplit/image_io.hpp"
#include "pagesplit/segmenter.hpp"

namespace pagesplit {
namespace {

using Clock = std::chrono::steady_clock;

constexpr std::string_view kFinalId = "final";

struct CallSpec {
  std::string id;
  PromptRole role = PromptRole::leaf;
  int version = 1;
  Region region;
  std::vector<std::string> child_code;
  std::string grid;  // final call only
};

CodeFragment issue(ChatProvider& provider, const Raster& raster, const PromptSet& prompts,
                   const CallSpec& spec) {
  ChatRequest req;
  req.role = spec.role;
  req.segment_id = spec.id;
  req.version = spec.version;
  req.prompt_text = render_prompt(prompts, spec.role, spec.child_code, spec.grid);
  req.image_png = encode_png(spec.region == raster.bounds() ? raster : crop(raster, spec.region));
  req.child_code = spec.child_code;

  const ChatResponse res = provider.complete(req);
  CodeFragment f;
  f.segment_id = spec.id;
  f.html = res.extracted_html;
  f.role_used = spec.role;
  f.version = spec.version;
  f.truncated = res.truncated;
  f.provider_meta = {res.model, res.usage.prompt_tokens, res.usage.completion_tokens,
                     res.latency_ms, res.attempts};
  return f;
}

/// Issues every call concurrently and returns the fragments in input order.
/// When any call fails, the successful ones are merged into `partial` and a
/// GenerationError naming the first failing spec is thrown.
std::vector<CodeFragment> issue_wave(ChatProvider& provider, const Raster& raster,
                                     const PromptSet& prompts, const std::vector<CallSpec>& specs,
                                     std::map<std::string, CodeFragment>& partial) {
  std::vector<std::future<CodeFragment>> pending;
  pending.reserve(specs.size());
  for (const auto& spec : specs) {
    pending.push_back(std::async(std::launch::async, [&provider, &raster, &prompts, &spec] {
      return issue(provider, raster, prompts, spec);
    }));
  }
  std::vector<CodeFragment> out;
  std::string failed_id;
  std::string failed_what;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      out.push_back(pending[i].get());
      partial[specs[i].id] = out.back();
    } catch (const std::exception& e) {
      if (failed_id.empty()) {
        failed_id = specs[i].id;
        failed_what = e.what();
      }
    }
  }
  if (!failed_id.empty()) {
    throw GenerationError("segment '" + failed_id + "' failed: " + failed_what, failed_id, partial);
  }
  return out;
}

void record(PipelineStats& stats, int depth, const CodeFragment& f) {
  const auto d = static_cast<std::size_t>(depth);
  if (stats.calls_per_depth.size() <= d) {
    stats.calls_per_depth.resize(d + 1, 0);
    stats.output_chars_per_depth.resize(d + 1, 0);
  }
  ++stats.total_calls;
  ++stats.calls_per_depth[d];
  stats.output_chars_per_depth[d] += static_cast<std::int64_t>(f.html.size());
  stats.prompt_tokens += f.provider_meta.prompt_tokens;
  stats.completion_tokens += f.provider_meta.completion_tokens;
}

PipelineStats empty_stats(const SegmentTree& tree) {
  PipelineStats s;
  const auto levels = static_cast<std::size_t>(tree.height()) + 1;
  s.calls_per_depth.assign(levels, 0);
  s.output_chars_per_depth.assign(levels, 0);
  return s;
}

std::vector<std::string> children_code(const SegmentNode& node,
                                       const std::map<std::string, CodeFragment>& fragments) {
  std::vector<std::string> code;
  code.reserve(node.children.size());
  for (const auto& c : node.children) code.push_back(fragments.at(c).html);
  return code;
}

CallSpec node_spec(const SegmentTree& tree, const std::string& id,
                   const std::map<std::string, CodeFragment>& fragments, int version) {
  const SegmentNode& n = tree.node(id);
  CallSpec spec{id, n.is_leaf() ? PromptRole::leaf : PromptRole::node, version, n.region, {}, {}};
  if (!n.is_leaf()) spec.child_code = children_code(n, fragments);
  return spec;
}

CallSpec final_spec(const SegmentTree& tree, const std::string& scaffold, int version) {
  return {tree.root_id(), PromptRole::final, version,
          Region{0, 0, tree.source_width(), tree.source_height()}, {scaffold}, scaffold};
}

CodeFragment as_final(CodeFragment f) {
  f.segment_id = std::string(kFinalId);
  return f;
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

nlohmann::json PipelineStats::to_json(bool include_timing) const {
  nlohmann::json j = {
      {"total_calls", total_calls},
      {"calls_per_depth", calls_per_depth},
      {"output_chars_per_depth", output_chars_per_depth},
      {"prompt_tokens", prompt_tokens},
      {"completion_tokens", completion_tokens},
  };
  if (include_timing) j["wall_time_ms"] = wall_time_ms;
  return j;
}

PipelineStats PipelineStats::from_json(const nlohmann::json& j) {
  PipelineStats s;
  s.total_calls = j.at("total_calls").get<int>();
  s.calls_per_depth = j.at("calls_per_depth").get<std::vector<int>>();
  s.output_chars_per_depth = j.at("output_chars_per_depth").get<std::vector<std::int64_t>>();
  s.prompt_tokens = j.value("prompt_tokens", std::int64_t{0});
  s.completion_tokens = j.value("completion_tokens", std::int64_t{0});
  s.wall_time_ms = j.value("wall_time_ms", 0.0);
  return s;
}

GenerationRun agent_generate(const Raster& raster, const SegmentTree& tree, ChatProvider& provider,
                             const PromptSet& prompts, std::string run_id) {
  const auto start = Clock::now();
  const auto order = tree.preorder();

  // Subtree height decides the wave: a node runs once all of its children have.
  std::map<std::string, int> height;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int h = 0;
    for (const auto& c : tree.node(*it).children) h = std::max(h, height.at(c) + 1);
    height[*it] = h;
  }
  const int waves = height.at(tree.root_id()) + 1;

  std::map<std::string, CodeFragment> fragments;
  PipelineStats stats = empty_stats(tree);
  for (int wave = 0; wave < waves; ++wave) {
    std::vector<CallSpec> specs;
    for (const auto& id : order) {
      if (height.at(id) == wave) specs.push_back(node_spec(tree, id, fragments, 1));
    }
    const auto done = issue_wave(provider, raster, prompts, specs, fragments);
    for (const auto& f : done) record(stats, tree.node(f.segment_id).depth, f);
  }
  stats.wall_time_ms = elapsed_ms(start);

  const CodeFragment root = fragments.at(tree.root_id());
  return GenerationRun{run_id,
                       AssemblyMode::agent,
                       tree,
                       std::move(fragments),
                       std::nullopt,
                       root,
                       HtmlDocument{root.html, run_id},
                       stats};
}

GenerationRun rule_generate(const Raster& raster, const SegmentTree& tree, ChatProvider& provider,
                            const PromptSet& prompts, std::string run_id) {
  const auto start = Clock::now();
  std::map<std::string, CodeFragment> fragments;
  PipelineStats stats = empty_stats(tree);

  std::vector<CallSpec> specs;
  for (const auto& id : tree.leaves()) specs.push_back(node_spec(tree, id, fragments, 1));
  for (const auto& f : issue_wave(provider, raster, prompts, specs, fragments)) {
    record(stats, tree.node(f.segment_id).depth, f);
  }

  std::map<std::string, std::string> html;
  for (const auto& [id, f] : fragments) html.emplace(id, f.html);
  const GridTemplate grid = build_grid_template(tree, html);

  // The final call shares the root's id; keep it out of the fragment store.
  auto scratch = fragments;
  const CodeFragment final = as_final(
      issue_wave(provider, raster, prompts, {final_spec(tree, grid.scaffold_html, 1)}, scratch)
          .front());
  record(stats, 0, final);
  stats.wall_time_ms = elapsed_ms(start);

  return GenerationRun{run_id,
                       AssemblyMode::rule,
                       tree,
                       std::move(fragments),
                       grid.scaffold_html,
                       final,
                       HtmlDocument{final.html, run_id},
                       stats};
}

GenerationRun generate(AssemblyMode mode, const Raster& raster, const SegmentTree& tree,
                       ChatProvider& provider, const PromptSet& prompts, std::string run_id) {
  return mode == AssemblyMode::rule ? rule_generate(raster, tree, provider, prompts, run_id)
                                    : agent_generate(raster, tree, provider, prompts, run_id);
}

Regeneration regenerate_segment(GenerationRun& run, const Raster& raster,
                                std::string_view segment_id, ChatProvider& provider,
                                const PromptSet& prompts) {
  const SegmentTree& tree = run.tree;
  const SegmentNode* target = tree.find(segment_id);
  if (target == nullptr) {
    throw UnknownSegmentError("unknown segment '" + std::string(segment_id) + "'");
  }
  if (run.mode == AssemblyMode::rule && !target->is_leaf()) {
    throw PipelineError("rule-mode runs regenerate leaves only; '" + target->id +
                        "' is an internal node");
  }

  auto fragments = run.fragments;
  Regeneration out;
  const auto bump = [&fragments](const std::string& id) {
    const auto it = fragments.find(id);
    return it == fragments.end() ? 1 : it->second.version + 1;
  };

  // The segment itself, then whatever consumed its code.
  std::vector<std::string> chain{target->id};
  if (run.mode == AssemblyMode::agent) {
    for (auto p = tree.parent(target->id); p; p = tree.parent(*p)) chain.push_back(*p);
  }
  for (const auto& id : chain) {
    const CallSpec spec = node_spec(tree, id, fragments, bump(id));
    fragments[id] = issue_wave(provider, raster, prompts, {spec}, fragments).front();
    out.reissued.push_back(id);
  }
  out.fragment = fragments.at(target->id);

  if (run.mode == AssemblyMode::agent) {
    CodeFragment root = fragments.at(tree.root_id());
    out.document = HtmlDocument{root.html, run.run_id};
    run.fragments = std::move(fragments);
    run.final_fragment = std::move(root);
    run.document = out.document;
    return out;
  }

  std::map<std::string, std::string> html;
  for (const auto& id : tree.leaves()) html.emplace(id, fragments.at(id).html);
  const GridTemplate grid = build_grid_template(tree, html);
  const CallSpec spec = final_spec(tree, grid.scaffold_html, run.final_fragment.version + 1);
  auto scratch = fragments;
  CodeFragment final = as_final(issue_wave(provider, raster, prompts, {spec}, scratch).front());
  out.reissued.emplace_back(kFinalId);
  out.document = HtmlDocument{final.html, run.run_id};

  run.fragments = std::move(fragments);
  run.scaffold_html = grid.scaffold_html;
  run.final_fragment = std::move(final);
  run.document = out.document;
  return out;
}

}  // namespace pagesplit

// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#include "shinka/prompt_templates.hpp"

#include <stdexcept>

#include "shinka/text.hpp"

namespace shinka {

PromptTemplates::PromptTemplates() : templates_(detail::default_template_table()) {}

PromptTemplates PromptTemplates::from_directory(const std::filesystem::path& dir) {
  PromptTemplates t;
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("template directory not found: " + dir.string());
  }
  for (auto& [name, text] : t.templates_) {
    const auto file = dir / (name + ".txt");
    if (std::filesystem::exists(file)) text = read_file(file);
  }
  return t;
}

const std::string& PromptTemplates::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw std::out_of_range("unknown prompt template '" + std::string(name) + "'");
  }
  return it->second;
}

}  // namespace shinka

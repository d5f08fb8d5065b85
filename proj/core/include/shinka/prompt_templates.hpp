// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace shinka {

namespace detail {
const std::map<std::string, std::string, std::less<>>& default_template_table();
}  // namespace detail

/// Named prompt templates (`<name>.txt`). Defaults are compiled in; a
/// template directory may override any subset of them.
class PromptTemplates {
 public:
  PromptTemplates();
  /// Files in `dir` named `<template>.txt` replace the defaults. Unknown file
  /// names are ignored.
  static PromptTemplates from_directory(const std::filesystem::path& dir);

  /// Throws std::out_of_range for an unknown name.
  const std::string& get(std::string_view name) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace shinka

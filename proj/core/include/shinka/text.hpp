// Copyright 2026 The Shinka Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace shinka {

std::string_view trim(std::string_view s);
/// Splits into lines, each keeping its trailing '\n' (the last may lack one).
std::vector<std::string_view> split_lines_keep_newline(std::string_view text);
/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);
/// Strict full-string double parse; throws std::invalid_argument.
double parse_double(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Replaces each `{name}` whose name is a key of `values`, in a single pass
/// over `tmpl`; substituted text is never rescanned, unknown braces are kept.
std::string render_template(std::string_view tmpl,
                            const std::map<std::string, std::string, std::less<>>& values);

}  // namespace shinka

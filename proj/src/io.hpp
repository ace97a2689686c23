// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "process.hpp"

namespace lse {

/// CSV with header "replicate,index,value"; indices are 1-based.
void paths_write_csv(const PathEnsemble& paths, const std::string& file);

/// Compact binary matrix: 16-byte header (magic "LSE1", u32 rows, u32 cols,
/// u32 reserved), then row-major little-endian float64.
void paths_write_bin(const PathEnsemble& paths, const std::string& file);

/// Reads either format back (detected from the magic).
PathEnsemble paths_read(const std::string& file);

void write_text_file(const std::string& file, const std::string& content);
std::string read_text_file(const std::string& file);

}  // namespace lse

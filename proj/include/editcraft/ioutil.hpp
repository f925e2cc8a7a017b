#pragma once

#include <string>
#include <utility>
#include <vector>

#include "editcraft/errors.hpp"

namespace editcraft {

// Whole-file read; IoError when the file cannot be opened.
std::string read_file(const std::string& path);

// Atomic write: temp file in the same directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

// Newline-delimited SMILES, one per line, optionally followed by a
// tab-separated id column ("SMILES" or "SMILES<TAB>id"). Blank lines and
// '#' comments are skipped. Returns (id, smiles) pairs; lines without an
// id get "m000"-style ids from their position.
std::vector<std::pair<std::string, std::string>> read_smiles_file(
    const std::string& path);

// Same line discipline over an already-loaded string (for tests/stdin).
std::vector<std::pair<std::string, std::string>> parse_smiles_lines(
    const std::string& content);

}  // namespace editcraft

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tdtrnn/deptree.h"

namespace tdtrnn {

// Parses CoNLL-U text into one tree per sentence block. Reads ID, FORM, HEAD
// and DEPREL; skips comments, multiword ranges ("3-4") and empty nodes
// ("5.1"). Tolerates CRLF line endings. Sentence ordinals in errors are
// 1-based.
std::vector<DepTree> parse_conllu(std::string_view text);
std::vector<DepTree> read_conllu(const std::filesystem::path& path);

// Writes the ID, FORM, HEAD and DEPREL columns; the rest are "_". Each
// sentence is followed by a blank line.
std::string to_conllu(const DepTree& tree);
std::string to_conllu(const std::vector<DepTree>& trees);

}  // namespace tdtrnn

#include "tdtrnn/conllu.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tdtrnn/error.h"

namespace tdtrnn {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      cols.push_back(line.substr(start));
      return cols;
    }
    cols.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_index(std::string_view s, std::size_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct SentenceBuilder {
  std::vector<std::string> forms;
  std::vector<std::size_t> heads;
  std::vector<std::string> relations;

  bool empty() const { return forms.empty(); }
  void clear() {
    forms.clear();
    heads.clear();
    relations.clear();
  }
};

}  // namespace

std::vector<DepTree> parse_conllu(std::string_view text) {
  std::vector<DepTree> trees;
  SentenceBuilder current;
  std::size_t ordinal = 1;

  auto flush = [&] {
    if (current.empty()) return;
    trees.push_back(DepTree::from_heads(std::move(current.forms),
                                        std::move(current.heads),
                                        std::move(current.relations), ordinal));
    current.clear();
    ++ordinal;
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      flush();
      if (end == text.size()) break;
      continue;
    }
    if (line.front() == '#') continue;

    const auto cols = split_tabs(line);
    if (cols.size() != 10) {
      throw MalformedTreeError(ordinal, "expected 10 columns, got " +
                                            std::to_string(cols.size()));
    }
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos ||
        id.find('.') != std::string_view::npos) {
      continue;
    }
    std::size_t token = 0;
    if (!parse_index(id, token)) {
      throw MalformedTreeError(ordinal, "bad token id '" + std::string(id) + "'");
    }
    if (token != current.forms.size() + 1) {
      throw MalformedTreeError(ordinal, "non-contiguous ids: expected " +
                                            std::to_string(current.forms.size() + 1) +
                                            ", got " + std::to_string(token));
    }
    std::size_t head = 0;
    if (!parse_index(cols[6], head)) {
      throw MalformedTreeError(ordinal, "missing head for token " +
                                            std::to_string(token));
    }
    current.forms.emplace_back(cols[1]);
    current.heads.push_back(head);
    current.relations.emplace_back(cols[7]);
    if (end == text.size()) break;
  }
  flush();
  return trees;
}

std::vector<DepTree> read_conllu(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open CoNLL-U file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_conllu(buffer.str());
}

std::string to_conllu(const DepTree& tree) {
  std::ostringstream out;
  for (const DepNode& n : tree.nodes()) {
    out << n.token << '\t' << n.form << "\t_\t_\t_\t_\t" << n.head << '\t'
        << n.relation << "\t_\t_\n";
  }
  out << '\n';
  return out.str();
}

std::string to_conllu(const std::vector<DepTree>& trees) {
  std::string out;
  for (const auto& t : trees) out += to_conllu(t);
  return out;
}

}  // namespace tdtrnn

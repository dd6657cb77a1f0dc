#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sodatlas {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One "[section "name"]" header followed by "key = value" lines.
// Indented lines continue the previous value; '#' starts a comment.
struct Stanza {
    std::string section;
    std::string name;
    std::size_t line = 0;
    std::vector<std::pair<std::string, std::string>> entries;

    std::optional<std::string> get(const std::string& key) const;
    std::string require(const std::string& key) const;
    std::vector<std::string> get_all(const std::string& key) const;
};

std::vector<Stanza> parse_stanzas(const std::string& text);
std::string read_file(const std::string& path);
std::string trim_copy(const std::string& s);
// Split on a separator at parenthesis/bracket/brace depth zero.
std::vector<std::string> split_top_level(const std::string& s, char sep);

} // namespace sodatlas

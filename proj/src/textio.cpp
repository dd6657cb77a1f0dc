#include "sodatlas/textio.hpp"

#include <fstream>
#include <sstream>

namespace sodatlas {

std::string trim_copy(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::optional<std::string> Stanza::get(const std::string& key) const
{
    std::optional<std::string> out;
    for (const auto& [k, v] : entries)
        if (k == key)
            out = v;
    return out;
}

std::string Stanza::require(const std::string& key) const
{
    auto v = get(key);
    if (!v)
        throw ParseError("[" + section + " \"" + name + "\"] at line " + std::to_string(line) + ": missing key '" + key + "'");
    return *v;
}

std::vector<std::string> Stanza::get_all(const std::string& key) const
{
    std::vector<std::string> out;
    for (const auto& [k, v] : entries)
        if (k == key)
            out.push_back(v);
    return out;
}

std::vector<Stanza> parse_stanzas(const std::string& text)
{
    std::vector<Stanza> out;
    std::istringstream is(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(is, raw)) {
        ++lineno;
        std::string line = raw;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"')
                quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        if (trim_copy(line).empty())
            continue;
        const bool indented = line[0] == ' ' || line[0] == '\t';
        const std::string body = trim_copy(line);
        if (!indented && body.front() == '[') {
            if (body.back() != ']')
                throw ParseError("line " + std::to_string(lineno) + ": unterminated section header");
            std::string inner = trim_copy(body.substr(1, body.size() - 2));
            Stanza st;
            st.line = lineno;
            const auto q = inner.find('"');
            if (q == std::string::npos) {
                st.section = inner;
            } else {
                const auto q2 = inner.find('"', q + 1);
                if (q2 == std::string::npos)
                    throw ParseError("line " + std::to_string(lineno) + ": unterminated quote in header");
                st.section = trim_copy(inner.substr(0, q));
                st.name = inner.substr(q + 1, q2 - q - 1);
            }
            out.push_back(std::move(st));
            continue;
        }
        if (out.empty())
            throw ParseError("line " + std::to_string(lineno) + ": entry outside of any section");
        if (indented && !out.back().entries.empty()) {
            out.back().entries.back().second += "\n" + body;
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
        out.back().entries.emplace_back(trim_copy(body.substr(0, eq)), trim_copy(body.substr(eq + 1)));
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_top_level(const std::string& s, char sep)
{
    std::vector<std::string> out;
    int depth = 0;
    bool quoted = false;
    std::string cur;
    for (char ch : s) {
        if (ch == '"')
            quoted = !quoted;
        if (!quoted) {
            if (ch == '(' || ch == '[' || ch == '{' || ch == '<')
                ++depth;
            else if (ch == ')' || ch == ']' || ch == '}' || ch == '>')
                --depth;
            else if (ch == sep && depth == 0) {
                out.push_back(trim_copy(cur));
                cur.clear();
                continue;
            }
        }
        cur += ch;
    }
    out.push_back(trim_copy(cur));
    return out;
}

} // namespace sodatlas

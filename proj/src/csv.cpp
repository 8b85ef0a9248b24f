#include "commentox/csv.hpp"

#include <fstream>

#include "commentox/errors.hpp"

namespace ctox {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
        ++i;
    }
    if (quoted) throw ParseError("unterminated quote in CSV line");
    fields.push_back(std::move(current));
    return fields;
}

std::string join_csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        const std::string& f = fields[i];
        bool needs_quote = f.find_first_of(",\"\n\r") != std::string::npos ||
                           (!f.empty() && (f.front() == ' ' || f.back() == ' '));
        if (needs_quote) {
            out.push_back('"');
            for (char c : f) {
                if (c == '"') out.push_back('"');
                out.push_back(c);
            }
            out.push_back('"');
        } else {
            out += f;
        }
    }
    return out;
}

void for_each_csv_row(
    const std::string& path, const std::vector<std::string>& expected_header,
    const std::function<void(size_t, const std::vector<std::string>&)>& row_fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");

    std::string line;
    size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        try {
            fields = split_csv_line(line);
        } catch (const ParseError& e) {
            throw ParseError(path, lineno, e.reason());
        }
        if (!saw_header) {
            if (fields != expected_header) {
                std::string want = join_csv_line(expected_header);
                throw ParseError(path, lineno, "expected header '" + want + "'");
            }
            saw_header = true;
            continue;
        }
        if (fields.size() != expected_header.size())
            throw ParseError(path, lineno,
                             "expected " + std::to_string(expected_header.size()) +
                                 " fields, got " + std::to_string(fields.size()));
        row_fn(lineno, fields);
    }
    if (!saw_header) throw ParseError(path, 0, "missing header row");
}

}  // namespace ctox

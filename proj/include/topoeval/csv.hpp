#pragma once

#include <cstddef>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>
#include <vector>

#include "topoeval/error.hpp"

namespace topoeval::csv {

struct Row {
    std::vector<std::string> fields;
    std::size_t line = 0;  // 1-based line where the record started
};

/// RFC 4180 reader: quoted fields, escaped quotes, embedded newlines and
/// commas, CRLF or LF endings. Blank records are skipped; a leading UTF-8
/// BOM is stripped. `source` labels error messages.
inline std::vector<Row> parse(std::istream& in, const std::string& source) {
    std::vector<Row> rows;
    std::vector<std::string> fields;
    std::string field;
    std::size_t line = 1;
    std::size_t record_line = 1;
    bool in_quotes = false;
    bool field_started = false;
    bool record_started = false;

    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    if (content.size() >= 3 && content[0] == '\xef' && content[1] == '\xbb' &&
        content[2] == '\xbf') {
        content.erase(0, 3);
    }

    auto end_field = [&] {
        fields.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        bool blank = fields.size() == 1 && fields[0].empty();
        if (!blank) rows.push_back(Row{fields, record_line});
        fields.clear();
        record_started = false;
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        char c = content[i];
        if (!record_started) {
            record_started = true;
            record_line = line;
        }
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
        } else if (c == '"' && !field_started && field.empty()) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') {
            end_record();
            ++line;
            ++i;
        } else if (c == '\n') {
            end_record();
            ++line;
        } else {
            field_started = true;
            field += c;
        }
    }
    if (in_quotes) fail_at(source, record_line, "unterminated quoted field");
    if (record_started) end_record();
    return rows;
}

inline std::string escape(const std::string& field) {
    bool needs_quotes = false;
    for (char c : field) {
        if (c == ',' || c == '"' || c == '\n' || c == '\r') {
            needs_quotes = true;
            break;
        }
    }
    if (!needs_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << escape(fields[i]);
    }
    out << '\n';
}

}  // namespace topoeval::csv

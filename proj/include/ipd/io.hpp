#ifndef IPD_IO_HPP
#define IPD_IO_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ipd/dataset.hpp"
#include "ipd/error.hpp"

namespace ipd {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

// Falls back to whitespace splitting for rows without the separator, so the
// tab/space separated files common for 2-D benchmark sets also load.
inline std::vector<std::string_view> split_row(std::string_view line, char sep) {
    if (line.find(sep) != std::string_view::npos) {
        return split_fields(line, sep);
    }
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

inline bool parse_double(std::string_view field, double& value) {
    if (field.empty()) {
        return false;
    }
    if (field.front() == '+') {
        field.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    return ec == std::errc{} && ptr == field.data() + field.size() && std::isfinite(value);
}

}  // namespace detail

struct CsvOptions {
    // Treat the final column as integer ground-truth labels.
    bool label_column = false;
    char separator = ',';
};

/**
 * Reads a numeric CSV. A first row that does not parse as numbers is taken as
 * a header. Blank lines are skipped. Row numbers in errors are 1-based file lines.
 */
inline Dataset read_csv(std::istream& in, const CsvOptions& opts = {}, std::string name = {}) {
    std::vector<double> coords;
    std::vector<Label> labels;
    std::size_t width = 0;
    std::size_t line_no = 0;
    bool first_content_line = true;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = detail::trim(line);
        if (view.empty()) {
            continue;
        }
        const auto fields = detail::split_row(view, opts.separator);
        std::vector<double> values(fields.size());
        bool numeric = true;
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (!detail::parse_double(fields[k], values[k])) {
                numeric = false;
                break;
            }
        }
        if (first_content_line) {
            first_content_line = false;
            if (!numeric) {
                continue;  // header
            }
        }
        if (!numeric) {
            throw ParseError(line_no, "non-numeric field in '" + std::string(view) + "'");
        }
        if (width == 0) {
            width = fields.size();
            if (opts.label_column && width < 2) {
                throw ParseError(line_no, "label column requested but row has a single column");
            }
        } else if (fields.size() != width) {
            throw InputError("ragged CSV: row " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " + std::to_string(width));
        }
        const std::size_t ncoord = opts.label_column ? width - 1 : width;
        coords.insert(coords.end(), values.begin(), values.begin() + static_cast<std::ptrdiff_t>(ncoord));
        if (opts.label_column) {
            const double lv = values.back();
            if (lv != std::floor(lv)) {
                throw ParseError(line_no, "label is not an integer");
            }
            labels.push_back(static_cast<Label>(lv));
        }
    }
    if (width == 0) {
        throw InputError("CSV contains no data rows");
    }
    const std::size_t dim = opts.label_column ? width - 1 : width;
    if (opts.label_column) {
        return Dataset(dim, std::move(coords), std::move(labels), std::move(name));
    }
    return Dataset(dim, std::move(coords), std::nullopt, std::move(name));
}

inline Dataset load_csv(const std::filesystem::path& path, const CsvOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    return read_csv(in, opts, path.stem().string());
}

inline void write_csv(std::ostream& out, const Dataset& data, bool with_labels = true) {
    out.precision(17);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto p = data.point(i);
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (k > 0) {
                out << ',';
            }
            out << p[k];
        }
        if (with_labels && data.has_labels()) {
            out << ',' << data.labels()[i];
        }
        out << '\n';
    }
}

/// One integer label per line, with a "label" header.
inline void write_labels(std::ostream& out, std::span<const Label> labels) {
    out << "label\n";
    for (Label l : labels) {
        out << l << '\n';
    }
}

inline std::vector<Label> read_labels(std::istream& in) {
    std::vector<Label> out;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view view = detail::trim(line);
        if (view.empty()) {
            continue;
        }
        // Use the last field so "point_id,label" files also work.
        const auto fields = detail::split_row(view, ',');
        double v = 0.0;
        const bool ok = detail::parse_double(fields.back(), v) && v == std::floor(v);
        if (first) {
            first = false;
            if (!ok) {
                continue;
            }
        }
        if (!ok) {
            throw ParseError(line_no, "label is not an integer");
        }
        out.push_back(static_cast<Label>(v));
    }
    return out;
}

inline std::vector<Label> load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    return read_labels(in);
}

}  // namespace ipd

#endif  // IPD_IO_HPP

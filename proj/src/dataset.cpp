#include "wam/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "wam/errors.hpp"

namespace wam {

bool Dataset::has_column(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return true;
    return false;
}

const Column& Dataset::column(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return c;
    throw DataError("no such column: " + name);
}

std::vector<std::string> Dataset::column_names() const {
    std::vector<std::string> out;
    out.reserve(columns.size());
    for (const auto& c : columns) out.push_back(c.name);
    return out;
}

namespace {

// RFC-4180-ish field splitting: quoted fields may contain the separator,
// doubled quotes escape a quote.
std::vector<std::string> split_csv_line(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == sep) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_number(const std::string& s, double& out) {
    const char* p = s.c_str();
    char* end = nullptr;
    out = std::strtod(p, &end);
    if (end == p) return false;
    while (*end && std::isspace(static_cast<unsigned char>(*end))) ++end;
    return *end == '\0' && std::isfinite(out);
}

}  // namespace

Dataset load_csv(const std::string& path, const SchemaConfig& schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string> header = split_csv_line(line, schema.separator);
    for (auto& h : header) h = trim(h);
    const std::size_t ncol = header.size();

    std::vector<bool> used(ncol, schema.used_columns.empty());
    for (const auto& name : schema.used_columns) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("schema column not in header: " + name);
        used[static_cast<std::size_t>(it - header.begin())] = true;
    }

    std::vector<std::vector<std::string>> cells(ncol);
    std::size_t dropped = 0;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_line(line, schema.separator);
        if (fields.size() != ncol)
            throw DataError("line " + std::to_string(lineno) + ": expected " +
                            std::to_string(ncol) + " fields, got " +
                            std::to_string(fields.size()));
        bool missing = false;
        for (std::size_t c = 0; c < ncol; ++c)
            if (used[c] && trim(fields[c]).empty()) missing = true;
        if (missing) {
            ++dropped;
            continue;
        }
        for (std::size_t c = 0; c < ncol; ++c) cells[c].push_back(trim(fields[c]));
    }
    const std::size_t nrow = cells.empty() ? 0 : cells[0].size();
    if (nrow == 0) throw DataError("no data rows retained from " + path);

    Dataset ds;
    ds.n_rows = nrow;
    ds.dropped_rows = dropped;
    ds.columns.resize(ncol);
    for (std::size_t c = 0; c < ncol; ++c) {
        Column& col = ds.columns[c];
        col.name = header[c];
        col.is_numeric = true;
        double v;
        for (const auto& s : cells[c]) {
            if (!s.empty() && !parse_number(s, v)) {
                col.is_numeric = false;
                break;
            }
        }
        if (col.is_numeric) {
            col.values.reserve(nrow);
            for (const auto& s : cells[c]) {
                parse_number(s, v);
                col.values.push_back(v);
            }
        } else {
            std::unordered_map<std::string, int> codebook;
            col.codes.reserve(nrow);
            for (const auto& s : cells[c]) {
                auto it = codebook.find(s);
                if (it == codebook.end()) {
                    int code = static_cast<int>(col.levels.size());
                    codebook.emplace(s, code);
                    col.levels.push_back(s);
                    col.codes.push_back(code);
                } else {
                    col.codes.push_back(it->second);
                }
            }
        }
    }
    return ds;
}

std::vector<std::size_t> GroupIndex::sizes() const {
    std::vector<std::size_t> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.size());
    return out;
}

int GroupIndex::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    throw DataError("unknown group label: " + label);
}

std::vector<double> equal_width_edges(double lo, double hi, int bins) {
    std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b <= bins; ++b) edges[b] = lo + width * b;
    edges[0] = lo;
    edges[bins] = hi;
    return edges;
}

std::string interval_label(double lo, double hi) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "(%.3g,%.3g]", lo, hi);
    return buf;
}

GroupIndex scalarize_sensitive(const Dataset& ds,
                               const std::vector<std::string>& sensitive_cols,
                               int bins, std::size_t min_group_size) {
    if (sensitive_cols.empty()) throw ConfigError("no sensitive columns given");

    // Per-row label fragment for each sensitive column.
    std::vector<std::vector<std::string>> frags(sensitive_cols.size());
    for (std::size_t c = 0; c < sensitive_cols.size(); ++c) {
        const Column& col = ds.column(sensitive_cols[c]);
        auto& f = frags[c];
        f.resize(ds.n_rows);
        if (col.is_numeric) {
            if (bins <= 0)
                throw ConfigError("numeric sensitive column '" + col.name +
                                  "' requires --bins");
            double lo = col.values[0], hi = col.values[0];
            for (double v : col.values) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (lo == hi) {
                for (auto& s : f) s = interval_label(lo, hi);
            } else {
                auto edges = equal_width_edges(lo, hi, bins);
                for (std::size_t r = 0; r < ds.n_rows; ++r) {
                    double v = col.values[r];
                    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
                    if (b >= bins) b = bins - 1;
                    // Intervals are (lo,hi]; a value on the left edge belongs
                    // to the interval below, except the global minimum.
                    if (b > 0 && v <= edges[b]) --b;
                    f[r] = interval_label(edges[b], edges[b + 1]);
                }
            }
        } else {
            for (std::size_t r = 0; r < ds.n_rows; ++r) f[r] = col.decode(r);
        }
    }

    GroupIndex gi;
    std::unordered_map<std::string, int> seen;
    for (std::size_t r = 0; r < ds.n_rows; ++r) {
        std::string label = frags[0][r];
        for (std::size_t c = 1; c < sensitive_cols.size(); ++c) label += frags[c][r];
        auto it = seen.find(label);
        int g;
        if (it == seen.end()) {
            g = static_cast<int>(gi.labels.size());
            seen.emplace(label, g);
            gi.labels.push_back(label);
            gi.rows.emplace_back();
        } else {
            g = it->second;
        }
        gi.rows[g].push_back(static_cast<int>(r));
    }

    std::string small;
    for (std::size_t g = 0; g < gi.size(); ++g)
        if (gi.rows[g].size() < min_group_size)
            small += (small.empty() ? "" : ", ") + gi.labels[g] + " (n=" +
                     std::to_string(gi.rows[g].size()) + ")";
    if (!small.empty())
        throw DataError("groups below min_group_size=" +
                        std::to_string(min_group_size) + ": " + small);
    return gi;
}

}  // namespace wam

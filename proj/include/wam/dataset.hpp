#ifndef WAM_DATASET_HPP
#define WAM_DATASET_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace wam {

struct SchemaConfig {
    char separator = ',';
    // Columns participating in the audit; rows missing a value in any of
    // these are dropped. Empty means all columns are used.
    std::vector<std::string> used_columns;
};

struct Column {
    std::string name;
    bool is_numeric = true;
    std::vector<double> values;        // numeric storage
    std::vector<int> codes;            // categorical storage, index into levels
    std::vector<std::string> levels;   // level labels, first-appearance order

    std::size_t size() const { return is_numeric ? values.size() : codes.size(); }
    const std::string& decode(std::size_t row) const { return levels[codes[row]]; }
};

struct Dataset {
    std::vector<Column> columns;
    std::size_t n_rows = 0;
    std::size_t dropped_rows = 0;  // rows removed for missing values

    bool has_column(const std::string& name) const;
    const Column& column(const std::string& name) const;  // throws DataError
    std::vector<std::string> column_names() const;
};

Dataset load_csv(const std::string& path, const SchemaConfig& schema = {});

struct GroupIndex {
    std::vector<std::string> labels;       // length s
    std::vector<std::vector<int>> rows;    // disjoint row-id lists, length s
    std::vector<std::size_t> sizes() const;
    std::size_t size() const { return labels.size(); }
    int index_of(const std::string& label) const;  // throws DataError
};

// Partition rows by the (possibly intersectional) sensitive value. Numeric
// sensitive columns require bins > 0 and are cut into equal-width intervals
// over [min, max]; interval labels render as "(lo,hi]". Multiple columns
// produce one group per observed level combination.
GroupIndex scalarize_sensitive(const Dataset& ds,
                               const std::vector<std::string>& sensitive_cols,
                               int bins = 0, std::size_t min_group_size = 20);

// Equal-width cut points for a numeric sensitive column: bins+1 edges from
// min to max. Values equal to min land in the first interval.
std::vector<double> equal_width_edges(double lo, double hi, int bins);
std::string interval_label(double lo, double hi);

}  // namespace wam

#endif

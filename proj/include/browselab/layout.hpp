#pragma once

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace browselab {

/// The four result-page layouts. A layout is a list of row widths read
/// top-to-bottom; ranks run row-major, left-to-right within a row.
enum class LayoutKind {
    LinearVertical,    ///< multi-row, single-column (classic ranked list)
    LinearHorizontal,  ///< single-row, multi-column (carousel)
    WrappedGrid,       ///< one sequence wrapped across equal-width rows
    MultiList,         ///< one row per list/genre; ragged widths allowed
};

inline const char* to_string(LayoutKind kind) {
    switch (kind) {
        case LayoutKind::LinearVertical: return "linear_vertical";
        case LayoutKind::LinearHorizontal: return "linear_horizontal";
        case LayoutKind::WrappedGrid: return "wrapped_grid";
        case LayoutKind::MultiList: return "multi_list";
    }
    return "?";
}

/// 1-based cell coordinates: row 1 is the top row, column 1 the leftmost cell.
struct CellAddress {
    int row = 1;
    int col = 1;

    friend bool operator==(const CellAddress&, const CellAddress&) = default;
};

/// Geometry of a result page. Immutable after construction; construction
/// enforces the per-kind shape rules.
class LayoutSpec {
public:
    LayoutSpec(LayoutKind kind, std::vector<int> row_lengths)
        : kind_(kind), row_lengths_(std::move(row_lengths)) {
        if (row_lengths_.empty())
            throw std::invalid_argument("layout: at least one row required");
        for (int len : row_lengths_) {
            if (len < 1)
                throw std::invalid_argument("layout: row lengths must be positive");
        }
        switch (kind_) {
            case LayoutKind::LinearVertical:
                for (int len : row_lengths_) {
                    if (len != 1)
                        throw std::invalid_argument(
                            "linear_vertical layout requires single-column rows");
                }
                break;
            case LayoutKind::LinearHorizontal:
                if (row_lengths_.size() != 1)
                    throw std::invalid_argument(
                        "linear_horizontal layout requires exactly one row");
                break;
            case LayoutKind::WrappedGrid:
                for (std::size_t r = 0; r + 1 < row_lengths_.size(); ++r) {
                    if (row_lengths_[r] != row_lengths_[0])
                        throw std::invalid_argument(
                            "wrapped_grid rows must share one width (only the final "
                            "row may be shorter)");
                }
                if (row_lengths_.size() > 1 && row_lengths_.back() > row_lengths_[0])
                    throw std::invalid_argument(
                        "wrapped_grid final row may not be wider than the others");
                break;
            case LayoutKind::MultiList:
                break;  // any positive widths
        }
        offsets_.reserve(row_lengths_.size() + 1);
        offsets_.push_back(0);
        for (int len : row_lengths_) offsets_.push_back(offsets_.back() + len);
    }

    static LayoutSpec linear_vertical(int n_rows) {
        return LayoutSpec(LayoutKind::LinearVertical,
                          std::vector<int>(check_count(n_rows), 1));
    }
    static LayoutSpec linear_horizontal(int n_cols) {
        return LayoutSpec(LayoutKind::LinearHorizontal, {check_count(n_cols)});
    }

    /// rows x cols grid;`total`, when given, shortens the final row so the
    /// cell count is exactly `total`.
    static LayoutSpec wrapped_grid(int rows, int cols,
                                   std::optional<int> total = std::nullopt) {
        return LayoutSpec(LayoutKind::WrappedGrid, expand(rows, cols, total));
    }
    static LayoutSpec multi_list(std::vector<int> row_lengths) {
        return LayoutSpec(LayoutKind::MultiList, std::move(row_lengths));
    }

    /// Generic rows/cols expansion used by the config schema: `cols` repeated
    /// `rows` times, final row shortened to fit an optional `total`.
    static std::vector<int> expand(int rows, int cols, std::optional<int> total) {
        check_count(rows);
        check_count(cols);
        std::vector<int> lengths(static_cast<std::size_t>(rows), cols);
        if (total) {
            const int full = rows * cols;
            if (*total < 1 || *total > full || *total <= (rows - 1) * cols)
                throw std::invalid_argument(
                    "layout: total=" + std::to_string(*total) +
                    " does not fit a " + std::to_string(rows) + "x" +
                    std::to_string(cols) + " page");
            lengths.back() = *total - (rows - 1) * cols;
        }
        return lengths;
    }

    LayoutKind kind() const { return kind_; }
    const std::vector<int>& row_lengths() const { return row_lengths_; }
    int rows() const { return static_cast<int>(row_lengths_.size()); }
    int total_items() const { return offsets_.back(); }

    /// Width of a 1-based row.
    int row_length(int row) const {
        if (row < 1 || row > rows())
            throw std::out_of_range("layout: row " + std::to_string(row) +
                                    " outside [1," + std::to_string(rows()) + "]");
        return row_lengths_[static_cast<std::size_t>(row - 1)];
    }

    /// First rank of a 1-based row.
    int row_start_rank(int row) const {
        if (row < 1 || row > rows())
            throw std::out_of_range("layout: row " + std::to_string(row) +
                                    " outside [1," + std::to_string(rows()) + "]");
        return offsets_[static_cast<std::size_t>(row - 1)] + 1;
    }

    friend bool operator==(const LayoutSpec& a, const LayoutSpec& b) {
        return a.kind_ == b.kind_ && a.row_lengths_ == b.row_lengths_;
    }

private:
    static int check_count(int n) {
        if (n < 1) throw std::invalid_argument("layout: counts must be positive");
        return n;
    }

    LayoutKind kind_;
    std::vector<int> row_lengths_;
    std::vector<int> offsets_;  // prefix sums, offsets_[r] = items before row r+1
};

/// Row-major rank -> (row, col), both 1-based.
inline CellAddress rank_to_cell(int rank, const LayoutSpec& layout) {
    const int n = layout.total_items();
    if (rank < 1 || rank > n)
        throw std::out_of_range("rank " + std::to_string(rank) +
                                " outside [1," + std::to_string(n) + "]");
    int row = 1;
    int remaining = rank;
    while (remaining > layout.row_length(row)) {
        remaining -= layout.row_length(row);
        ++row;
    }
    return CellAddress{row, remaining};
}

/// Inverse of rank_to_cell.
inline int cell_to_rank(CellAddress cell, const LayoutSpec& layout) {
    if (cell.row < 1 || cell.row > layout.rows() || cell.col < 1 ||
        cell.col > layout.row_length(cell.row))
        throw std::out_of_range("cell (" + std::to_string(cell.row) + "," +
                                std::to_string(cell.col) + ") invalid for layout");
    return layout.row_start_rank(cell.row) + cell.col - 1;
}

}  // namespace browselab

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bismarck/example.hpp"

namespace bismarck {

enum class DataFormat : std::uint8_t { DenseCsv, SparseIndexed, MatrixTriples };

const char* format_name(DataFormat f);
std::optional<DataFormat> format_from_name(const std::string& name);

/// Guess from a file extension: .csv -> dense, .sparse/.svm -> sparse,
/// .triples/.mtx -> matrix. Empty optional when unknown.
std::optional<DataFormat> format_from_path(const std::string& path);

struct DatasetHeader {
    DataFormat format = DataFormat::DenseCsv;
    std::uint64_t count = 0;      // N
    std::uint32_t dim = 0;        // d (vector formats)
    std::uint32_t rows = 0;       // m (matrix)
    std::uint32_t cols = 0;       // n (matrix)
    std::uint64_t checksum = 0;   // FNV-1a over the source bytes
};

// Immutable, columnar tuple store. Stored order is exactly ingestion order;
// this is what the Clustered ordering strategy iterates. Safe to share
// read-only across any number of workers.
class Dataset {
public:
    explicit Dataset(DataFormat format) { header_.format = format; }

    void append(const Example& e);
    /// Seals the dataset: infers dimensions from max indices (unless
    /// declared), computes per-row/per-column cell counts for matrix data.
    void finalize();
    /// Pins declared dimensions; ingestion fails if data exceeds them.
    void declare_dim(std::uint32_t d);
    void declare_shape(std::uint32_t rows, std::uint32_t cols);

    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }
    DataFormat format() const { return header_.format; }
    const DatasetHeader& header() const { return header_; }
    std::uint32_t dim() const { return header_.dim; }
    std::uint32_t rows() const { return header_.rows; }
    std::uint32_t cols() const { return header_.cols; }

    ExampleView view(std::size_t i) const;
    Example owned(std::size_t i) const;

    const std::vector<std::uint32_t>& row_cells() const { return row_cells_; }
    const std::vector<std::uint32_t>& col_cells() const { return col_cells_; }

    /// One line per example, in the same text format the parsers accept.
    /// Values are written in shortest round-trip form.
    std::string serialize_example(std::size_t i) const;
    void write_file(const std::string& path) const;

    /// New dataset holding the same examples in permuted order
    /// (dst example i = src example perm[i]).
    Dataset permuted(const std::vector<std::uint32_t>& perm) const;

    void set_checksum(std::uint64_t c) { header_.checksum = c; }

private:
    DatasetHeader header_;
    bool finalized_ = false;
    bool declared_dim_ = false;
    bool declared_shape_ = false;

    std::vector<double> labels_;
    // Dense / sparse payloads, one span per example via offsets_.
    std::vector<double> values_;
    std::vector<std::uint32_t> indices_;  // sparse only
    std::vector<std::uint64_t> offsets_;  // size N+1
    // Matrix cells.
    std::vector<std::uint32_t> cell_rows_, cell_cols_;
    std::vector<std::uint32_t> row_cells_, col_cells_;  // observed-cell counts
};

// Line parsers. `line_no` is 1-based and only used in error messages.
// `classification` additionally validates labels in {-1, +1}.
Example parse_dense(const std::string& line, std::size_t line_no = 0,
                    bool classification = false);
Example parse_sparse(const std::string& line, std::size_t line_no = 0,
                     bool classification = false);
Example parse_triple(const std::string& line, std::size_t line_no = 0);

std::string serialize_example(const Example& e);

/// Loads a whole file. Lines starting with '#' may declare dimensions
/// ("# d=123" or "# m=12 n=34") and are otherwise ignored.
Dataset load_dataset(const std::string& path, DataFormat format, bool classification = false);

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace bismarck
